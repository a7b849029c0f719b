"""Mann-Whitney AUC estimators and placement values for ranked set samples.

Each rank stratum receives total weight ``1 / set_size`` regardless of how many
units it holds, so one code path serves simple random samples (set size 1),
balanced and unbalanced ranked set samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .sampling import RankedSetSample


class Kernel(str, Enum):
    """Pairwise comparison ``phi(x, y)``.

    ``STRICT`` scores 1 when ``x < y`` and 0 otherwise. ``TIE_HALF`` scores
    ties as one half.
    """

    STRICT = "strict"
    TIE_HALF = "tie-half"


def _stratified_counts(sample: RankedSetSample, t: np.ndarray):
    """Per-stratum (below, tied) counts of ``sample`` relative to points ``t``."""
    below = np.empty((sample.set_size, t.size))
    tied = np.empty((sample.set_size, t.size))
    for r, stratum in enumerate(sample.strata):
        srt = np.sort(stratum)
        left = np.searchsorted(srt, t, side="left")
        right = np.searchsorted(srt, t, side="right")
        below[r] = left
        tied[r] = right - left
    return below, tied


def weighted_below(sample: RankedSetSample, t, kernel=Kernel.STRICT) -> np.ndarray:
    """Stratum-weighted fraction of ``sample`` strictly below each point of ``t``.

    With the tie-half kernel, units equal to ``t`` count one half.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    below, tied = _stratified_counts(sample, t)
    if Kernel(kernel) is Kernel.TIE_HALF:
        below = below + 0.5 * tied
    per_unit = 1.0 / (sample.set_size * sample.counts)
    return per_unit @ below


def weighted_above(sample: RankedSetSample, t, kernel=Kernel.STRICT) -> np.ndarray:
    """Stratum-weighted fraction of ``sample`` strictly above each point of ``t``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    below, tied = _stratified_counts(sample, t)
    above = sample.counts[:, None] - below - tied
    if Kernel(kernel) is Kernel.TIE_HALF:
        above = above + 0.5 * tied
    per_unit = 1.0 / (sample.set_size * sample.counts)
    return per_unit @ above


def ecdf_rss(x_sample: RankedSetSample, t, kernel=Kernel.STRICT):
    """Empirical CDF of a ranked set sample evaluated at ``t``.

    Returns ``sum_i sum_j phi(X_ij, t) / (m * k_i)``; a scalar for scalar ``t``.
    """
    out = weighted_below(x_sample, t, kernel)
    return float(out[0]) if np.ndim(t) == 0 else out


def placement_complements(x_sample, y_sample, kernel=Kernel.STRICT) -> np.ndarray:
    """``1 - U_rs = F_hat(Y_rs)`` for every diseased unit, in sample order."""
    return weighted_below(x_sample, y_sample.values, kernel)


def dual_placement_complements(x_sample, y_sample, kernel=Kernel.STRICT) -> np.ndarray:
    """``1 - W_ij = 1 - G_hat(X_ij)`` for every non-diseased unit, in sample order."""
    return weighted_above(y_sample, x_sample.values, kernel)


def mw_auc(x_sample: RankedSetSample, y_sample: RankedSetSample, kernel=Kernel.STRICT) -> float:
    """Stratum-weighted Mann-Whitney estimate of ``P(X < Y)``."""
    return float(y_sample.weights @ placement_complements(x_sample, y_sample, kernel))


def mw_auc_dual(x_sample: RankedSetSample, y_sample: RankedSetSample, kernel=Kernel.STRICT) -> float:
    """Mann-Whitney estimate with the diseased distribution as reference."""
    return float(x_sample.weights @ dual_placement_complements(x_sample, y_sample, kernel))


@dataclass(frozen=True)
class PlacementResiduals:
    """Residuals ``z_rs = 1 - U_rs - delta0`` with their weights ``1 / (n l_r)``."""

    residuals: np.ndarray
    weights: np.ndarray
    counts: np.ndarray
    stratum: np.ndarray
    delta0: float

    @property
    def weighted_mean(self) -> float:
        return float(self.weights @ self.residuals)


def placement_residuals(x_sample, y_sample, delta0: float, kernel=Kernel.STRICT) -> PlacementResiduals:
    a = placement_complements(x_sample, y_sample, kernel)
    return PlacementResiduals(
        residuals=a - delta0,
        weights=y_sample.weights,
        counts=y_sample.counts,
        stratum=y_sample.stratum,
        delta0=float(delta0),
    )


def dual_placement_residuals(x_sample, y_sample, delta0: float, kernel=Kernel.STRICT) -> PlacementResiduals:
    b = dual_placement_complements(x_sample, y_sample, kernel)
    return PlacementResiduals(
        residuals=b - delta0,
        weights=x_sample.weights,
        counts=x_sample.counts,
        stratum=x_sample.stratum,
        delta0=float(delta0),
    )
