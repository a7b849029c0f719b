"""Gaussian-kernel AUC comparator with Silverman bandwidths.

The smoothed AUC replaces each pairwise indicator ``1{x < y}`` with
``Phi((y - x) / sqrt(h_x^2 + h_y^2))``, which is the area under the ROC curve
built from the two Gaussian kernel CDF estimates.

The interval is a normal approximation using the stratified projection
variance applied to the smoothed comparisons. It is a reimplementation for
comparison purposes, not a replication of any published kernel interval.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .el import ConfidenceInterval, DegenerateSampleError, _s_components
from .populations import InvalidConfigurationError
from .sampling import RankedSetSample


class DegenerateBandwidthError(DegenerateSampleError):
    pass


def silverman_bandwidth(values) -> float:
    """``0.9 * min(s, iqr / 1.34) * N ** -0.2``.

    ``s`` is the sample standard deviation (``ddof=1``) and the quartiles use
    linear interpolation between order statistics (position ``(N - 1) p + 1``).
    """
    values = np.asarray(values, dtype=float).ravel()
    if values.size < 2:
        raise DegenerateBandwidthError("bandwidth needs at least two values")
    s = values.std(ddof=1)
    q25, q75 = np.quantile(values, [0.25, 0.75], method="linear")
    spread = min(s, (q75 - q25) / 1.34)
    if not spread > 0.0:
        # a zero IQR with positive s still yields a usable scale
        spread = s
    if not spread > 0.0:
        raise DegenerateBandwidthError("values have zero dispersion")
    return 0.9 * spread * values.size ** -0.2


@dataclass(frozen=True)
class KernelConfig:
    """Bandwidths for the two groups; ``None`` means Silverman's rule."""

    bandwidth_x: float | None = None
    bandwidth_y: float | None = None

    def __post_init__(self):
        for h in (self.bandwidth_x, self.bandwidth_y):
            if h is not None and not h > 0.0:
                raise InvalidConfigurationError(f"bandwidths must be positive, got {h}")

    @property
    def rule(self) -> str:
        return "fixed" if self.bandwidth_x is not None and self.bandwidth_y is not None else "silverman"

    def resolve(self, x_sample: RankedSetSample, y_sample: RankedSetSample):
        hx = self.bandwidth_x if self.bandwidth_x is not None else silverman_bandwidth(x_sample.values)
        hy = self.bandwidth_y if self.bandwidth_y is not None else silverman_bandwidth(y_sample.values)
        return hx, hy


def _smoothed_pairs(x_sample, y_sample, config):
    hx, hy = (config or KernelConfig()).resolve(x_sample, y_sample)
    h = np.hypot(hx, hy)
    return ndtr((y_sample.values[None, :] - x_sample.values[:, None]) / h)


def kernel_auc(x_sample: RankedSetSample, y_sample: RankedSetSample, config: KernelConfig | None = None) -> float:
    psi = _smoothed_pairs(x_sample, y_sample, config)
    return float(x_sample.weights @ psi @ y_sample.weights)


def kernel_ci(
    x_sample: RankedSetSample,
    y_sample: RankedSetSample,
    level: float = 0.95,
    config: KernelConfig | None = None,
) -> ConfidenceInterval:
    """``delta_ker +/- z * SE`` with ``SE^2 = S^2 (n_x + n_y) / (n_x n_y)``, clipped to [0, 1].

    When the smoothed comparisons have no spread (well separated groups with
    small bandwidths) the interval collapses to the point and ``boundary`` is
    set.
    """
    if not 0.0 < level < 1.0:
        raise InvalidConfigurationError(f"level must lie in (0, 1), got {level}")
    psi = _smoothed_pairs(x_sample, y_sample, config)
    v10 = psi @ y_sample.weights
    v01 = x_sample.weights @ psi
    point = float(x_sample.weights @ v10)
    *_, s2 = _s_components(v10, x_sample, v01, y_sample)
    if not s2 > 0.0:
        return ConfidenceInterval(point, point, point, level, method="brss-ker", boundary=True)
    nx, ny = x_sample.size, y_sample.size
    se = np.sqrt(s2 * (nx + ny) / (nx * ny))
    half = float(ndtri(0.5 + level / 2.0)) * se
    lower, upper = point - half, point + half
    return ConfidenceInterval(
        lower=max(lower, 0.0),
        upper=min(upper, 1.0),
        point=point,
        level=level,
        method="brss-ker",
        clipped_lower=lower < 0.0,
        clipped_upper=upper > 1.0,
    )
