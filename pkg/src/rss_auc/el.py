"""Profile empirical likelihood for the AUC from ranked set samples.

For a candidate AUC ``delta0`` the diseased units carry residuals
``z_rs = F_hat(Y_rs) - delta0``. The log empirical likelihood ratio is

    l(delta0) = 2 * sum_rs log(1 + lambda * c_rs * z_rs)

where ``lambda`` solves ``sum_rs c_rs z_rs / (1 + lambda c_rs z_rs) = 0``.
The balanced form uses ``c_rs = 1``; the unbalanced form weights each unit by
its stratum size, ``c_rs = 1 / (n l_r)``. ``r(delta0) * l(delta0)`` is
asymptotically chi-square with one degree of freedom, and the interval is
``{delta : r(delta_hat) l(delta) <= chi2_{1, 1-alpha}}``.

The dual variant swaps the roles of the groups and profiles over the
non-diseased units with residuals ``1 - G_hat(X_ij) - delta0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import brentq
from scipy.special import chdtri

from .estimators import (
    Kernel,
    PlacementResiduals,
    dual_placement_complements,
    placement_complements,
)
from .populations import InvalidConfigurationError
from .sampling import RankedSetSample

LAMBDA_TOL = 1e-10
DELTA_TOL = 1e-8
CLIP = 1e-8
# stands in for l = +inf outside the convex hull during root bracketing
_HULL_PENALTY = 1e12


class HullViolationError(ValueError):
    """``delta0`` lies outside the open convex hull of the placement values."""


class DegenerateSampleError(ArithmeticError):
    """The variance estimate is zero or cannot be formed."""


class Form(str, Enum):
    BRSS = "brss"
    URSS = "urss"


def chi2_threshold(level: float) -> float:
    """Upper ``level`` quantile of the chi-square distribution with one df."""
    if not 0.0 < level < 1.0:
        raise InvalidConfigurationError(f"level must lie in (0, 1), got {level}")
    return float(chdtri(1.0, 1.0 - level))


def _resolve_form(form, *samples: RankedSetSample) -> Form:
    balanced = all(s.is_balanced for s in samples)
    if form is None:
        return Form.BRSS if balanced else Form.URSS
    form = Form(form)
    if form is Form.BRSS and not balanced:
        raise InvalidConfigurationError("balanced form requested for an unbalanced sample")
    return form


def _effective_multiplier(stratum, counts, form: Form):
    """Per-unit multiplier applied to residuals before solving for lambda.

    The unbalanced multiplier ``1 / (n l_r)`` is rescaled by the total count
    ``N`` to ``N / (n l_r)``. This leaves the log ratio unchanged (lambda
    absorbs the constant) and equals exactly one for equal counts.
    """
    if form is Form.BRSS:
        return None
    counts = np.asarray(counts)
    total = int(counts.sum())
    return total / (counts.size * counts[stratum])


def _solve(z: np.ndarray, tol: float = LAMBDA_TOL, start: float = 0.0):
    """Root of ``sum z / (1 + lam z)`` by safeguarded Newton.

    Returns ``(lam, iterations)``. Requires both signs among ``z``.
    """
    zmax = z.max()
    zmin = z.min()
    if not (zmax > 0.0 and zmin < 0.0):
        if zmax == 0.0 and zmin == 0.0:
            return 0.0, 0
        raise HullViolationError("residuals do not change sign")
    lo = -1.0 / zmax
    hi = -1.0 / zmin
    lam = start if lo < start < hi else 0.0
    scale = tol * np.abs(z).sum()
    for it in range(1, 201):
        q = z / (1.0 + lam * z)
        g = q.sum()
        if abs(g) <= scale:
            return lam, it
        if g > 0.0:
            lo = lam
        else:
            hi = lam
        new = lam + g / (q @ q)
        if not lo < new < hi:
            new = 0.5 * (lo + hi)
        if new == lam:
            return lam, it
        lam = new
    return lam, it


def solve_lambda(residuals: PlacementResiduals, form=Form.BRSS) -> float:
    """Lagrange multiplier for the profile likelihood at ``residuals.delta0``.

    Raises
    ------
    HullViolationError
        If all residuals share one sign, so that no admissible multiplier exists.
    """
    form = Form(form)
    z = np.asarray(residuals.residuals, dtype=float)
    mult = _effective_multiplier(residuals.stratum, residuals.counts, form)
    if mult is not None:
        z = z * mult
    lam, _ = _solve(z)
    if mult is not None:
        lam *= z.size
    return lam


@dataclass(frozen=True)
class ELEvaluation:
    delta0: float
    lambda_: float
    log_ratio: float
    feasible: bool
    iterations: int = 0


@dataclass(frozen=True)
class ScaleFactor:
    r: float
    s2: float
    s10_sq: float
    s01_sq: float
    v10: np.ndarray = field(repr=False)
    v01: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    point: float
    level: float
    scale_at_point: float | None = None
    method: str = "el"
    clipped_lower: bool = False
    clipped_upper: bool = False
    boundary: bool = False
    iterations: int = 0

    @property
    def length(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


class _Profile:
    """Log-EL ratio of one set of placement values as a function of ``delta``."""

    def __init__(self, values, weights, multiplier):
        self.values = values
        self.weights = weights
        self.multiplier = multiplier
        self.lo = float(values.min())
        self.hi = float(values.max())
        self.point = float(weights @ values)
        self.evaluations = 0
        self._last = 0.0

    def evaluate(self, delta: float) -> ELEvaluation:
        self.evaluations += 1
        z = self.values - delta
        if self.multiplier is not None:
            z = z * self.multiplier
        try:
            lam, it = _solve(z, start=self._last)
        except HullViolationError:
            return ELEvaluation(delta, math.nan, math.inf, False)
        self._last = lam
        log_ratio = 2.0 * float(np.log1p(lam * z).sum())
        if self.multiplier is not None:
            lam *= z.size
        return ELEvaluation(delta, lam, max(log_ratio, 0.0), True, it)


def _s_components(v10, x: RankedSetSample, v01, y: RankedSetSample):
    if np.any(x.counts < 2) or np.any(y.counts < 2):
        raise DegenerateSampleError("every rank stratum needs at least two units")
    s10 = _within_strata(v10, x)
    s01 = _within_strata(v01, y)
    nx, ny = x.size, y.size
    s2 = (ny * s10 + nx * s01) / (nx + ny)
    return s10, s01, s2


def _within_strata(v, sample: RankedSetSample) -> float:
    counts = sample.counts
    means = np.bincount(sample.stratum, weights=v, minlength=sample.set_size) / counts
    dev2 = (v - means[sample.stratum]) ** 2
    per_unit = 1.0 / (sample.set_size * (counts[sample.stratum] - 1))
    return float(per_unit @ dev2)


def _variance_parts(x, y, kernel):
    v01 = placement_complements(x, y, kernel)
    v10 = dual_placement_complements(x, y, kernel)
    s10, s01, s2 = _s_components(v10, x, v01, y)
    return v10, v01, s10, s01, s2


def _scale(values, weights, delta0, prefactor, s2):
    if not s2 > 0.0:
        raise DegenerateSampleError("pooled variance S^2 is zero")
    return prefactor * float(weights @ (values - delta0) ** 2) / s2


def el_log_ratio(x_sample, y_sample, delta0: float, form=None, kernel=Kernel.STRICT) -> ELEvaluation:
    """Log empirical likelihood ratio at ``delta0``.

    Outside the convex hull of the placement values the ratio is infinite and
    ``feasible`` is false.
    """
    form = _resolve_form(form, x_sample, y_sample)
    a = placement_complements(x_sample, y_sample, kernel)
    mult = _effective_multiplier(y_sample.stratum, y_sample.counts, form)
    return _Profile(a, y_sample.weights, mult).evaluate(float(delta0))


def el_log_ratio_dual(x_sample, y_sample, delta0: float, form=None, kernel=Kernel.STRICT) -> ELEvaluation:
    form = _resolve_form(form, x_sample, y_sample)
    b = dual_placement_complements(x_sample, y_sample, kernel)
    mult = _effective_multiplier(x_sample.stratum, x_sample.counts, form)
    return _Profile(b, x_sample.weights, mult).evaluate(float(delta0))


def scale_factor(x_sample, y_sample, delta0: float, form=None, kernel=Kernel.STRICT) -> ScaleFactor:
    """Scale ``r(delta0)`` that makes ``r * l`` asymptotically chi-square(1).

    ``r = n_x / (n_x + n_y) * sum_rs (z_rs^2 / (n l_r)) / S^2`` with
    ``S^2 = (n_y S10^2 + n_x S01^2) / (n_x + n_y)``; ``S10^2`` and ``S01^2``
    are within-stratum variances of the projections ``V10(X)`` and ``V01(Y)``.
    For balanced samples ``n_x = mk`` and ``n_y = nl``.

    Raises
    ------
    DegenerateSampleError
        If a stratum holds a single unit or ``S^2`` is zero.
    """
    _resolve_form(form, x_sample, y_sample)
    v10, v01, s10, s01, s2 = _variance_parts(x_sample, y_sample, kernel)
    nx, ny = x_sample.size, y_sample.size
    r = _scale(v01, y_sample.weights, delta0, nx / (nx + ny), s2)
    return ScaleFactor(r, s2, s10, s01, v10, v01)


def scale_factor_dual(x_sample, y_sample, delta0: float, form=None, kernel=Kernel.STRICT) -> ScaleFactor:
    """Scale ``r*`` for the dual profile, ``n_y / (n_x + n_y) * sum (1 - W - d)^2 / (m k_i) / S^2``."""
    _resolve_form(form, x_sample, y_sample)
    v10, v01, s10, s01, s2 = _variance_parts(x_sample, y_sample, kernel)
    nx, ny = x_sample.size, y_sample.size
    r = _scale(v10, x_sample.weights, delta0, ny / (nx + ny), s2)
    return ScaleFactor(r, s2, s10, s01, v10, v01)


def _invert(profile: _Profile, prefactor, s2, level, rescale, method, tol=DELTA_TOL) -> ConfidenceInterval:
    point = profile.point
    if profile.lo == profile.hi:
        return ConfidenceInterval(point, point, point, level, None, method, boundary=True)
    threshold = chi2_threshold(level)
    r_hat = _scale(profile.values, profile.weights, point, prefactor, s2)

    def excess(delta):
        ev = profile.evaluate(delta)
        if not ev.feasible:
            return _HULL_PENALTY
        r = _scale(profile.values, profile.weights, delta, prefactor, s2) if rescale else r_hat
        return min(r * ev.log_ratio, _HULL_PENALTY) - threshold

    def side(upward: bool):
        profile._last = 0.0
        if upward:
            edge, clip_edge, end = profile.hi, 1.0 - CLIP, 1.0
            reaches_clip = edge > clip_edge
        else:
            edge, clip_edge, end = profile.lo, CLIP, 0.0
            reaches_clip = edge < clip_edge
        if reaches_clip:
            if excess(clip_edge) <= 0.0:
                return end, True
            edge = clip_edge
        if (edge - point) * (1 if upward else -1) <= 0.0:
            return point, False
        root = brentq(excess, point, edge, xtol=tol, rtol=4 * np.finfo(float).eps)
        return root, False

    upper, clip_u = side(True)
    lower, clip_l = side(False)
    return ConfidenceInterval(
        lower=float(lower),
        upper=float(upper),
        point=point,
        level=level,
        scale_at_point=r_hat,
        method=method,
        clipped_lower=clip_l,
        clipped_upper=clip_u,
        iterations=profile.evaluations,
    )


def confidence_interval(
    x_sample: RankedSetSample,
    y_sample: RankedSetSample,
    level: float = 0.95,
    form=None,
    kernel=Kernel.STRICT,
    rescale: bool = False,
    tol: float = DELTA_TOL,
) -> ConfidenceInterval:
    """Empirical likelihood confidence interval for the AUC.

    The scale is fixed at ``r(delta_hat)`` unless ``rescale`` is set, in which
    case ``r(delta)`` is recomputed at every candidate. The interval never
    extends past the range of the placement values. When all placement values
    coincide (e.g. complete separation) the interval collapses to the point
    estimate and ``boundary`` is set. ``tol`` is the endpoint tolerance in
    ``delta``.
    """
    form = _resolve_form(form, x_sample, y_sample)
    chi2_threshold(level)
    a = placement_complements(x_sample, y_sample, kernel)
    mult = _effective_multiplier(y_sample.stratum, y_sample.counts, form)
    profile = _Profile(a, y_sample.weights, mult)
    if profile.lo == profile.hi:
        return _invert(profile, None, None, level, rescale, f"{form.value}-el", tol)
    *_, s2 = _variance_parts(x_sample, y_sample, kernel)
    nx, ny = x_sample.size, y_sample.size
    return _invert(profile, nx / (nx + ny), s2, level, rescale, f"{form.value}-el", tol)


def confidence_interval_dual(
    x_sample: RankedSetSample,
    y_sample: RankedSetSample,
    level: float = 0.95,
    form=None,
    kernel=Kernel.STRICT,
    rescale: bool = False,
    tol: float = DELTA_TOL,
) -> ConfidenceInterval:
    """Confidence interval from the profile over non-diseased placements ``G_hat(X)``."""
    form = _resolve_form(form, x_sample, y_sample)
    chi2_threshold(level)
    b = dual_placement_complements(x_sample, y_sample, kernel)
    mult = _effective_multiplier(x_sample.stratum, x_sample.counts, form)
    profile = _Profile(b, x_sample.weights, mult)
    if profile.lo == profile.hi:
        return _invert(profile, None, None, level, rescale, "dual-el", tol)
    *_, s2 = _variance_parts(x_sample, y_sample, kernel)
    nx, ny = x_sample.size, y_sample.size
    return _invert(profile, ny / (nx + ny), s2, level, rescale, "dual-el", tol)
