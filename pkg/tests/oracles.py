"""Slow, independent reference computations used as test oracles.

Nothing here imports the library's numerical code: each oracle is written
straight from the defining formulas with explicit loops.
"""

import math
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq, minimize


def phi(x, y, tie_half=False):
    if x < y:
        return 1
    if x == y and tie_half:
        return Fraction(1, 2)
    return 0


def strata_of(sample):
    return [list(map(float, sample.values[sample.stratum == r])) for r in range(sample.set_size)]


def double_loop_auc(x_strata, y_strata, tie_half=False, exact=False):
    """Weighted pair enumeration: sum of phi / (m k_i n l_r) over all pairs."""
    m, n = len(x_strata), len(y_strata)
    total = Fraction(0) if exact else 0.0
    for xs in x_strata:
        for ys in y_strata:
            w = Fraction(1, m * len(xs) * n * len(ys))
            for xv in xs:
                for yv in ys:
                    total += w * phi(xv, yv, tie_half) if exact else float(w * phi(xv, yv, tie_half))
    return total


def double_loop_ecdf(x_strata, t):
    m = len(x_strata)
    return sum(sum(1 for xv in xs if xv < t) / (m * len(xs)) for xs in x_strata)


def theorem_display(x_strata, y_strata, delta0):
    """Scale factor r(delta0), evaluated literally from its defining display.

    Works with Fractions when the inputs are rational; returns a dict of the
    intermediate quantities.
    """
    m, n = len(x_strata), len(y_strata)
    k = [len(s) for s in x_strata]
    lr = [len(s) for s in y_strata]
    nx, ny = sum(k), sum(lr)

    def v10(xv):
        return sum(Fraction(1, n * lr[r]) * phi(xv, yv) for r in range(n) for yv in y_strata[r])

    def v01(yv):
        return sum(Fraction(1, m * k[i]) * phi(xv, yv) for i in range(m) for xv in x_strata[i])

    s10 = Fraction(0)
    for i in range(m):
        vals = [v10(xv) for xv in x_strata[i]]
        bar = sum(vals) / k[i]
        s10 += sum(Fraction(1, m * (k[i] - 1)) * (v - bar) ** 2 for v in vals)
    s01 = Fraction(0)
    numer = Fraction(0)
    for r in range(n):
        vals = [v01(yv) for yv in y_strata[r]]
        bar = sum(vals) / lr[r]
        s01 += sum(Fraction(1, n * (lr[r] - 1)) * (v - bar) ** 2 for v in vals)
        numer += sum(Fraction(1, n * lr[r]) * (v - delta0) ** 2 for v in vals)
    s2 = (ny * s10 + nx * s01) / (nx + ny)
    r = Fraction(nx, nx + ny) * numer / s2
    return {"s10": s10, "s01": s01, "s2": s2, "r": r}


def grid_root(z, rounds=40, points=2001):
    """Root of sum z / (1 + lam z) by repeated dense-grid sign scans.

    No derivative or bracketing solver is used: every round evaluates the
    estimating function on an even grid and keeps the cell where it changes
    sign.
    """
    z = np.asarray(z, dtype=float)
    lo = -1.0 / z.max()
    hi = -1.0 / z.min()
    for _ in range(rounds):
        inner = np.linspace(lo, hi, points)[1:-1]
        g = np.array([np.sum(z / (1.0 + lam * z)) for lam in inner])
        edges = np.concatenate(([lo], inner, [hi]))
        # g decreases from +inf at lo to -inf at hi
        idx = int(np.count_nonzero(g > 0))
        new_lo, new_hi = edges[idx], edges[idx + 1]
        if new_hi - new_lo >= hi - lo:
            break
        lo, hi = new_lo, new_hi
    return 0.5 * (lo + hi)


def constrained_log_ratio(z, multiplier=None):
    """-2 sum log(N p) maximized over the simplex subject to sum p z' = 0.

    ``multiplier`` (per unit) turns z into z' = multiplier * z for the
    unbalanced form. Solved directly with a generic constrained optimizer;
    the weights are parameterized as a softmax so that the simplex
    constraint holds by construction.
    """
    z = np.asarray(z, dtype=float)
    zz = z if multiplier is None else z * np.asarray(multiplier, dtype=float)
    size = z.size

    def weights(free):
        # the first logit is pinned to zero to remove the shift redundancy
        theta = np.concatenate(([0.0], free))
        e = np.exp(theta - theta.max())
        return e / e.sum()

    def objective(free):
        return -np.sum(np.log(weights(free)))

    def objective_grad(free):
        return (size * weights(free) - 1.0)[1:]

    def constraint(free):
        return weights(free) @ zz

    def constraint_grad(free):
        p = weights(free)
        return (p * (zz - p @ zz))[1:]

    res = minimize(
        objective,
        np.zeros(size - 1),
        jac=objective_grad,
        method="SLSQP",
        constraints=[{"type": "eq", "fun": constraint, "jac": constraint_grad}],
        options={"ftol": 1e-15, "maxiter": 2000},
    )
    assert res.success, res.message
    assert abs(constraint(res.x)) < 1e-9
    return -2.0 * float(np.sum(np.log(size * weights(res.x))))


class QinZhouSRS:
    """Two-sample empirical likelihood for the AUC from simple random samples.

    Written from the classical placement-value construction: placements of
    each Y in the X sample, the jackknife-style projection variances and the
    scaled log ratio.
    """

    def __init__(self, x, y):
        self.x = [float(v) for v in x]
        self.y = [float(v) for v in y]
        nx, ny = len(self.x), len(self.y)
        self.placements = [sum(1 for xv in self.x if xv < yv) / nx for yv in self.y]
        self.auc = sum(self.placements) / ny
        v10 = [sum(1 for yv in self.y if xv < yv) / ny for xv in self.x]
        s10 = sum((v - self.auc) ** 2 for v in v10) / (nx - 1)
        s01 = sum((v - self.auc) ** 2 for v in self.placements) / (ny - 1)
        self.s2 = (ny * s10 + nx * s01) / (nx + ny)

    def multiplier(self, delta):
        z = [p - delta for p in self.placements]
        lo, hi = -1.0 / max(z), -1.0 / min(z)
        span = hi - lo
        f = lambda lam: sum(v / (1.0 + lam * v) for v in z)
        return brentq(f, lo + 1e-15 * span, hi - 1e-15 * span, xtol=1e-300, rtol=1e-15, maxiter=500)

    def log_ratio(self, delta):
        lam = self.multiplier(delta)
        return 2.0 * sum(math.log1p(lam * (p - delta)) for p in self.placements)

    def scale(self, delta):
        nx, ny = len(self.x), len(self.y)
        return nx / (nx + ny) * sum((p - delta) ** 2 for p in self.placements) / ny / self.s2

    def interval(self, threshold):
        r = self.scale(self.auc)
        f = lambda d: r * self.log_ratio(d) - threshold
        lo, hi = min(self.placements), max(self.placements)
        eps = 1e-12
        lower = brentq(f, lo + eps, self.auc, xtol=1e-14, rtol=1e-15)
        upper = brentq(f, self.auc, hi - eps, xtol=1e-14, rtol=1e-15)
        return lower, upper


def smoothed_roc_area(x, wx, hx, y, wy, hy):
    """Area under the ROC curve of two Gaussian-kernel CDF estimates.

    R(p) = 1 - G_h(F_h^{-1}(1 - p)) is integrated over p in (0, 1) by
    adaptive quadrature, with the quantile found by bracketed root finding.
    """
    from scipy import integrate, stats

    x, wx, y, wy = map(np.asarray, (x, wx, y, wy))
    F = lambda t: float(wx @ stats.norm.cdf((t - x) / hx))
    G = lambda t: float(wy @ stats.norm.cdf((t - y) / hy))
    lo = min(x.min(), y.min()) - 40 * max(hx, hy)
    hi = max(x.max(), y.max()) + 40 * max(hx, hy)

    def roc(p):
        q = 1.0 - p
        if q <= F(lo):
            return 1.0 - G(lo)
        if q >= F(hi):
            return 1.0 - G(hi)
        t = brentq(lambda s: F(s) - q, lo, hi, xtol=1e-14, rtol=1e-15)
        return 1.0 - G(t)

    area, _ = integrate.quad(roc, 0.0, 1.0, epsabs=1e-10, limit=400)
    return area
