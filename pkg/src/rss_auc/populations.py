"""Synthetic population pairs with known AUC and the concomitant ranking model.

Three families are supported. In each one the non-diseased measurement X and
the diseased measurement Y are parameterized so that ``P(Y > X) = delta``:

* ``normal``:    X ~ N(0, 1),   Y ~ N(sqrt(5) * Phi^-1(delta), 4)
* ``lognormal``: X ~ LN(0, 1),  Y ~ LN(sqrt(5) * Phi^-1(delta), 4)
* ``uniform``:   X ~ U(0, 1),   Y ~ U(0, 1 / (2 (1 - delta))),  delta >= 0.5

Log-normal parameters are those of the underlying normal distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import ndtri


class InvalidConfigurationError(ValueError):
    """Raised when a population or design is configured outside its domain."""


class DegeneratePopulationError(ValueError):
    """Raised when a population has zero dispersion."""


class Family(str, Enum):
    NORMAL = "normal"
    LOGNORMAL = "lognormal"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class Marginal:
    """One marginal distribution together with its mean and standard deviation."""

    kind: str
    a: float
    b: float

    @property
    def mean(self) -> float:
        if self.kind == "normal":
            return self.a
        if self.kind == "lognormal":
            return math.exp(self.a + self.b**2 / 2.0)
        return (self.a + self.b) / 2.0

    @property
    def sd(self) -> float:
        if self.kind == "normal":
            return self.b
        if self.kind == "lognormal":
            s2 = self.b**2
            return math.sqrt(math.expm1(s2) * math.exp(2.0 * self.a + s2))
        return (self.b - self.a) / math.sqrt(12.0)

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.kind == "normal":
            return self.a + self.b * rng.standard_normal(size)
        if self.kind == "lognormal":
            return np.exp(self.a + self.b * rng.standard_normal(size))
        # inverse-CDF sampling
        return self.a + (self.b - self.a) * rng.random(size)


@dataclass(frozen=True)
class PopulationPair:
    """Non-diseased (X) and diseased (Y) populations with true AUC ``delta``."""

    family: Family
    delta: float

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not 0.0 < self.delta < 1.0:
            raise InvalidConfigurationError(f"delta must lie in (0, 1), got {self.delta}")
        if self.family is Family.UNIFORM and self.delta < 0.5:
            raise InvalidConfigurationError(
                f"uniform family requires delta >= 0.5, got {self.delta}"
            )

    @property
    def x(self) -> Marginal:
        if self.family is Family.NORMAL:
            return Marginal("normal", 0.0, 1.0)
        if self.family is Family.LOGNORMAL:
            return Marginal("lognormal", 0.0, 1.0)
        return Marginal("uniform", 0.0, 1.0)

    @property
    def y(self) -> Marginal:
        if self.family is Family.UNIFORM:
            return Marginal("uniform", 0.0, 1.0 / (2.0 * (1.0 - self.delta)))
        loc = math.sqrt(5.0) * float(ndtri(self.delta))
        return Marginal(self.family.value, loc, 2.0)


def sample_pair(pop: PopulationPair, count_x: int, count_y: int, rng: np.random.Generator):
    """Draw ``count_x`` i.i.d. X values and ``count_y`` i.i.d. Y values."""
    if count_x < 1 or count_y < 1:
        raise InvalidConfigurationError("sample counts must be positive")
    return pop.x.sample(rng, count_x), pop.y.sample(rng, count_y)


@dataclass(frozen=True)
class ConcomitantModel:
    """Judgment-ranking quality for the two groups.

    The concomitant is ``C = rho * (V - mu) / sigma + (1 - rho**2) * Z`` with
    ``Z`` standard normal. The noise coefficient is ``1 - rho**2`` (not its
    square root), so ``rho`` is a quality knob rather than the exact Pearson
    correlation. ``rho = 1`` gives perfect ranking.
    """

    rho_x: float = 1.0
    rho_y: float = 1.0

    def __post_init__(self):
        for name in ("rho_x", "rho_y"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidConfigurationError(f"{name} must lie in [0, 1], got {value}")


def attach_concomitant(values, rho: float, mean: float, sd: float, rng: np.random.Generator):
    """Return the concomitant variable for ``values`` (same shape).

    Every value receives ``rho * (value - mean) / sd + (1 - rho**2) * Z``.
    A noise draw is consumed even when ``rho == 1`` so that generator streams
    stay aligned across ranking-quality settings.
    """
    if not sd > 0.0:
        raise DegeneratePopulationError("population standard deviation must be positive")
    values = np.asarray(values, dtype=float)
    noise = rng.standard_normal(values.shape)
    return rho * ((values - mean) / sd) + (1.0 - rho * rho) * noise
