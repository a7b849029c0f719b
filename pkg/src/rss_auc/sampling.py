"""Balanced and unbalanced ranked set sampling.

A ranked set sample with set size ``n`` consists of ``n`` rank strata. To
obtain one observation for stratum ``r``, ``n`` fresh units are drawn, judged
by their concomitant, and only the ``r``-th smallest is quantified.

Unit sources implement ``draw_sets(n_sets, set_size, rng)`` and return two
``(n_sets, set_size)`` arrays: true values and concomitants.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np

from .populations import (
    InvalidConfigurationError,
    Marginal,
    attach_concomitant,
)


class InsufficientUnitsError(InvalidConfigurationError):
    """Raised when a finite population cannot supply a ranking set."""


@dataclass(frozen=True)
class RankedSetSample:
    """Quantified units of a ranked set sample.

    Parameters
    ----------
    set_size : int
        Number of units ranked together (``n`` or ``m``).
    values : ndarray
        Measured values, stratum by stratum.
    stratum : ndarray of int
        Zero-based rank stratum of each value.
    cycle : ndarray of int, optional
        Position of each value within its stratum.
    """

    set_size: int
    values: np.ndarray
    stratum: np.ndarray
    cycle: np.ndarray = field(default=None)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        stratum = np.asarray(self.stratum, dtype=np.intp)
        if values.ndim != 1 or values.shape != stratum.shape:
            raise InvalidConfigurationError("values and stratum must be 1-d and equally long")
        if self.set_size < 1:
            raise InvalidConfigurationError("set size must be at least 1")
        if stratum.size and (stratum.min() < 0 or stratum.max() >= self.set_size):
            raise InvalidConfigurationError("stratum index out of range")
        if not np.all(np.isfinite(values)):
            raise InvalidConfigurationError("values must be finite")
        counts = np.bincount(stratum, minlength=self.set_size)
        if np.any(counts < 1):
            raise InvalidConfigurationError("every rank stratum needs at least one unit")
        cycle = self.cycle
        if cycle is None:
            cycle = _positions(stratum)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "stratum", stratum)
        object.__setattr__(self, "cycle", np.asarray(cycle, dtype=np.intp))

    @classmethod
    def from_strata(cls, strata: Sequence[Sequence[float]]) -> "RankedSetSample":
        """Build a sample from one list of measurements per rank stratum."""
        values = np.concatenate([np.asarray(s, dtype=float).ravel() for s in strata])
        stratum = np.concatenate(
            [np.full(len(s), r, dtype=np.intp) for r, s in enumerate(strata)]
        )
        return cls(len(strata), values, stratum)

    @classmethod
    def srs(cls, values) -> "RankedSetSample":
        """Encode a simple random sample as a set-size-1 ranked set sample."""
        values = np.asarray(values, dtype=float).ravel()
        return cls(1, values, np.zeros(values.size, dtype=np.intp))

    @property
    def counts(self) -> np.ndarray:
        return np.bincount(self.stratum, minlength=self.set_size)

    @property
    def size(self) -> int:
        return int(self.values.size)

    @property
    def is_balanced(self) -> bool:
        counts = self.counts
        return bool(np.all(counts == counts[0]))

    @property
    def strata(self) -> list[np.ndarray]:
        return [self.values[self.stratum == r] for r in range(self.set_size)]

    @property
    def weights(self) -> np.ndarray:
        """Per-unit weight ``1 / (n * l_r)``; sums to one."""
        return 1.0 / (self.set_size * self.counts[self.stratum])


def _positions(stratum: np.ndarray) -> np.ndarray:
    out = np.empty_like(stratum)
    for r in np.unique(stratum):
        idx = np.flatnonzero(stratum == r)
        out[idx] = np.arange(idx.size)
    return out


class UnitSource(Protocol):
    def draw_sets(self, n_sets: int, set_size: int, rng: np.random.Generator): ...


@dataclass(frozen=True)
class SyntheticSource:
    """Infinite population with concomitants from the linear ranking model."""

    marginal: Marginal
    rho: float = 1.0

    def draw_sets(self, n_sets, set_size, rng):
        values = self.marginal.sample(rng, (n_sets, set_size))
        conc = attach_concomitant(values, self.rho, self.marginal.mean, self.marginal.sd, rng)
        return values, conc


@dataclass(frozen=True)
class FinitePopulationSource:
    """Finite population resampled as if it were the true population.

    Units within a ranking set are distinct; different sets are drawn
    independently (with replacement across sets).
    """

    values: np.ndarray
    concomitant: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        conc = np.asarray(self.concomitant, dtype=float)
        if values.shape != conc.shape or values.ndim != 1:
            raise InvalidConfigurationError("values and concomitant must be 1-d and equally long")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "concomitant", conc)

    def draw_sets(self, n_sets, set_size, rng):
        size = self.values.size
        if set_size > size:
            raise InsufficientUnitsError(
                f"population of {size} units cannot fill a ranking set of {set_size}"
            )
        idx = rng.integers(0, size, size=(n_sets, set_size))
        if set_size > 1:
            while True:
                srt = np.sort(idx, axis=1)
                bad = np.any(srt[:, 1:] == srt[:, :-1], axis=1)
                if not bad.any():
                    break
                idx[bad] = rng.integers(0, size, size=(int(bad.sum()), set_size))
        return self.values[idx], self.concomitant[idx]


def judgment_select(values, concomitant, ranks, rng: np.random.Generator) -> np.ndarray:
    """Quantify the unit judged ``ranks[i]``-th smallest in row ``i``.

    Ties in the concomitant are broken uniformly at random.
    """
    values = np.atleast_2d(values)
    concomitant = np.atleast_2d(concomitant)
    tiebreak = rng.random(concomitant.shape)
    order = np.lexsort((tiebreak, concomitant), axis=-1)
    rows = np.arange(values.shape[0])
    return values[rows, order[rows, np.asarray(ranks)]]


def draw_urss(source: UnitSource, counts: Sequence[int], rng: np.random.Generator) -> RankedSetSample:
    """Draw a ranked set sample with ``counts[r]`` units in rank stratum ``r``."""
    counts = np.asarray(counts, dtype=np.intp)
    if counts.ndim != 1 or counts.size < 1 or np.any(counts < 1):
        raise InvalidConfigurationError(f"stratum counts must be positive, got {counts.tolist()}")
    set_size = counts.size
    ranks = np.repeat(np.arange(set_size), counts)
    values, conc = source.draw_sets(int(counts.sum()), set_size, rng)
    if set_size == 1:
        quantified = values[:, 0]
    else:
        quantified = judgment_select(values, conc, ranks, rng)
    return RankedSetSample(set_size, quantified, ranks)


def draw_brss(source: UnitSource, set_size: int, cycles: int, rng: np.random.Generator) -> RankedSetSample:
    """Draw a balanced ranked set sample of ``set_size * cycles`` units."""
    if set_size < 1 or cycles < 1:
        raise InvalidConfigurationError("set size and cycle count must be positive")
    return draw_urss(source, [cycles] * set_size, rng)


def draw_srs(source: UnitSource, size: int, rng: np.random.Generator) -> RankedSetSample:
    return draw_brss(source, 1, size, rng)


def two_stratum_allocation(total: int, p_first: float) -> tuple[int, int]:
    """Split ``total`` units between two rank strata by proportion ``p_first``.

    The first stratum gets ``round(total * p_first)`` (half to even); the
    second gets the rest.
    """
    if not 0.0 < p_first < 1.0:
        raise InvalidConfigurationError(f"allocation proportion must lie in (0, 1), got {p_first}")
    first = int(round(total * p_first))
    second = total - first
    if first < 1 or second < 1:
        raise InvalidConfigurationError(
            f"allocation {p_first} of {total} units leaves an empty stratum"
        )
    return first, second


SAMPLE_COLUMNS = ("group", "stratum", "cycle", "value")


def write_samples_csv(path, x_sample: RankedSetSample, y_sample: RankedSetSample) -> None:
    """Write both samples in the (group, stratum, cycle, value) interchange format.

    Strata and cycles are written one-based.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SAMPLE_COLUMNS)
        for group, sample in (("x", x_sample), ("y", y_sample)):
            for s, c, v in zip(sample.stratum, sample.cycle, sample.values):
                writer.writerow([group, int(s) + 1, int(c) + 1, repr(float(v))])


def read_samples_csv(path) -> tuple[RankedSetSample, RankedSetSample]:
    """Parse an interchange CSV into the X and Y samples.

    The set size of each group is its largest stratum label.
    """
    rows = {"x": [], "y": []}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(SAMPLE_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise InvalidConfigurationError(f"sample file lacks columns: {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            group = row["group"].strip().lower()
            if group not in rows:
                raise InvalidConfigurationError(f"line {lineno}: group must be x or y, got {group!r}")
            try:
                stratum = int(row["stratum"])
                cycle = int(row["cycle"])
                value = float(row["value"])
            except ValueError as exc:
                raise InvalidConfigurationError(f"line {lineno}: {exc}") from None
            if stratum < 1 or cycle < 1:
                raise InvalidConfigurationError(f"line {lineno}: stratum and cycle are one-based")
            rows[group].append((stratum - 1, cycle - 1, value))
    samples = []
    for group in ("x", "y"):
        data = rows[group]
        if not data:
            raise InvalidConfigurationError(f"sample file has no rows for group {group}")
        data.sort(key=lambda t: (t[0], t[1]))
        stratum = np.array([t[0] for t in data], dtype=np.intp)
        cycle = np.array([t[1] for t in data], dtype=np.intp)
        values = np.array([t[2] for t in data], dtype=float)
        samples.append(RankedSetSample(int(stratum.max()) + 1, values, stratum, cycle))
    return samples[0], samples[1]
