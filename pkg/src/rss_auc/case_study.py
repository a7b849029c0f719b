"""Finite-population resampling studies on a marker dataset.

The dataset is treated as the true population: its two groups are resampled
by simple random or ranked set sampling, ranking by the dataset's own
concomitant column, and coverage is measured against the population AUC.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .estimators import Kernel
from .populations import PopulationPair, attach_concomitant
from .sampling import FinitePopulationSource
from .simulation import METHODS, Cell, ConfigError, run_cells

MISSING = {"", "na", "nan", "null", "none", "."}
POSITIVE = {"1", "true", "t", "yes", "y"}
NEGATIVE = {"0", "false", "f", "no", "n"}
DEFAULT_COLUMNS = {"marker": "marker", "label": "disease", "concomitant": "concomitant"}


class DatasetError(ValueError):
    """The dataset file cannot be turned into a population."""


class Orientation(str, Enum):
    HIGHER_IS_DISEASED = "higher"
    LOWER_IS_DISEASED = "lower"


def population_auc(x, y, kernel=Kernel.TIE_HALF) -> float:
    """``P(X < Y)`` over all pairs of two finite groups, by sorting."""
    srt = np.sort(np.asarray(x, dtype=float))
    y = np.asarray(y, dtype=float)
    left = np.searchsorted(srt, y, side="left")
    if Kernel(kernel) is Kernel.TIE_HALF:
        right = np.searchsorted(srt, y, side="right")
        wins = left + 0.5 * (right - left)
    else:
        wins = left
    return float(wins.sum() / (srt.size * y.size))


@dataclass(frozen=True)
class PopulationDataset:
    x_values: np.ndarray
    x_concomitant: np.ndarray
    y_values: np.ndarray
    y_concomitant: np.ndarray
    name: str = "dataset"
    dropped: int = 0
    orientation: Orientation = Orientation.HIGHER_IS_DISEASED
    kernel: Kernel = Kernel.TIE_HALF
    auc: float = field(init=False)

    def __post_init__(self):
        if self.x_values.size == 0 or self.y_values.size == 0:
            raise DatasetError("both the non-diseased and diseased groups must be nonempty")
        object.__setattr__(self, "auc", population_auc(self.x_values, self.y_values, self.kernel))

    @property
    def counts(self) -> tuple[int, int]:
        return self.x_values.size, self.y_values.size

    def moments(self):
        """(mean, sd) of the marker in each group."""
        return ((self.x_values.mean(), self.x_values.std()),
                (self.y_values.mean(), self.y_values.std()))

    def sources(self, rho=None):
        return (FinitePopulationSource(self.x_values, self.x_concomitant),
                FinitePopulationSource(self.y_values, self.y_concomitant))

    def flipped(self) -> "PopulationDataset":
        """Same population with the marker negated."""
        other = (Orientation.LOWER_IS_DISEASED
                 if self.orientation is Orientation.HIGHER_IS_DISEASED
                 else Orientation.HIGHER_IS_DISEASED)
        return PopulationDataset(-self.x_values, self.x_concomitant, -self.y_values,
                                 self.y_concomitant, self.name, self.dropped, other, self.kernel)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["marker", "disease", "concomitant"])
            sign = -1.0 if self.orientation is Orientation.LOWER_IS_DISEASED else 1.0
            for label, vals, conc in ((0, self.x_values, self.x_concomitant),
                                      (1, self.y_values, self.y_concomitant)):
                for v, c in zip(vals, conc):
                    writer.writerow([repr(float(sign * v)), label, repr(float(c))])


def parse_columns(text: str | None) -> dict:
    """Parse ``marker=BMI,label=Diabetes,concomitant=Weight`` into a mapping."""
    columns = dict(DEFAULT_COLUMNS)
    if not text:
        return columns
    for part in text.split(","):
        key, sep, value = part.partition("=")
        key = key.strip()
        if not sep or key not in columns or not value.strip():
            raise DatasetError(f"bad column mapping {part!r}; expected marker=, label=, concomitant=")
        columns[key] = value.strip()
    return columns


def _number(text: str, lineno: int, column: str):
    if text.strip().lower() in MISSING:
        return None
    try:
        value = float(text)
    except ValueError:
        raise DatasetError(f"line {lineno}: column {column!r} is not a number: {text!r}") from None
    if not math.isfinite(value):
        return None
    return value


def _label(text: str, lineno: int, column: str):
    t = text.strip().lower()
    if t in MISSING:
        return None
    if t in POSITIVE:
        return True
    if t in NEGATIVE:
        return False
    raise DatasetError(f"line {lineno}: column {column!r} is not a disease indicator: {text!r}")


def load_dataset(path, columns: dict | None = None, orientation=Orientation.HIGHER_IS_DISEASED,
                 kernel=Kernel.TIE_HALF) -> PopulationDataset:
    """Read a marker CSV (header row required) as a finite population.

    Rows with a missing marker, label or concomitant are dropped and counted.
    With ``LOWER_IS_DISEASED`` the marker is negated so that higher values
    always point to disease.
    """
    columns = dict(DEFAULT_COLUMNS, **(columns or {}))
    orientation = Orientation(orientation)
    groups = {False: ([], []), True: ([], [])}
    dropped = 0
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in columns.values() if c not in header]
        if missing:
            raise DatasetError(f"{path}: missing columns {missing}; found {header}")
        for lineno, row in enumerate(reader, start=2):
            marker = _number(row[columns["marker"]] or "", lineno, columns["marker"])
            conc = _number(row[columns["concomitant"]] or "", lineno, columns["concomitant"])
            label = _label(row[columns["label"]] or "", lineno, columns["label"])
            if marker is None or conc is None or label is None:
                dropped += 1
                continue
            groups[label][0].append(marker)
            groups[label][1].append(conc)
    sign = -1.0 if orientation is Orientation.LOWER_IS_DISEASED else 1.0
    arrays = [np.asarray(v, dtype=float) for pair in (groups[False], groups[True]) for v in pair]
    if arrays[0].size == 0 or arrays[2].size == 0:
        raise DatasetError(f"{path}: both disease groups need at least one complete row")
    return PopulationDataset(sign * arrays[0], arrays[1], sign * arrays[2], arrays[3],
                             name=Path(path).stem, dropped=dropped, orientation=orientation,
                             kernel=Kernel(kernel))


def freeze_synthetic_population(pop: PopulationPair, size_x: int, size_y: int, rho: float,
                                rng: np.random.Generator, name: str = "synthetic") -> PopulationDataset:
    """Draw a finite population from a parametric pair with model concomitants."""
    x = pop.x.sample(rng, size_x)
    y = pop.y.sample(rng, size_y)
    cx = attach_concomitant(x, rho, pop.x.mean, pop.x.sd, rng)
    cy = attach_concomitant(y, rho, pop.y.mean, pop.y.sd, rng)
    return PopulationDataset(x, cx, y, cy, name=name)


@dataclass(frozen=True)
class DatasetScenario:
    dataset: PopulationDataset

    @property
    def delta(self) -> float:
        return self.dataset.auc

    @property
    def kernel(self) -> Kernel:
        return self.dataset.kernel

    def sources(self, rho=None):
        return self.dataset.sources()


def case_cells(dataset: PopulationDataset, sizes, set_sizes, methods) -> list[Cell]:
    problems = []
    nx_pop, ny_pop = dataset.counts
    for m in methods:
        if m not in METHODS or m == "urss-el":
            problems.append(f"method {m!r} is not available for case studies")
    for n in sizes:
        if n > min(nx_pop, ny_pop):
            problems.append(f"sample size {n} exceeds a group of the population ({nx_pop}, {ny_pop})")
        for m in set_sizes:
            if set(methods) - {"srs-el"}:
                if n % m or n // m < 2:
                    problems.append(f"sample size {n} needs at least two full cycles of set size {m}")
                if m > min(nx_pop, ny_pop):
                    problems.append(f"set size {m} exceeds a group of the population")
    if problems:
        raise ConfigError(problems)
    cells = []
    for method in methods:
        for n in sizes:
            if method == "srs-el":
                cells.append(Cell(method, dataset.name, dataset.auc, int(n), int(n), 1))
            else:
                for m in set_sizes:
                    cells.append(Cell(method, dataset.name, dataset.auc, int(n), int(n), int(m)))
    return cells


def run_case_sweep(dataset: PopulationDataset, sizes=(20, 40, 60, 80), set_sizes=(2, 4),
                   methods=("srs-el", "brss-el"), replicates: int = 5000, seed: int = 0,
                   level: float = 0.95, workers: int = 1, return_records: bool = False):
    """Resampling sweep with coverage judged against ``dataset.auc``."""
    cells = case_cells(dataset, sizes, set_sizes, methods)
    scenario = DatasetScenario(dataset)
    return run_cells(cells, lambda _: scenario, replicates, seed, level,
                     workers=workers, return_records=return_records)
