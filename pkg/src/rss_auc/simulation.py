"""Monte Carlo coverage studies for AUC confidence intervals.

A sweep is the Cartesian product of its grids. Every cell draws ``replicates``
pairs of samples, builds an interval with one method and records whether the
true AUC is covered and how long the interval is.

Each replicate owns a generator seeded from the master seed, the scenario
(population and sample sizes) and the replicate index. Results therefore do
not depend on how replicates are scheduled across workers. The method, set
size, ranking quality and allocation are left out of the seed on purpose:
cells that differ only in those share random numbers, which sharpens
comparisons between them.
"""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np
import yaml

from .el import DegenerateSampleError, confidence_interval, confidence_interval_dual
from .estimators import Kernel, mw_auc
from .kernel import kernel_ci
from .populations import Family, InvalidConfigurationError, PopulationPair
from .sampling import SyntheticSource, draw_brss, draw_srs, draw_urss, two_stratum_allocation

METHODS = ("srs-el", "brss-el", "urss-el", "brss-ker", "dual-el")
SUMMARY_COLUMNS = (
    "method", "family", "delta", "n", "set_size", "rho", "p_y",
    "coverage", "avg_length", "sd_length", "degenerate_count",
    "n_x", "mean_estimate", "replicates",
)
REPLICATE_COLUMNS = (
    "method", "family", "delta", "n", "n_x", "set_size", "rho", "p_y",
    "replicate", "estimate", "lower", "upper", "covered", "length", "degenerate",
)
URSS_SET_SIZE = 2


class ConfigError(InvalidConfigurationError):
    """Configuration problems; ``problems`` lists every one found."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class Cell:
    method: str
    family: str
    delta: float
    n: int
    n_x: int
    set_size: int
    rho: float | None = None
    p_y: float | None = None


@dataclass(frozen=True)
class SyntheticScenario:
    """One of the parametric population pairs."""

    family: str
    delta: float
    kernel: Kernel = Kernel.STRICT

    def sources(self, rho):
        pop = PopulationPair(Family(self.family), self.delta)
        rho = 1.0 if rho is None else rho
        return SyntheticSource(pop.x, rho), SyntheticSource(pop.y, rho)


def _stable_key(*parts) -> int:
    digest = hashlib.sha256(repr(parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def replicate_rng(seed: int, cell: Cell, replicate: int) -> np.random.Generator:
    key = _stable_key(cell.family, float(cell.delta), int(cell.n_x), int(cell.n))
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(key, int(replicate)))
    return np.random.Generator(np.random.PCG64(ss))


def draw_cell_samples(cell: Cell, scenario, rng):
    """Draw the (X, Y) samples for one replicate of ``cell``."""
    x_src, y_src = scenario.sources(cell.rho)
    if cell.method == "srs-el":
        return draw_srs(x_src, cell.n_x, rng), draw_srs(y_src, cell.n, rng)
    if cell.method == "urss-el":
        x = draw_brss(x_src, URSS_SET_SIZE, cell.n_x // URSS_SET_SIZE, rng)
        y = draw_urss(y_src, two_stratum_allocation(cell.n, cell.p_y), rng)
        return x, y
    m = cell.set_size
    return draw_brss(x_src, m, cell.n_x // m, rng), draw_brss(y_src, m, cell.n // m, rng)


def interval_for(method: str, x, y, level: float, kernel=Kernel.STRICT):
    if method == "brss-ker":
        return kernel_ci(x, y, level)
    if method == "dual-el":
        return confidence_interval_dual(x, y, level, kernel=kernel)
    return confidence_interval(x, y, level, kernel=kernel)


def _run_replicates(cell: Cell, scenario, seed: int, level: float, start: int, stop: int):
    """Per-replicate records ``(estimate, lower, upper, covered, degenerate)``."""
    out = np.empty((stop - start, 5))
    for i, rep in enumerate(range(start, stop)):
        rng = replicate_rng(seed, cell, rep)
        x, y = draw_cell_samples(cell, scenario, rng)
        try:
            ci = interval_for(cell.method, x, y, level, scenario.kernel)
        except DegenerateSampleError:
            est = mw_auc(x, y, scenario.kernel)
            out[i] = (est, est, est, 0.0, 1.0)
            continue
        degenerate = ci.boundary
        covered = (not degenerate) and ci.contains(scenario.delta)
        out[i] = (ci.point, ci.lower, ci.upper, float(covered), float(degenerate))
    return out


def _chunk_worker(args):
    return _run_replicates(*args)


@dataclass(frozen=True)
class SimulationSummary:
    cell: Cell
    replicates: int
    coverage: float
    avg_length: float
    sd_length: float
    mean_estimate: float
    degenerate_count: int

    def row(self) -> dict:
        c = self.cell
        return {
            "method": c.method,
            "family": c.family,
            "delta": c.delta,
            "n": c.n,
            "set_size": c.set_size,
            "rho": c.rho,
            "p_y": c.p_y,
            "coverage": self.coverage,
            "avg_length": self.avg_length,
            "sd_length": self.sd_length,
            "degenerate_count": self.degenerate_count,
            "n_x": c.n_x,
            "mean_estimate": self.mean_estimate,
            "replicates": self.replicates,
        }


def summarize(cell: Cell, records: np.ndarray) -> SimulationSummary:
    lengths = records[:, 2] - records[:, 1]
    reps = records.shape[0]
    return SimulationSummary(
        cell=cell,
        replicates=reps,
        coverage=float(records[:, 3].sum() / reps),
        avg_length=float(lengths.mean()),
        sd_length=float(lengths.std(ddof=1)) if reps > 1 else 0.0,
        mean_estimate=float(records[:, 0].mean()),
        degenerate_count=int(records[:, 4].sum()),
    )


def run_cells(cells, scenario_for, replicates: int, seed: int, level: float = 0.95,
              workers: int = 1, chunk_size: int = 250, return_records: bool = False):
    """Run every cell; results come back in ``cells`` order.

    ``scenario_for(cell)`` supplies the population scenario of a cell.
    """
    if replicates < 1:
        raise ConfigError([f"replicates must be at least 1, got {replicates}"])
    tasks, owners = [], []
    for idx, cell in enumerate(cells):
        scenario = scenario_for(cell)
        for start in range(0, replicates, chunk_size):
            stop = min(start + chunk_size, replicates)
            tasks.append((cell, scenario, seed, level, start, stop))
            owners.append(idx)
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_chunk_worker, tasks))
    else:
        chunks = [_chunk_worker(t) for t in tasks]
    per_cell = [[] for _ in cells]
    for idx, chunk in zip(owners, chunks):
        per_cell[idx].append(chunk)
    records = [np.concatenate(parts) for parts in per_cell]
    summaries = [summarize(cell, rec) for cell, rec in zip(cells, records)]
    if return_records:
        return summaries, records
    return summaries


def run_cell(cell: Cell, scenario, replicates: int, seed: int, level: float = 0.95, workers: int = 1):
    return run_cells([cell], lambda _: scenario, replicates, seed, level, workers)[0]


@dataclass
class SimulationConfig:
    """Grids and settings of a sweep.

    ``sizes`` lists diseased sample sizes ``n_y``; ``x_sizes`` defaults to the
    same values with ``n_x = n_y``, otherwise every pairing is run.
    """

    families: list = field(default_factory=lambda: ["normal"])
    deltas: list = field(default_factory=lambda: [0.8])
    sizes: list = field(default_factory=lambda: [40])
    x_sizes: list | None = None
    set_sizes: list = field(default_factory=lambda: [2])
    rhos: list = field(default_factory=lambda: [1.0])
    p_ys: list = field(default_factory=lambda: [0.5])
    methods: list = field(default_factory=lambda: ["brss-el"])
    replicates: int = 5000
    level: float = 0.95
    seed: int | None = None
    name: str = "sweep"

    @classmethod
    def from_mapping(cls, data: dict) -> "SimulationConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError([f"unknown config key: {k}" for k in unknown])
        return cls(**data)

    @classmethod
    def load(cls, path) -> "SimulationConfig":
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
        if not isinstance(data, dict):
            raise ConfigError([f"{path}: expected a key-value document"])
        return cls.from_mapping(data)

    def dump(self) -> str:
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        return yaml.safe_dump(data, sort_keys=False, default_flow_style=None)

    def problems(self) -> list[str]:
        """Every validation problem, in a stable order."""
        out = []
        for name in ("families", "deltas", "sizes", "set_sizes", "rhos", "methods"):
            if not getattr(self, name):
                out.append(f"{name} must be a nonempty list")
        if not isinstance(self.replicates, int) or self.replicates < 1:
            out.append(f"replicates must be a positive integer, got {self.replicates!r}")
        if not 0.0 < float(self.level) < 1.0:
            out.append(f"level must lie in (0, 1), got {self.level}")
        for m in self.methods:
            if m not in METHODS:
                out.append(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
        for fam in self.families:
            try:
                Family(fam)
            except ValueError:
                out.append(f"unknown family {fam!r}")
                continue
            for d in self.deltas:
                try:
                    PopulationPair(Family(fam), float(d))
                except InvalidConfigurationError as exc:
                    out.append(f"{fam}, delta={d}: {exc}")
        for rho in self.rhos:
            if not 0.0 <= float(rho) <= 1.0:
                out.append(f"rho must lie in [0, 1], got {rho}")
        for nx, ny in self._size_pairs():
            if "srs-el" in self.methods and min(nx, ny) < 2:
                out.append(f"srs-el needs at least two units per group, got n_x={nx}, n_y={ny}")
            for m in self.set_sizes if set(self.methods) & {"brss-el", "brss-ker", "dual-el"} else []:
                for label, size in (("n_x", nx), ("n_y", ny)):
                    if size % m:
                        out.append(f"{label}={size} is not a multiple of set size {m}")
                    elif size // m < 2:
                        out.append(f"{label}={size} with set size {m} gives fewer than two cycles")
            if "urss-el" in self.methods:
                if nx % URSS_SET_SIZE or nx // URSS_SET_SIZE < 2:
                    out.append(f"urss-el needs an even n_x of at least 4, got {nx}")
                for p in self.p_ys:
                    try:
                        first, second = two_stratum_allocation(ny, float(p))
                    except InvalidConfigurationError as exc:
                        out.append(f"n_y={ny}: {exc}")
                        continue
                    if min(first, second) < 2:
                        out.append(f"n_y={ny}, p_y={p}: a stratum gets fewer than two units")
        if "urss-el" in self.methods and not self.p_ys:
            out.append("urss-el requires a nonempty p_ys list")
        return out

    def validate(self) -> None:
        problems = self.problems()
        if problems:
            raise ConfigError(problems)

    def _size_pairs(self):
        if self.x_sizes is None:
            return [(int(n), int(n)) for n in self.sizes]
        return [(int(nx), int(n)) for n in self.sizes for nx in self.x_sizes]

    def cells(self) -> list[Cell]:
        self.validate()
        out = []
        for method in self.methods:
            for fam, delta, (nx, ny) in itertools.product(self.families, self.deltas, self._size_pairs()):
                delta = float(delta)
                if method == "srs-el":
                    out.append(Cell(method, fam, delta, ny, nx, 1))
                elif method == "urss-el":
                    for p in self.p_ys:
                        out.append(Cell(method, fam, delta, ny, nx, URSS_SET_SIZE, 1.0, float(p)))
                else:
                    for m, rho in itertools.product(self.set_sizes, self.rhos):
                        out.append(Cell(method, fam, delta, ny, nx, int(m), float(rho)))
        return out


def run_sweep(config: SimulationConfig, seed: int | None = None, workers: int = 1, return_records: bool = False):
    """Run all cells of ``config``; returns summaries in cell order."""
    seed = config.seed if seed is None else seed
    if seed is None:
        raise ConfigError(["a seed is required"])
    cells = config.cells()
    scenarios = {}

    def scenario_for(cell):
        key = (cell.family, cell.delta)
        if key not in scenarios:
            scenarios[key] = SyntheticScenario(cell.family, cell.delta)
        return scenarios[key]

    return run_cells(cells, scenario_for, config.replicates, seed, float(config.level),
                     workers=workers, return_records=return_records)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    return repr(value)


def summary_csv(summaries) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SUMMARY_COLUMNS)
    for s in summaries:
        row = s.row()
        writer.writerow([_fmt(row[c]) for c in SUMMARY_COLUMNS])
    return buf.getvalue()


def write_summary_csv(path, summaries) -> None:
    Path(path).write_text(summary_csv(summaries), encoding="utf-8")


def write_replicates_csv(path, summaries, records) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPLICATE_COLUMNS)
        for s, rec in zip(summaries, records):
            c = s.cell
            head = [c.method, c.family, c.delta, c.n, c.n_x, c.set_size, c.rho, c.p_y]
            for rep, (est, lo, hi, cov, deg) in enumerate(rec):
                writer.writerow([_fmt(v) for v in head]
                                + [str(rep), _fmt(est), _fmt(lo), _fmt(hi),
                                   str(int(cov)), _fmt(hi - lo), str(int(deg))])


def read_summary_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


PRESET_DIR = Path(__file__).with_name("presets")


def preset_names() -> list[str]:
    return sorted(p.stem for p in PRESET_DIR.glob("*.yaml"))


def load_preset(name: str) -> SimulationConfig:
    path = PRESET_DIR / f"{name}.yaml"
    if not path.exists():
        raise ConfigError([f"unknown preset {name!r}; available: {', '.join(preset_names())}"])
    return SimulationConfig.load(path)


__all__ = [
    "Cell", "ConfigError", "METHODS", "SimulationConfig", "SimulationSummary",
    "SyntheticScenario", "load_preset", "preset_names", "run_cell",
    "run_cells", "run_sweep", "summary_csv", "write_summary_csv",
]
