import math

import numpy as np
import pytest

from rss_auc.simulation import (
    METHODS,
    SUMMARY_COLUMNS,
    Cell,
    ConfigError,
    SimulationConfig,
    SyntheticScenario,
    load_preset,
    preset_names,
    read_summary_csv,
    replicate_rng,
    run_cell,
    run_sweep,
    summary_csv,
    write_replicates_csv,
    write_summary_csv,
)

SMALL = dict(families=["normal"], deltas=[0.8], sizes=[20], set_sizes=[2], rhos=[1.0],
             methods=["srs-el", "brss-el"], replicates=40)


class TestCells:
    def test_single_replicate_is_bernoulli(self):
        cell = Cell("brss-el", "normal", 0.8, 20, 20, 2, 1.0)
        for seed in range(5):
            s = run_cell(cell, SyntheticScenario("normal", 0.8), 1, seed)
            assert s.coverage in (0.0, 1.0)
            assert s.sd_length == 0.0

    def test_coverage_is_a_count(self):
        cell = Cell("urss-el", "lognormal", 0.9, 20, 20, 2, 1.0, 0.3)
        s = run_cell(cell, SyntheticScenario("lognormal", 0.9), 37, 3)
        assert math.isclose(s.coverage * 37, round(s.coverage * 37), abs_tol=1e-9)
        assert 0.0 <= s.coverage <= 1.0

    def test_replicate_streams_are_distinct_and_stable(self):
        cell = Cell("brss-el", "normal", 0.8, 20, 20, 2, 1.0)
        a = replicate_rng(1, cell, 0).random(4)
        b = replicate_rng(1, cell, 1).random(4)
        c = replicate_rng(2, cell, 0).random(4)
        np.testing.assert_array_equal(a, replicate_rng(1, cell, 0).random(4))
        assert not np.array_equal(a, b) and not np.array_equal(a, c)

    def test_urss_design(self):
        cfg = SimulationConfig(**{**SMALL, "methods": ["urss-el"], "p_ys": [0.3, 0.7]})
        cells = cfg.cells()
        assert [(c.set_size, c.p_y) for c in cells] == [(2, 0.3), (2, 0.7)]
        from rss_auc.simulation import draw_cell_samples

        x, y = draw_cell_samples(cells[0], SyntheticScenario("normal", 0.8), np.random.default_rng(0))
        assert x.is_balanced and x.set_size == 2
        assert list(y.counts) == [6, 14]

    def test_degenerate_replicates_counted(self):
        # tiny samples at a high AUC separate completely fairly often
        cell = Cell("brss-el", "normal", 0.95, 4, 4, 2, 1.0)
        s, rec = run_sweep_records(cell, 300)
        assert s.degenerate_count > 0
        deg = rec[:, 4] == 1
        assert np.all(rec[deg, 3] == 0)
        np.testing.assert_array_equal(rec[deg, 1], rec[deg, 2])


def run_sweep_records(cell, reps):
    from rss_auc.simulation import run_cells

    (s,), (rec,) = run_cells([cell], lambda c: SyntheticScenario(c.family, c.delta), reps, 11, return_records=True)
    return s, rec


class TestDeterminism:
    def test_same_seed_same_bytes(self):
        cfg = SimulationConfig(**SMALL)
        assert summary_csv(run_sweep(cfg, seed=5)) == summary_csv(run_sweep(cfg, seed=5))
        assert summary_csv(run_sweep(cfg, seed=5)) != summary_csv(run_sweep(cfg, seed=6))

    def test_workers_do_not_change_output(self):
        from rss_auc.simulation import run_cells

        cfg = SimulationConfig(**SMALL)
        scen = lambda c: SyntheticScenario(c.family, c.delta)
        one = run_cells(cfg.cells(), scen, 30, 9, workers=1, chunk_size=7)
        two = run_cells(cfg.cells(), scen, 30, 9, workers=2, chunk_size=7)
        assert summary_csv(one) == summary_csv(two)

    def test_chunking_does_not_change_output(self):
        from rss_auc.simulation import run_cells

        cfg = SimulationConfig(**SMALL)
        scen = lambda c: SyntheticScenario(c.family, c.delta)
        assert summary_csv(run_cells(cfg.cells(), scen, 30, 9, chunk_size=4)) == summary_csv(
            run_cells(cfg.cells(), scen, 30, 9, chunk_size=250))


class TestConfig:
    def test_product_count(self):
        cfg = SimulationConfig(families=["normal", "lognormal", "uniform"], deltas=[0.6, 0.8, 0.9, 0.95],
                               sizes=[20, 40, 80], set_sizes=[2], rhos=[1.0],
                               methods=["srs-el", "brss-el", "brss-ker"], replicates=2)
        summaries = run_sweep(cfg, seed=1)
        for method in ("srs-el", "brss-el", "brss-ker"):
            assert sum(s.cell.method == method for s in summaries) == 36
        assert summary_csv(summaries).count("\n") == 1 + 108

    def test_problems_are_exhaustive(self):
        cfg = SimulationConfig(families=["normal", "gamma", "uniform"], deltas=[0.3, 0.8], sizes=[21],
                               set_sizes=[2], rhos=[1.5], methods=["brss-el", "magic"], replicates=0, level=1.2)
        problems = cfg.problems()
        text = "\n".join(problems)
        for needle in ("replicates", "level", "'magic'", "'gamma'", "uniform, delta=0.3",
                       "rho must lie", "n_x=21 is not a multiple", "n_y=21 is not a multiple"):
            assert needle in text, needle
        with pytest.raises(ConfigError) as err:
            cfg.cells()
        assert err.value.problems == problems

    def test_too_few_cycles(self):
        cfg = SimulationConfig(**{**SMALL, "sizes": [4], "set_sizes": [4]})
        assert any("fewer than two cycles" in p for p in cfg.problems())

    def test_urss_allocation_problem(self):
        cfg = SimulationConfig(**{**SMALL, "methods": ["urss-el"], "sizes": [6], "p_ys": [0.8]})
        assert any("fewer than two units" in p for p in cfg.problems())

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            SimulationConfig.from_mapping({"families": ["normal"], "bogus": 1})

    def test_seed_required(self):
        with pytest.raises(ConfigError):
            run_sweep(SimulationConfig(**SMALL))

    def test_dump_round_trip(self, tmp_path):
        cfg = SimulationConfig(**SMALL, seed=3)
        path = tmp_path / "c.yaml"
        path.write_text(cfg.dump())
        assert SimulationConfig.load(path) == cfg

    @pytest.mark.parametrize("name", ["figure1", "figure2", "figure3", "figure4", "table2"])
    def test_presets(self, name):
        assert name in preset_names()
        cfg = load_preset(name)
        assert cfg.problems() == []
        assert set(cfg.methods) <= set(METHODS)

    def test_table2_preset_geometry(self):
        cells = load_preset("table2").cells()
        assert sorted({(c.n_x, c.n) for c in cells}) == [(40, 40), (100, 40), (200, 40)]
        assert {c.method for c in cells} == {"brss-el", "dual-el"}

    def test_figure4_preset_sweeps_allocation(self):
        cells = [c for c in load_preset("figure4").cells() if c.method == "urss-el"]
        assert sorted({c.p_y for c in cells}) == [0.3, 0.4, 0.5, 0.6, 0.7]

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            load_preset("figure9")


class TestOutput:
    def test_column_order(self, tmp_path):
        summaries = run_sweep(SimulationConfig(**SMALL), seed=2)
        path = tmp_path / "s.csv"
        write_summary_csv(path, summaries)
        header = path.read_text().splitlines()[0].split(",")
        assert header[:11] == ["method", "family", "delta", "n", "set_size", "rho", "p_y",
                               "coverage", "avg_length", "sd_length", "degenerate_count"]
        assert tuple(header) == SUMMARY_COLUMNS
        rows = read_summary_csv(path)
        assert rows[0]["rho"] == "" and rows[0]["set_size"] == "1"
        assert float(rows[1]["coverage"]) == summaries[1].coverage

    def test_full_precision(self):
        text = summary_csv(run_sweep(SimulationConfig(**SMALL), seed=2))
        value = text.splitlines()[1].split(",")[8]
        assert len(value.split(".")[1]) > 8

    def test_replicate_file(self, tmp_path):
        summaries, records = run_sweep(SimulationConfig(**SMALL), seed=2, return_records=True)
        path = tmp_path / "r.csv"
        write_replicates_csv(path, summaries, records)
        lines = path.read_text().splitlines()
        assert len(lines) == 1 + 2 * 40
        first = lines[1].split(",")
        assert first[8] == "0"
        assert float(first[13]) == pytest.approx(float(first[11]) - float(first[10]))


class TestSanity:
    def test_lengths_shrink_with_size(self):
        cfg = SimulationConfig(families=["normal", "uniform"], deltas=[0.7], sizes=[20, 40, 80], set_sizes=[2],
                               rhos=[1.0], methods=["srs-el", "brss-el", "brss-ker"], replicates=150)
        summaries = run_sweep(cfg, seed=4)
        groups = {}
        for s in summaries:
            groups.setdefault((s.cell.method, s.cell.family), []).append(s.avg_length)
        for lengths in groups.values():
            assert lengths == sorted(lengths, reverse=True)

    def test_doubling_replicates_is_consistent(self):
        base = dict(families=["normal", "lognormal"], deltas=[0.6, 0.9], sizes=[20], set_sizes=[2],
                    rhos=[1.0], methods=["srs-el", "brss-el"])
        small = run_sweep(SimulationConfig(**base, replicates=200), seed=8)
        large = run_sweep(SimulationConfig(**base, replicates=400), seed=8)
        for a, b in zip(small, large):
            p = b.coverage
            assert abs(a.coverage - b.coverage) < 3 * math.sqrt(max(p * (1 - p), 1e-3) / 200)
