import numpy as np
import pytest
from hypothesis import strategies as st

from rss_auc import RankedSetSample


def random_sample(rng, counts, discrete=False):
    """Ranked set sample with the given stratum counts and random values."""
    counts = list(counts)
    if discrete:
        values = rng.integers(0, 6, size=sum(counts)).astype(float)
    else:
        values = rng.normal(size=sum(counts))
    stratum = np.repeat(np.arange(len(counts)), counts)
    return RankedSetSample(len(counts), values, stratum)


@st.composite
def sample_pairs(draw, min_count=1, max_set=3, max_count=4, discrete=False):
    """Hypothesis strategy for an (X, Y) pair of ranked set samples."""
    out = []
    for _ in range(2):
        m = draw(st.integers(1, max_set))
        counts = draw(st.lists(st.integers(min_count, max_count), min_size=m, max_size=m))
        if discrete:
            elem = st.integers(-3, 3).map(float)
        else:
            elem = st.floats(-5, 5, allow_nan=False, allow_infinity=False)
        values = draw(st.lists(elem, min_size=sum(counts), max_size=sum(counts)))
        out.append(RankedSetSample(m, np.array(values), np.repeat(np.arange(m), counts)))
    return tuple(out)


@pytest.fixture
def rng():
    return np.random.default_rng(20240915)


ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_report():
    """Record one PASS/FAIL line per acceptance criterion."""

    def report(number, title, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title}"
        if detail:
            line += f" | {detail}"
        ACCEPTANCE_LINES.append(line)
        print("\n" + line)
        return passed

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
