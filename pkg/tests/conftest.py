import numpy as np
import pytest
from hypothesis import strategies as st

from pellabel.canonical import CurveConfig

# independent high-precision values (mpmath, 30 digits, theta substitution)
ORACLE = {
    "lam_sym_g1": 0.5493061443340548457,
    "acosh2": 1.3169578969248167086,
    "sqrt3_minus_acosh2": 0.4150929106440605849,
    "g2_012345": {
        "R": [5.2098939233266852308, -5.0, 1.0],
        "eta": [1.1730898366283338229, 0.79541298033312559263, 1.1730898366283338229],
        "roots": [1.4801440902395501786, 3.5198559097604498214],
        "lam": [0.23404602109923506034, 0.23404602109923506034],
    },
    "g1_0_1_3_45": {
        "R": [-1.9694891025695010643, 1.0],
        "eta": [1.43887502418626773, 1.7027176294035255084],
        "roots": [1.9694891025695010643],
        "lam": [0.48232448762800119019],
    },
    "g3_mixed": {
        "endpoints": (-1.3, -0.2, 0.4, 1.1, 2.0, 2.5, 3.7, 5.0),
        "R": [-0.44967682313314422586, 5.2821634370947395611, -4.763807396307819932, 1.0],
        "eta": [1.0185663405994587948, 0.4908422255407663242, 0.45237105083553397971, 1.1798130366140341397],
        "roots": [0.092736264081026586086, 1.557242157722108495, 3.113828974504684851],
        "lam": [0.12593376037964323971, 0.16668305628752529394, 0.22622352716623021887],
    },
}

SYM_G1 = CurveConfig((-2.0, -1.0, 1.0, 2.0))
INTERVAL = CurveConfig((-1.0, 1.0))


def random_curve(rng, g, lo=-3.0, hi=3.0, min_sep=1e-3):
    while True:
        e = np.sort(rng.uniform(lo, hi, 2 * g + 2))
        if np.min(np.diff(e)) > min_sep:
            return CurveConfig(tuple(float(v) for v in e))


@st.composite
def curves(draw, g_min=1, g_max=3, min_frac=0.02):
    """Curves whose consecutive endpoints are at least ``min_frac`` of the hull apart."""
    g = draw(st.integers(g_min, g_max))
    weights = draw(st.lists(st.floats(min_frac, 1.0), min_size=2 * g + 1, max_size=2 * g + 1))
    start = draw(st.floats(-5.0, 5.0))
    scale = draw(st.floats(0.5, 5.0))
    steps = np.asarray(weights) / np.sum(weights) * scale
    pts = start + np.concatenate(([0.0], np.cumsum(steps)))
    return CurveConfig(tuple(float(v) for v in pts))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_configure(config):
    config.acceptance_lines = {}


@pytest.fixture
def acceptance(request):
    """Record one summary line per acceptance criterion."""

    def record(n, ok, detail):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
        request.config.acceptance_lines[n] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
