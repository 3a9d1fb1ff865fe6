import numpy as np
import pytest
from hypothesis import strategies as st

from qdephasing.channels import NoiseRates

finite = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, allow_infinity=False)


@st.composite
def pure_states(draw):
    re = draw(st.lists(finite, min_size=4, max_size=4))
    im = draw(st.lists(finite, min_size=4, max_size=4))
    a = np.array(re) + 1j * np.array(im)
    norm = np.linalg.norm(a)
    if norm < 1e-3:
        a = np.array([1, 0, 0, 0], dtype=complex)
        norm = 1.0
    return a / norm


@st.composite
def mixed_states(draw, rank=None):
    k = draw(st.integers(1, 4)) if rank is None else rank
    cols = [draw(pure_states()) for _ in range(k)]
    w = np.array(draw(st.lists(st.floats(0.05, 1.0), min_size=k, max_size=k)))
    rho = sum(p * np.outer(c, c.conj()) for p, c in zip(w, cols))
    return rho / np.trace(rho).real


rate_values = st.floats(min_value=0.0, max_value=10.0, allow_nan=False)


@st.composite
def noise_rates(draw):
    return NoiseRates(draw(rate_values), draw(rate_values), draw(rate_values))


def random_pure(rng, n=4):
    a = rng.normal(size=n) + 1j * rng.normal(size=n)
    return a / np.linalg.norm(a)


def random_mixed(rng, rank=4):
    w = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = w @ w.conj().T
    return rho / np.trace(rho).real


def random_unitary2(rng):
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(20030724)


BELL = np.array([1, 0, 0, 1]) / np.sqrt(2)
ROBUST_23 = np.array([0, 1, 1, 0]) / np.sqrt(2)


# Verdict lines recorded by the acceptance suite, echoed after the run.
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
