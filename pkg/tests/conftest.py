import numpy as np
import pytest

from freqkalman.core import MotionSequence


def naive_dct(x):
    """Orthonormal DCT-II by direct summation, one coefficient at a time."""
    N = len(x)
    out = []
    for k in range(N):
        s = sum(x[t] * np.cos(np.pi * (2 * t + 1) * k / (2 * N)) for t in range(N))
        out.append(s * (np.sqrt(1.0 / N) if k == 0 else np.sqrt(2.0 / N)))
    return np.array(out)


def central_diff_grad(f, Y, h=1e-5):
    """Central finite-difference gradient of scalar ``f`` at array ``Y``."""
    g = np.zeros_like(Y)
    it = np.nditer(Y, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        Yp = Y.copy()
        Ym = Y.copy()
        Yp[idx] += h
        Ym[idx] -= h
        g[idx] = (f(Yp) - f(Ym)) / (2 * h)
    return g


def max_rel_err(a, b, floor=1e-6):
    return float(np.max(np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def random_motion(rng):
    return MotionSequence.from_array(rng.normal(size=(20, 4, 3)), fps=30.0)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
