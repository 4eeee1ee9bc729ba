"""Independent reference routines shared by the test modules.

Nothing here imports the package's own entropy inversion: the inverse
binary entropy is computed with scipy's brentq, and entropies of sums with
an explicit double loop over group elements.
"""
import itertools

import numpy as np
import pytest
from hypothesis import settings
from scipy.optimize import brentq
from scipy.stats import entropy as scipy_entropy

LN2 = np.log(2.0)

settings.register_profile("groupepi", deadline=None)
settings.load_profile("groupepi")


def h_ref(p):
    return float(scipy_entropy([p, 1 - p]))


def h_inv_ref(x):
    if x <= 0:
        return 0.0
    if x >= LN2:
        return 0.5
    return brentq(lambda p: h_ref(p) - x, 0.0, 0.5, xtol=1e-17, rtol=1e-15)


def f2_ref(x, y):
    p, q = h_inv_ref(x), h_inv_ref(y)
    return h_ref(p * (1 - q) + q * (1 - p))


def f4_ref(x, y):
    """Four-branch formula on Z_4 (branches agree on their shared seams)."""
    if x >= LN2 and y <= LN2:
        return x
    if x <= LN2 and y >= LN2:
        return y
    if x <= LN2 and y <= LN2:
        return f2_ref(x, y)
    return f2_ref(x - LN2, y - LN2) + LN2


def f2n_ref(n, x, y):
    """Shifted binary branch inside the diagonal boxes, max elsewhere."""
    kx = max(0, min(n - 1, int(np.ceil(x / LN2 - 1e-12)) - 1))
    ky = max(0, min(n - 1, int(np.ceil(y / LN2 - 1e-12)) - 1))
    if kx != ky:
        return max(x, y)
    return kx * LN2 + f2_ref(min(LN2, max(0.0, x - kx * LN2)), min(LN2, max(0.0, y - kx * LN2)))


def brute_convolve(orders, a, b):
    """Convolution on Z_{m1} + ... by enumerating all pairs of elements."""
    elems = list(itertools.product(*[range(m) for m in orders]))
    index = {e: i for i, e in enumerate(elems)}
    out = np.zeros(len(elems))
    for i, g in enumerate(elems):
        for j, h in enumerate(elems):
            s = tuple((u + v) % m for u, v, m in zip(g, h, orders))
            out[index[s]] += a[i] * b[j]
    return out


def shannon(p):
    return float(scipy_entropy(np.asarray(p, dtype=float)))


# filled by test_acceptance.py, printed once at the end of the session
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
