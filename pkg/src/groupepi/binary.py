"""Scalar entropy algebra on the binary alphabet.

All entropies are in nats. Functions accept floats or numpy arrays and
return the same shape (0-d results come back as Python floats).
"""
import numpy as np
from scipy.special import entr

from .errors import BoundaryError, DomainError

LN2 = float(np.log(2.0))

# inputs this close to 0 or 1 are treated as exactly 0 or 1
CLAMP_EPS = 1e-15
# absolute bisection tolerance in p for the inverse
INV_TOL = 1e-14
# df2_dx switches to its analytic limits this close to the square's edges
BOUNDARY_EPS = 1e-12


def _out(a):
    a = np.asarray(a, dtype=float)
    return float(a) if a.ndim == 0 else a


def _xlogx(p):
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(p > 0, p * np.log(np.where(p > 0, p, 1.0)), 0.0)
    return out


def binary_entropy(p):
    """h(p) = -p ln p - (1-p) ln(1-p), with 0 ln 0 = 0."""
    p = np.asarray(p, dtype=float)
    if np.any(p < -CLAMP_EPS) or np.any(p > 1 + CLAMP_EPS) or np.any(np.isnan(p)):
        raise DomainError(f"binary_entropy needs p in [0, 1], got {p}")
    p = np.clip(p, 0.0, 1.0)
    p = np.where(p < CLAMP_EPS, 0.0, np.where(p > 1 - CLAMP_EPS, 1.0, p))
    return _out(-_xlogx(p) - _xlogx(1.0 - p))


def inverse_binary_entropy(x):
    """Unique p in [0, 1/2] with h(p) = x, found by bisection."""
    x = np.asarray(x, dtype=float)
    if np.any(x < -INV_TOL) or np.any(x > LN2 + INV_TOL) or np.any(np.isnan(x)):
        raise DomainError(f"inverse_binary_entropy needs x in [0, ln 2], got {x}")
    x = np.clip(x, 0.0, LN2)
    lo = np.zeros_like(x)
    hi = np.full_like(x, 0.5)
    # 60 halvings take 1/2 below 1e-18; the loop exits early once converged
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        below = entr(mid) + entr(1.0 - mid) < x
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= INV_TOL * 1e-3):
            break
    p = 0.5 * (lo + hi)
    p = np.where(x == 0.0, 0.0, np.where(x == LN2, 0.5, p))
    return _out(p)


def fold(p):
    """Map a probability onto the canonical half interval, p -> min(p, 1-p)."""
    p = np.asarray(p, dtype=float)
    return _out(np.minimum(p, 1.0 - p))


def star(p, q):
    """Binary convolution p(1-q) + q(1-p): crossover of two cascaded BSCs."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return _out(p * (1.0 - q) + q * (1.0 - p))


def solve_star(a, c):
    """Return t with a * t = c (the degraded-channel noise parameter).

    Mirrors the binary formula (p2 - p1) / (1 - 2 p1). Requires a, c in
    [0, 1/2] with a <= c; raises DomainError otherwise.
    """
    if not (0 <= a <= 0.5 and 0 <= c <= 0.5) or c < a - 1e-15:
        raise DomainError(f"no t in [0, 1/2] with {a} * t = {c}")
    if abs(1 - 2 * a) < 1e-15:
        if abs(c - 0.5) > 1e-12:
            raise DomainError("a = 1/2 absorbs everything; c must be 1/2")
        return 0.0
    return float(min(0.5, max(0.0, (c - a) / (1 - 2 * a))))


def _check_square(x, y, upper=LN2):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    tol = 1e-12
    for name, v in (("x", x), ("y", y)):
        if np.any(v < -tol) or np.any(v > upper + tol) or np.any(np.isnan(v)):
            raise DomainError(f"{name} must lie in [0, {upper}], got {v}")
    return np.clip(x, 0.0, upper), np.clip(y, 0.0, upper)


def f2(x, y):
    """Minimum entropy of X + Y on Z_2 given H(X) = x, H(Y) = y.

    Evaluated as h(h^{-1}(x) * h^{-1}(y)).
    """
    x, y = _check_square(x, y)
    p = inverse_binary_entropy(x)
    q = inverse_binary_entropy(y)
    return binary_entropy(star(p, q))


def df2_dx(x, y, boundary="limit"):
    """Partial derivative of f2 with respect to x.

    In the interior this is (1-2q) ln((1-s)/s) / ln((1-p)/p) with
    p = h^{-1}(x), q = h^{-1}(y), s = p * q.

    Near the edges of the square the quotient is singular. With
    ``boundary="limit"`` the analytic limits are returned instead: 1 on
    y = 0, (1-2q)^2 as x -> ln 2, and 0 as x -> 0 with y > 0. With
    ``boundary="raise"`` a BoundaryError is raised for x within 1e-12 of
    0 or ln 2.
    """
    x, y = _check_square(x, y)
    x, y = np.broadcast_arrays(x, y)
    p = np.asarray(inverse_binary_entropy(x), dtype=float)
    q = np.asarray(inverse_binary_entropy(y), dtype=float)
    at_left = x <= BOUNDARY_EPS
    at_right = x >= LN2 - BOUNDARY_EPS
    if boundary == "raise" and np.any(at_left | at_right):
        raise BoundaryError("df2_dx is singular at x = 0 and x = ln 2")
    if boundary not in ("limit", "raise"):
        raise ValueError(f"unknown boundary mode {boundary!r}")

    interior = ~(at_left | at_right)
    pi = np.where(interior, p, 0.25)
    s = np.asarray(star(pi, q))
    with np.errstate(divide="ignore", invalid="ignore"):
        val = (1 - 2 * q) * np.log((1 - s) / s) / np.log((1 - pi) / pi)
    val = np.where(interior, val, 0.0)
    val = np.where(at_right, (1 - 2 * q) ** 2, val)
    val = np.where(at_left & ~at_right, 0.0, val)
    val = np.where(y <= BOUNDARY_EPS, 1.0, val)
    return _out(val)


def df2_dy(x, y, boundary="limit"):
    return df2_dx(y, x, boundary=boundary)
