"""Closed-form minimum sum entropy for abelian groups of order 2^n.

Inside a diagonal box [k ln 2, (k+1) ln 2]^2 the minimum is the binary
function shifted by k ln 2; everywhere else it is max(x, y).
"""
from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np

from .binary import LN2, f2
from .errors import DomainError, UnsupportedGroupError
from .groups import FiniteAbelianGroup

# domain slack for entropies that arrive through floating arithmetic
_SLACK = 1e-12


def _boxes(v, n):
    """Vectorized box index; seams k ln 2 belong to the lower box."""
    k = np.ceil(v / LN2 - 1e-12) - 1
    return np.clip(k, 0, n - 1)


def _check(n, *vals):
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    top = n * LN2
    out = []
    for v in vals:
        v = np.asarray(v, dtype=float)
        if np.any(np.isnan(v)) or np.any(v < -_SLACK) or np.any(v > top + _SLACK):
            raise DomainError(f"entropy {v} outside [0, {n} ln 2]")
        out.append(np.clip(v, 0.0, top))
    return out


def f_2n(n: int, x, y):
    """Minimum of H(X + Y) over independent Z_{2^n}-valued X, Y with
    H(X) = x and H(Y) = y (nats). Broadcasts over arrays."""
    x, y = _check(n, x, y)
    kx = _boxes(x, n)
    ky = _boxes(y, n)
    same = kx == ky
    shift = kx * LN2
    # evaluate the shifted binary branch everywhere, with off-box points
    # parked at the origin of the box so f2 stays in its domain
    xs = np.where(same, np.clip(x - shift, 0.0, LN2), 0.0)
    ys = np.where(same, np.clip(y - shift, 0.0, LN2), 0.0)
    diag = shift + np.asarray(f2(xs, ys))
    val = np.where(same, diag, np.maximum(x, y))
    return float(val) if val.ndim == 0 else val


def f_group(group: FiniteAbelianGroup, x, y):
    """Closed form for any abelian 2-group; it depends only on the order."""
    if not group.is_two_group:
        raise UnsupportedGroupError(
            f"no closed form for {group}; use groupepi.oracle.min_sum_entropy instead"
        )
    return f_2n(group.exponent_n, x, y)


def f_gk(n: int, xs: Sequence[float]) -> float:
    """Minimum entropy of X_1 + ... + X_k with H(X_i) = xs[i].

    Right fold f(x_1, f(x_2, ... f(x_{k-1}, x_k))) over the sorted entries.
    The value is symmetric in its arguments; sorting makes the floating-point
    result bit-identical under permutation as well.
    """
    xs = sorted(float(v) for v in xs)
    if not xs:
        raise DomainError("f_gk needs at least one entropy")
    _check(n, *xs)
    return float(reduce(lambda acc, v: f_2n(n, v, acc), reversed(xs[:-1]), xs[-1]))


def f_gk_top_bin(n: int, xs: Sequence[float]) -> float:
    """Fold restricted to the entries in the highest occupied box.

    Independent evaluation route for f_gk: lower boxes are absorbed.
    """
    xs = np.sort(np.asarray(_check(n, *xs), dtype=float))
    boxes = _boxes(xs, n)
    top = xs[boxes == boxes.max()]
    return float(reduce(lambda acc, v: f_2n(n, v, acc), reversed(top[:-1]), top[-1]))


def _golden(fun, lo, hi, iters=60):
    invphi = (np.sqrt(5.0) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        if b - a < 1e-13:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    return (c, fc) if fc <= fd else (d, fd)


def _exponent(order: int) -> int:
    order = int(order)
    if order < 2 or order & (order - 1):
        raise DomainError(f"summand order must be a power of two >= 2, got {order}")
    return order.bit_length() - 1


def direct_sum_lower_bound(h_order: int, g_order: int, x: float, y: float, grid_resolution: int = 64) -> float:
    """min over (u, v) of f_H(u, v) + f_G(x - u, y - v) for 2-groups H, G.

    (u, v) ranges over max(0, x - ln|G|) <= u <= min(ln|H|, x) and
    likewise for v. This lower-bounds f on the direct sum H + G; for
    2-groups it equals f_2n(log2 |H| + log2 |G|, x, y).

    A uniform grid (augmented with every ln 2 seam in range) is searched
    first, then the incumbent is refined by alternating golden-section
    line searches inside its grid cell.
    """
    h_exp, g_exp = _exponent(h_order), _exponent(g_order)
    n = h_exp + g_exp
    x, y = (float(v) for v in _check(n, x, y))
    g_top, h_top = g_exp * LN2, h_exp * LN2
    u_lo, u_hi = max(0.0, x - g_top), min(h_top, x)
    v_lo, v_hi = max(0.0, y - g_top), min(h_top, y)
    if u_lo > u_hi + _SLACK or v_lo > v_hi + _SLACK:
        raise DomainError(f"empty (u, v) rectangle for x={x}, y={y}")
    u_hi, v_hi = max(u_lo, u_hi), max(v_lo, v_hi)

    def axis(lo, hi):
        pts = np.linspace(lo, hi, grid_resolution + 1)
        seams = LN2 * np.arange(0, n + 1)
        seams = seams[(seams > lo) & (seams < hi)]
        return np.unique(np.concatenate([pts, seams]))

    def objective(u, v):
        return f_2n(h_exp, u, v) + f_2n(g_exp, np.clip(x - u, 0, g_top), np.clip(y - v, 0, g_top))

    us, vs = axis(u_lo, u_hi), axis(v_lo, v_hi)
    U, V = np.meshgrid(us, vs, indexing="ij")
    vals = objective(U, V)
    i, j = np.unravel_index(np.argmin(vals), vals.shape)
    u, v, best = us[i], vs[j], float(vals[i, j])

    # coordinate-wise golden refinement within the neighbouring cells
    ulo, uhi = us[max(i - 1, 0)], us[min(i + 1, len(us) - 1)]
    vlo, vhi = vs[max(j - 1, 0)], vs[min(j + 1, len(vs) - 1)]
    for _ in range(4):
        start = best
        if uhi > ulo:
            cu, cval = _golden(lambda t: float(objective(t, v)), ulo, uhi)
            if cval < best:
                u, best = cu, cval
        if vhi > vlo:
            cv, cval = _golden(lambda t: float(objective(u, t)), vlo, vhi)
            if cval < best:
                v, best = cv, cval
        if best >= start - 1e-15:
            break
    return best
