"""Numeric oracle: minimize H(X_1 + ... + X_k) subject to H(X_i) = x_i.

Works on any small finite abelian group, so it checks the closed form on
2-groups and probes other groups (Z_3, Z_5) where no closed form is known.

Each local search runs SLSQP on the stacked probability vectors with
analytic gradients. Its output is then made exactly feasible by a
one-dimensional correction: mix toward the uniform distribution to raise
entropy, or toward a point mass to lower it, with the mixing weight found
by bisection. Only exactly feasible tuples are ever reported, so every
returned value is an achieved sum entropy.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import entr

from .errors import CapacityError, DomainError
from .groups import (
    FiniteAbelianGroup,
    GroupDistribution,
    convolve_arrays,
    distribution_with_entropy,
    entropy_array,
    two_level_distribution,
)
from .binary import LN2, inverse_binary_entropy

log = logging.getLogger(__name__)

_TINY = 1e-300
MAX_K = 4
MAX_K_ORDER = 16
MAX_PAIR_ORDER = 64
MESH_MAX_ORDER = 5


@dataclass(frozen=True)
class MinimizationConfig:
    restarts: int = 6
    max_iterations: int = 400
    entropy_tolerance: float = 1e-9
    ftol: float = 1e-13
    seed: int = 1
    coarse_grid_resolution: int = 60
    coarse_candidates: int = 200
    structured_starts: bool = True

    def __post_init__(self):
        if self.restarts < 1:
            raise DomainError("restarts must be >= 1")
        if not self.entropy_tolerance > 0:
            raise DomainError("entropy_tolerance must be positive")

    def scaled(self, factor: int) -> "MinimizationConfig":
        return replace(self, restarts=self.restarts * factor)


@dataclass
class MinimizationResult:
    value: float
    argmin: tuple[GroupDistribution, ...]
    targets: tuple[float, ...]
    achieved: tuple[float, ...]
    converged: bool
    restarts_used: int
    starts_tried: int
    best_start: str = ""
    notes: list[str] = field(default_factory=list)

    @property
    def max_constraint_error(self) -> float:
        return max((abs(a - t) for a, t in zip(self.achieved, self.targets)), default=0.0)

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "targets": list(self.targets),
            "achieved": list(self.achieved),
            "converged": self.converged,
            "restarts_used": self.restarts_used,
            "starts_tried": self.starts_tried,
            "best_start": self.best_start,
            "argmin": [d.to_json()["probs"] for d in self.argmin],
            "notes": list(self.notes),
        }


# --- entropy correction -------------------------------------------------------


def match_entropy(p: np.ndarray, target: float, tol: float = 1e-13) -> np.ndarray:
    """Return a distribution with entropy ``target`` close to ``p``.

    Raising entropy mixes toward uniform (entropy is nondecreasing along
    that segment). Lowering it mixes toward a point mass on the heaviest
    atom; entropy along that segment is concave, so the predicate
    H >= target holds on an initial interval and bisection finds its end.
    """
    p = np.clip(np.asarray(p, dtype=float), 0.0, None)
    p = p / p.sum()
    m = p.size
    top = np.log(m)
    if not -1e-12 <= target <= top + 1e-12:
        raise DomainError(f"entropy target {target} outside [0, ln {m}]")
    if target >= top - 1e-15:
        return np.full(m, 1.0 / m)
    if target <= 1e-300:
        out = np.zeros(m)
        out[np.argmax(p)] = 1.0
        return out
    h = entropy_array(p)
    if abs(h - target) <= tol:
        return p
    if h < target:
        end = np.full(m, 1.0 / m)
    else:
        end = np.zeros(m)
        end[np.argmax(p)] = 1.0
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        q = (1 - mid) * p + mid * end
        hq = entropy_array(q)
        on_start_side = hq < target if h < target else hq >= target
        if on_start_side:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-17:
            break
    # pick whichever end of the bracket is closer in entropy
    qa = (1 - lo) * p + lo * end
    qb = (1 - hi) * p + hi * end
    return qa if abs(entropy_array(qa) - target) <= abs(entropy_array(qb) - target) else qb


def _match_entropy_rows(P: np.ndarray, target: float) -> np.ndarray:
    """Vectorized ``match_entropy`` over the rows of P (same target)."""
    P = np.asarray(P, dtype=float)
    m = P.shape[1]
    if target >= np.log(m) - 1e-15 or target <= 1e-300:
        return np.array([match_entropy(p, target) for p in P])
    h = entr(P).sum(axis=1)
    raise_ = h < target
    end = np.zeros_like(P)
    end[np.arange(len(P)), np.argmax(P, axis=1)] = 1.0
    end[raise_] = 1.0 / m
    lo = np.zeros(len(P))
    hi = np.ones(len(P))
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        hq = entr((1 - mid)[:, None] * P + mid[:, None] * end).sum(axis=1)
        start_side = np.where(raise_, hq < target, hq >= target)
        lo = np.where(start_side, mid, lo)
        hi = np.where(start_side, hi, mid)
    return (1 - hi)[:, None] * P + hi[:, None] * end


# --- objective ----------------------------------------------------------------


def _conv_all(group, parts):
    out = parts[0]
    for q in parts[1:]:
        out = convolve_arrays(group, out, q)
    return out


def _sum_entropy(group, parts) -> float:
    return entropy_array(_conv_all(group, parts))


def _local_solve(group, targets, starts, cfg):
    """One SLSQP run from ``starts`` (list of arrays); returns feasible parts."""
    m = group.order
    k = len(targets)
    T = group.subtraction_table
    targets = np.asarray(targets, dtype=float)

    def split(z):
        return [z[i * m:(i + 1) * m] for i in range(k)]

    def objective(z):
        parts = [np.clip(q, 0.0, None) for q in split(z)]
        r = np.clip(_conv_all(group, parts), _TINY, None)
        w = -(np.log(r) + 1.0)
        grads = []
        for i in range(k):
            others = parts[:i] + parts[i + 1:]
            c = _conv_all(group, others) if others else np.eye(m)[0]
            grads.append(c[T].T @ w)
        return float(-np.sum(r * np.log(r))), np.concatenate(grads)

    def constraints(z):
        parts = split(z)
        out = [q.sum() - 1.0 for q in parts]
        for q, t in zip(parts, targets):
            qc = np.clip(q, _TINY, None)
            out.append(-np.sum(qc * np.log(qc)) - t)
        return np.array(out)

    def constraints_jac(z):
        parts = split(z)
        J = np.zeros((2 * k, k * m))
        for i, q in enumerate(parts):
            J[i, i * m:(i + 1) * m] = 1.0
            J[k + i, i * m:(i + 1) * m] = -(np.log(np.clip(q, _TINY, None)) + 1.0)
        return J

    z0 = np.concatenate(starts)
    res = minimize(
        objective,
        z0,
        jac=True,
        method="SLSQP",
        bounds=[(0.0, 1.0)] * (k * m),
        constraints=[{"type": "eq", "fun": constraints, "jac": constraints_jac}],
        options={"ftol": cfg.ftol, "maxiter": cfg.max_iterations},
    )
    z = res.x if np.all(np.isfinite(res.x)) else z0
    parts = [match_entropy(q, t) for q, t in zip(split(z), targets)]
    return parts, bool(res.success)


# --- start pools --------------------------------------------------------------


def _random_start(group, target, rng):
    m = group.order
    conc = rng.choice([0.2, 0.5, 1.0, 2.0])
    p = rng.dirichlet(np.full(m, conc))
    if rng.random() < 0.3 and m > 2:
        # sparse start: zero out a random subset
        keep = rng.choice(m, size=rng.integers(2, m), replace=False)
        mask = np.zeros(m)
        mask[keep] = 1.0
        p = p * mask + 1e-3 * mask
        p /= p.sum()
    return match_entropy(p, target)


def _structured_starts(group, targets):
    """Extremal configuration plus the two-level family on every chain level."""
    if not group.is_two_group:
        return []
    starts = [("extremal", [distribution_with_entropy(group, t).probs for t in targets])]
    n = group.exponent_n
    for k in range(n):
        parts = []
        for t in targets:
            # two-level at level k covers entropies [k ln 2, (k+1) ln 2]
            if k * LN2 - 1e-12 <= t <= (k + 1) * LN2 + 1e-12:
                a = inverse_binary_entropy(min(LN2, max(0.0, t - k * LN2)))
                parts.append(two_level_distribution(group, k, 1 - a).probs)
            else:
                parts.append(match_entropy(two_level_distribution(group, k, 0.5).probs, t))
        starts.append((f"two-level-{k}", parts))
    return starts


@lru_cache(maxsize=16)
def _simplex_mesh(m: int, resolution: int):
    """All points of the simplex with coordinates in (1/resolution) Z."""
    bars = np.array(list(combinations(range(resolution + m - 1), m - 1)), dtype=np.int64)
    if bars.size == 0:
        bars = bars.reshape(1, 0)
    n_pts = bars.shape[0]
    edges = np.hstack([np.full((n_pts, 1), -1), bars, np.full((n_pts, 1), resolution + m - 1)])
    mesh = np.diff(edges, axis=1).astype(float) - 1.0
    mesh /= resolution
    ent = entr(mesh).sum(axis=1)
    return mesh, ent


def _mesh_resolution(m: int, resolution: int, cap: int = 700_000) -> int:
    from math import comb

    while resolution > 4 and comb(resolution + m - 1, m - 1) > cap:
        resolution -= 4
    return resolution


def coarse_mesh_search(group, targets, cfg, keep: int = 3):
    """Evaluate all pairs of mesh points nearest the entropy shells.

    For each target, the ``coarse_candidates`` mesh points closest in
    entropy are corrected onto the shell exactly; every pair is then
    evaluated and the best ``keep`` pairs returned as (value, parts).
    """
    m = group.order
    res = _mesh_resolution(m, cfg.coarse_grid_resolution)
    mesh, ent = _simplex_mesh(m, res)
    cands = []
    for t in targets:
        count = min(cfg.coarse_candidates, len(mesh))
        idx = np.argpartition(np.abs(ent - t), count - 1)[:count]
        cands.append(_match_entropy_rows(mesh[idx], t))
    A, B = cands
    T = group.subtraction_table
    # r[i, j, g] = sum_h A[i, h] B[j, g - h]
    Bt = B[:, T]  # (nb, m, m): Bt[j, g, h] = B[j, g - h]
    r = np.einsum("ih,jgh->ijg", A, Bt)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = -np.sum(np.where(r > 0, r * np.log(np.where(r > 0, r, 1.0)), 0.0), axis=2)
    flat = np.argsort(vals, axis=None)[:keep]
    out = []
    for f in flat:
        i, j = np.unravel_index(f, vals.shape)
        out.append((float(vals[i, j]), [A[i], B[j]]))
    return out


# --- drivers ------------------------------------------------------------------


def _validate_targets(group, targets):
    top = group.log_order
    clean = []
    for t in targets:
        t = float(t)
        if not -1e-12 <= t <= top + 1e-12 or np.isnan(t):
            raise DomainError(f"entropy {t} infeasible on {group} (max ln {group.order} = {top})")
        clean.append(min(max(t, 0.0), top))
    return clean


def _trivial(group, targets):
    """Handle point-mass and uniform summands analytically.

    Returns (value, parts) if the problem is decided, else the indices of
    the summands that still need optimizing.
    """
    top = group.log_order
    m = group.order
    if any(t >= top - 1e-12 for t in targets):
        parts = [np.full(m, 1.0 / m) if t >= top - 1e-12 else distribution_like(group, t) for t in targets]
        return top, parts
    active = [i for i, t in enumerate(targets) if t > 1e-12]
    if len(active) <= 1:
        parts = [distribution_like(group, t) for t in targets]
        return (targets[active[0]] if active else 0.0), parts
    return active


def distribution_like(group, t):
    """Some distribution on ``group`` with entropy exactly t."""
    if group.is_two_group:
        return distribution_with_entropy(group, t).probs
    base = np.linspace(1.0, 2.0, group.order)
    return match_entropy(base / base.sum(), t)


def _finish(group, targets, best_val, best_parts, label, converged, restarts, tried, cfg, notes=()):
    dists = tuple(GroupDistribution(group, p) for p in best_parts)
    achieved = tuple(entropy_array(p) for p in best_parts)
    ok = converged and all(abs(a - t) <= cfg.entropy_tolerance for a, t in zip(achieved, targets))
    if not ok:
        log.info("oracle did not converge cleanly for targets %s on %s", targets, group)
    return MinimizationResult(
        value=float(best_val),
        argmin=dists,
        targets=tuple(targets),
        achieved=achieved,
        converged=ok,
        restarts_used=restarts,
        starts_tried=tried,
        best_start=label,
        notes=list(notes),
    )


def _optimize(group, targets, cfg, extra_starts=(), use_mesh=False):
    decided = _trivial(group, targets)
    if isinstance(decided, tuple):
        value, parts = decided
        return _finish(group, targets, value, parts, "analytic", True, 0, 0, cfg)
    active = decided
    sub_targets = [targets[i] for i in active]

    pool = []
    if cfg.structured_starts:
        pool.extend(_structured_starts(group, sub_targets))
    notes = []
    if use_mesh and len(active) == 2 and group.order <= MESH_MAX_ORDER:
        for r, (val, parts) in enumerate(coarse_mesh_search(group, sub_targets, cfg)):
            pool.append((f"mesh-{r}", parts))
        notes.append("coarse simplex mesh certification used")
    for label, parts in extra_starts:
        pool.append((label, [parts[i] for i in active] if len(parts) == len(targets) else parts))
    for r in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, r])
        pool.append((f"random-{r}", [_random_start(group, t, rng) for t in sub_targets]))

    best_val, best_parts, best_label = np.inf, None, ""
    any_success = False
    for label, parts in pool:
        parts = [match_entropy(p, t) for p, t in zip(parts, sub_targets)]
        start_val = _sum_entropy(group, parts)
        if start_val < best_val:
            best_val, best_parts, best_label = start_val, parts, label
        sol, success = _local_solve(group, sub_targets, parts, cfg)
        any_success |= success
        val = _sum_entropy(group, sol)
        if val < best_val:
            best_val, best_parts, best_label = val, sol, label

    full = []
    it = iter(best_parts)
    for i, t in enumerate(targets):
        full.append(next(it) if i in active else distribution_like(group, 0.0))
    return _finish(group, targets, best_val, full, best_label, any_success, cfg.restarts, len(pool), cfg, notes)


def min_sum_entropy(group: FiniteAbelianGroup, x: float, y: float, config: MinimizationConfig | None = None,
                    extra_starts: Sequence = ()) -> MinimizationResult:
    """Best found min H(X + Y) with H(X) = x, H(Y) = y on ``group``.

    The pool of starting points holds the extremal pair and two-level
    families (2-groups only), the best pairs of a coarse simplex mesh
    (groups of order <= 5), and seeded random draws. ``extra_starts`` is a
    sequence of (label, [p_x, p_y]) warm starts.
    """
    cfg = config or MinimizationConfig()
    if group.order > MAX_PAIR_ORDER:
        raise CapacityError(f"pair oracle limited to order {MAX_PAIR_ORDER}")
    targets = _validate_targets(group, [x, y])
    return _optimize(group, targets, cfg, extra_starts=extra_starts, use_mesh=True)


def min_sum_entropy_k(group: FiniteAbelianGroup, xs: Sequence[float],
                      config: MinimizationConfig | None = None) -> MinimizationResult:
    """k-summand version; k <= 4 and |G| <= 16."""
    cfg = config or MinimizationConfig()
    xs = list(xs)
    if not xs:
        raise DomainError("need at least one entropy")
    if len(xs) > MAX_K or group.order > MAX_K_ORDER:
        raise CapacityError(f"k-fold oracle limited to k <= {MAX_K}, |G| <= {MAX_K_ORDER}")
    targets = _validate_targets(group, xs)
    return _optimize(group, targets, cfg, use_mesh=len(xs) == 2)


# --- convexity scan -----------------------------------------------------------

SCAN_LABEL = (
    "independent numerical reconstruction of a convexity scan; "
    "a consistency check on a finite grid, not a proof"
)


def _warm(parts, targets):
    return [match_entropy(np.asarray(p), t) for p, t in zip(parts, targets)]


def convexity_scan(group: FiniteAbelianGroup, axis_grid=None, fixed_values=None,
                   config: MinimizationConfig | None = None, tol_conv: float = 1e-4,
                   resolution: int = 40) -> dict:
    """Scan x -> f_G(x, y) for each fixed y and report negative second
    differences below -tol_conv.

    Grid values are improved by warm starting each point from its
    neighbours' minimizers until no value drops; triples still flagged are
    re-run with four times the restarts before being reported.
    """
    cfg = config or MinimizationConfig()
    if group.order > 8:
        raise CapacityError("convexity scans are limited to |G| <= 8")
    top = group.log_order
    xs = np.linspace(0.0, top, resolution + 1) if axis_grid is None else np.asarray(axis_grid, dtype=float)
    ys = np.array([0.2, 0.4, 0.6, 0.8]) * top if fixed_values is None else np.asarray(fixed_values, dtype=float)

    rows = []
    violations = []
    for y in ys:
        results = [min_sum_entropy(group, x, y, cfg) for x in xs]
        _polish_with_neighbours(group, xs, y, results, cfg)
        d2 = _second_differences(results)
        flagged = np.flatnonzero(d2 < -tol_conv)
        if flagged.size:
            strong = cfg.scaled(4)
            for i in sorted({j for f in flagged for j in (f, f + 1, f + 2)}):
                again = min_sum_entropy(group, xs[i], y, strong)
                if again.value < results[i].value:
                    results[i] = again
            _polish_with_neighbours(group, xs, y, results, cfg)
            d2 = _second_differences(results)
        for f in np.flatnonzero(d2 < -tol_conv):
            violations.append({
                "y": float(y),
                "x": [float(xs[f]), float(xs[f + 1]), float(xs[f + 2])],
                "second_difference": float(d2[f]),
            })
        rows.append({
            "y": float(y),
            "values": [r.value for r in results],
            "min_second_difference": float(d2.min()) if d2.size else 0.0,
            "all_converged": all(r.converged for r in results),
        })
    return {
        "group": str(group),
        "method": SCAN_LABEL,
        "tolerance": tol_conv,
        "x_grid": [float(v) for v in xs],
        "rows": rows,
        "violations": violations,
        "consistent": not violations,
    }


def _second_differences(results):
    vals = np.array([r.value for r in results])
    return vals[:-2] - 2 * vals[1:-1] + vals[2:]


def _polish_with_neighbours(group, xs, y, results, cfg, max_sweeps=3):
    light = replace(cfg, restarts=1, structured_starts=False)
    for _ in range(max_sweeps):
        improved = False
        order = list(range(len(xs)))
        for sweep, step in ((order[1:], -1), (order[::-1][1:], 1)):
            for i in sweep:
                src = results[i + step].argmin
                warm = _warm([src[0].probs, src[1].probs], [xs[i], y])
                cand = _optimize_from(group, [xs[i], y], warm, light)
                if cand is not None and cand.value < results[i].value - 1e-13:
                    cand.converged = cand.converged or results[i].converged
                    results[i] = cand
                    improved = True
        if not improved:
            break


def _optimize_from(group, targets, parts, cfg):
    decided = _trivial(group, targets)
    if isinstance(decided, tuple):
        return None
    sol, success = _local_solve(group, targets, parts, cfg)
    val = _sum_entropy(group, sol)
    return _finish(group, targets, val, sol, "neighbour", success, 0, 1, cfg)
