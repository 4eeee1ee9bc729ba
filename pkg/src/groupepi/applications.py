"""Mrs. Gerber-type inequality checkers and rate regions for additive
2^n-ary channels and sources.

Rates are in nats. Each region is swept over the Gaussian family on
Z_{2^n}, parametrized by the mass alpha on the index-2 subgroup;
alpha = 1/2 is the uniform distribution.
"""
from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .binary import LN2, fold, solve_star
from .closed_form import f_group
from .errors import CapacityError, DomainError, GroupMismatchError, PreconditionError, UnsupportedGroupError
from .groups import (
    FiniteAbelianGroup,
    GroupDistribution,
    canonical_chain,
    convolve,
    entropy_array,
    gaussian_2n,
    gaussian_parameter,
    is_gaussian,
)

MGL_TOL = 1e-9
MAX_JOINT_SIZE = 4096
MAX_VECTOR_K = 3


def default_alpha_grid(points: int = 201) -> np.ndarray:
    return np.linspace(0.0, 0.5, points)


# --- conditional sources and MGL ----------------------------------------------


@dataclass(frozen=True)
class ConditionalSource:
    """X drawn from ``x_given_u[u]`` after U drawn from ``u_probs``."""

    u_probs: np.ndarray
    x_given_u: tuple[GroupDistribution, ...]

    def __post_init__(self):
        u = np.asarray(self.u_probs, dtype=float).reshape(-1)
        rows = tuple(self.x_given_u)
        if u.size != len(rows) or not rows:
            raise DomainError("need one conditional row per value of U")
        if np.any(u < -1e-15) or abs(u.sum() - 1.0) > 1e-12:
            raise DomainError("u_probs must be a probability vector")
        if any(r.group != rows[0].group for r in rows):
            raise GroupMismatchError("conditional rows live on different groups")
        u = np.clip(u, 0.0, None)
        u = u / u.sum()
        u.setflags(write=False)
        object.__setattr__(self, "u_probs", u)
        object.__setattr__(self, "x_given_u", rows)

    @property
    def group(self) -> FiniteAbelianGroup:
        return self.x_given_u[0].group

    def joint(self) -> np.ndarray:
        """P(U = u, X = g) as a |U| x |G| array."""
        return self.u_probs[:, None] * np.array([r.probs for r in self.x_given_u])

    def through(self, noise: GroupDistribution) -> "ConditionalSource":
        """The source of Y = X + Z with Z ~ noise independent of (U, X)."""
        return ConditionalSource(self.u_probs, tuple(convolve(r, noise) for r in self.x_given_u))


def conditional_entropy(src: ConditionalSource) -> float:
    """H(X | U) = sum_u P(u) H(X | U = u)."""
    return float(sum(w * r.entropy() for w, r in zip(src.u_probs, src.x_given_u)))


def _f(group, x, y, numeric, config):
    if group.is_two_group:
        return f_group(group, x, y)
    if not numeric:
        raise UnsupportedGroupError(f"no closed form on {group}; pass numeric=True to use the oracle")
    from .oracle import min_sum_entropy

    return min_sum_entropy(group, x, y, config).value


def scalar_mgl_check(src: ConditionalSource, noise: GroupDistribution, numeric: bool = False,
                     config=None) -> float:
    """H(Y|U) - f_G(H(X|U), H(Z)) for Y = X + Z; nonnegative on 2-groups.

    On groups other than 2-groups the closed form is replaced by the
    numeric oracle when ``numeric`` is set (the slack is then only as good
    as the oracle's minimum, which overestimates the true one).
    """
    if noise.group != src.group:
        raise GroupMismatchError("noise and source live on different groups")
    hy = conditional_entropy(src.through(noise))
    hx = conditional_entropy(src)
    return float(hy - _f(src.group, hx, noise.entropy(), numeric, config))


def _apply_noise(table: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Convolve every G axis (all but the first) of ``table`` with the noise."""
    out = table
    for axis in range(1, table.ndim):
        # kernel[g, h] = P(Z = g - h); new[.., g, ..] = sum_h kernel[g, h] old[.., h, ..]
        out = np.moveaxis(np.tensordot(kernel, out, axes=([1], [axis])), 0, axis)
    return out


def _cond_entropy_table(table: np.ndarray) -> float:
    pu = table.reshape(table.shape[0], -1).sum(axis=1)
    return entropy_array(table.reshape(-1)) - entropy_array(pu)


def vector_mgl_check(group: FiniteAbelianGroup, joint: np.ndarray, noise: GroupDistribution) -> float:
    """H(Y^k|U)/k - f_G(H(X^k|U)/k, H(Z)) with Y_i = X_i + Z_i, Z_i i.i.d.

    ``joint`` has shape (|U|, |G|, ..., |G|) with k group axes, k <= 3.
    """
    if noise.group != group:
        raise GroupMismatchError("noise and table live on different groups")
    if not group.is_two_group:
        raise UnsupportedGroupError(f"vector check needs a 2-group, got {group}")
    joint = np.asarray(joint, dtype=float)
    k = joint.ndim - 1
    if k < 1 or any(s != group.order for s in joint.shape[1:]):
        raise DomainError(f"joint table must have shape (|U|, {group.order}, ...), got {joint.shape}")
    if k > MAX_VECTOR_K or joint.size > MAX_JOINT_SIZE:
        raise CapacityError(f"vector check limited to k <= {MAX_VECTOR_K}, |U||G|^k <= {MAX_JOINT_SIZE}")
    if np.any(joint < -1e-15) or abs(joint.sum() - 1.0) > 1e-12:
        raise DomainError("joint table must be a probability array")
    joint = np.clip(joint, 0.0, None)
    joint = joint / joint.sum()
    kernel = noise.probs[group.subtraction_table]
    hx = _cond_entropy_table(joint) / k
    hy = _cond_entropy_table(_apply_noise(joint, kernel)) / k
    return float(hy - f_group(group, hx, noise.entropy()))


def equality_condition_check(p_a: GroupDistribution, p_b: GroupDistribution) -> float:
    """H(p_a * p_b) - f_G(H(p_a), H(p_b)); zero on equality-achieving pairs."""
    if p_a.group != p_b.group:
        raise GroupMismatchError("distributions live on different groups")
    return float(convolve(p_a, p_b).entropy() - f_group(p_a.group, p_a.entropy(), p_b.entropy()))


# --- random instances ---------------------------------------------------------


def random_distribution(group: FiniteAbelianGroup, rng: np.random.Generator) -> GroupDistribution:
    """Dirichlet draw, sometimes supported on a chain subgroup or a point."""
    m = group.order
    conc = rng.choice([0.2, 0.5, 1.0, 3.0])
    p = rng.dirichlet(np.full(m, conc))
    roll = rng.random()
    if roll < 0.15:
        chain = canonical_chain(group)
        level = chain.level(int(rng.integers(0, len(chain.levels))))
        mask = np.zeros(m)
        mask[level] = 1.0
        p = p * mask
        if p.sum() == 0:
            p[level] = 1.0
        p /= p.sum()
    elif roll < 0.2:
        p = np.zeros(m)
        p[rng.integers(m)] = 1.0
    return GroupDistribution(group, p)


def random_conditional_source(group: FiniteAbelianGroup, rng: np.random.Generator) -> ConditionalSource:
    size = int(rng.integers(1, 5))
    u = rng.dirichlet(np.ones(size))
    return ConditionalSource(u, tuple(random_distribution(group, rng) for _ in range(size)))


def random_joint_table(group: FiniteAbelianGroup, k: int, rng: np.random.Generator) -> np.ndarray:
    size = int(rng.integers(1, 5))
    while size * group.order ** k > MAX_JOINT_SIZE and size > 1:
        size -= 1
    shape = (size,) + (group.order,) * k
    conc = rng.choice([0.1, 0.5, 1.0])
    t = rng.dirichlet(np.full(int(np.prod(shape)), conc)).reshape(shape)
    if rng.random() < 0.25:
        # product form given U: letters i.i.d. given U
        pu = rng.dirichlet(np.ones(size))
        t = np.empty(shape)
        for i in range(size):
            row = random_distribution(group, rng).probs
            prod = row
            for _ in range(k - 1):
                prod = np.multiply.outer(prod, row)
            t[i] = pu[i] * prod
    return t


def _scalar_instance(args):
    seed, i, group_text = args
    rng = np.random.default_rng([seed, i])
    group = FiniteAbelianGroup.parse(group_text)
    src = random_conditional_source(group, rng)
    noise = random_distribution(group, rng)
    return scalar_mgl_check(src, noise)


def _vector_instance(args):
    seed, i, group_text, k = args
    rng = np.random.default_rng([seed, i])
    group = FiniteAbelianGroup.parse(group_text)
    table = random_joint_table(group, k, rng)
    noise = random_distribution(group, rng)
    return vector_mgl_check(group, table, noise)


def mgl_monte_carlo(kind: str, trials: int, seed: int = 0, groups: Sequence[str] = ("z4", "z8", "z2xz4"),
                    k: int = 2, workers: int = 1) -> dict:
    """Run ``trials`` random scalar or vector MGL instances.

    Instance i uses the generator seeded by (seed, i) on groups[i % len];
    results are ordered by i whatever the worker count.
    """
    if kind not in ("scalar", "vector"):
        raise DomainError(f"unknown MGL kind {kind!r}")
    if kind == "scalar":
        jobs = [(seed, i, groups[i % len(groups)]) for i in range(trials)]
        fn = _scalar_instance
    else:
        jobs = [(seed, i, groups[i % len(groups)], k) for i in range(trials)]
        fn = _vector_instance
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            slacks = list(pool.map(fn, jobs, chunksize=max(1, trials // (8 * workers))))
    else:
        slacks = [fn(j) for j in jobs]
    slacks = np.array(slacks)
    worst = int(np.argmin(slacks)) if trials else -1
    bad = np.flatnonzero(slacks < -MGL_TOL)
    return {
        "kind": f"mgl-{kind}",
        "groups": list(groups),
        "trials": int(trials),
        "seed": int(seed),
        "min_slack": float(slacks.min()) if trials else None,
        "worst_instance": worst,
        "tolerance": MGL_TOL,
        "violations": [{"instance": int(i), "slack": float(slacks[i])} for i in bad],
        "passed": bool(bad.size == 0),
    }


# --- rate regions -------------------------------------------------------------


@dataclass
class RateRegionBoundary:
    kind: str
    alpha: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    clamped: np.ndarray
    equality_residual: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        order = np.argsort(self.alpha, kind="stable")
        for name in ("alpha", "r1", "r2", "clamped", "equality_residual"):
            v = getattr(self, name)
            if v is not None:
                setattr(self, name, np.asarray(v)[order])

    def __len__(self):
        return len(self.alpha)

    def points(self) -> list[tuple[float, float, float]]:
        return [(float(a), float(x), float(y)) for a, x, y in zip(self.alpha, self.r1, self.r2)]

    def to_csv(self, scale: float = 1.0, digits: int = 12) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alpha", "R1", "R2"])
        for a, x, y in self.points():
            w.writerow([f"{a:.{digits}g}", f"{x * scale:.{digits}g}", f"{y * scale:.{digits}g}"])
        return buf.getvalue()

    def to_json(self, scale: float = 1.0) -> dict:
        out = {
            "kind": self.kind,
            "alpha": [float(a) for a in self.alpha],
            "R1": [float(v) * scale for v in self.r1],
            "R2": [float(v) * scale for v in self.r2],
            "clamped": [bool(c) for c in self.clamped],
            **self.meta,
        }
        if self.equality_residual is not None:
            out["equality_residual"] = [float(v) for v in self.equality_residual]
        return out


def _cyclic_2n(n: int) -> FiniteAbelianGroup:
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    return FiniteAbelianGroup.cyclic(2 ** int(n))


def _require_gaussian(d: GroupDistribution, what: str):
    if not is_gaussian(d, atol=1e-12):
        raise PreconditionError(f"{what} must be constant on the cosets of the index-2 subgroup")


@dataclass(frozen=True)
class BroadcastSpec:
    """Degraded additive broadcast channel on Z_{2^n}.

    Receiver 1 sees X + Z1, receiver 2 sees X + Z1 + Z2_tilde with
    Z2_tilde Gaussian.
    """

    n: int
    p_z1: GroupDistribution
    p_z2_tilde: GroupDistribution

    def __post_init__(self):
        group = _cyclic_2n(self.n)
        for d in (self.p_z1, self.p_z2_tilde):
            if d.group != group:
                raise GroupMismatchError(f"noise must live on {group}, got {d.group}")
        _require_gaussian(self.p_z2_tilde, "p_z2_tilde")

    @property
    def group(self) -> FiniteAbelianGroup:
        return self.p_z1.group

    @property
    def p_z2(self) -> GroupDistribution:
        return convolve(self.p_z1, self.p_z2_tilde)


def _clamp(v):
    v = np.asarray(v, dtype=float)
    return np.maximum(v, 0.0), v < 0


def broadcast_region(spec: BroadcastSpec, alpha_grid=None) -> RateRegionBoundary:
    """Boundary of the capacity region swept over Gaussian inputs p_alpha:
    R1 = H(p_alpha * p_Z1) - H(p_Z1), R2 = n ln 2 - H(p_alpha * p_Z2).

    Each point also records the equality residual of the pair
    (p_alpha * p_Z1, p_Z2_tilde), which vanishes when the converse is
    tight at that point.
    """
    alphas = default_alpha_grid() if alpha_grid is None else np.asarray(alpha_grid, dtype=float)
    group = spec.group
    h1 = spec.p_z1.entropy()
    p_z2 = spec.p_z2
    top = spec.n * LN2
    r1, r2, res = [], [], []
    for a in alphas:
        pa = gaussian_2n(group, a)
        mixed = convolve(pa, spec.p_z1)
        r1.append(mixed.entropy() - h1)
        r2.append(top - convolve(pa, p_z2).entropy())
        res.append(equality_condition_check(mixed, spec.p_z2_tilde))
    r1, c1 = _clamp(r1)
    r2, c2 = _clamp(r2)
    return RateRegionBoundary("broadcast", alphas, r1, r2, c1 | c2, np.array(res), meta={"n": spec.n})


def degraded_noise(p_z1: GroupDistribution, p_z2: GroupDistribution) -> GroupDistribution:
    """Gaussian p_tilde with p_z1 * p_tilde = p_z2, for Gaussian p_z1, p_z2.

    Uses coset masses e1, e2: the coset mass of a convolution of Gaussians
    is e1 * t, so t solves a binary-convolution equation.
    """
    _require_gaussian(p_z1, "p_Z1")
    _require_gaussian(p_z2, "p_Z2")
    group = p_z1.group
    e1 = 1.0 - gaussian_parameter(p_z1)
    e2 = 1.0 - gaussian_parameter(p_z2)
    try:
        t = solve_star(fold(e1), fold(e2))
    except DomainError as exc:
        raise PreconditionError(f"Z2 is not a degraded version of Z1: {exc}") from None
    for cand in (t, 1.0 - t):
        tilde = gaussian_2n(group, 1.0 - cand)
        if np.allclose(convolve(p_z1, tilde).probs, p_z2.probs, atol=1e-12, rtol=0):
            return tilde
    raise PreconditionError("Z2 is not a degraded version of Z1")


def broadcast_region_gaussian(n: int, p_z1: GroupDistribution, p_z2: GroupDistribution,
                              alpha_grid=None) -> RateRegionBoundary:
    """Broadcast region when both noises are Gaussian; the degrading noise
    is solved for rather than given."""
    _cyclic_2n(n)
    tilde = degraded_noise(p_z1, p_z2)
    region = broadcast_region(BroadcastSpec(n, p_z1, tilde), alpha_grid)
    region.kind = "broadcast-gaussian"
    region.meta["degrading_parameter"] = gaussian_parameter(tilde)
    return region


def helper_region(n: int, p_z: GroupDistribution, alpha_grid=None) -> RateRegionBoundary:
    """Lossless source coding of X with a rate-limited helper observing Y,
    X = Y + Z. Lower corner: R1 = H(p_alpha * p_Z), R2 = n ln 2 - H(p_alpha)."""
    group = _cyclic_2n(n)
    if p_z.group != group:
        raise GroupMismatchError(f"noise must live on {group}")
    _require_gaussian(p_z, "p_Z")
    alphas = default_alpha_grid() if alpha_grid is None else np.asarray(alpha_grid, dtype=float)
    top = n * LN2
    r1, r2, res = [], [], []
    for a in alphas:
        pa = gaussian_2n(group, a)
        r1.append(convolve(pa, p_z).entropy())
        r2.append(top - pa.entropy())
        res.append(equality_condition_check(pa, p_z))
    r1, c1 = _clamp(r1)
    r2, c2 = _clamp(r2)
    return RateRegionBoundary("helper", alphas, r1, r2, c1 | c2, np.array(res), meta={"n": n})
