"""Finite abelian groups, distributions over them, and extremal constructions.

A group is a direct sum of cyclic groups Z_m1 + ... + Z_mr. Elements are
encoded by their mixed-radix index in C order (first factor most
significant), so ``Z_2 + Z_4`` has elements ``(a, b) -> 4 * a + b``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np
from scipy.special import entr

from .binary import LN2, inverse_binary_entropy
from .errors import CapacityError, DomainError, GroupMismatchError, UnsupportedGroupError

MAX_ORDER = 2**12
MASS_TOL = 1e-12
NEG_CLAMP = 1e-15
# dense subtraction tables are cached up to this order; larger groups use FFT
_TABLE_ORDER = 1024


def _is_power_of_two(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


@dataclass(frozen=True)
class FiniteAbelianGroup:
    cyclic_orders: tuple[int, ...]

    def __post_init__(self):
        orders = tuple(int(m) for m in self.cyclic_orders)
        if not orders or any(m < 2 for m in orders):
            raise DomainError(f"cyclic orders must all be >= 2, got {self.cyclic_orders}")
        object.__setattr__(self, "cyclic_orders", orders)
        if self.order > MAX_ORDER:
            raise CapacityError(f"group order {self.order} exceeds {MAX_ORDER}")

    @classmethod
    def cyclic(cls, m: int) -> "FiniteAbelianGroup":
        return cls((m,))

    @classmethod
    def parse(cls, text: str) -> "FiniteAbelianGroup":
        """Parse descriptors such as ``z4`` or ``z2xz4``."""
        parts = text.strip().lower().split("x")
        try:
            orders = [int(part.removeprefix("z")) for part in parts if part.startswith("z")]
        except ValueError:
            orders = []
        if len(orders) != len(parts) or not orders:
            raise DomainError(f"cannot parse group descriptor {text!r}")
        return cls(tuple(orders))

    @property
    def order(self) -> int:
        return int(np.prod(self.cyclic_orders))

    @property
    def is_two_group(self) -> bool:
        return all(_is_power_of_two(m) for m in self.cyclic_orders)

    @property
    def exponent_n(self) -> int:
        """n with order 2^n; only defined for 2-groups."""
        if not self.is_two_group:
            raise UnsupportedGroupError(f"{self} is not a 2-group")
        return self.order.bit_length() - 1

    @property
    def log_order(self) -> float:
        return float(np.log(self.order))

    def __str__(self):
        return "x".join(f"z{m}" for m in self.cyclic_orders)

    def to_json(self) -> dict:
        return {"cyclic_orders": list(self.cyclic_orders)}

    def decode(self, index: int) -> tuple[int, ...]:
        return tuple(int(c) for c in np.unravel_index(index, self.cyclic_orders))

    def encode(self, coords: Sequence[int]) -> int:
        coords = [int(c) % m for c, m in zip(coords, self.cyclic_orders)]
        return int(np.ravel_multi_index(coords, self.cyclic_orders))

    def add(self, g: int, h: int) -> int:
        return self.encode([a + b for a, b in zip(self.decode(g), self.decode(h))])

    def neg(self, g: int) -> int:
        return self.encode([-a for a in self.decode(g)])

    @cached_property
    def coords(self) -> np.ndarray:
        """(order, r) array of component coordinates of every element."""
        grids = np.indices(self.cyclic_orders).reshape(len(self.cyclic_orders), -1)
        return grids.T.copy()

    @cached_property
    def subtraction_table(self) -> np.ndarray:
        """T[g, h] = index of g - h."""
        return _subtraction_table(self.cyclic_orders)


@lru_cache(maxsize=64)
def _subtraction_table(orders: tuple[int, ...]) -> np.ndarray:
    grids = np.indices(orders).reshape(len(orders), -1)
    diff = (grids[:, :, None] - grids[:, None, :]) % np.array(orders)[:, None, None]
    table = np.ravel_multi_index(tuple(diff), orders)
    table.setflags(write=False)
    return table


def convolve_arrays(group: FiniteAbelianGroup, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Raw group convolution of probability vectors (no validation)."""
    if group.order <= _TABLE_ORDER:
        return b[group.subtraction_table] @ a
    shape = group.cyclic_orders
    fa = np.fft.fftn(a.reshape(shape))
    fb = np.fft.fftn(b.reshape(shape))
    out = np.fft.ifftn(fa * fb).real.reshape(-1)
    return np.clip(out, 0.0, None)


def entropy_array(p: np.ndarray) -> float:
    return float(np.sum(entr(p)))


@dataclass(frozen=True, eq=False)
class GroupDistribution:
    """A probability vector indexed by group elements.

    Entries within -1e-15 of zero are clamped; the total must be 1 within
    1e-12 and is then renormalized exactly.
    """

    group: FiniteAbelianGroup
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.array(self.probs, dtype=float).reshape(-1)
        if p.shape != (self.group.order,):
            raise DomainError(f"expected {self.group.order} probabilities, got {p.size}")
        if np.any(np.isnan(p)) or np.any(p < -NEG_CLAMP):
            raise DomainError("probabilities must be non-negative")
        p = np.clip(p, 0.0, None)
        total = p.sum()
        if abs(total - 1.0) > MASS_TOL:
            raise DomainError(f"probabilities sum to {total!r}, not 1")
        p = p / total
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @classmethod
    def point_mass(cls, group: FiniteAbelianGroup, element: int = 0) -> "GroupDistribution":
        p = np.zeros(group.order)
        p[element] = 1.0
        return cls(group, p)

    @classmethod
    def uniform(cls, group: FiniteAbelianGroup) -> "GroupDistribution":
        return cls(group, np.full(group.order, 1.0 / group.order))

    def __len__(self):
        return self.group.order

    def __getitem__(self, g):
        return self.probs[g]

    def entropy(self) -> float:
        return entropy(self)

    def allclose(self, other: "GroupDistribution", atol: float = 1e-12) -> bool:
        return self.group == other.group and np.allclose(self.probs, other.probs, atol=atol, rtol=0)

    def to_json(self) -> dict:
        return {"group": self.group.to_json(), "probs": [float(v) for v in self.probs]}

    def __repr__(self):
        vals = ", ".join(f"{v:.6g}" for v in self.probs)
        return f"GroupDistribution({self.group}, [{vals}])"


def distribution_from_json(obj) -> GroupDistribution:
    """Build a distribution from ``{"group": {...}, "probs": [...]}``.

    Probabilities may be JSON numbers or exact decimal strings. A JSON
    string is parsed first.
    """
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        orders = obj["group"]["cyclic_orders"]
        raw = obj["probs"]
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed distribution literal: {exc}") from None
    group = FiniteAbelianGroup(tuple(orders))
    probs = [float(Decimal(v)) if isinstance(v, str) else float(v) for v in raw]
    return GroupDistribution(group, probs)


def convolve(a: GroupDistribution, b: GroupDistribution) -> GroupDistribution:
    """Distribution of X + Y for independent X ~ a, Y ~ b."""
    if a.group != b.group:
        raise GroupMismatchError(f"cannot convolve over {a.group} and {b.group}")
    out = convolve_arrays(a.group, a.probs, b.probs)
    return GroupDistribution(a.group, out / out.sum())


def entropy(d: GroupDistribution) -> float:
    """Shannon entropy in nats."""
    return entropy_array(d.probs)


# --- subgroup chains -------------------------------------------------------


@dataclass(frozen=True)
class SubgroupChain:
    """Nested subgroups of orders 2^0, ..., 2^n as sorted index arrays."""

    group: FiniteAbelianGroup
    levels: tuple[np.ndarray, ...]
    generators: tuple[int, ...]

    def __len__(self):
        return len(self.levels)

    def level(self, k: int) -> np.ndarray:
        return self.levels[k]


@lru_cache(maxsize=64)
def canonical_chain(group: FiniteAbelianGroup) -> SubgroupChain:
    """Canonical maximal chain {0} = S_0 < S_1 < ... < S_n = G.

    Factors are visited by decreasing order (ties keep their position); each
    step doubles the subgroup inside the first factor that still has room.
    Inside Z_{2^a} with j doublings the component ranges over multiples of
    2^(a-j). ``generators[k]`` is the element added at step k + 1.
    """
    if not group.is_two_group:
        raise UnsupportedGroupError(f"{group} is not a 2-group; no order-2^k chain")
    orders = group.cyclic_orders
    exps = [m.bit_length() - 1 for m in orders]
    visit = sorted(range(len(orders)), key=lambda i: (-orders[i], i))
    used = [0] * len(orders)
    coords = group.coords
    levels = []
    gens = []

    def members():
        mask = np.ones(group.order, dtype=bool)
        for i, m in enumerate(orders):
            step = m >> used[i]
            mask &= coords[:, i] % step == 0
        idx = np.flatnonzero(mask)
        idx.setflags(write=False)
        return idx

    levels.append(members())
    for _ in range(group.exponent_n):
        i = next(i for i in visit if used[i] < exps[i])
        used[i] += 1
        gen = [0] * len(orders)
        gen[i] = orders[i] >> used[i]
        gens.append(group.encode(gen))
        levels.append(members())
    return SubgroupChain(group, tuple(levels), tuple(gens))


def default_offset(chain: SubgroupChain, k: int) -> int:
    """Smallest-index element of level k+1 outside level k."""
    return int(np.setdiff1d(chain.level(k + 1), chain.level(k))[0])


def two_level_distribution(group: FiniteAbelianGroup, k: int, alpha: float, offset=None) -> GroupDistribution:
    """Mass alpha uniform on chain level k, 1 - alpha uniform on a coset of it.

    The coset is ``offset + level k`` for an element of level k+1 outside
    level k; entropy is k ln 2 + h(alpha).
    """
    chain = canonical_chain(group)
    n = group.exponent_n
    if not 0 <= k < n:
        raise DomainError(f"level k must lie in 0..{n - 1}, got {k}")
    if not -1e-15 <= alpha <= 1 + 1e-15:
        raise DomainError(f"alpha must be a probability, got {alpha}")
    alpha = min(1.0, max(0.0, float(alpha)))
    c0 = chain.level(k)
    if offset is None:
        offset = default_offset(chain, k)
    upper = set(chain.level(k + 1).tolist())
    if offset not in upper or offset in set(c0.tolist()):
        raise DomainError(f"offset {offset} is not in level {k + 1} minus level {k}")
    c1 = np.array([group.add(offset, g) for g in c0])
    p = np.zeros(group.order)
    size = len(c0)
    p[c0] = alpha / size
    p[c1] = (1.0 - alpha) / size
    return GroupDistribution(group, p)


def gaussian_2n(group: FiniteAbelianGroup, alpha: float) -> GroupDistribution:
    """The '2^n-ary Gaussian': constant on each coset of the index-2 subgroup.

    alpha is the total mass on the subgroup itself.
    """
    if len(group.cyclic_orders) != 1 or not group.is_two_group:
        raise DomainError(f"gaussian_2n needs a cyclic 2-group, got {group}")
    return two_level_distribution(group, group.exponent_n - 1, alpha)


def is_gaussian(d: GroupDistribution, atol: float = 1e-12) -> bool:
    """True if d is constant on both cosets of the index-2 chain subgroup."""
    group = d.group
    chain = canonical_chain(group)
    sub = chain.level(group.exponent_n - 1)
    rest = np.setdiff1d(np.arange(group.order), sub)
    p = d.probs
    return bool(np.ptp(p[sub]) <= atol and np.ptp(p[rest]) <= atol)


def gaussian_parameter(d: GroupDistribution) -> float:
    """Mass on the index-2 subgroup (meaningful for Gaussian d)."""
    chain = canonical_chain(d.group)
    return float(d.probs[chain.level(d.group.exponent_n - 1)].sum())


# --- extremal constructions ---------------------------------------------------


def box_index(v: float, n: int) -> int:
    """Box k with k ln 2 <= v <= (k+1) ln 2; seams go to the lower box."""
    k = int(np.ceil(v / LN2 - 1e-12)) - 1
    return min(max(k, 0), n - 1)


def distribution_with_entropy(group: FiniteAbelianGroup, x: float) -> GroupDistribution:
    """A two-level distribution on the canonical chain with entropy x.

    Supported on chain level box_index(x) + 1.
    """
    n = group.exponent_n
    k = box_index(x, n)
    alpha = inverse_binary_entropy(min(LN2, max(0.0, x - k * LN2)))
    return two_level_distribution(group, k, 1.0 - alpha)


def extremal_pair(group: FiniteAbelianGroup, x: float, y: float) -> tuple[GroupDistribution, GroupDistribution]:
    """Independent (p_X, p_Y) with the prescribed entropies whose sum
    entropy equals the closed-form minimum.

    Same box k: both two-level at level k, sum entropy k ln 2 + f2(x', y').
    Different boxes: the larger one two-level at its box level, the smaller
    one supported inside that level's subgroup, so the sum is unchanged.
    """
    n = group.exponent_n
    top = n * LN2
    for name, v in (("x", x), ("y", y)):
        if not -1e-12 <= v <= top + 1e-12:
            raise DomainError(f"{name}={v} outside [0, {top}]")
    x = min(max(x, 0.0), top)
    y = min(max(y, 0.0), top)
    # both constructions keep the larger-box variable two-level at its own
    # box level and the other one inside level box+1 of the smaller box
    return distribution_with_entropy(group, x), distribution_with_entropy(group, y)


def extremal_family(group: FiniteAbelianGroup, xs: Sequence[float]) -> list[GroupDistribution]:
    """k-variable analogue of extremal_pair: every variable two-level at its
    own box level. Variables in the top box then sum to the fold value and
    the others are absorbed."""
    return [distribution_with_entropy(group, x) for x in xs]


def bernoulli(p: float) -> GroupDistribution:
    """Distribution on Z_2 with P(1) = p."""
    return GroupDistribution(FiniteAbelianGroup.cyclic(2), [1.0 - p, p])


__all__ = [
    "FiniteAbelianGroup",
    "GroupDistribution",
    "SubgroupChain",
    "bernoulli",
    "box_index",
    "canonical_chain",
    "convolve",
    "distribution_from_json",
    "distribution_with_entropy",
    "entropy",
    "extremal_family",
    "extremal_pair",
    "gaussian_2n",
    "gaussian_parameter",
    "is_gaussian",
    "two_level_distribution",
]
