"""Exact rational polynomials and Sturm root counting."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError


def _frac(c) -> Fraction:
    # floats convert exactly (as dyadic rationals); pass strings or
    # Fractions for decimal values
    return Fraction(c)


class Polynomial:
    """Polynomial with Fraction coefficients in ascending degree order."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def x(cls) -> "Polynomial":
        return cls([0, 1])

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __call__(self, t) -> Fraction:
        t = _frac(t)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial([other])
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __neg__(self):
        return Polynomial(-c for c in self.coeffs)

    def __add__(self, other):
        other = other if isinstance(other, Polynomial) else Polynomial([other])
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Polynomial(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __sub__(self, other):
        other = other if isinstance(other, Polynomial) else Polynomial([other])
        return self + (-other)

    def __rsub__(self, other):
        return Polynomial([other]) - self

    def __mul__(self, other):
        other = other if isinstance(other, Polynomial) else Polynomial([other])
        if self.is_zero() or other.is_zero():
            return Polynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Polynomial([1])
        for _ in range(k):
            out = out * self
        return out

    def __divmod__(self, other: "Polynomial"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.leading
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i] / lead
            quot[i - dq] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[i - dq + j] -= c * b
        return Polynomial(quot), Polynomial(rem[:dq] if dq > 0 else [])

    def __mod__(self, other):
        return divmod(self, other)[1]

    def derivative(self) -> "Polynomial":
        return Polynomial(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def scale(self, c) -> "Polynomial":
        return Polynomial(_frac(c) * a for a in self.coeffs)

    def __repr__(self):
        if self.is_zero():
            return "Polynomial(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if i == 0 else ("p" if i == 1 else f"p^{i}")
            terms.append(f"{c}{'*' + mono if mono else ''}")
        return "Polynomial(" + " + ".join(terms) + ")"


def sign(v) -> int:
    return (v > 0) - (v < 0)


@dataclass(frozen=True)
class SturmSequence:
    terms: tuple[Polynomial, ...]

    def __len__(self):
        return len(self.terms)

    def __getitem__(self, i):
        return self.terms[i]

    def signs_at(self, t) -> tuple[int, ...]:
        return tuple(sign(g(t)) for g in self.terms)

    def variations(self, t) -> int:
        s = [v for v in self.signs_at(t) if v != 0]
        return sum(1 for a, b in zip(s, s[1:]) if a != b)


def sturm_sequence(poly: Polynomial) -> SturmSequence:
    """g0 = P, g1 = P', g_{i+1} = -(g_{i-1} mod g_i) until the remainder is 0."""
    if poly.is_zero():
        raise DomainError("Sturm sequence of the zero polynomial is undefined")
    terms = [poly]
    d = poly.derivative()
    if not d.is_zero():
        terms.append(d)
        while True:
            r = -(terms[-2] % terms[-1])
            if r.is_zero():
                break
            terms.append(r)
    return SturmSequence(tuple(terms))


@dataclass(frozen=True)
class RootCount:
    count: int
    a: Fraction
    b: Fraction
    shifted: bool


def count_real_roots_detailed(poly: Polynomial, a, b) -> RootCount:
    """Distinct real roots of ``poly`` in [a, b].

    If an endpoint is itself a root, it is moved outward by an exact
    rational step (halved until both endpoints are non-roots) and the
    shift is flagged, so roots on the closed interval are counted.
    """
    a, b = _frac(a), _frac(b)
    if not a < b:
        raise DomainError(f"need a < b, got [{a}, {b}]")
    seq = sturm_sequence(poly)
    shifted = False
    step = (b - a) / 1024
    aa, bb = a, b
    for _ in range(64):
        if poly(aa) != 0 and poly(bb) != 0:
            break
        shifted = True
        aa = a - step if poly(a) == 0 else a
        bb = b + step if poly(b) == 0 else b
        step /= 2
    return RootCount(seq.variations(aa) - seq.variations(bb), aa, bb, shifted)


def count_real_roots(poly: Polynomial, a, b) -> int:
    res = count_real_roots_detailed(poly, a, b)
    if res.shifted:
        warnings.warn(f"endpoint root: counted on shifted interval [{res.a}, {res.b}]", stacklevel=2)
    return res.count


def positive_multiple(p: Polynomial, q: Polynomial) -> Fraction | None:
    """c > 0 with p = c q exactly, else None."""
    if p.is_zero() or q.is_zero() or p.degree != q.degree:
        return None
    c = p.leading / q.leading
    if c > 0 and p == q.scale(c):
        return c
    return None


def poly_from(coeffs: Sequence) -> Polynomial:
    return Polynomial(coeffs)
