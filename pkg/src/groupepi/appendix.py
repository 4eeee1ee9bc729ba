"""Numeric and exact checks of the auxiliary inequalities behind the
ray-monotonicity of df2/dx.

Every function of p is in nats and is evaluated on (0, 1/2). The three
removable singularities that matter are filled in with their
limits: L(0) = 0, L'(0) = 1 and F1(0) = -1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .binary import LN2, df2_dx
from .errors import BoundaryError, DomainError
from .sturm import Polynomial, count_real_roots_detailed, positive_multiple, sturm_sequence

FUNCTION_IDS = ("M", "N", "L", "Lprime", "A", "B", "F", "F1", "F2", "F3", "F5", "P1", "P2", "P3")
CLAIM_IDS = ("np", "lp", "Fp", "p1p2", "dfdx_ray", "poly_bound_identity")


def _h(p):
    return -p * np.log(p) - (1 - p) * np.log1p(-p)


def _logit(p):
    return np.log1p(-p) - np.log(p)


def M(p):
    return p * (1 - p) * _logit(p) / (1 - 2 * p)


def M_prime(p):
    return (1 - 2 * p + 2 * p**2) * _logit(p) / (1 - 2 * p) ** 2 - 1 / (1 - 2 * p)


def N(p):
    return p * (1 - p) * (1 - 2 * p) * _logit(p) ** 2 / _h(p)


def N_prime(p):
    u = p - 3 * p**2 + 2 * p**3
    du = 1 - 6 * p + 6 * p**2
    ell, h = _logit(p), _h(p)
    return (du * ell**2 - 2 * (1 - 2 * p) * ell) / h - u * ell**3 / h**2


def L(q):
    q = np.asarray(q, dtype=float)
    safe = np.where(q > 0, q, 0.25)
    return np.where(q > 0, _h(safe) / _logit(safe), 0.0)


def L_prime(q):
    q = np.asarray(q, dtype=float)
    safe = np.where(q > 0, q, 0.25)
    val = 1 + _h(safe) / (safe * (1 - safe)) / _logit(safe) ** 2
    return np.where(q > 0, val, 1.0)


def _q(p, k):
    return (k - p) / (1 - 2 * p)


def A(p, k):
    return M(p) + N(p) * L(_q(p, k)) / (1 - 2 * k)


def B(p, k):
    """dA/dp at fixed k (dq/dp = -(1-2k)/(1-2p)^2)."""
    q = _q(p, k)
    return M_prime(p) + N_prime(p) * L(q) / (1 - 2 * k) - N(p) * L_prime(q) / (1 - 2 * p) ** 2


def B_diagonal(p):
    """B(p, p) = M'(p) - N(p)/(1-2p)^2."""
    return M_prime(p) - N(p) / (1 - 2 * p) ** 2


def F(p):
    lp, lq = np.log(p), np.log1p(-p)
    return p**2 * lp**2 - (1 - p) ** 2 * lq**2 + (1 - 2 * p) * (lp * lq + p * lp + (1 - p) * lq)


def F1(p):
    p = np.asarray(p, dtype=float)
    safe = np.where(p > 0, p, 0.25)
    lp, lq = np.log(safe), np.log1p(-safe)
    s = safe
    val = (
        2 * (1 - s) ** 2 * s * lq**2
        - s**2 * lp * (1 - 2 * s - 2 * (1 - s) * lp)
        + (1 - s) * lq * (1 - 3 * s + 2 * s**2 - 2 * s * lp)
    ) / ((1 - s) * s)
    return np.where(p > 0, val, -1.0)


def F2(p):
    lp, lq = np.log(p), np.log1p(-p)
    inner = (
        (-1 + p**2 + 2 * p**3 - 2 * p**4) * lq
        - 2 * (1 - p) ** 2 * p**2 * lq**2
        + p * (-1 + 3 * p - 2 * p**2 + p * (5 - 6 * p + 2 * p**2) * lp + 2 * (1 - p) ** 2 * p * lp**2)
    )
    return inner / ((1 - p) ** 2 * p**2)


def F3(p):
    lp, lq = np.log(p), np.log1p(-p)
    inner = (1 - p) ** 2 * (1 - p**2 + 2 * p**3) * lq + p * (
        1 + p - 4 * p**2 + 2 * p**3 + p * (2 - 4 * p + 5 * p**2 - 2 * p**3) * lp
    )
    return 2 * inner / ((1 - p) ** 3 * p**3)


# polynomial factors of F5, ascending coefficients
P1_HAT = Polynomial([2, -10, 20, -11, 7, -2])
P2_HAT = Polynomial([6, -15, 9, 3, -3, 2])
_X = Polynomial.x()
P1_POLY = 2 * _X**2 * P1_HAT
P2_POLY = 2 * (1 - _X) ** 2 * P2_HAT
P3_POLY = _X * Polynomial([12, -49, 70, -25, -12, 4])


def _poly_eval(poly: Polynomial, p):
    return np.polynomial.polynomial.polyval(p, [float(c) for c in poly.coeffs])


def P1(p):
    return _poly_eval(P1_POLY, p)


def P2(p):
    return _poly_eval(P2_POLY, p)


def P3(p):
    return _poly_eval(P3_POLY, p)


def F5(p):
    return 2 / ((1 - p) ** 5 * p**5) * (P1(p) * np.log(p) + P2(p) * np.log1p(-p) + P3(p))


_FUNCS = {
    "M": M, "N": N, "L": L, "Lprime": L_prime, "F": F, "F1": F1, "F2": F2, "F3": F3, "F5": F5,
    "P1": P1, "P2": P2, "P3": P3,
}
# closed domains where the formula (or its filled-in limit) is finite
_CLOSED_LEFT = {"L", "Lprime", "F1", "P1", "P2", "P3"}
_CLOSED_RIGHT = {"F", "F1", "F2", "F3", "F5", "P1", "P2", "P3"}


def eval_appendix(fid: str, p, k=None):
    """Evaluate the named function at p (and k for A and B)."""
    if fid not in FUNCTION_IDS:
        raise DomainError(f"unknown function id {fid!r}; choose from {FUNCTION_IDS}")
    arr = np.asarray(p, dtype=float)
    left_ok = fid in _CLOSED_LEFT
    right_ok = fid in _CLOSED_RIGHT
    if np.any(np.isnan(arr)) or np.any(arr < 0) or np.any(arr > 0.5):
        raise DomainError(f"{fid} needs p in (0, 1/2)")
    if (not left_ok and np.any(arr == 0)) or (not right_ok and np.any(arr == 0.5)):
        raise BoundaryError(f"{fid} is singular at the boundary of (0, 1/2)")
    if fid in ("A", "B"):
        if k is None:
            raise DomainError(f"{fid} needs k")
        k = np.asarray(k, dtype=float)
        if np.any(k < arr) or np.any(k >= 0.5):
            raise DomainError("k must satisfy p <= k < 1/2")
        val = (A if fid == "A" else B)(arr, k)
    else:
        if fid == "F" and np.any(arr == 0):
            with np.errstate(divide="ignore", invalid="ignore"):
                val = np.where(arr == 0, 0.0, F(np.where(arr == 0, 0.25, arr)))
        else:
            val = _FUNCS[fid](arr)
    val = np.asarray(val, dtype=float)
    return float(val) if val.ndim == 0 else val


# --- reference Sturm chains ----------------------------------------------------

F_ = Fraction
REFERENCE_CHAINS = {
    "P1_hat": (
        Polynomial([2, -10, 20, -11, 7, -2]),
        Polynomial([-10, 40, -33, 28, -10]),
        -Polynomial([F_(3, 5), F_(-12, 5), F_(369, 50), F_(-12, 25)]),
        -Polynomial([F_(-2675, 16), F_(2625, 4), F_(-61325, 32)]),
        -Polynomial([F_(4436544, 150430225), F_(-16965504, 150430225)]),
        Polynomial([F_(-31638033631325, 249850977408)]),
    ),
    "P2_hat": (
        Polynomial([6, -15, 9, 3, -3, 2]),
        Polynomial([-15, 18, 9, -12, 10]),
        -Polynomial([F_(51, 10), F_(-273, 25), F_(297, 50), F_(12, 25)]),
        -Polynomial([F_(45675, 32), F_(-50825, 16), F_(61325, 32)]),
        -Polynomial([F_(-2505792, 30086045), F_(16965504, 150430225)]),
        Polynomial([F_(31638033631325, 249850977408)]),
    ),
}
# sign patterns stated alongside the reference chains, at p = 0 and p = 1/2
REFERENCE_SIGNS = {
    "P1_hat": ((1, -1, -1, 1, -1, -1), (1, 1, -1, 1, 1, -1)),
    "P2_hat": ((1, -1, -1, -1, 1, 1), (1, -1, -1, -1, 1, 1)),
}
_HATS = {"P1_hat": P1_HAT, "P2_hat": P2_HAT}


# --- claim reports ------------------------------------------------------------


@dataclass
class Check:
    name: str
    value: float
    bound: float
    passed: bool
    note: str = ""

    def to_json(self):
        return {"name": self.name, "value": self.value, "bound": self.bound, "passed": self.passed, "note": self.note}


@dataclass
class ClaimReport:
    claim: str
    grid_size: int
    checks: list[Check] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_violation(self) -> float:
        """Largest amount by which any check overshoots its bound (0 if none)."""
        worst = 0.0
        for c in self.checks:
            if not c.passed and np.isfinite(c.value):
                worst = max(worst, abs(c.value - c.bound))
        return worst

    def to_json(self):
        return {
            "claim": self.claim,
            "grid_size": self.grid_size,
            "passed": self.passed,
            "max_violation": self.max_violation,
            "checks": [c.to_json() for c in self.checks],
            "details": self.details,
        }


def _grid(n):
    """n interior points of (0, 1/2)."""
    return np.arange(1, n + 1) / (2.0 * (n + 1))


def _upper(name, values, bound, note=""):
    v = float(np.max(values))
    return Check(name, v, bound, bool(v <= bound), note)


def _lower(name, values, bound, note=""):
    v = float(np.min(values))
    return Check(name, v, bound, bool(v >= bound), note)


def _check_np(n):
    p = _grid(n)
    d = np.diff(N(p))
    return [
        _upper("max forward difference of N", d, 0.0, "strictly decreasing needs every difference < 0"),
        Check("all differences negative", float(np.sum(d >= 0)), 0.0, bool(np.all(d < 0))),
        _upper("max N'", N_prime(p), 0.0),
    ]


def _check_lp(n):
    p = _grid(n)
    d = np.diff(L(p))
    return [
        _lower("min forward difference of L", d, 0.0),
        Check("all differences positive", float(np.sum(d <= 0)), 0.0, bool(np.all(d > 0))),
        _lower("min L'", L_prime(p), 1.0),
        Check("L'(0) limit", float(L_prime(0.0)), 1.0, float(L_prime(0.0)) == 1.0),
        Check("L(0) limit", float(L(0.0)), 0.0, float(L(0.0)) == 0.0),
    ]


def _fd_check(name, f, df, pts, step, tol):
    num = (f(pts + step) - f(pts - step)) / (2 * step)
    err = np.abs(num - df(pts)) / np.maximum(1.0, np.abs(df(pts)))
    return _upper(name, err, tol, f"central difference, step {step:g}")


def _check_Fp(n):
    p = _grid(n)
    inner = p[(p > 0.01) & (p < 0.49)]
    half = 0.5
    fd = inner[:: max(1, len(inner) // 200)]
    # F4 is not available in closed form, so F5 is compared with the central
    # second difference of F3, with a step proportional to p
    hs = 1e-3 * fd
    f5_fd = (F3(fd + hs) - 2 * F3(fd) + F3(fd - hs)) / hs**2
    rel5 = np.abs(f5_fd - F5(fd)) / np.maximum(1.0, np.abs(F5(fd)))
    return [
        _upper("max F", F(p), 1e-12),
        _upper("max B(p, p)", B_diagonal(p), 1e-10),
        _upper("max F5", F5(p), 1e-10),
        Check("|F1(1/2)|", abs(float(F1(half))), 1e-10, abs(float(F1(half))) <= 1e-10),
        Check("|F2(1/2)|", abs(float(F2(half))), 1e-10, abs(float(F2(half))) <= 1e-10),
        Check("F(1/2)", abs(float(F(half))), 1e-12, abs(float(F(half))) <= 1e-12),
        Check("F1 near 0", float(F1(1e-12)), -1.0, abs(float(F1(1e-12)) + 1.0) <= 1e-6,
              "F1(p) -> -1 as p -> 0"),
        Check("F3(1/2) > 0", float(F3(half)), 0.0, float(F3(half)) > 0),
        _fd_check("F1 vs dF/dp", F, F1, fd, 1e-6, 1e-6),
        _fd_check("F2 vs dF1/dp", F1, F2, fd, 1e-6, 1e-6),
        _fd_check("F3 vs dF2/dp", F2, F3, fd, 1e-6, 1e-6),
        _upper("F5 vs d^2 F3/dp^2", rel5, 1e-4, "central second difference, step 1e-3 p"),
    ]


def sturm_report(name: str) -> dict:
    hat = _HATS[name]
    seq = sturm_sequence(hat)
    ref = REFERENCE_CHAINS[name]
    rc = count_real_roots_detailed(hat, 0, Fraction(1, 2))
    scalings = []
    for i, (ours, theirs) in enumerate(zip(seq.terms, ref)):
        c = positive_multiple(ours, theirs)
        scalings.append({"term": i, "positive_multiple": c is not None, "scale": None if c is None else str(c)})
    s0, s1 = seq.signs_at(0), seq.signs_at(Fraction(1, 2))
    return {
        "polynomial": repr(hat),
        "chain": [repr(t) for t in seq.terms],
        "roots_in_closed_interval": rc.count,
        "endpoint_shifted": rc.shifted,
        "signs_at_0": list(s0),
        "signs_at_half": list(s1),
        "reference_signs_at_0": list(REFERENCE_SIGNS[name][0]),
        "reference_signs_at_half": list(REFERENCE_SIGNS[name][1]),
        "reference_chain_signs_at_0": [int(np.sign(float(t(0)))) for t in ref],
        "reference_chain_signs_at_half": [int(np.sign(float(t(Fraction(1, 2))))) for t in ref],
        "chain_length_matches": len(seq) == len(ref),
        "term_scalings": scalings,
    }


def _check_p1p2(n):
    checks = []
    details = {}
    p = _grid(n)
    for name, poly_fn in (("P1_hat", P1), ("P2_hat", P2)):
        rep = sturm_report(name)
        details[name] = rep
        checks.append(Check(f"{name} roots on [0, 1/2]", rep["roots_in_closed_interval"], 0,
                            rep["roots_in_closed_interval"] == 0))
        checks.append(Check(f"{name} signs at 0", 0.0, 0.0,
                            tuple(rep["signs_at_0"]) == REFERENCE_SIGNS[name][0]))
        checks.append(Check(f"{name} signs at 1/2", 0.0, 0.0,
                            tuple(rep["signs_at_half"]) == REFERENCE_SIGNS[name][1]))
        odd = [s["term"] for s in rep["term_scalings"] if not s["positive_multiple"]]
        checks.append(Check(f"{name} terms are positive multiples of the reference chain", float(len(odd)), 0.0,
                            not odd and rep["chain_length_matches"],
                            "" if not odd else f"terms {odd} differ by more than a positive scalar"))
        base = name[:2]
        checks.append(_lower(f"min {base} on grid", poly_fn(p), 0.0))
    return checks, details


def _check_dfdx_ray(n):
    thetas = (0.05, 0.2, 0.5, 1.0, 2.0, 5.0, 20.0)
    checks = []
    details = {}
    for th in thetas:
        xmax = LN2 / max(1.0, th)
        x = np.linspace(0, xmax, n + 2)[1:-1]
        d = df2_dx(x, th * x)
        diff = np.diff(d)
        details[str(th)] = {"max_forward_difference": float(diff.max())}
        checks.append(_upper(f"theta={th}: max forward difference", diff, 0.0, "strict decrease needs < 0"))
        checks.append(Check(f"theta={th}: all strictly negative", float(np.sum(diff >= 0)), 0.0,
                            bool(np.all(diff < 0))))
    return checks, details


def poly_bound_residual() -> Polynomial:
    """Exact difference between the bound expression and its factorization."""
    x = _X
    log_p_bound = -(1 - x) - (1 - x) ** 2 * Fraction(1, 2)
    log_q_bound = -x - x**2 * Fraction(1, 2)
    lhs = P1_POLY * log_p_bound + P2_POLY * log_q_bound + P3_POLY
    rhs = (-12) * (1 - x) ** 2 * (x - Fraction(1, 2)) ** 2 * x**2 * (x**2 - x + Fraction(7, 3))
    return lhs - rhs


def _check_identity(n):
    res = poly_bound_residual()
    p = _grid(n)
    checks = [
        Check("exact coefficient match", float(len(res.coeffs)), 0.0, res.is_zero(),
              "residual polynomial " + repr(res)),
        _upper("log p bound slack", np.log(p) - (-(1 - p) - (1 - p) ** 2 / 2), 0.0),
        _upper("log(1-p) bound slack", np.log1p(-p) - (-p - p**2 / 2), 0.0),
    ]
    return checks, {"residual_degree": res.degree}


def verify_claim(claim_id: str, grid_size: int = 10_000) -> ClaimReport:
    if claim_id not in CLAIM_IDS:
        raise DomainError(f"unknown claim {claim_id!r}; choose from {CLAIM_IDS}")
    if grid_size < 100:
        raise DomainError("grid_size must be at least 100")
    rep = ClaimReport(claim_id, grid_size)
    with np.errstate(all="ignore"):
        if claim_id == "np":
            rep.checks = _check_np(grid_size)
        elif claim_id == "lp":
            rep.checks = _check_lp(grid_size)
        elif claim_id == "Fp":
            rep.checks = _check_Fp(grid_size)
        elif claim_id == "p1p2":
            rep.checks, rep.details = _check_p1p2(grid_size)
        elif claim_id == "dfdx_ray":
            rep.checks, rep.details = _check_dfdx_ray(grid_size)
        else:
            rep.checks, rep.details = _check_identity(grid_size)
    return rep


def verify_all(grid_size: int = 10_000) -> dict:
    reports = [verify_claim(c, grid_size) for c in CLAIM_IDS]
    return {"passed": all(r.passed for r in reports), "claims": [r.to_json() for r in reports]}
