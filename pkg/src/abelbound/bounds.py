"""Index-versus-submodule-size inequalities for GL and Sp and per-instance verification.

Every right-hand side involving zeta(2) is rounded *down* to a rational, so a
passing comparison ``|W| <= bound`` certifies the real inequality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import isqrt, prod
from typing import Optional

import mpmath

from .groups import GroupHandle, index as group_index
from .matmod import MatrixMod, commutes_on
from .modring import DomainError, StructuralError, valuation
from .submodules import Submodule, SubmoduleShape, canonical_shape, is_invariant, l_primary_parts

_DIGITS = 30
_SCALE = 10**_DIGITS


def _zeta2_low() -> Fraction:
    with mpmath.workdps(_DIGITS + 20):
        approx = int(mpmath.floor(mpmath.pi**2 / 6 * _SCALE))
    # one extra ulp absorbs any rounding in the mpmath evaluation
    return Fraction(approx - 1, _SCALE)


ZETA2_LOW = _zeta2_low()


class HypothesisViolation(ValueError):
    """The instance does not satisfy the invariance / abelian-action hypotheses."""


def _half_power_low(base: int, twice_exp: int) -> Fraction:
    """Rational lower bound for base**(twice_exp / 2)."""
    if twice_exp % 2 == 0:
        return Fraction(base ** (twice_exp // 2))
    return Fraction(isqrt(base**twice_exp * _SCALE**2), _SCALE)


def gl_bound(index: int, m: int) -> Fraction:
    """Lower estimate of I^(1+m/2) * zeta(2)^((m-1)(1+m/2))."""
    if index < 1 or m < 2:
        raise DomainError("gl_bound needs index >= 1 and m >= 2")
    return _half_power_low(index, m + 2) * ZETA2_LOW ** ((m - 1) * (m + 2) // 2)


def sp_bound(index: int, m: int) -> Fraction:
    """Lower estimate of I^(2+2m) * zeta(2)^(2+2m)."""
    if index < 1 or m < 1:
        raise DomainError("sp_bound needs index >= 1 and m >= 1")
    return Fraction(index ** (2 + 2 * m)) * ZETA2_LOW ** (2 + 2 * m)


def lower_target(m: int, setting: str = "GL") -> Fraction:
    """Exponent t for which some W is claimed to reach |W| >= I^t."""
    if m < 2:
        raise DomainError("n and m must be greater than 1")
    return 1 + Fraction(1, m + 1)


def check_invariant(gamma: GroupHandle, w: Submodule) -> None:
    for g in gamma.generators:
        if not is_invariant(g, w):
            raise HypothesisViolation(f"W is not invariant under generator {g.rows}")


def acts_abelianly(gamma: GroupHandle, w) -> bool:
    """Pairwise commutation of generators on W.

    Restriction to W is a homomorphism, so commuting generator images span an
    abelian image; checking generator pairs is enough.
    """
    if isinstance(w, Submodule):
        check_invariant(gamma, w)
    return all(commutes_on(a, b, w) for a, b in combinations(gamma.generators, 2))


def compute_J(gamma: GroupHandle, row: int = 2, col: int = 1,
              change: Optional[tuple[MatrixMod, MatrixMod]] = None) -> int:
    """Minimal valuation of the (row, col) entry (1-based) over the elements of gamma.

    ``change`` = (U, U^-1) conjugates each element to U A U^-1 first.
    """
    ring = gamma.ambient.ring
    if not ring.is_prime_power:
        raise StructuralError("J is defined over a prime-power ring")
    d = gamma.ambient.rank
    if not (1 <= row <= d and 1 <= col <= d):
        raise StructuralError(f"position ({row}, {col}) outside a {d}x{d} matrix")
    (l, e), = ring.factors
    best = e
    for a in gamma.ensure_elements():
        if change is not None:
            a = change[0] @ a @ change[1]
        best = min(best, valuation(l, a[row - 1, col - 1], e))
        if best == 0:
            break
    return best


def intermediate_bound(setting: str, m: int, l: int, e: int, i: int, J: int) -> Fraction:
    """Proven lower bound on the index from the shape offset i and the statistic J."""
    if setting == "GL":
        factors = prod((1 - Fraction(1, l**k) for k in range(1, m + 1)), start=Fraction(1))
    else:
        factors = prod((1 - Fraction(1, l ** (2 * k)) for k in range(1, m + 1)), start=Fraction(1))
    return Fraction(l) ** (m * (e - i - J)) * factors


@dataclass
class BoundReport:
    setting: str
    m: int
    n: int
    w_order: int
    gamma_order: int
    ambient_order: int
    index: int
    main_bound: Optional[Fraction] = None
    verdict_main: Optional[bool] = None
    l: Optional[int] = None
    e: Optional[int] = None
    i: Optional[int] = None
    J: Optional[int] = None
    shape: Optional[SubmoduleShape] = None
    intermediate_bound: Optional[Fraction] = None
    verdict_intermediate: Optional[bool] = None
    J_by_row: dict[int, int] = field(default_factory=dict)
    parts: list["BoundReport"] = field(default_factory=list)
    diagnosis: Optional[str] = None
    gamma: Optional[GroupHandle] = field(default=None, repr=False)
    module: Optional[Submodule] = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return self.diagnosis is None and bool(self.verdict_main) and self.verdict_intermediate is not False

    def to_json(self) -> dict:
        def frac(x):
            return None if x is None else {"p": x.numerator, "q": x.denominator, "approx": float(x)}

        out = {
            "setting": self.setting, "m": self.m, "n": self.n, "l": self.l, "e": self.e,
            "w_order": self.w_order, "gamma_order": self.gamma_order,
            "ambient_order": self.ambient_order, "index": self.index,
            "i": self.i, "J": self.J,
            "shape": None if self.shape is None else {"i": self.shape.i, "j": list(self.shape.j)},
            "main_bound": frac(self.main_bound), "intermediate_bound": frac(self.intermediate_bound),
            "verdicts": {"main": self.verdict_main, "intermediate": self.verdict_intermediate},
            "J_by_row": {str(k): v for k, v in sorted(self.J_by_row.items())},
            "diagnosis": self.diagnosis,
            "parts": [p.to_json() for p in self.parts],
        }
        if self.gamma is not None:
            out["group"] = self.gamma.to_json()
        if self.module is not None:
            out["module"] = self.module.to_json()
        return out

    CSV_COLUMNS = ("setting", "n", "m", "gamma_order", "index", "w_order", "i", "J", "bound", "verdict")

    def csv_row(self) -> list:
        bound = "" if self.main_bound is None else f"{float(self.main_bound):.6f}"
        verdict = "" if self.verdict_main is None else str(self.verdict_main).lower()
        return [self.setting, self.n, self.m, self.gamma_order, self.index, self.w_order,
                "" if self.i is None else self.i, "" if self.J is None else self.J, bound, verdict]


def main_bound(setting: str, idx: int, m: int) -> Fraction:
    return gl_bound(idx, m) if setting == "GL" else sp_bound(idx, m)


def _verify_prime_power(gamma: GroupHandle, w: Submodule, j_row: int) -> BoundReport:
    amb = gamma.ambient
    (l, e), = amb.ring.factors
    shape = canonical_shape(w)
    snf = w.snf
    idx = group_index(gamma)
    rep = BoundReport(amb.kind, amb.m, amb.n, shape.order, gamma.order, amb.order, idx,
                      l=l, e=e, i=shape.i, shape=shape, gamma=gamma, module=w)
    change = (snf.u, snf.u_inv)
    rep.J = compute_J(gamma, j_row, 1, change)
    if amb.kind == "Sp":
        rep.J_by_row = {r: compute_J(gamma, r, 1, change) for r in range(2, amb.rank + 1)}
    rep.main_bound = main_bound(amb.kind, idx, amb.m)
    rep.verdict_main = rep.w_order <= rep.main_bound
    rep.intermediate_bound = intermediate_bound(amb.kind, amb.m, l, e, shape.i, rep.J)
    rep.verdict_intermediate = idx >= rep.intermediate_bound
    return rep


def verify_instance(gamma: GroupHandle, w: Submodule, j_row: int = 2) -> BoundReport:
    """Check both inequalities for one (Gamma, W) pair.

    Hypothesis failures come back as a report with ``diagnosis`` set and no
    verdicts. Composite moduli are verified per prime and once globally.
    """
    amb = gamma.ambient
    if w.n != amb.n or w.rank != amb.rank:
        raise StructuralError(f"module rank {w.rank} mod {w.n} vs ambient {amb.rank} mod {amb.n}")
    if amb.kind == "GL" and amb.m < 2:
        raise DomainError("n and m must be greater than 1")
    idx = group_index(gamma)
    try:
        abelian = acts_abelianly(gamma, w)
    except HypothesisViolation as exc:
        return BoundReport(amb.kind, amb.m, amb.n, w.order, gamma.order, amb.order, idx,
                           diagnosis=str(exc), gamma=gamma, module=w)
    if not abelian:
        return BoundReport(amb.kind, amb.m, amb.n, w.order, gamma.order, amb.order, idx,
                           diagnosis="action of Gamma on W is not abelian", gamma=gamma, module=w)
    if amb.ring.is_prime_power:
        return _verify_prime_power(gamma, w, j_row)

    parts = []
    for ring, wl in l_primary_parts(w):
        parts.append(_verify_prime_power(gamma.image(ring.n), wl, j_row))
    rep = BoundReport(amb.kind, amb.m, amb.n, w.order, gamma.order, amb.order, idx,
                      parts=parts, gamma=gamma, module=w)
    if rep.w_order != prod(p.w_order for p in parts):
        raise StructuralError("|W| differs from the product of its l-primary parts")
    rep.main_bound = main_bound(amb.kind, idx, amb.m)
    rep.verdict_main = rep.w_order <= rep.main_bound and all(p.verdict_main for p in parts)
    rep.verdict_intermediate = all(p.verdict_intermediate for p in parts)
    return rep
