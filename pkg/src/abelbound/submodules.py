"""Submodules of (Z/nZ)^rank: canonical shapes, orders, invariance, stabilizer patterns."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Sequence

from .matmod import MatrixMod
from .modring import RingSpec, StructuralError, ring_of, valuation

Vector = tuple[int, ...]


@dataclass(frozen=True)
class SubmoduleShape:
    """Canonical diagonal form l^i Z x l^(i+j1) Z x ... inside (Z/l^e)^rank."""

    l: int
    e: int
    rank: int
    i: int
    j: tuple[int, ...]

    def __post_init__(self):
        if len(self.j) != self.rank - 1:
            raise StructuralError(f"need {self.rank - 1} gaps, got {len(self.j)}")
        if self.i < 0 or any(x < 0 for x in self.j) or self.i + sum(self.j) > self.e:
            raise StructuralError(f"invalid shape i={self.i}, j={self.j} for e={self.e}")

    @classmethod
    def from_valuations(cls, l: int, e: int, vals: Sequence[int]) -> SubmoduleShape:
        vals = list(vals)
        return cls(l, e, len(vals), vals[0], tuple(b - a for a, b in zip(vals, vals[1:])))

    @classmethod
    def zero(cls, l: int, e: int, rank: int) -> SubmoduleShape:
        return cls(l, e, rank, e, (0,) * (rank - 1))

    @property
    def n(self) -> int:
        return self.l**self.e

    @property
    def valuations(self) -> tuple[int, ...]:
        """Exponents i, i+j1, i+j1+j2, ... of the diagonal basis."""
        out = [self.i]
        for g in self.j:
            out.append(out[-1] + g)
        return tuple(out)

    def columns(self) -> list[Vector]:
        n = self.n
        return [tuple((self.l**c) % n if r == k else 0 for r in range(self.rank))
                for k, c in enumerate(self.valuations)]

    def basis_matrix(self) -> MatrixMod:
        n, vals = self.n, self.valuations
        return MatrixMod.from_rows(
            [[self.l**vals[r] if r == c else 0 for c in range(self.rank)] for r in range(self.rank)], n)

    def submodule(self) -> Submodule:
        return Submodule(self.n, self.rank, tuple(c for c in self.columns() if any(c)))

    @property
    def order(self) -> int:
        return submodule_order(self)


def submodule_order(shape: SubmoduleShape) -> int:
    return shape.l ** sum(shape.e - c for c in shape.valuations)


def all_shapes(l: int, e: int, rank: int) -> list[SubmoduleShape]:
    out = []
    for vals in product(range(e + 1), repeat=rank):
        if list(vals) == sorted(vals):
            out.append(SubmoduleShape.from_valuations(l, e, vals))
    return out


@dataclass(frozen=True)
class LocalSNF:
    """Row transform U with U W = span(diag(l^d)) over Z/l^e, plus its inverse."""

    l: int
    e: int
    valuations: tuple[int, ...]
    u: MatrixMod
    u_inv: MatrixMod


def local_snf(gens: Sequence[Vector], l: int, e: int, rank: int) -> LocalSNF:
    """Smith form of the rank x len(gens) matrix whose columns are ``gens``.

    Pivots are chosen by minimal valuation, so the diagonal comes out with
    ascending valuations; missing directions are padded with e.
    """
    q = l**e
    cols = len(gens)
    a = [[gens[c][r] % q for c in range(cols)] for r in range(rank)]
    u = [[int(r == c) for c in range(rank)] for r in range(rank)]
    ui = [[int(r == c) for c in range(rank)] for r in range(rank)]
    vals = []
    for t in range(min(rank, cols)):
        best = None
        for r in range(t, rank):
            for c in range(t, cols):
                v = valuation(l, a[r][c], e)
                if v < e and (best is None or v < best[0]):
                    best = (v, r, c)
        if best is None:
            break
        v, pr, pc = best
        if pr != t:
            a[t], a[pr] = a[pr], a[t]
            u[t], u[pr] = u[pr], u[t]
            for row in ui:
                row[t], row[pr] = row[pr], row[t]
        if pc != t:
            for row in a:
                row[t], row[pc] = row[pc], row[t]
        unit = a[t][t] // l**v
        inv = pow(unit, -1, q)
        a[t] = [x * inv % q for x in a[t]]
        u[t] = [x * inv % q for x in u[t]]
        for row in ui:
            row[t] = row[t] * unit % q
        for r in range(rank):
            if r == t or a[r][t] == 0:
                continue
            f = a[r][t] // l**v
            a[r] = [(x - f * y) % q for x, y in zip(a[r], a[t])]
            u[r] = [(x - f * y) % q for x, y in zip(u[r], u[t])]
            for row in ui:
                row[t] = (row[t] + f * row[r]) % q
        for c in range(t + 1, cols):
            a[t][c] = 0
        vals.append(v)
    vals += [e] * (rank - len(vals))
    return LocalSNF(l, e, tuple(vals), MatrixMod.from_rows(u, q), MatrixMod.from_rows(ui, q))


@dataclass(frozen=True)
class Submodule:
    """The span of ``generators`` inside (Z/nZ)^rank."""

    n: int
    rank: int
    generators: tuple[Vector, ...] = field(default=())

    def __post_init__(self):
        gens = tuple(tuple(int(x) % self.n for x in g) for g in self.generators)
        if any(len(g) != self.rank for g in gens):
            raise StructuralError(f"generators must have length {self.rank}")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def full(cls, n: int, rank: int) -> Submodule:
        return cls(n, rank, tuple(tuple(int(r == k) for r in range(rank)) for k in range(rank)))

    @classmethod
    def zero(cls, n: int, rank: int) -> Submodule:
        return cls(n, rank, ())

    @cached_property
    def ring(self) -> RingSpec:
        return ring_of(self.n)

    def columns(self) -> list[Vector]:
        return list(self.generators)

    @cached_property
    def snf(self) -> LocalSNF:
        if not self.ring.is_prime_power:
            raise StructuralError(f"canonical form needs a prime-power modulus, got {self.n}")
        (l, e), = self.ring.factors
        return local_snf(self.generators, l, e, self.rank)

    def contains(self, v: Sequence[int]) -> bool:
        if len(v) != self.rank:
            raise StructuralError(f"vector of length {len(v)} in rank {self.rank} module")
        if not self.ring.is_prime_power:
            return all(part.contains(tuple(x % part.n for x in v)) for _, part in l_primary_parts(self))
        s = self.snf
        img = s.u.apply(tuple(x % self.n for x in v))
        return all(valuation(s.l, x, s.e) >= d for x, d in zip(img, s.valuations))

    @property
    def order(self) -> int:
        if self.ring.is_prime_power:
            return submodule_order(canonical_shape(self))
        out = 1
        for _, part in l_primary_parts(self):
            out *= part.order
        return out

    def to_json(self) -> dict:
        return {"n": self.n, "rank": self.rank, "generators": [list(g) for g in self.generators]}

    @classmethod
    def from_json(cls, obj: dict) -> Submodule:
        try:
            n, rank, gens = int(obj["n"]), int(obj["rank"]), obj["generators"]
        except (KeyError, TypeError) as exc:
            raise StructuralError(f"malformed submodule object: {exc}") from None
        ring_of(n)
        if any(len(g) != rank for g in gens):
            raise StructuralError(f"generators must have length {rank}")
        return cls(n, rank, tuple(tuple(int(x) for x in g) for g in gens))


def canonical_shape(w: Submodule) -> SubmoduleShape:
    s = w.snf
    return SubmoduleShape.from_valuations(s.l, s.e, s.valuations)


def adapted_basis(w: Submodule) -> MatrixMod:
    """Change of basis P with W = P * span(diagonal basis of the canonical shape)."""
    return w.snf.u_inv


def is_invariant(mat: MatrixMod, w: Submodule) -> bool:
    """True iff mat maps W into itself."""
    if mat.n != w.n or mat.dim != w.rank:
        raise StructuralError(f"{mat.dim}x{mat.dim} mod {mat.n} acting on rank {w.rank} mod {w.n}")
    return all(w.contains(mat.apply(g)) for g in w.generators)


def stabilizer_pattern(shape: SubmoduleShape) -> tuple[tuple[int, ...], ...]:
    """Minimal entry valuations d[r][s] forced on matrices preserving the diagonal module."""
    vals = shape.valuations
    return tuple(tuple(vals[r] - vals[s] if r > s else 0 for s in range(shape.rank))
                 for r in range(shape.rank))


def matches_pattern(mat: MatrixMod, shape: SubmoduleShape) -> bool:
    pat = stabilizer_pattern(shape)
    l, e = shape.l, shape.e
    return all(valuation(l, mat[r, s], e) >= min(pat[r][s], e)
               for r in range(shape.rank) for s in range(r))


def l_primary_parts(w: Submodule) -> list[tuple[RingSpec, Submodule]]:
    out = []
    for l, _ in w.ring.factors:
        part = w.ring.part(l)
        out.append((part, Submodule(part.n, w.rank, tuple(tuple(x % part.n for x in g) for g in w.generators))))
    return out


def brute_force_span(w: Submodule) -> frozenset[Vector]:
    """Every element of W, by closing {0} under adding generators (test oracle)."""
    zero = (0,) * w.rank
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for v in frontier:
            for g in w.generators:
                s = tuple((a + b) % w.n for a, b in zip(v, g))
                if s not in seen:
                    seen.add(s)
                    nxt.append(s)
        frontier = nxt
    return frozenset(seen)
