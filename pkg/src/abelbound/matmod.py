"""Square matrices over Z/nZ and the symplectic form."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .modring import RingSpec, StructuralError, ring_of


@dataclass(frozen=True)
class MatrixMod:
    """A dim x dim matrix over Z/nZ, entries stored row-major and reduced."""

    n: int
    dim: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.dim * self.dim:
            raise StructuralError(f"expected {self.dim * self.dim} entries, got {len(self.entries)}")
        if any(not 0 <= x < self.n for x in self.entries):
            raise StructuralError(f"entries must be reduced mod {self.n}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], n: int) -> MatrixMod:
        dim = len(rows)
        if any(len(r) != dim for r in rows):
            raise StructuralError("matrix must be square")
        return cls(n, dim, tuple(int(x) % n for r in rows for x in r))

    @classmethod
    def identity(cls, dim: int, n: int) -> MatrixMod:
        return cls(n, dim, tuple(int(r == c) % n for r in range(dim) for c in range(dim)))

    @classmethod
    def zero(cls, dim: int, n: int) -> MatrixMod:
        return cls(n, dim, (0,) * (dim * dim))

    @cached_property
    def ring(self) -> RingSpec:
        return ring_of(self.n)

    @property
    def rows(self) -> list[list[int]]:
        d = self.dim
        return [list(self.entries[r * d:(r + 1) * d]) for r in range(d)]

    def __getitem__(self, rc: tuple[int, int]) -> int:
        r, c = rc
        return self.entries[r * self.dim + c]

    def _check(self, other: MatrixMod) -> None:
        if self.n != other.n or self.dim != other.dim:
            raise StructuralError(
                f"mismatch: {self.dim}x{self.dim} mod {self.n} vs {other.dim}x{other.dim} mod {other.n}")

    def __matmul__(self, other: MatrixMod) -> MatrixMod:
        self._check(other)
        d, n = self.dim, self.n
        a, b = self.entries, other.entries
        out = []
        for r in range(d):
            row = a[r * d:(r + 1) * d]
            for c in range(d):
                out.append(sum(row[k] * b[k * d + c] for k in range(d)) % n)
        return MatrixMod(n, d, tuple(out))

    def __add__(self, other: MatrixMod) -> MatrixMod:
        self._check(other)
        return MatrixMod(self.n, self.dim, tuple((x + y) % self.n for x, y in zip(self.entries, other.entries)))

    def __sub__(self, other: MatrixMod) -> MatrixMod:
        self._check(other)
        return MatrixMod(self.n, self.dim, tuple((x - y) % self.n for x, y in zip(self.entries, other.entries)))

    def __neg__(self) -> MatrixMod:
        return MatrixMod(self.n, self.dim, tuple(-x % self.n for x in self.entries))

    def scale(self, k: int) -> MatrixMod:
        return MatrixMod(self.n, self.dim, tuple(k * x % self.n for x in self.entries))

    @property
    def T(self) -> MatrixMod:
        d = self.dim
        return MatrixMod(self.n, d, tuple(self.entries[r * d + c] for c in range(d) for r in range(d)))

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        d = self.dim
        if len(v) != d:
            raise StructuralError(f"vector of length {len(v)} for {d}x{d} matrix")
        e = self.entries
        return tuple(sum(e[r * d + k] * v[k] for k in range(d)) % self.n for r in range(d))

    def reduce(self, q: int) -> MatrixMod:
        if self.n % q:
            raise StructuralError(f"{q} does not divide {self.n}")
        return MatrixMod(q, self.dim, tuple(x % q for x in self.entries))

    def is_zero(self) -> bool:
        return not any(self.entries)

    def block(self, r0: int, c0: int, size: int) -> MatrixMod:
        return MatrixMod(self.n, size, tuple(self[r0 + r, c0 + c] for r in range(size) for c in range(size)))

    def to_json(self) -> dict:
        return {"n": self.n, "dim": self.dim, "rows": self.rows}

    @classmethod
    def from_json(cls, obj: dict) -> MatrixMod:
        try:
            n, dim, rows = int(obj["n"]), int(obj["dim"]), obj["rows"]
        except (KeyError, TypeError) as exc:
            raise StructuralError(f"malformed matrix object: {exc}") from None
        if len(rows) != dim or any(len(r) != dim for r in rows):
            raise StructuralError(f"rows do not form a {dim}x{dim} matrix")
        flat = tuple(int(x) for r in rows for x in r)
        if any(not 0 <= x < n for x in flat):
            raise StructuralError(f"matrix entries must already be reduced mod {n}")
        return cls(n, dim, flat)


def mat_mul(a: MatrixMod, b: MatrixMod) -> MatrixMod:
    return a @ b


def mat_sub(a: MatrixMod, b: MatrixMod) -> MatrixMod:
    return a - b


def mat_transpose(a: MatrixMod) -> MatrixMod:
    return a.T


def mat_identity(dim: int, n: int) -> MatrixMod:
    return MatrixMod.identity(dim, n)


def omega(m: int, n: int) -> MatrixMod:
    """The 2m x 2m form [[0, I], [-I, 0]] over Z/nZ."""
    d = 2 * m
    rows = [[0] * d for _ in range(d)]
    for k in range(m):
        rows[k][m + k] = 1
        rows[m + k][k] = -1
    return MatrixMod.from_rows(rows, n)


@dataclass(frozen=True)
class SymplecticForm:
    m: int
    n: int

    @cached_property
    def omega(self) -> MatrixMod:
        return omega(self.m, self.n)


def commutes_on(a: MatrixMod, b: MatrixMod, w) -> bool:
    """True iff AB - BA kills every spanning vector of ``w``.

    ``w`` is anything exposing ``n``, ``rank`` and ``columns()``: a
    SubmoduleShape contributes its diagonal basis, a Submodule its generators.
    """
    a._check(b)
    if w.n != a.n or w.rank != a.dim:
        raise StructuralError(f"submodule of rank {w.rank} mod {w.n} vs {a.dim}x{a.dim} mod {a.n}")
    comm = a @ b - b @ a
    if comm.is_zero():
        return True
    return all(not any(comm.apply(v)) for v in w.columns())


def _even_dim(mat: MatrixMod) -> int:
    if mat.dim % 2:
        raise StructuralError(f"symplectic test needs even dimension, got {mat.dim}")
    return mat.dim // 2


def is_symplectic(mat: MatrixMod) -> bool:
    om = omega(_even_dim(mat), mat.n)
    return mat.T @ om @ mat == om


def block_relations(mat: MatrixMod) -> tuple[bool, bool, bool]:
    """The three block identities A^T D - C^T B = I, A^T C = C^T A, D^T B = B^T D."""
    m = _even_dim(mat)
    a, b = mat.block(0, 0, m), mat.block(0, m, m)
    c, d = mat.block(m, 0, m), mat.block(m, m, m)
    eye = MatrixMod.identity(m, mat.n)
    return (a.T @ d - c.T @ b == eye, a.T @ c == c.T @ a, d.T @ b == b.T @ d)


def all_matrices(dim: int, n: int) -> Iterable[MatrixMod]:
    """Every dim x dim matrix over Z/nZ, in lexicographic order of entries."""
    from itertools import product

    for entries in product(range(n), repeat=dim * dim):
        yield MatrixMod(n, dim, entries)
