"""GL and Sp over Z/nZ: order formulas, closures, element tables and indices."""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import permutations, product
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .matmod import MatrixMod, is_symplectic, omega
from .modring import DomainError, RingSpec, StructuralError, crt_combine, ring_of

DEFAULT_CLOSURE_CAP = 10**6


class CapacityError(RuntimeError):
    """An enumeration would exceed its configured cap."""


class InvariantViolation(AssertionError):
    """An internal consistency check failed (e.g. Lagrange)."""


def closure_cap() -> int:
    raw = os.environ.get("ABL_MAX_CLOSURE")
    return int(raw) if raw else DEFAULT_CLOSURE_CAP


def gl_order(m: int, ring: int | RingSpec) -> int:
    ring = ring_of(ring)
    if m < 1:
        raise DomainError("m must be positive")
    out = 1
    for l, e in ring.factors:
        # l^{m^2 e} prod_{k=1..m} (1 - l^{-k}), cleared of denominators
        out *= l ** (m * m * e - m * (m + 1) // 2) * prod(l**k - 1 for k in range(1, m + 1))
    return out


def sp_order(m: int, ring: int | RingSpec) -> int:
    ring = ring_of(ring)
    if m < 1:
        raise DomainError("m must be positive")
    out = 1
    for l, e in ring.factors:
        # l^{e(2m^2+m)} prod_{j=1..m} (1 - l^{-2j})
        out *= l ** (e * (2 * m * m + m) - m * (m + 1)) * prod(l ** (2 * j) - 1 for j in range(1, m + 1))
    return out


@dataclass(frozen=True)
class AmbientGroup:
    kind: str
    rank: int
    n: int

    def __post_init__(self):
        if self.kind not in ("GL", "Sp"):
            raise StructuralError(f"unknown ambient kind {self.kind!r}")
        if self.kind == "Sp" and self.rank % 2:
            raise StructuralError("Sp needs even rank")
        if self.rank < 1:
            raise DomainError("rank must be positive")
        ring_of(self.n)

    @classmethod
    def gl(cls, m: int, n: int) -> AmbientGroup:
        return cls("GL", m, n)

    @classmethod
    def sp(cls, m: int, n: int) -> AmbientGroup:
        return cls("Sp", 2 * m, n)

    @property
    def ring(self) -> RingSpec:
        return ring_of(self.n)

    @property
    def m(self) -> int:
        """The m of GL_m or Sp(2m)."""
        return self.rank if self.kind == "GL" else self.rank // 2

    @property
    def order(self) -> int:
        return gl_order(self.m, self.n) if self.kind == "GL" else sp_order(self.m, self.n)

    def part(self, l: int) -> AmbientGroup:
        return AmbientGroup(self.kind, self.rank, self.ring.part(l).n)

    def contains(self, mat: MatrixMod) -> bool:
        if mat.n != self.n or mat.dim != self.rank:
            return False
        if self.kind == "Sp":
            return is_symplectic(mat)
        return _is_unit_det(np.array(mat.entries, dtype=np.int64).reshape(1, self.rank, self.rank), self.n)[0]

    def to_json(self) -> dict:
        return {"kind": self.kind, "rank": self.rank, "n": self.n}

    @classmethod
    def from_json(cls, obj: dict) -> AmbientGroup:
        try:
            return cls(str(obj["kind"]), int(obj["rank"]), int(obj["n"]))
        except (KeyError, TypeError) as exc:
            raise StructuralError(f"malformed ambient object: {exc}") from None


# -- brute-force enumeration -------------------------------------------------

def _det(arr: np.ndarray) -> np.ndarray:
    """Exact integer determinant of a stack of small square matrices (Leibniz)."""
    d = arr.shape[-1]
    total = np.zeros(arr.shape[0], dtype=object if d > 4 else np.int64)
    for perm in permutations(range(d)):
        sign = 1
        for a in range(d):
            for b in range(a + 1, d):
                if perm[a] > perm[b]:
                    sign = -sign
        term = np.ones(arr.shape[0], dtype=np.int64)
        for r, c in enumerate(perm):
            term = term * arr[:, r, c]
        total = total + sign * term
    return total


def _is_unit_det(arr: np.ndarray, n: int) -> np.ndarray:
    det = _det(arr) % n
    return np.gcd(det.astype(np.int64), n) == 1


def _symplectic_mask(arr: np.ndarray, n: int) -> np.ndarray:
    om = np.array(omega(arr.shape[-1] // 2, n).rows, dtype=np.int64)
    lhs = np.einsum("kji,jl,klm->kim", arr, om, arr) % n
    return np.all(lhs == om, axis=(1, 2))


def _membership_mask(kind: str, arr: np.ndarray, n: int) -> np.ndarray:
    return _symplectic_mask(arr, n) if kind == "Sp" else _is_unit_det(arr, n)


def _to_matrices(arr: np.ndarray, n: int) -> list[MatrixMod]:
    d = arr.shape[-1]
    return [MatrixMod(n, d, tuple(int(x) for x in row)) for row in arr.reshape(len(arr), d * d)]


def _prime_power_elements(kind: str, d: int, l: int, e: int, cap: int) -> np.ndarray:
    """All members mod l^e: brute force mod l, then filter the l^{d^2} lifts of each element."""
    if l ** (d * d) > cap:
        raise CapacityError(f"brute force over {l}^{d * d} matrices exceeds cap {cap}")
    base = np.array(list(product(range(l), repeat=d * d)), dtype=np.int64).reshape(-1, d, d)
    cur = base[_membership_mask(kind, base, l)]
    lifts = base
    for k in range(1, e):
        q = l**k
        if len(cur) * len(lifts) > 50 * cap:
            raise CapacityError(f"lifting {len(cur)} elements mod {q} exceeds cap {cap}")
        chunks = []
        for start in range(0, len(cur), 256):
            block = cur[start:start + 256]
            cand = (block[:, None] + q * lifts[None]).reshape(-1, d, d)
            chunks.append(cand[_membership_mask(kind, cand, q * l)])
        cur = np.concatenate(chunks)
        if len(cur) > cap:
            raise CapacityError(f"group mod {q * l} has more than {cap} elements")
    if len(cur) > cap:
        raise CapacityError(f"group has {len(cur)} elements, cap is {cap}")
    return cur


def enumerate_ambient(ambient: AmbientGroup, cap: int | None = None) -> list[MatrixMod]:
    """Every element of the ambient group, found by exhaustive search (sorted by entries)."""
    cap = closure_cap() if cap is None else cap
    ring = ambient.ring
    parts = [_prime_power_elements(ambient.kind, ambient.rank, l, e, cap) for l, e in ring.factors]
    if prod(len(p) for p in parts) > cap:
        raise CapacityError(f"{ambient.kind}({ambient.rank}, Z/{ambient.n}) exceeds cap {cap}")
    if len(parts) == 1:
        arr = parts[0]
    else:
        combos = []
        for choice in product(*parts):
            flat = [crt_combine(xs, ring) for xs in zip(*(c.ravel() for c in choice))]
            combos.append(flat)
        arr = np.array(combos, dtype=np.int64).reshape(-1, ambient.rank, ambient.rank)
    mats = _to_matrices(arr, ambient.n)
    mats.sort(key=lambda x: x.entries)
    return mats


# -- closure -------------------------------------------------------------------

def closure(generators: Sequence[MatrixMod], cap: int | None = None,
            identity: MatrixMod | None = None) -> list[MatrixMod]:
    """Breadth-first closure of ``generators`` under multiplication, starting at the identity."""
    cap = closure_cap() if cap is None else cap
    gens = list(generators)
    if identity is None:
        if not gens:
            raise StructuralError("closure of an empty generator list needs an explicit identity")
        identity = MatrixMod.identity(gens[0].dim, gens[0].n)
    for g in gens:
        identity._check(g)
    seen = {identity.entries}
    out = [identity]
    queue = deque([identity])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = x @ g
            if y.entries not in seen:
                seen.add(y.entries)
                out.append(y)
                if len(out) > cap:
                    raise CapacityError(f"closure exceeded cap of {cap} elements")
                queue.append(y)
    return out


@dataclass(eq=False)
class GroupHandle:
    """A subgroup of an ambient GL/Sp given by generators, with lazily cached elements."""

    ambient: AmbientGroup
    generators: tuple[MatrixMod, ...]
    elements: tuple[MatrixMod, ...] | None = None
    cap: int | None = None

    def __post_init__(self):
        self.generators = tuple(self.generators)
        for g in self.generators:
            if g.n != self.ambient.n or g.dim != self.ambient.rank:
                raise StructuralError(f"generator {g.rows} does not live in {self.ambient}")
            if self.ambient.kind == "Sp" and not is_symplectic(g):
                raise StructuralError(f"generator {g.rows} is not symplectic")

    @property
    def identity(self) -> MatrixMod:
        return MatrixMod.identity(self.ambient.rank, self.ambient.n)

    def ensure_elements(self) -> tuple[MatrixMod, ...]:
        if self.elements is None:
            elems = closure(self.generators, self.cap, self.identity)
            keys = {x.entries for x in elems}
            for g in self.generators:
                # GL membership: the inverse must show up in the finite closure
                if not any((g @ x).entries == self.identity.entries for x in elems):
                    raise StructuralError(f"generator {g.rows} is not invertible")
            self.elements = tuple(sorted(elems, key=lambda x: x.entries))
            assert len(keys) == len(self.elements)
        return self.elements

    @property
    def order(self) -> int:
        return len(self.ensure_elements())

    @cached_property
    def key(self) -> tuple:
        return tuple(x.entries for x in self.ensure_elements())

    def image(self, q: int) -> GroupHandle:
        """Entrywise reduction of the group into the ambient over Z/qZ."""
        amb = AmbientGroup(self.ambient.kind, self.ambient.rank, q)
        elems = {x.reduce(q) for x in self.ensure_elements()}
        return GroupHandle(amb, tuple(g.reduce(q) for g in self.generators),
                           tuple(sorted(elems, key=lambda x: x.entries)))

    def to_json(self) -> dict:
        return {"ambient": self.ambient.to_json(), "generators": [g.to_json() for g in self.generators]}

    @classmethod
    def from_json(cls, obj: dict, cap: int | None = None) -> GroupHandle:
        try:
            ambient = AmbientGroup.from_json(obj["ambient"])
            gens = tuple(MatrixMod.from_json(g) for g in obj["generators"])
        except (KeyError, TypeError) as exc:
            raise StructuralError(f"malformed generator-set object: {exc}") from None
        return cls(ambient, gens, cap=cap)


def index(gamma: GroupHandle) -> int:
    total, sub = gamma.ambient.order, gamma.order
    if total % sub:
        raise InvariantViolation(f"|Gamma| = {sub} does not divide ambient order {total}")
    return total // sub


# -- indexed ambient tables -----------------------------------------------------

class ElementTable:
    """The ambient group as indices 0..N-1 with a full multiplication table."""

    def __init__(self, ambient: AmbientGroup, cap: int | None = None):
        self.ambient = ambient
        self.elements = enumerate_ambient(ambient, cap)
        n, d = ambient.n, ambient.rank
        arr = np.array([x.entries for x in self.elements], dtype=np.int64).reshape(-1, d, d)
        weights = n ** np.arange(d * d - 1, -1, -1, dtype=np.int64)
        keys = arr.reshape(len(arr), -1) @ weights
        order = np.argsort(keys)
        sorted_keys = keys[order]
        size = len(arr)
        self.mul = np.empty((size, size), dtype=np.int32)
        for start in range(0, size, 64):
            prods = np.einsum("aij,bjk->abik", arr[start:start + 64], arr) % n
            pk = prods.reshape(-1, d * d) @ weights
            pos = np.searchsorted(sorted_keys, pk)
            if np.any(sorted_keys[np.minimum(pos, size - 1)] != pk):
                raise InvariantViolation("ambient element set is not closed under multiplication")
            self.mul[start:start + 64] = order[pos].reshape(-1, size)
        ident = MatrixMod.identity(d, n).entries
        self.identity = next(i for i, x in enumerate(self.elements) if x.entries == ident)
        self.inv = np.argmax(self.mul == self.identity, axis=1).astype(np.int32)
        self._index = {x.entries: i for i, x in enumerate(self.elements)}

    def __len__(self) -> int:
        return len(self.elements)

    def index_of(self, mat: MatrixMod) -> int:
        return self._index[mat.entries]

    def closure(self, gens: Iterable[int], start: np.ndarray | None = None) -> np.ndarray:
        """Sorted element indices of the subgroup generated by ``gens`` (and ``start``)."""
        gens = np.unique(np.asarray(list(gens), dtype=np.int32))
        mask = np.zeros(len(self), dtype=bool)
        mask[self.identity] = True
        if start is not None:
            mask[start] = True
        frontier = np.flatnonzero(mask)
        while len(frontier) and len(gens):
            prods = np.unique(self.mul[np.ix_(frontier, gens)])
            frontier = prods[~mask[prods]]
            mask[frontier] = True
        return np.flatnonzero(mask).astype(np.int32)

    def conjugation(self, x: int) -> np.ndarray:
        """The permutation g -> x g x^{-1} of element indices."""
        return self.mul[self.mul[x], self.inv[x]]

    def handle(self, members: np.ndarray, gens: Sequence[int]) -> GroupHandle:
        return GroupHandle(self.ambient, tuple(self.elements[g] for g in gens),
                           tuple(self.elements[i] for i in members))


def reduction_check(m: int, p: int, k: int, cap: int | None = None) -> tuple[bool, int]:
    """Reduce Sp(2m, Z/p^{k+1}) onto Sp(2m, Z/p^k); return (surjective, kernel size)."""
    from .modring import is_prime

    if not is_prime(p) or k < 1 or m < 1:
        raise DomainError("need prime p, k >= 1, m >= 1")
    cap = closure_cap() if cap is None else cap
    upper = _prime_power_elements("Sp", 2 * m, p, k + 1, cap)
    lower = _prime_power_elements("Sp", 2 * m, p, k, cap)
    q = p**k
    d = 2 * m
    weights = q ** np.arange(d * d - 1, -1, -1, dtype=np.int64)
    image = np.unique((upper % q).reshape(len(upper), -1) @ weights)
    target = np.unique(lower.reshape(len(lower), -1) @ weights)
    surjective = len(image) == len(target) and bool(np.all(image == target))
    eye = np.eye(d, dtype=np.int64)
    kernel = int(np.sum(np.all((upper % q) == eye, axis=(1, 2))))
    return surjective, kernel
