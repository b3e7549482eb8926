"""Exhaustive desk-scale sweeps: subgroups, invariant submodules, bound checks, extremal ratios."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Optional

import numpy as np

from .bounds import BoundReport, acts_abelianly, lower_target, verify_instance
from .groups import AmbientGroup, CapacityError, ElementTable, GroupHandle
from .submodules import Submodule, Vector


@dataclass
class SearchConfig:
    ambient: AmbientGroup
    max_ambient_order: int = 10**4
    max_subgroups: int = 10**5
    parallelism: int = 1
    report_top_k: int = 10
    max_generators: Optional[int] = None
    j_row: int = 2

    def __post_init__(self):
        if min(self.max_ambient_order, self.max_subgroups, self.parallelism) < 1 or self.report_top_k < 0:
            raise ValueError("caps must be positive")


# -- subgroups -------------------------------------------------------------------

@lru_cache(maxsize=8)
def element_table(ambient: AmbientGroup, max_order: int) -> ElementTable:
    if ambient.order > max_order:
        raise CapacityError(f"ambient order {ambient.order} exceeds max_ambient_order {max_order}")
    return ElementTable(ambient)


def _key(members: np.ndarray) -> bytes:
    return members.tobytes()


def subgroup_indices(table: ElementTable, max_generators: Optional[int] = None,
                     max_subgroups: int = 10**5) -> list[tuple[np.ndarray, tuple[int, ...]]]:
    """All subgroups as (sorted member indices, generator indices).

    Starts from the cyclic subgroups and adjoins one cyclic generator at a time
    until nothing new appears (or ``max_generators`` is reached). Only one
    representative per conjugacy class is extended; its conjugates are added
    directly, which covers the same set because conjugation respects generation.
    """
    size = len(table)
    conj = np.stack([table.conjugation(x) for x in range(size)])
    found: dict[bytes, tuple[np.ndarray, tuple[int, ...]]] = {}

    def add_class(members: np.ndarray, gens: tuple[int, ...]) -> Optional[np.ndarray]:
        if _key(members) in found:
            return None
        for x in range(size):
            img = np.sort(conj[x][members]).astype(np.int32)
            k = _key(img)
            if k not in found:
                found[k] = (img, tuple(int(conj[x][g]) for g in gens))
                if len(found) > max_subgroups:
                    raise CapacityError(f"more than {max_subgroups} subgroups "
                                        f"({len(found)} found before stopping)")
        return members

    trivial = np.array([table.identity], dtype=np.int32)
    found[_key(trivial)] = (trivial, ())
    cyclic_gens = []
    seen_cyclic = set()
    for g in range(size):
        members = table.closure([g])
        k = _key(members)
        if k not in seen_cyclic:
            seen_cyclic.add(k)
            cyclic_gens.append((g, members))
    frontier = []
    for g, members in cyclic_gens:
        if add_class(members, (g,)) is not None:
            frontier.append((members, (g,)))
    depth = 1
    while frontier and (max_generators is None or depth < max_generators):
        nxt = []
        for members, gens in frontier:
            inside = np.zeros(size, dtype=bool)
            inside[members] = True
            for g, _ in cyclic_gens:
                if inside[g]:
                    continue
                bigger = table.closure([*gens, g], start=members)
                if add_class(bigger, (*gens, g)) is not None:
                    nxt.append((bigger, (*gens, g)))
        frontier = nxt
        depth += 1
    return sorted(found.values(), key=lambda mg: (len(mg[0]), mg[0].tolist()))


def enumerate_subgroups(ambient: AmbientGroup, config: Optional[SearchConfig] = None) -> list[GroupHandle]:
    config = config or SearchConfig(ambient)
    table = element_table(ambient, config.max_ambient_order)
    return [table.handle(members, gens)
            for members, gens in subgroup_indices(table, config.max_generators, config.max_subgroups)]


# -- submodules -----------------------------------------------------------------

class SubmoduleLattice:
    """Every submodule of (Z/nZ)^rank as a bitmask over the vectors."""

    def __init__(self, n: int, rank: int, cap: int = 10**5):
        if n**rank > 4096:
            raise CapacityError(f"(Z/{n})^{rank} is too large to tabulate")
        self.n, self.rank = n, rank
        self.vectors: list[Vector] = list(product(range(n), repeat=rank))
        self.pos = {v: k for k, v in enumerate(self.vectors)}
        self.masks: list[int] = []
        self.ids: dict[int, int] = {}
        self._joins: dict[tuple[int, int], int] = {}
        self.cyclic = [self._intern(self._span_mask([v])) for v in self.vectors]
        frontier = list(dict.fromkeys(self.cyclic))
        while frontier:
            nxt = []
            for a in frontier:
                for c in set(self.cyclic):
                    before = len(self.masks)
                    self.join(a, c)
                    if len(self.masks) > before:
                        nxt.append(len(self.masks) - 1)
                    if len(self.masks) > cap:
                        raise CapacityError(f"more than {cap} submodules")
            frontier = nxt
        self.zero = self.cyclic[0]

    def _intern(self, mask: int) -> int:
        if mask not in self.ids:
            self.ids[mask] = len(self.masks)
            self.masks.append(mask)
        return self.ids[mask]

    def _members(self, mask: int) -> list[Vector]:
        return [self.vectors[k] for k in range(len(self.vectors)) if mask >> k & 1]

    def _span_mask(self, gens: list[Vector]) -> int:
        seen = {(0,) * self.rank}
        frontier = list(seen)
        while frontier:
            nxt = []
            for v in frontier:
                for g in gens:
                    s = tuple((a + b) % self.n for a, b in zip(v, g))
                    if s not in seen:
                        seen.add(s)
                        nxt.append(s)
            frontier = nxt
        return sum(1 << self.pos[v] for v in seen)

    def join(self, a: int, b: int) -> int:
        if a > b:
            a, b = b, a
        if (a, b) not in self._joins:
            ma, mb = self.masks[a], self.masks[b]
            if ma | mb == ma:
                res = a
            elif ma | mb == mb:
                res = b
            else:
                n = self.n
                total = 0
                mem_b = self._members(mb)
                for x in self._members(ma):
                    for y in mem_b:
                        total |= 1 << self.pos[tuple((p + q) % n for p, q in zip(x, y))]
                res = self._intern(total)
            self._joins[a, b] = res
        return self._joins[a, b]

    def __len__(self) -> int:
        return len(self.masks)

    def size(self, k: int) -> int:
        return bin(self.masks[k]).count("1")

    def submodule(self, k: int) -> Submodule:
        """Deterministic generating set: greedily add the first vector outside the span."""
        target, gens, span = self.masks[k], [], self.masks[self.zero]
        while span != target:
            first = (target & ~span & -(target & ~span)).bit_length() - 1
            gens.append(self.vectors[first])
            span = self.masks[self.join(self.ids[span], self.cyclic[first])]
        return Submodule(self.n, self.rank, tuple(gens))


@lru_cache(maxsize=16)
def submodule_lattice(n: int, rank: int) -> SubmoduleLattice:
    return SubmoduleLattice(n, rank)


def invariant_submodule_ids(gamma: GroupHandle, lattice: SubmoduleLattice) -> list[int]:
    elems = gamma.ensure_elements()
    gamma_cyclic = set()
    for v in lattice.vectors:
        acc = lattice.zero
        for a in elems:
            acc = lattice.join(acc, lattice.cyclic[lattice.pos[a.apply(v)]])
        gamma_cyclic.add(acc)
    found = {lattice.zero}
    frontier = [lattice.zero]
    while frontier:
        nxt = []
        for a in frontier:
            for c in gamma_cyclic:
                s = lattice.join(a, c)
                if s not in found:
                    found.add(s)
                    nxt.append(s)
        frontier = nxt
    return sorted(found, key=lambda k: (lattice.size(k), lattice.masks[k]))


def enumerate_invariant_submodules(gamma: GroupHandle) -> list[Submodule]:
    """All Gamma-invariant submodules: sums of Gamma-orbit spans of single vectors."""
    lattice = submodule_lattice(gamma.ambient.n, gamma.ambient.rank)
    return [lattice.submodule(k) for k in invariant_submodule_ids(gamma, lattice)]


# -- sweeps -----------------------------------------------------------------------

@dataclass
class ExtremalRecord:
    report: BoundReport
    ratio: float
    ratio_lower: Fraction


def ratio_lower(w_order: int, idx: int, q: int = 1000) -> Fraction:
    """Largest p/q with w_order^q >= idx^p, i.e. a certified floor of log|W| / log I."""
    approx = math.log(w_order) / math.log(idx)
    exact = Fraction(approx).limit_denominator(q)
    if w_order**exact.denominator == idx**exact.numerator:
        return exact
    p = math.floor(approx * q)
    while p > 0 and w_order**q < idx**p:
        p -= 1
    while w_order**q >= idx ** (p + 1):
        p += 1
    return Fraction(p, q)


@dataclass
class Summary:
    setting: str
    m: int
    n: int
    subgroups: int
    instances: int
    violations: int
    intermediate_violations: int
    skipped_nonabelian: int
    max_ratio: Optional[Fraction]
    target_exponent: Optional[Fraction]
    top: list[ExtremalRecord] = field(default_factory=list)

    def to_json(self) -> dict:
        def frac(x):
            return None if x is None else {"p": x.numerator, "q": x.denominator}

        return {
            "setting": self.setting, "m": self.m, "n": self.n,
            "subgroups": self.subgroups, "instances": self.instances,
            "violations": self.violations, "intermediate_violations": self.intermediate_violations,
            "skipped_nonabelian": self.skipped_nonabelian,
            "max_ratio": frac(self.max_ratio), "target_exponent": frac(self.target_exponent),
            "top": [{"ratio": r.ratio, "ratio_lower": frac(r.ratio_lower), "instance": r.report.to_json()}
                    for r in self.top],
        }


def _sweep(args) -> tuple[list[BoundReport], int]:
    gammas, j_row = args
    reports, skipped = [], 0
    for gamma in gammas:
        lattice = submodule_lattice(gamma.ambient.n, gamma.ambient.rank)
        for k in invariant_submodule_ids(gamma, lattice):
            w = lattice.submodule(k)
            if not acts_abelianly(gamma, w):
                skipped += 1
                continue
            reports.append(verify_instance(gamma, w, j_row))
    return reports, skipped


def _instance_key(rep: BoundReport) -> tuple:
    return (rep.gamma_order, rep.gamma.key, rep.w_order, rep.module.generators)


def exhaustive_verify(config: SearchConfig, gamma_filter=None) -> tuple[list[BoundReport], Summary]:
    """Verify every (Gamma, W) with W invariant and the action abelian."""
    amb = config.ambient
    subgroups = enumerate_subgroups(amb, config)
    if gamma_filter is not None:
        subgroups = [g for g in subgroups if gamma_filter(g)]
    if config.parallelism > 1 and len(subgroups) > 1:
        chunks = [subgroups[k::config.parallelism] for k in range(config.parallelism)]
        with ProcessPoolExecutor(config.parallelism) as pool:
            results = list(pool.map(_sweep, [(c, config.j_row) for c in chunks]))
    else:
        results = [_sweep((subgroups, config.j_row))]
    reports = sorted((r for rs, _ in results for r in rs), key=_instance_key)
    skipped = sum(s for _, s in results)
    top = extremal_records(reports, config.report_top_k)
    summary = Summary(
        setting=amb.kind, m=amb.m, n=amb.n, subgroups=len(subgroups), instances=len(reports),
        violations=sum(1 for r in reports if not r.verdict_main),
        intermediate_violations=sum(1 for r in reports if r.verdict_intermediate is False),
        skipped_nonabelian=skipped,
        max_ratio=top[0].ratio_lower if top else None,
        target_exponent=lower_target(amb.m) if amb.kind == "GL" else None,
        top=top,
    )
    return reports, summary


def extremal_records(reports: list[BoundReport], k: int) -> list[ExtremalRecord]:
    recs = []
    for rep in reports:
        if rep.index > 1 and rep.w_order > 1:
            recs.append(ExtremalRecord(rep, math.log(rep.w_order) / math.log(rep.index),
                                       ratio_lower(rep.w_order, rep.index)))
    recs.sort(key=lambda r: (-r.ratio_lower, -r.ratio, _instance_key(r.report)))
    return recs[:k]


def extremal_search(config: SearchConfig) -> list[ExtremalRecord]:
    _, summary = exhaustive_verify(config)
    return summary.top
