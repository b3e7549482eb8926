"""Arithmetic over Z/nZ: factorization, l-adic valuations and CRT splitting."""

from __future__ import annotations

from dataclasses import dataclass
from math import prod


class DomainError(ValueError):
    """Parameter outside the domain the bounds are stated for."""


class StructuralError(ValueError):
    """Mismatched dimensions, rings or component counts."""


@dataclass(frozen=True)
class RingSpec:
    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("n and m must be greater than 1")
        if prod(l**e for l, e in self.factors) != self.n:
            raise StructuralError(f"factors {self.factors} do not multiply to {self.n}")
        primes = [l for l, _ in self.factors]
        if primes != sorted(set(primes)) or any(e < 1 for _, e in self.factors):
            raise StructuralError(f"malformed factorization {self.factors}")

    @property
    def is_prime_power(self) -> bool:
        return len(self.factors) == 1

    @property
    def prime_powers(self) -> tuple[int, ...]:
        return tuple(l**e for l, e in self.factors)

    def part(self, l: int) -> RingSpec:
        for p, e in self.factors:
            if p == l:
                return RingSpec(p**e, ((p, e),))
        raise StructuralError(f"{l} does not divide {self.n}")


def factorize(n: int) -> RingSpec:
    if n < 2:
        raise DomainError("n and m must be greater than 1")
    factors = []
    rest, p = n, 2
    while p * p <= rest:
        if rest % p == 0:
            e = 0
            while rest % p == 0:
                rest //= p
                e += 1
            factors.append((p, e))
        p += 1
    if rest > 1:
        factors.append((rest, 1))
    return RingSpec(n, tuple(factors))


def ring_of(n: int | RingSpec) -> RingSpec:
    return n if isinstance(n, RingSpec) else factorize(n)


def is_prime(p: int) -> bool:
    return p >= 2 and factorize(p).factors == ((p, 1),)


def valuation(l: int, x: int, e: int) -> int:
    """Largest t <= e with l**t dividing x mod l**e; zero has valuation e."""
    x %= l**e
    if x == 0:
        return e
    t = 0
    while x % l == 0:
        x //= l
        t += 1
    return t


def crt_split(x: int, spec: RingSpec) -> tuple[int, ...]:
    return tuple(x % q for q in spec.prime_powers)


def crt_combine(parts, spec: RingSpec) -> int:
    moduli = spec.prime_powers
    parts = tuple(parts)
    if len(parts) != len(moduli):
        raise StructuralError(f"expected {len(moduli)} components, got {len(parts)}")
    x = 0
    for r, q in zip(parts, moduli):
        rest = spec.n // q
        x += r * rest * pow(rest, -1, q)
    return x % spec.n
