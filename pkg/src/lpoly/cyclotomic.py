"""Exact arithmetic in Z[zeta_p] and the valuation at the prime (1 - zeta).

Elements are integer vectors over the power basis zeta^0 .. zeta^(p-2);
products are reduced with zeta^(p-1) = -(1 + zeta + ... + zeta^(p-2)).
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import InputError, NotDivisibleError
from .valuation import INF, Valuation


def _reduce(p: int, raw: Sequence[int]) -> tuple[int, ...]:
    """Fold exponents mod p, then eliminate zeta^(p-1)."""
    folded = [0] * p
    for i, c in enumerate(raw):
        folded[i % p] += c
    top = folded[p - 1]
    return tuple(c - top for c in folded[: p - 1])


@dataclass(frozen=True)
class CycInt:
    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.p - 1:
            raise InputError(f"CycInt over p={self.p} needs {self.p - 1} coefficients")

    @classmethod
    def from_int(cls, p: int, n: int) -> "CycInt":
        return cls(p, (n,) + (0,) * (p - 2))

    @classmethod
    def from_exponents(cls, p: int, counts: Sequence[int]) -> "CycInt":
        """sum_t counts[t] * zeta^t for t in 0..p-1."""
        return cls(p, _reduce(p, [int(c) for c in counts]))

    def _check(self, other: "CycInt") -> None:
        if not isinstance(other, CycInt) or other.p != self.p:
            raise InputError("mismatched p in cyclotomic arithmetic")

    def __add__(self, other):
        if isinstance(other, int):
            other = CycInt.from_int(self.p, other)
        self._check(other)
        return CycInt(self.p, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycInt(self.p, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return CycInt(self.p, tuple(a * other for a in self.coeffs))
        self._check(other)
        raw = [0] * (2 * self.p - 3)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        raw[i + j] += a * b
        return CycInt(self.p, _reduce(self.p, raw))

    __rmul__ = __mul__

    def exact_div_int(self, n: int) -> "CycInt":
        out = []
        for c in self.coeffs:
            q, r = divmod(c, n)
            if r:
                raise NotDivisibleError(f"coefficient {c} not divisible by {n}")
            out.append(q)
        return CycInt(self.p, tuple(out))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def residue(self) -> int:
        """Image in F_p under zeta -> 1."""
        return sum(self.coeffs) % self.p

    def galois(self, a: int) -> "CycInt":
        """Apply zeta -> zeta^a (a prime to p)."""
        if a % self.p == 0:
            raise InputError("Galois exponent must be prime to p")
        raw = [0] * self.p
        for i, c in enumerate(self.coeffs):
            raw[i * a % self.p] += c
        return CycInt(self.p, _reduce(self.p, raw))

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, p: int, data: Sequence[str]) -> "CycInt":
        return cls(p, tuple(int(s) for s in data))

    def __str__(self) -> str:
        return json.dumps(self.to_json())


def zeta_pow(p: int, k: int) -> CycInt:
    raw = [0] * p
    raw[k % p] = 1
    return CycInt(p, _reduce(p, raw))


def cyc_add(x: CycInt, y: CycInt) -> CycInt:
    return x + y


def cyc_mul(x: CycInt, y: CycInt) -> CycInt:
    return x * y


@lru_cache(maxsize=None)
def _cofactor(p: int) -> CycInt:
    """prod_{i=2}^{p-1} (1 - zeta^i), so that (1 - zeta) * cofactor = p."""
    acc = CycInt.from_int(p, 1)
    one = CycInt.from_int(p, 1)
    for i in range(2, p):
        acc = acc * (one - zeta_pow(p, i))
    return acc


def lambda_divide(x: CycInt) -> CycInt:
    """Exact quotient x / (1 - zeta)."""
    if x.residue():
        raise NotDivisibleError("not divisible by (1 - zeta)")
    return (x * _cofactor(x.p)).exact_div_int(x.p)


def valuation(x: CycInt) -> Valuation:
    """ord_p(x) with ord_p(p) = 1, as a multiple of 1/(p-1); INF for zero."""
    if x.is_zero():
        return INF
    p = x.p
    steps = 0
    g = math.gcd(*x.coeffs)
    while g % p == 0:
        g //= p
        steps += p - 1
    if steps:
        x = x.exact_div_int(p ** (steps // (p - 1)))
    while x.residue() == 0:
        x = lambda_divide(x)
        steps += 1
    return Fraction(steps, p - 1)


def complex_abs(x: CycInt, k: int = 1) -> float:
    """|sigma_k(x)| for the embedding zeta -> exp(2 pi i k / p)."""
    if not 1 <= k <= x.p - 1:
        raise InputError("embedding index must be in 1..p-1")
    w = 2 * math.pi * k / x.p
    return abs(sum(c * cmath.exp(1j * w * i) for i, c in enumerate(x.coeffs)))
