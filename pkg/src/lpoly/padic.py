"""Truncated arithmetic in the Eisenstein ring Z_p[pi], pi^(p-1) = -p.

An element is  p^shift * sum_{i<p-1} c_i pi^i  known modulo pi^prec.
``prec`` is an absolute precision in pi-units (1/(p-1) of ord_p); the
p-power ``shift`` lets elements with negative valuation (the reduction
coefficients) live in the same type.  Coefficients are reduced so that no
digit at or beyond ``prec`` is ever stored.

pi is a formal uniformizer: nothing here depends on which root of
x^(p-1) + p it is, and only valuations are consumed downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import InputError, PrecisionError
from .valuation import AtLeast, Valuation, fmt_frac


def ord_p(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("ord_p(0) is infinite")
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class PiAdic:
    p: int
    coeffs: tuple[int, ...]
    shift: int
    prec: int

    # -- construction -----------------------------------------------------

    @classmethod
    def make(cls, p: int, coeffs: Sequence[int], shift: int, prec: int) -> "PiAdic":
        """Normalize: drop digits beyond prec, then pull p out of the coefficients."""
        n = p - 1
        cs = list(coeffs)
        if shift > 0:
            cs = [c * p**shift for c in cs]
            shift = 0
        for i in range(n):
            t = _ceil_div(prec - i, n) - shift
            cs[i] = cs[i] % p**t if t > 0 else 0
        if not any(cs):
            return cls(p, (0,) * n, 0, prec)
        while shift < 0 and all(c % p == 0 for c in cs):
            cs = [c // p for c in cs]
            shift += 1
        return cls(p, tuple(cs), shift, prec)

    @classmethod
    def from_int(cls, p: int, value: int, prec: int) -> "PiAdic":
        return cls.make(p, [value] + [0] * (p - 2), 0, prec)

    @classmethod
    def zero(cls, p: int, prec: int) -> "PiAdic":
        return cls.from_int(p, 0, prec)

    @classmethod
    def pi(cls, p: int, prec: int) -> "PiAdic":
        if p == 2:
            return cls.make(p, [-2], 0, prec)
        return cls.make(p, [0, 1] + [0] * (p - 3), 0, prec)

    @classmethod
    def pi_power(cls, p: int, k: int, prec: int) -> "PiAdic":
        x = cls.from_int(p, 1, prec)
        for _ in range(k):
            x = x.mul_pi()
        return x

    # -- inspection -------------------------------------------------------

    @property
    def known_prec(self) -> Fraction:
        """Absolute precision in ord_p units."""
        return Fraction(self.prec, self.p - 1)

    def valuation_units(self) -> int | None:
        """ord in pi-units, or None when no nonzero digit is below prec."""
        best = None
        n = self.p - 1
        for i, c in enumerate(self.coeffs):
            if c:
                v = n * (self.shift + ord_p(c, self.p)) + i
                if best is None or v < best:
                    best = v
        return best

    def _val_or_prec(self) -> int:
        v = self.valuation_units()
        return self.prec if v is None else v

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    # -- ring operations --------------------------------------------------

    def _check(self, other: "PiAdic") -> None:
        if not isinstance(other, PiAdic) or other.p != self.p:
            raise InputError("mismatched p in Eisenstein arithmetic")

    def __add__(self, other: "PiAdic") -> "PiAdic":
        self._check(other)
        p = self.p
        e = min(self.shift, other.shift)
        a = p ** (self.shift - e)
        b = p ** (other.shift - e)
        cs = [x * a + y * b for x, y in zip(self.coeffs, other.coeffs)]
        return PiAdic.make(p, cs, e, min(self.prec, other.prec))

    def __neg__(self) -> "PiAdic":
        return PiAdic.make(self.p, [-c for c in self.coeffs], self.shift, self.prec)

    def __sub__(self, other: "PiAdic") -> "PiAdic":
        return self + (-other)

    def __mul__(self, other) -> "PiAdic":
        if isinstance(other, int):
            return self.mul_int(other)
        self._check(other)
        p, n = self.p, self.p - 1
        raw = [0] * (2 * n - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        raw[i + j] += a * b
        for k in range(2 * n - 2, n - 1, -1):
            raw[k - n] -= p * raw[k]
        prec = min(self.prec + other._val_or_prec(), other.prec + self._val_or_prec())
        return PiAdic.make(p, raw[:n], self.shift + other.shift, prec)

    __rmul__ = __mul__

    def mul_int(self, k: int) -> "PiAdic":
        if k == 0:
            return PiAdic.zero(self.p, self.prec)
        gain = (self.p - 1) * ord_p(k, self.p)
        return PiAdic.make(self.p, [c * k for c in self.coeffs], self.shift, self.prec + gain)

    def div_int(self, k: int) -> "PiAdic":
        """Divide by a nonzero integer in Q_p; loses (p-1)*ord_p(k) pi-units."""
        if k == 0:
            raise ZeroDivisionError("division by zero")
        p, n = self.p, self.p - 1
        s = ord_p(k, p)
        u = k // p**s
        prec = self.prec - n * s
        if prec < 0:
            raise PrecisionError(f"division by {k} exhausts precision")
        top = max(_ceil_div(self.prec - i, n) - self.shift for i in range(n))
        inv = pow(u, -1, p ** max(top, 1))
        return PiAdic.make(p, [c * inv for c in self.coeffs], self.shift - s, prec)

    def mul_pi(self) -> "PiAdic":
        cs = self.coeffs
        if self.p == 2:
            return PiAdic.make(2, [-2 * cs[0]], self.shift, self.prec + 1)
        return PiAdic.make(self.p, [-self.p * cs[-1], *cs[:-1]], self.shift, self.prec + 1)

    def div_pi(self) -> "PiAdic":
        p = self.p
        c0, rest = self.coeffs[0], list(self.coeffs[1:])
        if c0 % p == 0:
            return PiAdic.make(p, rest + [-(c0 // p)], self.shift, self.prec - 1)
        return PiAdic.make(p, [p * c for c in rest] + [-c0], self.shift - 1, self.prec - 1)

    def truncate(self, prec: int) -> "PiAdic":
        """Forget digits at or beyond ``prec`` (never raises precision)."""
        return PiAdic.make(self.p, self.coeffs, self.shift, min(prec, self.prec))

    def agrees_with(self, other: "PiAdic") -> bool:
        """Equal on every digit both operands certify."""
        self._check(other)
        prec = min(self.prec, other.prec)
        return self.truncate(prec) == other.truncate(prec)

    # -- display ----------------------------------------------------------

    def digits(self) -> tuple[int, list[int]]:
        """(start, digits): self = sum_k digits[k] * pi^(start + k) + O(pi^prec)."""
        v = self.valuation_units()
        start = self.prec if v is None else v
        y = self
        if start > 0:
            for _ in range(start):
                y = y.div_pi()
        else:
            for _ in range(-start):
                y = y.mul_pi()
        out = []
        for _ in range(start, self.prec):
            d = y.coeffs[0] % self.p if y.shift == 0 else 0
            out.append(d)
            y = (y - PiAdic.from_int(self.p, d, y.prec)).div_pi()
        return start, out

    def dump(self) -> str:
        start, ds = self.digits()
        body = " ".join(str(d) for d in ds)
        return f"pi^{start}: [{body}] + O(pi^{self.prec})"

    def __str__(self) -> str:
        return self.dump()


def pi_add(x: PiAdic, y: PiAdic) -> PiAdic:
    return x + y


def pi_mul(x: PiAdic, y: PiAdic) -> PiAdic:
    return x * y


def pi_div_int(x: PiAdic, n: int) -> PiAdic:
    return x.div_int(n)


def pi_valuation(x: PiAdic) -> Valuation:
    v = x.valuation_units()
    if v is None:
        return AtLeast(x.known_prec)
    return Fraction(v, x.p - 1)


def teichmuller_int(a: int, p: int, K: int) -> int:
    """omega(a) mod p^K, by iterating x -> x^p (one digit per step)."""
    a %= p
    mod = p**K
    x = a
    for _ in range(K - 1):
        x = pow(x, p, mod)
    return x % mod


def teichmuller(a: int, p: int, K: int) -> PiAdic:
    return PiAdic.from_int(p, teichmuller_int(a, p, K), (p - 1) * K)


# ---------------------------------------------------------------------------

@dataclass
class PrecisionCertificate:
    """Initial precision K (digits) minus itemized losses gives the certified target."""

    initial: Fraction
    losses: list[tuple[str, Fraction]] = field(default_factory=list)

    @property
    def target(self) -> Fraction:
        return self.initial - sum((amt for _, amt in self.losses), Fraction(0))

    def record(self, label: str, amount: Fraction) -> None:
        if amount > 0:
            self.losses.append((label, Fraction(amount)))

    def certifies(self, threshold) -> bool:
        return self.target > threshold

    def to_json(self) -> dict:
        return {
            "initial": fmt_frac(self.initial),
            "losses": [[label, fmt_frac(a)] for label, a in self.losses],
            "target": fmt_frac(self.target),
        }


def theta_coeffs(p: int, i_max: int, K: int, certificate: PrecisionCertificate | None = None) -> list[PiAdic]:
    """Coefficients b_0..b_{i_max} of exp(pi x - pi x^p).

    From theta' = (pi - p pi x^(p-1)) theta:  i b_i = pi b_{i-1} - p pi b_{i-p}.
    """
    N = (p - 1) * K
    b = [PiAdic.from_int(p, 1, N)]
    for i in range(1, i_max + 1):
        acc = b[i - 1]
        if i >= p:
            acc = acc - b[i - p].mul_int(p)
        b.append(acc.mul_pi().div_int(i))
    if certificate is not None:
        worst = min(x.prec for x in b)
        certificate.record("theta: divisions by i", Fraction(N - worst, p - 1))
    return b
