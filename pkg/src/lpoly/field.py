"""Finite fields F_p, F_{p^k} and polynomials with zero constant term.

Elements of F_{p^k} are coefficient tuples (c_0, ..., c_{k-1}) over the
power basis of F_p[x]/(modulus).  The modulus is the smallest monic
irreducible of degree k in lexicographic order of its ascending
coefficient list, so encodings are reproducible across runs.

An extension F_{q^r} of F_q = F_{p^m} is realized directly as F_{p^{mr}};
the additive character only needs the absolute trace to F_p.

Two conventions for turning elements into integers live here:

* ``ExtElem.to_int`` / ``from_int``: the code sum(c_j * p**j).  This is
  how coefficients of a polynomial over F_q are written on the command
  line and stored in ``PolySpec.coeffs``.
* enumeration order: tuples in lexicographic order, c_0 compared first,
  which is what ``enumerate_field`` yields.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import CeilingExceeded, InputError

DEFAULT_CEILING = 10**8
_ceiling = DEFAULT_CEILING

_CHUNK = 1 << 17


def get_ceiling() -> int:
    return _ceiling


def set_ceiling(value: int) -> int:
    """Set the enumeration ceiling (field elements); returns the old value."""
    global _ceiling
    if value < 1:
        raise InputError("ceiling must be positive")
    old, _ceiling = _ceiling, int(value)
    return old


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # deterministic for n < 3.3e24
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    q = 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# dense polynomials over F_p, ascending coefficient lists

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([c % p for c in out])


def _pmod(a: Sequence[int], f: Sequence[int], p: int) -> list[int]:
    a = [c % p for c in a]
    _trim(a)
    df = len(f) - 1
    inv = pow(f[-1], -1, p)
    while len(a) - 1 >= df:
        c = a[-1] * inv % p
        shift = len(a) - 1 - df
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
        _trim(a)
    return a


def _pgcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppowmod(a: Sequence[int], e: int, f: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(a, f, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), f, p)
        base = _pmod(_pmul(base, base, p), f, p)
        e >>= 1
    return result


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Rabin's test for a monic polynomial over F_p."""
    k = len(f) - 1
    if k <= 1:
        return k == 1
    if f[0] % p == 0:
        return False
    x = [0, 1]
    frob = [x]
    for _ in range(k):
        frob.append(_ppowmod(frob[-1], p, f, p))
    if _pmod(frob[k], f, p) != _pmod(x, f, p):
        return False
    for ell in prime_factors(k):
        h = list(frob[k // ell]) + [0] * 2
        h[1] -= 1
        if len(_pgcd(f, h, p)) > 1:
            return False
    return True


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldSpec:
    """F_{p^m} as F_p[x]/(modulus); ``modulus`` is ascending and monic."""

    p: int
    m: int
    modulus: tuple[int, ...]

    @property
    def order(self) -> int:
        return self.p**self.m

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.m})"

    @cached_property
    def _mod_low(self) -> np.ndarray:
        return np.array(self.modulus[:-1], dtype=np.int64)

    @cached_property
    def trace_vector(self) -> tuple[int, ...]:
        """Absolute traces of the power basis 1, x, ..., x^(m-1)."""
        return tuple(
            trace_to_prime(ExtElem(self, tuple(int(i == j) for i in range(self.m))))
            for j in range(self.m)
        )

    def zero(self) -> "ExtElem":
        return ExtElem(self, (0,) * self.m)

    def one(self) -> "ExtElem":
        return ExtElem(self, (1,) + (0,) * (self.m - 1))

    def gen(self) -> "ExtElem":
        """The class of x (for m == 1 this is the root of the modulus x, i.e. 0)."""
        return self(_pmod([0, 1], self.modulus, self.p) or [0])

    def __call__(self, value) -> "ExtElem":
        """Coerce an int (prime-field residue) or coefficient list."""
        if isinstance(value, ExtElem):
            if value.field != self:
                raise InputError("field mismatch")
            return value
        if isinstance(value, int):
            return ExtElem(self, (value % self.p,) + (0,) * (self.m - 1))
        coeffs = _pmod(list(value), self.modulus, self.p)
        return ExtElem(self, tuple(coeffs) + (0,) * (self.m - len(coeffs)))

    def from_int(self, code: int) -> "ExtElem":
        if not 0 <= code < self.order:
            raise InputError(f"element code {code} out of range for {self!r}")
        digits = []
        for _ in range(self.m):
            code, c = divmod(code, self.p)
            digits.append(c)
        return ExtElem(self, tuple(digits))


@lru_cache(maxsize=None)
def _build_field(p: int, k: int) -> FieldSpec:
    for low in itertools.product(range(p), repeat=k):
        f = list(low) + [1]
        if is_irreducible(f, p):
            return FieldSpec(p, k, tuple(f))
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


def build_field(p: int, k: int = 1, ceiling: int | None = None) -> FieldSpec:
    """Return F_{p^k} with the lexicographically smallest monic irreducible modulus.

    >>> build_field(3, 2).modulus
    (1, 0, 1)
    """
    if not isinstance(p, int) or not is_prime(p):
        raise InputError(f"{p} is not prime")
    if k < 1:
        raise InputError("extension degree must be >= 1")
    limit = _ceiling if ceiling is None else ceiling
    if p**k > limit:
        raise CeilingExceeded(f"field too large: {p}^{k} exceeds ceiling {limit}")
    return _build_field(p, k)


@dataclass(frozen=True)
class ExtElem:
    field: FieldSpec
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.field.m:
            raise InputError("coefficient length does not match extension degree")
        if any(not 0 <= c < self.field.p for c in self.coeffs):
            raise InputError("coefficients must be reduced mod p")

    def _coerce(self, other) -> "ExtElem":
        if isinstance(other, int):
            return self.field(other)
        if isinstance(other, ExtElem) and other.field == self.field:
            return other
        raise InputError("field mismatch")

    def __add__(self, other):
        o = self._coerce(other)
        p = self.field.p
        return ExtElem(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return ExtElem(self.field, tuple(-a % p for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return self.field(_pmul(self.coeffs, o.coeffs, self.field.p))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return self.field(_ppowmod(self.coeffs, e, self.field.modulus, self.field.p))

    def inverse(self) -> "ExtElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return self ** (self.field.order - 2)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def frobenius(self) -> "ExtElem":
        return self**self.field.p

    def to_int(self) -> int:
        return sum(c * self.field.p**j for j, c in enumerate(self.coeffs))

    def __repr__(self) -> str:
        terms = [
            f"{c}" if j == 0 else (f"{c}*x" if j == 1 else f"{c}*x^{j}")
            for j, c in enumerate(self.coeffs)
            if c
        ]
        return " + ".join(terms) or "0"


def trace_to_prime(x: ExtElem) -> int:
    """Absolute trace sum_{i<k} x^(p^i), as an integer residue mod p."""
    acc = x
    total = x
    for _ in range(x.field.m - 1):
        acc = acc.frobenius()
        total = total + acc
    if any(total.coeffs[1:]):
        raise AssertionError("trace left the prime field")  # pragma: no cover
    return total.coeffs[0]


def enumerate_field(field: FieldSpec, ceiling: int | None = None) -> Iterator[ExtElem]:
    """Yield every element once, coefficient tuples in lexicographic order."""
    limit = _ceiling if ceiling is None else ceiling
    if field.order > limit:
        raise CeilingExceeded(f"field too large: {field.order} elements exceeds ceiling {limit}")
    for coeffs in itertools.product(range(field.p), repeat=field.m):
        yield ExtElem(field, coeffs)


# ---------------------------------------------------------------------------
# polynomials f = a_1 x + ... + a_d x^d over F_q

@dataclass(frozen=True)
class PolySpec:
    """f(x) = sum_{i=1}^d coeffs[i-1] * x^i over ``field``.

    Coefficients are element codes of ``field`` (plain residues when m = 1).
    """

    field: FieldSpec
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise InputError("polynomial has no coefficients")
        q = self.field.order
        if any(not 0 <= c < q for c in self.coeffs):
            raise InputError(f"coefficients must lie in [0, {q})")
        if self.coeffs[-1] == 0:
            raise InputError("leading coefficient must be nonzero")
        if self.degree >= self.field.p:
            raise InputError(f"degree must be < p (d={self.degree}, p={self.field.p})")

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    @classmethod
    def from_text(cls, field: FieldSpec, text: str) -> "PolySpec":
        """Parse "a1,a2,...,ad" (ascending, constant term implicit)."""
        try:
            values = [int(t) for t in text.replace(" ", "").split(",") if t != ""]
        except ValueError:
            raise InputError(f"malformed polynomial text {text!r}") from None
        return cls.from_pattern(values, field, strict=True)

    @classmethod
    def from_pattern(cls, pattern: Sequence[int], field: FieldSpec, strict: bool = False) -> "PolySpec":
        """Reduce integer coefficients into ``field``.

        For m = 1 integers are reduced mod p.  For m > 1 they are element
        codes and must already be in range unless ``strict`` is false, in
        which case they are reduced mod p (prime-subfield constants).
        """
        vals = list(pattern)
        while vals and vals[-1] % (field.order if field.m > 1 else field.p) == 0:
            if strict:
                raise InputError("leading coefficient must be nonzero")
            vals.pop()
        if field.m == 1 or not strict:
            coeffs = tuple(v % field.p for v in vals)
        else:
            coeffs = tuple(vals)
        return cls(field, coeffs)

    def scaled(self, a: int) -> "PolySpec":
        """a * f for a prime-field scalar a."""
        base = self.field
        return PolySpec(base, tuple((base.from_int(c) * a).to_int() for c in self.coeffs))

    def to_text(self) -> str:
        return ",".join(str(c) for c in self.coeffs)

    def __repr__(self) -> str:
        return f"PolySpec({self.to_text()} over {self.field!r})"


@lru_cache(maxsize=None)
def _embedding_root(base: FieldSpec, ext: FieldSpec) -> tuple[int, ...]:
    """First root (in enumeration order) of base.modulus inside ext."""
    if base.m == 1:
        return ext.zero().coeffs
    mu = base.modulus
    for start in range(0, ext.order, _CHUNK):
        X = _chunk(ext, start, min(start + _CHUNK, ext.order))
        acc = np.zeros_like(X)
        acc[:, 0] = mu[-1]
        for c in reversed(mu[:-1]):
            acc = _vmul(acc, X, ext)
            acc[:, 0] = (acc[:, 0] + c) % ext.p
        hits = np.flatnonzero(~acc.any(axis=1))
        if hits.size:
            return tuple(int(v) for v in X[hits[0]])
    raise AssertionError("modulus has no root in extension")  # pragma: no cover


def embed(base: FieldSpec, ext: FieldSpec, code: int) -> ExtElem:
    """Image of the base-field element ``code`` in ``ext`` (which must contain it)."""
    if base.p != ext.p or ext.m % base.m:
        raise InputError(f"field mismatch: {base!r} is not a subfield of {ext!r}")
    a = base.from_int(code)
    if base.m == 1:
        return ext(a.coeffs[0])
    root = ExtElem(ext, _embedding_root(base, ext))
    acc = ext.zero()
    for c in reversed(a.coeffs):
        acc = acc * root + c
    return acc


def eval_poly(f: PolySpec, x: ExtElem) -> ExtElem:
    """Horner evaluation of f at x, in x's field."""
    ext = x.field
    if f.field.p != ext.p or ext.m % f.field.m:
        raise InputError(f"field mismatch: {x!r} is not in an extension of {f.field!r}")
    acc = ext.zero()
    for c in reversed(f.coeffs):
        acc = (acc + embed(f.field, ext, c)) * x
    return acc


# ---------------------------------------------------------------------------
# vectorized kernels used by the exponential-sum engine

def _chunk(field: FieldSpec, start: int, stop: int) -> np.ndarray:
    """Rows are the elements with enumeration indices start..stop-1."""
    idx = np.arange(start, stop, dtype=np.int64)
    k, p = field.m, field.p
    out = np.empty((idx.size, k), dtype=np.int64)
    for j in range(k):
        out[:, j] = (idx // p ** (k - 1 - j)) % p
    return out


def _vmul(X: np.ndarray, Y: np.ndarray, field: FieldSpec) -> np.ndarray:
    k, p = field.m, field.p
    n = max(X.shape[0], Y.shape[0])
    Z = np.zeros((n, 2 * k - 1), dtype=np.int64)
    for i in range(k):
        Z[:, i : i + k] += X[:, i : i + 1] * Y
    Z %= p
    low = field._mod_low
    for t in range(2 * k - 2, k - 1, -1):
        c = Z[:, t] % p
        Z[:, t - k : t] -= c[:, None] * low[None, :]
    return Z[:, :k] % p


def trace_histogram(f: PolySpec, ext: FieldSpec, ceiling: int | None = None) -> np.ndarray:
    """counts[t] = #{x in ext : Tr(f(x)) = t}, for t in F_p."""
    limit = _ceiling if ceiling is None else ceiling
    if ext.order > limit:
        raise CeilingExceeded(f"field too large: {ext.order} elements exceeds ceiling {limit}")
    p = ext.p
    consts = [np.array(embed(f.field, ext, c).coeffs, dtype=np.int64)[None, :] for c in f.coeffs]
    tvec = np.array(ext.trace_vector, dtype=np.int64)
    counts = np.zeros(p, dtype=np.int64)
    for start in range(0, ext.order, _CHUNK):
        X = _chunk(ext, start, min(start + _CHUNK, ext.order))
        acc = np.broadcast_to(consts[-1], X.shape)
        acc = _vmul(acc, X, ext)
        for c in reversed(consts[:-1]):
            acc = _vmul((acc + c) % p, X, ext)
        t = (acc @ tvec) % p
        counts += np.bincount(t, minlength=p)
    return counts
