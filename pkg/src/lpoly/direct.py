"""Ground-truth L-function coefficients from brute-force exponential sums."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .cyclotomic import CycInt, valuation
from .errors import ComputationError, InputError, NotDivisibleError
from .field import FieldSpec, PolySpec, build_field, enumerate_field, eval_poly, trace_histogram, trace_to_prime
from .valuation import INF, Valuation, fmt_val


def extension_field(f: PolySpec, r: int) -> FieldSpec:
    """F_{q^r} realized as F_{p^{m r}}."""
    return build_field(f.field.p, f.field.m * r)


def exp_sum(f: PolySpec, r: int) -> CycInt:
    """S_r(f) = sum over x in F_{q^r} of zeta^Tr(f(x)), exactly."""
    if r < 1:
        raise InputError("r must be a positive integer")
    ext = extension_field(f, r)
    counts = trace_histogram(f, ext)
    return CycInt.from_exponents(f.field.p, counts)


def exp_sum_naive(f: PolySpec, r: int) -> CycInt:
    """Element-by-element version of ``exp_sum``; slow, used as a cross-check."""
    ext = extension_field(f, r)
    counts = [0] * f.field.p
    for x in enumerate_field(ext):
        counts[trace_to_prime(eval_poly(f, x))] += 1
    return CycInt.from_exponents(f.field.p, counts)


@dataclass
class LPolynomial:
    """L(f, T) = 1 + M_1 T + ... + M_{d-1} T^{d-1} with M_n in Z[zeta_p]."""

    poly: PolySpec
    coeffs: list[CycInt]
    sums: list[CycInt] = dc_field(default_factory=list)

    @property
    def field(self) -> FieldSpec:
        return self.poly.field

    @property
    def d(self) -> int:
        return self.poly.degree

    def valuations(self) -> list[Valuation]:
        """ord_q M_n for n = 1..d-1 (ord_q = ord_p / m)."""
        m = self.field.m
        out = []
        for c in self.coeffs:
            v = valuation(c)
            out.append(v if v == INF else v / m)
        return out

    def to_json(self) -> dict:
        return {
            "p": self.field.p,
            "m": self.field.m,
            "d": self.d,
            "coeffs": list(self.poly.coeffs),
            "M": [c.to_json() for c in self.coeffs],
            "valuations": [fmt_val(v) for v in self.valuations()],
        }


def _m_recursion(sums: list[CycInt], count: int) -> list[CycInt]:
    """Solve n M_n = sum_{r=1}^n S_r M_{n-r} for n = 1..count."""
    p = sums[0].p
    M = [CycInt.from_int(p, 1)]
    for n in range(1, count + 1):
        acc = CycInt.from_int(p, 0)
        for r in range(1, n + 1):
            acc = acc + sums[r - 1] * M[n - r]
        try:
            M.append(acc.exact_div_int(n))
        except NotDivisibleError as exc:
            raise ComputationError(f"inexact division by {n} in L-coefficient recursion") from exc
    return M[1:]


def l_coeffs(f: PolySpec) -> LPolynomial:
    d, p = f.degree, f.field.p
    if d >= p:
        raise InputError("degree must be < p")
    sums = [exp_sum(f, r) for r in range(1, d)]
    coeffs = _m_recursion(sums, d - 1) if d > 1 else []
    return LPolynomial(f, coeffs, sums)


def predicted_sums(L: LPolynomial, upto: int) -> list[CycInt]:
    """S_1..S_upto from the coefficients of L via Newton's identities."""
    p = L.field.p
    zero = CycInt.from_int(p, 0)
    M = [CycInt.from_int(p, 1)] + list(L.coeffs)

    def coeff(n: int) -> CycInt:
        return M[n] if n < len(M) else zero

    S: list[CycInt] = []
    for n in range(1, upto + 1):
        acc = coeff(n) * n
        for r in range(1, n):
            acc = acc - S[r - 1] * coeff(n - r)
        S.append(acc)
    return S


@dataclass
class ConsistencyRow:
    r: int
    predicted: CycInt
    actual: CycInt

    @property
    def ok(self) -> bool:
        return self.predicted == self.actual


@dataclass
class ConsistencyReport:
    rows: list[ConsistencyRow]

    @property
    def passed(self) -> bool:
        return all(row.ok for row in self.rows)


def consistency_check(L: LPolynomial, f: PolySpec, extra: int) -> ConsistencyReport:
    """Compare S_r predicted by L against brute force for r = d..d-1+extra."""
    d = f.degree
    predicted = predicted_sums(L, d - 1 + extra)
    rows = [ConsistencyRow(r, predicted[r - 1], exp_sum(f, r)) for r in range(d, d + extra)]
    return ConsistencyReport(rows)


def newton_points_direct(f: PolySpec) -> list[tuple[int, Valuation]]:
    L = l_coeffs(f)
    return [(n, v) for n, v in enumerate(L.valuations(), start=1)]


