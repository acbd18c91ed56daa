"""L(f, T) = det(I - T Gamma) for q = p, via Dwork's trace formula.

Pipeline: Teichmuller-lift the coefficients of f, expand
F(x) = prod_j theta(a_j x^j) = sum h_n x^n, reduce x^r to the basis
x^0..x^(d-1) modulo the image of D = x d/dx + pi x g'(x), assemble

    m_ij = sum_{r>0} h_{rp-j} a_{r,i}        (1 <= i, j <= d-1)

truncated where the tail is provably beyond the precision target, and
read off M_n as signed sums of principal minors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from .errors import InputError, PrecisionError
from .field import PolySpec
from .padic import PiAdic, PrecisionCertificate, pi_valuation, teichmuller_int, theta_coeffs
from .valuation import AtLeast, Valuation, fmt_frac, fmt_val

MAX_ESCALATIONS = 6


def _require_prime_field(f: PolySpec) -> None:
    if f.field.m != 1:
        raise InputError("dwork engine requires m=1")
    if f.degree >= f.field.p:
        raise InputError("degree must be < p")


def default_target(d: int, p: int) -> Fraction:
    """Smallest valuation strictly above d-1 on the 1/(p-1) lattice."""
    return Fraction(d - 1) + Fraction(1, p - 1)


def tail_bound(r: int, i: int, j: int, d: int, p: int) -> Fraction:
    """Lower bound for ord_p(h_{rp-j} a_{r,i}), valid for every r >= 1."""
    return Fraction((p - 1) * (r * p - j), d * p * p) - Fraction(r - i, d * (p - 1))


def truncation_index(d: int, p: int, target: Fraction) -> int:
    """Smallest r with tail_bound(r', i, j) > target for all r' >= r and all i, j."""
    r = 1
    while True:
        # the bound is increasing in r and i, decreasing in j
        if tail_bound(r, 1, d - 1, d, p) > target:
            return r
        r += 1


@dataclass
class HSeries:
    h: list[PiAdic]
    lifts: list[int]  # a_1..a_d mod p^K


@dataclass
class ReductionTable:
    rows: list[list[PiAdic]]  # rows[n][i] = a_{n,i}, 0 <= i < d


@dataclass
class FrobMatrix:
    gamma: list[list[PiAdic]]  # gamma[i-1][j-1] = m_ij
    certificate: PrecisionCertificate
    r_max: int
    K: int
    target: Fraction
    hseries: HSeries | None = field(default=None, repr=False)
    reduction: ReductionTable | None = field(default=None, repr=False)


def lifts(f: PolySpec, K: int) -> list[int]:
    p = f.field.p
    return [teichmuller_int(a, p, K) for a in f.coeffs]


def h_coeffs(f: PolySpec, n_max: int, K: int, certificate: PrecisionCertificate | None = None) -> HSeries:
    """h_0..h_{n_max} of F(x) = exp(pi (g(x) - g(x^p))), g the lifted polynomial.

    Since a_j^p = a_j for Teichmuller lifts, F = prod_j theta(a_j x^j), and
    x F' = pi (sum_j j a_j x^j - p sum_j j a_j x^{jp}) F gives

        n h_n = pi * sum_j j a_j (h_{n-j} - p h_{n-jp}).
    """
    _require_prime_field(f)
    p = f.field.p
    N = (p - 1) * K
    a = lifts(f, K)
    scal = [(j, PiAdic.from_int(p, j * aj, N)) for j, aj in enumerate(a, start=1) if aj]
    h = [PiAdic.from_int(p, 1, N)]
    for n in range(1, n_max + 1):
        acc = None
        for j, c in scal:
            if n - j < 0:
                break
            t = h[n - j]
            if n - j * p >= 0:
                t = t - h[n - j * p].mul_int(p)
            t = t * c
            acc = t if acc is None else acc + t
        if acc is None:
            acc = PiAdic.zero(p, N)
        h.append(acc.mul_pi().div_int(n))
    if certificate is not None:
        certificate.record("h: divisions by n", Fraction(N - min(x.prec for x in h), p - 1))
    return HSeries(h, a)


def h_coeffs_product(f: PolySpec, n_max: int, K: int) -> list[PiAdic]:
    """Same series as ``h_coeffs``, as the literal product of the theta(a_j x^j)."""
    _require_prime_field(f)
    p = f.field.p
    N = (p - 1) * K
    b = theta_coeffs(p, n_max, K)
    acc = [PiAdic.from_int(p, 1, N)] + [PiAdic.zero(p, N)] * n_max
    for j, aj in enumerate(lifts(f, K), start=1):
        if not aj:
            continue
        factor = {}
        power = 1
        for k in range(0, n_max // j + 1):
            factor[j * k] = b[k] * PiAdic.from_int(p, power, N)
            power = power * aj % p**K
        new = []
        for n in range(n_max + 1):
            s = None
            for deg, c in factor.items():
                if deg > n:
                    continue
                t = acc[n - deg] * c
                s = t if s is None else s + t
            new.append(s)
        acc = new
    return acc


def reduction_coeffs(f: PolySpec, n_max: int, K: int, certificate: PrecisionCertificate | None = None) -> ReductionTable:
    """Rows a_{n,0..d-1} with x^n = sum_i a_{n,i} x^i modulo D(H), for n <= n_max.

    D(x^{n-d}) = (n-d) x^{n-d} + pi sum_{k=1}^d k a_k x^{n-d+k} is zero in
    the quotient, hence

        x^n = -(1/(d a_d)) [ (n-d)/pi x^{n-d} + sum_{k<d} k a_k x^{n-d+k} ].
    """
    _require_prime_field(f)
    p, d = f.field.p, f.degree
    N = (p - 1) * K
    a = lifts(f, K)
    mod = p**K
    inv = PiAdic.from_int(p, -pow(d * a[-1], -1, mod), N)
    ka = [PiAdic.from_int(p, k * a[k - 1], N) for k in range(1, d)]
    zero = PiAdic.zero(p, N)
    rows = [[PiAdic.from_int(p, int(i == n), N) for i in range(d)] for n in range(min(d, n_max + 1))]
    for n in range(d, n_max + 1):
        row = [zero] * d
        if n > d:
            base = rows[n - d]
            row = [x.mul_int(n - d).div_pi() for x in base]
        for k in range(1, d):
            if a[k - 1] == 0:
                continue
            src = rows[n - d + k]
            row = [acc + x * ka[k - 1] for acc, x in zip(row, src)]
        rows.append([x * inv for x in row])
    if certificate is not None:
        worst = min(x.prec for r in rows for x in r)
        certificate.record("reduction: divisions by pi", Fraction(N - worst, p - 1))
    return ReductionTable(rows)


def frobenius_matrix(f: PolySpec, K: int, target: Fraction | None = None) -> FrobMatrix:
    _require_prime_field(f)
    p, d = f.field.p, f.degree
    if target is None:
        target = default_target(d, p)
    cert = PrecisionCertificate(Fraction(K))
    r_max = truncation_index(d, p, target)
    n_max = max((r_max - 1) * p - 1, 0)
    hs = h_coeffs(f, n_max, K, cert)
    red = reduction_coeffs(f, r_max - 1, K, cert)
    tail = min(tail_bound(r_max, i, j, d, p) for i in range(1, d) for j in range(1, d))
    cap = math.ceil(tail * (p - 1))
    N = (p - 1) * K
    gamma = []
    for i in range(1, d):
        row = []
        for j in range(1, d):
            acc = PiAdic.zero(p, N)
            for r in range(1, r_max):
                a_ri = red.rows[r][i]
                if a_ri.is_zero() and a_ri.prec >= N:
                    continue
                acc = acc + hs.h[r * p - j] * a_ri
            row.append(acc.truncate(cap))
        gamma.append(row)
    worst = min(x.prec for row in gamma for x in row)
    before = N - (p - 1) * sum((amt for _, amt in cert.losses), Fraction(0))
    cert.record("matrix assembly and tail truncation", Fraction(before - worst, p - 1))
    return FrobMatrix(gamma, cert, r_max, K, target, hs, red)


def _det(mat: list[list[PiAdic]], rows: tuple[int, ...], cols: tuple[int, ...], memo: dict) -> PiAdic:
    key = (rows, cols)
    if key in memo:
        return memo[key]
    if len(rows) == 1:
        out = mat[rows[0]][cols[0]]
    else:
        out = None
        r0, rest = rows[0], rows[1:]
        for k, c in enumerate(cols):
            entry = mat[r0][c]
            if entry.is_zero() and entry.prec >= 10**9:
                continue
            term = entry * _det(mat, rest, cols[:k] + cols[k + 1 :], memo)
            if k % 2:
                term = -term
            out = term if out is None else out + term
    memo[key] = out
    return out


def char_poly_coeffs(frob: FrobMatrix | list[list[PiAdic]]) -> list[PiAdic]:
    """M_1..M_{d-1} of det(I - T Gamma) by principal-minor expansion (division free)."""
    gamma = frob.gamma if isinstance(frob, FrobMatrix) else frob
    size = len(gamma)
    memo: dict = {}
    out = []
    for n in range(1, size + 1):
        total = None
        for S in combinations(range(size), n):
            m = _det(gamma, S, S, memo)
            total = m if total is None else total + m
        out.append(-total if n % 2 else total)
    return out


@dataclass
class DworkResult:
    poly: PolySpec
    frob: FrobMatrix
    M: list[PiAdic]

    @property
    def K(self) -> int:
        return self.frob.K

    @property
    def certificate(self) -> PrecisionCertificate:
        return self.frob.certificate

    def valuations(self) -> list[Valuation]:
        return [pi_valuation(x) for x in self.M]

    def to_json(self) -> dict:
        return {
            "p": self.poly.field.p,
            "d": self.poly.degree,
            "K": self.K,
            "r_max": self.frob.r_max,
            "target": fmt_frac(self.frob.target),
            "certificate": self.certificate.to_json(),
            "m_ij_valuations": [[fmt_val(pi_valuation(x)) for x in row] for row in self.frob.gamma],
            "valuations": [fmt_val(v) for v in self.valuations()],
        }


def initial_precision(d: int, p: int, target: Fraction | None = None) -> int:
    """Digits of p-adic precision expected to survive the divisions in the pipeline."""
    if target is None:
        target = default_target(d, p)
    r_max = truncation_index(d, p, target)
    i_max = max((r_max - 1) * p - 1, 0)
    return math.ceil(target) + math.ceil(Fraction(i_max, p - 1)) + 4


def run_dwork(f: PolySpec, K: int | None = None, target: Fraction | None = None) -> DworkResult:
    """Compute M_1..M_{d-1}; escalate precision until the certificate clears the target."""
    _require_prime_field(f)
    p, d = f.field.p, f.degree
    if target is None:
        target = default_target(d, p)
    if K is None:
        K = initial_precision(d, p, target)
    for _ in range(MAX_ESCALATIONS):
        try:
            frob = frobenius_matrix(f, K, target)
        except PrecisionError:
            K *= 2
            continue
        M = char_poly_coeffs(frob)
        final = min(x.known_prec for x in M) if M else frob.certificate.target
        if final >= target and frob.certificate.target >= target:
            return DworkResult(f, frob, M)
        K *= 2
    raise PrecisionError(f"could not certify target {target} for {f!r} (last K={K // 2})")


def newton_points_dwork(f: PolySpec, K: int | None = None) -> list[tuple[int, Valuation]]:
    res = run_dwork(f, K)
    return [(n, v) for n, v in enumerate(res.valuations(), start=1)]


# ---------------------------------------------------------------------------
# bounds from the literature, checked on computed values

def _violates_lower(x: PiAdic, bound: Fraction) -> bool:
    v = pi_valuation(x)
    return not isinstance(v, AtLeast) and v < bound


def theta_bound(i: int, p: int) -> Fraction:
    if i <= p * p - 1:
        return Fraction(i, p - 1)
    return Fraction((p - 1) * i, p * p)


def h_bound(i: int, d: int, p: int) -> Fraction:
    if i <= p * p - 1:
        return Fraction(i, d * (p - 1))
    return Fraction((p - 1) * i, d * p * p)


def bound_violations(res: DworkResult, theta_upto: int | None = None) -> list[str]:
    """Every computed b_i, h_i, a_{r,i} and m_ij checked against its valuation bound."""
    f, frob = res.poly, res.frob
    p, d = f.field.p, f.degree
    out = []
    n_b = theta_upto if theta_upto is not None else min(len(frob.hseries.h) - 1, p * p - 1)
    for i, b in enumerate(theta_coeffs(p, n_b, res.K)):
        if _violates_lower(b, theta_bound(i, p)):
            out.append(f"b_{i}: {pi_valuation(b)} < {theta_bound(i, p)}")
    for i, h in enumerate(frob.hseries.h):
        if _violates_lower(h, h_bound(i, d, p)):
            out.append(f"h_{i}: {pi_valuation(h)} < {h_bound(i, d, p)}")
    for r, row in enumerate(frob.reduction.rows):
        if r < 1:
            continue
        for i, a in enumerate(row):
            v = pi_valuation(a)
            if isinstance(v, AtLeast):
                continue
            if v < Fraction(-(r - i), d * (p - 1)) or v > 0:
                out.append(f"a_{r},{i}: {v} outside [{Fraction(-(r - i), d * (p - 1))}, 0]")
    for i, row in enumerate(frob.gamma, start=1):
        for j, m in enumerate(row, start=1):
            bound = Fraction(p * i - j, d * (p - 1))
            if _violates_lower(m, bound):
                out.append(f"m_{i}{j}: {pi_valuation(m)} < {bound}")
    return out
