import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lpoly.cyclotomic import CycInt, complex_abs, lambda_divide, valuation, zeta_pow
from lpoly.direct import exp_sum
from lpoly.errors import NotDivisibleError
from lpoly.field import PolySpec, build_field
from lpoly.valuation import INF

PRIMES = [2, 3, 5, 7, 11]


def cyc(p):
    return st.lists(st.integers(-30, 30), min_size=p - 1, max_size=p - 1).map(lambda c: CycInt(p, tuple(c)))


def test_zeta_relations():
    for p in PRIMES:
        total = CycInt.from_int(p, 0)
        for k in range(p):
            total = total + zeta_pow(p, k)
        assert total.is_zero()
        assert zeta_pow(p, p) == CycInt.from_int(p, 1)
        assert zeta_pow(p, 2) * zeta_pow(p, p - 1) == zeta_pow(p, 1)


@pytest.mark.parametrize("p", PRIMES)
def test_uniformizer_valuation(p):
    lam = CycInt.from_int(p, 1) - zeta_pow(p, 1)
    assert valuation(lam) == Fraction(1, p - 1)
    assert valuation(CycInt.from_int(p, p)) == 1
    assert valuation(CycInt.from_int(p, 0)) == INF
    assert valuation(CycInt.from_int(p, p * p * (p + 1))) == 2


def test_lambda_divide_rejects_units():
    with pytest.raises(NotDivisibleError):
        lambda_divide(CycInt.from_int(5, 1))


@pytest.mark.parametrize("p", [3, 5, 7])
def test_valuation_properties(p):
    @given(cyc(p), cyc(p), st.integers(1, p - 1))
    @settings(max_examples=60, deadline=None)
    def check(x, y, a):
        vx, vy = valuation(x), valuation(y)
        assert valuation(x * y) == vx + vy
        if not (x + y).is_zero():
            assert valuation(x + y) >= min(vx, vy)
        assert valuation(x.galois(a)) == vx
        if vx != INF:
            assert (vx * (p - 1)).denominator == 1

    check()


@pytest.mark.parametrize("p", [3, 5, 7])
def test_ring_laws(p):
    @given(cyc(p), cyc(p), cyc(p))
    @settings(max_examples=40, deadline=None)
    def check(x, y, z):
        assert x * (y + z) == x * y + x * z
        assert (x * y) * z == x * (y * z)
        assert x * y == y * x
        for k in range(1, p):
            assert (x * y).galois(k) == x.galois(k) * y.galois(k)

    check()


def test_json_round_trip():
    x = CycInt(7, (1, -2, 3, 0, 5, 9))
    assert CycInt.from_json(7, x.to_json()) == x


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_quadratic_gauss_sum_magnitude(p):
    s = exp_sum(PolySpec.from_text(build_field(p), "0,1"), 1)
    for k in range(1, p):
        assert complex_abs(s, k) == pytest.approx(math.sqrt(p), abs=1e-9)
    # |g|^2 = p means ord_p g = 1/2
    assert valuation(s) == Fraction(1, 2)
