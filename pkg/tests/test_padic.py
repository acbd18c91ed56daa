import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lpoly.errors import PrecisionError
from lpoly.padic import (
    PiAdic,
    PrecisionCertificate,
    ord_p,
    pi_valuation,
    teichmuller,
    teichmuller_int,
    theta_coeffs,
)
from lpoly.valuation import AtLeast

PRIMES = [3, 5, 7]
N = 40  # pi-units of precision used in property tests


def elems(p):
    return st.builds(
        lambda cs, s: PiAdic.make(p, cs, s, N),
        st.lists(st.integers(-(10**6), 10**6), min_size=p - 1, max_size=p - 1),
        st.integers(-2, 2),
    )


@pytest.mark.parametrize("p", PRIMES)
def test_pi_is_eisenstein_root(p):
    pi = PiAdic.pi(p, N)
    x = PiAdic.from_int(p, 1, N)
    for _ in range(p - 1):
        x = x * pi
    assert x.agrees_with(PiAdic.from_int(p, -p, N))
    assert pi_valuation(pi) == Fraction(1, p - 1)
    assert pi_valuation(PiAdic.from_int(p, p, N)) == 1


def test_teichmuller_example():
    assert teichmuller_int(2, 5, 3) == 57
    t = teichmuller(2, 5, 3)
    assert t.agrees_with(PiAdic.from_int(5, 57, t.prec))


@pytest.mark.parametrize("p", PRIMES + [11])
def test_teichmuller_properties(p):
    K = 6
    mod = p**K
    for a in range(p):
        t = teichmuller_int(a, p, K)
        assert t % p == a
        assert pow(t, p, mod) == t
        if a:
            assert pow(t, p - 1, mod) == 1


@pytest.mark.parametrize("p", PRIMES)
def test_ring_laws(p):
    @given(elems(p), elems(p), elems(p))
    @settings(max_examples=40, deadline=None)
    def check(x, y, z):
        assert (x + y).agrees_with(y + x)
        assert (x * (y + z)).agrees_with(x * y + x * z)
        assert ((x * y) * z).agrees_with(x * (y * z))
        assert (x - x).is_zero()
        assert x.mul_pi().div_pi().agrees_with(x)
        vx, vy = pi_valuation(x), pi_valuation(y)
        if not isinstance(vx, AtLeast) and not isinstance(vy, AtLeast):
            assert pi_valuation(x * y) == vx + vy

    check()


@pytest.mark.parametrize("p", PRIMES)
def test_integer_division_round_trip(p):
    @given(elems(p), st.integers(1, 10**4))
    @settings(max_examples=40, deadline=None)
    def check(x, k):
        y = x.div_int(k)
        assert y.prec == x.prec - (p - 1) * ord_p(k, p)
        assert y.mul_int(k).agrees_with(x)

    check()


def test_division_can_exhaust_precision():
    x = PiAdic.from_int(5, 1, 3)
    with pytest.raises(PrecisionError):
        x.div_int(5)


def test_unknown_digits_give_lower_bound():
    x = PiAdic.from_int(5, 625, 8)  # 5^4 has pi-valuation 16 > prec
    assert x.is_zero()
    assert pi_valuation(x) == AtLeast(Fraction(2))


@pytest.mark.parametrize("p", [3, 5, 7])
def test_theta_coefficients(p):
    K = 8
    b = theta_coeffs(p, p * p + 3, K)
    pi = PiAdic.pi(p, (p - 1) * K)
    # below p the series is exp(pi x)
    power = PiAdic.from_int(p, 1, (p - 1) * K)
    for i in range(p):
        assert b[i].agrees_with(power.div_int(math.factorial(i)))
        power = power * pi
    for i, bi in enumerate(b):
        v = pi_valuation(bi)
        bound = Fraction(i, p - 1) if i <= p * p - 1 else Fraction((p - 1) * i, p * p)
        if not isinstance(v, AtLeast):
            assert v >= bound


def test_certificate_arithmetic():
    c = PrecisionCertificate(Fraction(10))
    c.record("a", Fraction(3, 2))
    c.record("ignored", Fraction(0))
    c.record("b", Fraction(1, 2))
    assert c.target == 8
    assert c.certifies(Fraction(7))
    assert not c.certifies(8)
    assert c.to_json() == {"initial": "10", "losses": [["a", "3/2"], ["b", "1/2"]], "target": "8"}


def test_dump_format():
    x = PiAdic.from_int(5, 3, 6)
    assert x.dump() == "pi^0: [3 0 0 0 0 0] + O(pi^6)"
