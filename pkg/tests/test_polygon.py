import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lpoly.errors import ComputationError, InputError
from lpoly.polygon import (
    ModulusTooSmall,
    NewtonPolygon,
    SlopeForm,
    classify_family,
    default_moduli,
    fit_slope_form,
    hodge_polygon,
    lies_above,
    lower_hull,
    predict_ord,
)
from lpoly.valuation import INF, AtLeast

F = Fraction


def test_hodge_vertices():
    hp = hodge_polygon(4)
    assert hp.vertices == ((0, 0), (1, F(1, 4)), (2, F(3, 4)), (3, F(3, 2)))
    assert hp.slopes == [F(1, 4), F(1, 2), F(3, 4)]
    with pytest.raises(InputError):
        hodge_polygon(1)


def test_hull_drops_infinite_points_and_interior_points():
    np_ = lower_hull([(1, INF), (2, F(1))], 3)
    assert np_.vertices == ((0, 0), (2, 1))
    np_ = lower_hull([(1, F(1, 2)), (2, F(1)), (3, F(3, 2))], 4)
    assert np_.vertices == ((0, 0), (3, F(3, 2)))
    with pytest.raises(InputError, match="missing finite endpoint"):
        lower_hull([(1, F(1)), (2, INF)], 3)


def test_markers_must_sit_above_the_hull():
    lower_hull([(1, AtLeast(F(7, 3))), (2, F(1))], 3)
    with pytest.raises(ComputationError):
        lower_hull([(1, AtLeast(F(1, 4))), (2, F(1))], 3)


@given(st.integers(2, 7), st.data())
@settings(max_examples=80, deadline=None)
def test_hull_is_convex_and_below_points(d, data):
    vals = [data.draw(st.fractions(0, 3, max_denominator=12) | st.just(INF)) for _ in range(d - 2)]
    vals.append(data.draw(st.fractions(0, 3, max_denominator=12)))
    pts = list(enumerate(vals, start=1))
    np_ = lower_hull(pts, d)
    s = np_.slopes
    assert s == sorted(s)
    assert len(s) == d - 1
    for n, v in pts:
        if v != INF:
            assert np_.value_at(n) <= v
    for x, y in np_.vertices[1:]:
        assert dict(pts)[x] == y


def test_lies_above():
    hp = hodge_polygon(3)
    assert lies_above(hp, hp)
    assert lies_above(lower_hull([(1, INF), (2, F(1))], 3), hp)
    assert not lies_above(lower_hull([(1, F(0)), (2, F(1, 2))], 3), hp)


def test_json_round_trip():
    np_ = lower_hull([(1, F(1, 3)), (2, F(1))], 3)
    assert NewtonPolygon.from_json(np_.to_json()) == np_
    assert np_.to_json()["vertices"] == [["0", "0"], ["1", "1/3"], ["2", "1"]]


def test_fit_and_predict():
    # x^3 + x: class 2 mod 3 has ord M_1 = (p+1)/(3(p-1))
    form = fit_slope_form(F(1, 2), 5, F(2, 5), 11, 3)
    assert form == SlopeForm(1, -1, 3, 2)
    assert predict_ord(form, 17) == F(18, 48)
    assert form.limit == F(1, 3)
    with pytest.warns(UserWarning):
        predict_ord(form, 7)
    with pytest.raises(ModulusTooSmall, match="modulus D too small"):
        fit_slope_form(F(1, 2), 5, F(2, 5), 11, 1)
    with pytest.raises(InputError):
        fit_slope_form(F(1, 2), 5, F(1, 3), 7, 3)


@given(st.integers(-20, 20), st.integers(-20, 20), st.sampled_from([2, 3, 4, 6, 12]), st.data())
@settings(max_examples=80, deadline=None)
def test_fit_recovers_any_form(u, v, D, data):
    primes = [p for p in (13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73) if p > D]
    r = data.draw(st.sampled_from(sorted({p % D for p in primes})))
    cls = [p for p in primes if p % D == r]
    if len(cls) < 2:
        return
    p1, p2 = cls[:2]
    truth = SlopeForm(u, v, D, r)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        got = fit_slope_form(predict_ord(truth, p1), p1, predict_ord(truth, p2), p2, D)
        assert got == truth
        for p in cls:
            assert predict_ord(got, p) == predict_ord(truth, p)


def test_default_moduli():
    assert default_moduli(3) == [3, 6]
    assert default_moduli(4) == [4, 8, 12]


def test_classify_hodge_family():
    rep = classify_family([1, 0, 1], [5, 7, 11, 13, 17, 19], D=3)
    assert [c.status for c in rep.classes] == ["stable", "stable"]
    assert rep.klass(1).forms[1] == SlopeForm(1, 1, 3, 1)
    assert rep.klass(2).forms[1] == SlopeForm(1, -1, 3, 2)
    assert rep.klass(2).forms[2] == SlopeForm(3, 3, 3, 2)


def test_classify_skips_and_notices():
    rep = classify_family([1, 0, 1], [2, 3, 4, 5, 7], D=3)
    assert all(c.status == "skipped" for c in rep.classes)
    assert any("requires d < p" in s for s in rep.notices)
    assert any("not prime" in s for s in rep.notices)


def test_classify_is_engine_agnostic():
    primes = [5, 7, 11, 13, 17, 19]
    a = classify_family([1, 0, 1], primes, D=3, engine="direct")
    b = classify_family([1, 0, 1], primes, D=3, engine="dwork")
    ja, jb = a.to_json(), b.to_json()
    ja.pop("engine"), jb.pop("engine")
    assert ja == jb


def test_classify_parallel_matches_serial():
    primes = [5, 7, 11, 13, 17, 19]
    assert classify_family([1, 0, 1], primes, D=3, jobs=3).to_json() == classify_family([1, 0, 1], primes, D=3).to_json()


def test_classify_too_coarse_modulus_is_unstable():
    rep = classify_family([1, 0, 1], [5, 7, 11, 13], D=1)
    assert rep.classes[0].status == "unstable at tested primes"
