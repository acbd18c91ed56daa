"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import random
import sys
import time
from fractions import Fraction
from functools import lru_cache

import pytest

from lpoly.cyclotomic import complex_abs
from lpoly.direct import consistency_check, l_coeffs
from lpoly.dwork import bound_violations, run_dwork
from lpoly.engines import consistent
from lpoly.field import PolySpec, build_field, get_ceiling
from lpoly.padic import pi_valuation
from lpoly.polygon import classify_family, hodge_polygon, lies_above, lower_hull, predict_ord
from lpoly.valuation import INF, AtLeast, fmt_val

WEIL_TOL = 1e-6


def report(n: int, ok: bool, detail: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}", flush=True)


def random_poly(rng: random.Random, p: int, d: int, m: int = 1) -> PolySpec:
    F = build_field(p, m)
    q = F.order
    return PolySpec(F, tuple(rng.randrange(q) for _ in range(d - 1)) + (rng.randrange(1, q),))


def polygon_of(vals, d):
    return lower_hull(list(enumerate(vals, start=1)), d)


# ---------------------------------------------------------------------------
# shared computations

HODGE_PAIRS = [(3, 7), (3, 13), (4, 5), (4, 13), (5, 11), (6, 7)]


@lru_cache(maxsize=None)
def hodge_runs():
    out = []
    for d, p in HODGE_PAIRS:
        rng = random.Random(f"hodge-{d}-{p}")
        for _ in range(20):
            f = random_poly(rng, p, d)
            out.append((f, l_coeffs(f).valuations()))
    return tuple(out)


def engine_cases() -> list[PolySpec]:
    cases = []
    for p in (5, 7, 11):
        F = build_field(p)
        for a1, a2 in itertools.product(range(p), repeat=2):
            cases.append(PolySpec(F, (a1, a2, 1)))
    for d in (4, 5):
        for p in (7, 11, 13):
            rng = random.Random(f"engines-{d}-{p}")
            cases.extend(random_poly(rng, p, d) for _ in range(10))
    return cases


@lru_cache(maxsize=None)
def engine_runs():
    """(f, direct valuations, dwork result, dwork result at doubled K) per case."""
    out = []
    for f in engine_cases():
        res = run_dwork(f)
        out.append((f, l_coeffs(f).valuations(), res, run_dwork(f, 2 * res.K)))
    return tuple(out)


@lru_cache(maxsize=None)
def consistency_runs():
    rng = random.Random("consistency")
    ceiling = get_ceiling()
    out = []
    while len(out) < 30:
        p = rng.choice([5, 7, 11, 13])
        m = 2 if len(out) % 3 == 0 else 1
        d = rng.randint(2, min(p - 1, 5))
        q = p**m
        if q ** (2 * (d - 1)) > min(ceiling, 5 * 10**6):
            continue
        f = random_poly(rng, p, d, m)
        L = l_coeffs(f)
        out.append((f, L, consistency_check(L, f, d - 1)))
    return tuple(out)


# ---------------------------------------------------------------------------
# criteria

def criterion_1():
    bad = []
    for f, vals in hodge_runs():
        if polygon_of(vals, f.degree) != hodge_polygon(f.degree):
            bad.append(f"{f!r}: {[fmt_val(v) for v in vals]}")
    n = len(hodge_runs())
    return not bad, f"Hodge-case exactness, {n - len(bad)}/{n} polygons equal HP(d)", bad


def criterion_2():
    bad = []
    for f, direct, res, _ in engine_runs():
        dw = res.valuations()
        if len(dw) != len(direct) or not all(consistent(a, b) for a, b in zip(dw, direct)):
            bad.append(f"{f!r}: dwork {[fmt_val(v) for v in dw]} direct {[fmt_val(v) for v in direct]}")
    n = len(engine_runs())
    markers = sum(isinstance(v, AtLeast) for _, _, res, _ in engine_runs() for v in res.valuations())
    return not bad, f"cross-engine equivalence, {n - len(bad)}/{n} cases agree ({markers} lower-bound markers)", bad


def criterion_3():
    kinds = {"b": [], "h": [], "a lower": [], "a upper": [], "m": []}
    for f, _, res, _ in engine_runs():
        p = f.field.p
        for msg in bound_violations(res, theta_upto=p * p - 1):
            tag = f"{f!r} {msg}"
            if msg.startswith("b_"):
                kinds["b"].append(tag)
            elif msg.startswith("h_"):
                kinds["h"].append(tag)
            elif msg.startswith("m_"):
                kinds["m"].append(tag)
            else:
                v = Fraction(msg.split(":")[1].split("outside")[0].strip())
                kinds["a upper" if v > 0 else "a lower"].append(tag)
    counts = ", ".join(f"{k}: {len(v)}" for k, v in kinds.items())
    bad = [x for v in kinds.values() for x in v]
    return not bad, f"valuation bounds, violations by kind ({counts})", bad


def criterion_4():
    bad = []
    polys = [(f, vals) for f, vals in hodge_runs()]
    polys += [(f, direct) for f, direct, _, _ in engine_runs()]
    polys += [(f, L.valuations()) for f, L, _ in consistency_runs()]
    for f, vals in polys:
        d = f.degree
        if d < 2:
            continue
        np_ = polygon_of(vals, d)
        if not all(0 <= s <= 1 for s in np_.slopes) or not lies_above(np_, hodge_polygon(d)):
            bad.append(f"{f!r}: {np_.vertices}")
    return not bad, f"Deligne range and Hodge dominance over {len(polys)} polygons, {len(bad)} violations", bad


FAMILIES = [
    # pattern, D, {residue: (fit primes, prediction primes)}
    ([1, 0, 1], 3, {2: ([5, 11], [17, 23]), 1: ([7, 13], [19, 31])}),
    ([1, 0, 0, 1], 4, {1: ([5, 13], [17, 29]), 3: ([7, 11], [19, 23])}),
]


def criterion_5():
    bad, lines = [], []
    for pattern, D, classes in FAMILIES:
        primes = sorted(p for fit, pred in classes.values() for p in fit + pred)
        rep = classify_family(pattern, primes, D=D)
        for residue, (fit, pred) in classes.items():
            c = rep.klass(residue)
            if c.fit_primes != fit:
                bad.append(f"{pattern} class {residue}: fit primes {c.fit_primes} != {fit}")
                continue
            mismatches = []
            for p in pred:
                truth = l_coeffs(PolySpec.from_pattern(pattern, build_field(p))).valuations()
                for n, form in c.forms.items():
                    guess = INF if form == "inf" else predict_ord(form, p)
                    if guess != truth[n - 1]:
                        mismatches.append((p, n))
            stable = c.status == "stable"
            if stable and mismatches:
                bad.append(f"{pattern} class {residue}: reported stable but mispredicts {mismatches}")
            if not stable and not mismatches:
                bad.append(f"{pattern} class {residue}: status {c.status!r} without a mismatch")
            forms = " ".join(str(c.forms[n]) for n in sorted(c.forms))
            lines.append(f"{pattern} mod {D} class {residue}: {c.status} [{forms}]")
    return not bad, "two-prime determination; " + "; ".join(lines), bad


def criterion_6():
    bad = [f"{f!r}" for f, _, rep in consistency_runs() if not rep.passed]
    runs = consistency_runs()
    m2 = sum(f.field.m == 2 for f, _, _ in runs)
    return not bad, f"self-consistency, {len(runs) - len(bad)}/{len(runs)} pass ({m2} over F_(p^2))", bad


def criterion_7():
    bad = []
    checked = 0
    for f, L, rep in consistency_runs():
        p, d, q = f.field.p, f.degree, f.field.order
        sums = list(enumerate(L.sums, start=1)) + [(row.r, row.actual) for row in rep.rows]
        for r, s in sums:
            bound = (d - 1) * q ** (r / 2) + WEIL_TOL
            for k in range(1, p):
                checked += 1
                if complex_abs(s, k) > bound:
                    bad.append(f"{f!r} r={r} k={k}: {complex_abs(s, k)} > {bound}")
    return not bad, f"Weil bound, {checked} embedded sums checked, {len(bad)} violations", bad


def criterion_8():
    bad = []
    for f, _, res, res2 in engine_runs():
        same = all(x.agrees_with(y) for x, y in zip(res.M, res2.M)) and res.valuations() == res2.valuations()
        if not same:
            bad.append(f"{f!r}")
    n = len(engine_runs())
    return not bad, f"precision stability at 2K, {n - len(bad)}/{n} digit-identical", bad


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


@pytest.mark.parametrize("idx", range(1, len(CRITERIA) + 1), ids=[f"criterion_{i}" for i in range(1, 9)])
def test_criterion(idx, capsys):
    ok, detail, bad = CRITERIA[idx - 1]()
    with capsys.disabled():
        print()
        report(idx, ok, detail)
        for line in bad[:5]:
            print(f"    {line}")
    assert ok, f"{len(bad)} failures, first: {bad[:3]}"


if __name__ == "__main__":
    failed = 0
    for i, crit in enumerate(CRITERIA, start=1):
        t = time.time()
        ok, detail, bad = crit()
        report(i, ok, f"{detail} [{time.time() - t:.1f}s]")
        for line in bad[:5]:
            print(f"    {line}")
        failed += not ok
    sys.exit(1 if failed else 0)
