"""Newton polygons, the Hodge polygon, and residue-class slope-form fits.

Everything is exact rational arithmetic; polygons compare by vertex lists.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .errors import ComputationError, InputError
from .field import PolySpec, build_field, is_prime
from .valuation import INF, AtLeast, Valuation, fmt_frac, fmt_val


@dataclass(frozen=True)
class NewtonPolygon:
    d: int
    vertices: tuple[tuple[int, Fraction], ...]

    @property
    def slopes(self) -> list[Fraction]:
        """Slopes with multiplicity (one per unit of horizontal length), nondecreasing."""
        out = []
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            out.extend([Fraction(y1 - y0, x1 - x0)] * (x1 - x0))
        return out

    def value_at(self, x) -> Fraction:
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            if x0 <= x <= x1:
                return y0 + (y1 - y0) * Fraction(x - x0, x1 - x0)
        if len(self.vertices) == 1 and x == 0:
            return Fraction(0)
        raise ValueError(f"abscissa {x} outside polygon")

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "vertices": [[str(x), fmt_frac(y)] for x, y in self.vertices],
            "slopes": [fmt_frac(s) for s in self.slopes],
        }

    @classmethod
    def from_json(cls, data: dict) -> "NewtonPolygon":
        return cls(int(data["d"]), tuple((int(x), Fraction(y)) for x, y in data["vertices"]))


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull(points: list[tuple[int, Fraction]]) -> list[tuple[int, Fraction]]:
    out: list[tuple[int, Fraction]] = []
    for pt in sorted(points):
        while len(out) >= 2 and _cross(out[-2], out[-1], pt) <= 0:
            out.pop()
        out.append(pt)
    return out


def lower_hull(points: Sequence[tuple[int, Valuation]], d: int) -> NewtonPolygon:
    """Lower convex hull of (0, 0) and the finite points (n, v).

    Infinite points are dropped.  ``AtLeast`` markers must sit on or above
    the hull of the certified points; otherwise the polygon is undecided
    and a ComputationError asks for the exact engine.
    """
    pts = {0: Fraction(0)}
    markers = []
    for n, v in points:
        if isinstance(v, AtLeast):
            markers.append((n, v.bound))
        elif v != INF:
            pts[n] = Fraction(v)
    if d >= 2 and (d - 1) not in pts:
        raise InputError(f"missing finite endpoint at n={d - 1}")
    poly = NewtonPolygon(d, tuple(_hull(list(pts.items()))))
    for n, bound in markers:
        if bound < poly.value_at(n):
            raise ComputationError(
                f"point {n} is only bounded below by {fmt_frac(bound)}; exact engine required"
            )
    return poly


def hodge_polygon(d: int) -> NewtonPolygon:
    """Vertices (n, n(n+1)/(2d)) for 0 <= n <= d-1."""
    if d < 2:
        raise InputError("Hodge polygon needs d >= 2")
    return NewtonPolygon(d, tuple((n, Fraction(n * (n + 1), 2 * d)) for n in range(d)))


def lies_above(np1: NewtonPolygon, np2: NewtonPolygon) -> bool:
    if np1.d != np2.d:
        raise InputError("polygons have different d")
    return all(np1.value_at(n) >= np2.value_at(n) for n in range(np1.d))


# ---------------------------------------------------------------------------
# slope forms ord_p M_n = (u p - v) / (D (p - 1))

class ModulusTooSmall(InputError):
    pass


@dataclass(frozen=True)
class SlopeForm:
    u: int
    v: int
    D: int
    residue: int | None = None

    def __str__(self) -> str:
        return f"({self.u}p-{self.v})/({self.D}(p-1))" if self.v >= 0 else f"({self.u}p+{-self.v})/({self.D}(p-1))"

    @property
    def limit(self) -> Fraction:
        """Value as p -> infinity within the class."""
        return Fraction(self.u, self.D)

    def to_json(self) -> dict:
        return {"u": self.u, "v": self.v, "D": self.D, "residue": self.residue}


def fit_slope_form(r1: Fraction, p1: int, r2: Fraction, p2: int, D: int) -> SlopeForm:
    """Solve for u/D and v/D from valuations at two primes of one residue class."""
    if p1 == p2:
        raise InputError("fit needs two distinct primes")
    if (p1 - p2) % D:
        raise InputError(f"{p1} and {p2} are not congruent mod {D}")
    if p1 <= D or p2 <= D:
        raise InputError(f"primes must exceed the modulus {D}")
    r1, r2 = Fraction(r1), Fraction(r2)
    u_D = (r1 * (p1 - 1) - r2 * (p2 - 1)) / (p1 - p2)
    v_D = (u_D * Fraction(p1, p1 - 1) - r1) * (p1 - 1)
    u, v = u_D * D, v_D * D
    if u.denominator != 1 or v.denominator != 1:
        raise ModulusTooSmall("modulus D too small for this family")
    return SlopeForm(int(u), int(v), D, p1 % D)


def predict_ord(form: SlopeForm, p: int) -> Fraction:
    if form.residue is not None and p % form.D != form.residue:
        warnings.warn(f"p={p} is not in residue class {form.residue} mod {form.D}", stacklevel=2)
    return Fraction(form.u * p - form.v, form.D * (p - 1))


# ---------------------------------------------------------------------------
# classification across primes

STABLE = "stable"
UNSTABLE = "unstable at tested primes"
TOO_SMALL = "D too small"
SKIPPED = "skipped"
UNVALIDATED = "fitted, not validated"


@dataclass
class ClassReport:
    residue: int
    primes: list[int]
    status: str = STABLE
    fit_primes: list[int] = field(default_factory=list)
    forms: dict[int, SlopeForm | str] = field(default_factory=dict)  # n -> form or "inf"
    checks: list[dict] = field(default_factory=list)
    note: str = ""

    @property
    def limits(self) -> dict[int, Fraction | float]:
        return {n: (INF if f == "inf" else f.limit) for n, f in self.forms.items()}

    def to_json(self) -> dict:
        return {
            "residue": self.residue,
            "primes": self.primes,
            "status": self.status,
            "fit_primes": self.fit_primes,
            "forms": {str(n): (f if f == "inf" else f.to_json()) for n, f in self.forms.items()},
            "limits": {str(n): fmt_val(v) for n, v in self.limits.items()},
            "checks": self.checks,
            "note": self.note,
        }


@dataclass
class ClassificationReport:
    pattern: list[int]
    d: int
    D: int
    engine: str
    classes: list[ClassReport]
    valuations: dict[int, list[Valuation]]
    notices: list[str] = field(default_factory=list)
    moduli_tried: list[int] = field(default_factory=list)

    def klass(self, residue: int) -> ClassReport:
        for c in self.classes:
            if c.residue == residue:
                return c
        raise KeyError(residue)

    def to_json(self) -> dict:
        return {
            "pattern": self.pattern,
            "d": self.d,
            "D": self.D,
            "engine": self.engine,
            "moduli_tried": self.moduli_tried,
            "valuations": {str(p): [fmt_val(v) for v in vs] for p, vs in sorted(self.valuations.items())},
            "classes": [c.to_json() for c in self.classes],
            "notices": self.notices,
        }

    def table(self) -> str:
        lines = [f"pattern {self.pattern}  d={self.d}  D={self.D}  engine={self.engine}"]
        for c in self.classes:
            lines.append(f"class {c.residue} mod {self.D}: primes {c.primes} -> {c.status}")
            for n, form in sorted(c.forms.items()):
                lim = "inf" if form == "inf" else fmt_frac(form.limit)
                lines.append(f"  M_{n}: {form}   limit {lim}")
            for chk in c.checks:
                if not chk["ok"]:
                    lines.append(f"  mismatch p={chk['p']} n={chk['n']}: predicted {chk['predicted']} got {chk['actual']}")
        lines.extend(f"notice: {s}" for s in self.notices)
        return "\n".join(lines)


def default_moduli(d: int) -> list[int]:
    out = []
    for D in (d, 2 * d, math.lcm(*range(1, d + 1))):
        if D not in out:
            out.append(D)
    return out


def pattern_degree(pattern: Sequence[int]) -> int:
    d = len(pattern)
    while d and pattern[d - 1] == 0:
        d -= 1
    if d == 0:
        raise InputError("pattern is identically zero")
    return d


def _valuations_task(args) -> list[Valuation]:
    from .engines import exact_valuations

    pattern, p, engine = args
    f = PolySpec.from_pattern(pattern, build_field(p))
    return exact_valuations(f, engine)


def _fit_class(c: ClassReport, vals: dict[int, list[Valuation]], d: int, D: int) -> None:
    p1, p2 = c.primes[:2]
    c.fit_primes = [p1, p2]
    for n in range(1, d):
        r1, r2 = vals[p1][n - 1], vals[p2][n - 1]
        if r1 == INF and r2 == INF:
            c.forms[n] = "inf"
            continue
        if r1 == INF or r2 == INF:
            c.status = UNSTABLE
            c.note = f"M_{n} vanishes at only one of the fit primes"
            return
        try:
            c.forms[n] = fit_slope_form(r1, p1, r2, p2, D)
        except ModulusTooSmall:
            c.status = TOO_SMALL
            c.note = f"non-integral fit for M_{n}"
            return
    for p in c.primes[2:]:
        for n in range(1, d):
            form = c.forms[n]
            pred = INF if form == "inf" else predict_ord(form, p)
            actual = vals[p][n - 1]
            ok = pred == actual
            c.checks.append({"p": p, "n": n, "predicted": fmt_val(pred), "actual": fmt_val(actual), "ok": ok})
            if not ok:
                c.status = UNSTABLE


def classify_family(
    pattern: Sequence[int],
    primes: Sequence[int],
    D: int | None = None,
    engine: str = "direct",
    jobs: int = 1,
    valuations_fn: Callable[[int], list[Valuation]] | None = None,
) -> ClassificationReport:
    """Fit slope forms from the two smallest primes of each class mod D; validate on the rest.

    With ``D=None`` the moduli d, 2d, lcm(1..d) are tried in turn until no
    class reports a non-integral fit.  ``valuations_fn(p)`` overrides the
    engine (used to replay stored results).
    """
    pattern = [int(c) for c in pattern]
    d = pattern_degree(pattern)
    moduli = default_moduli(d) if D is None else [D]
    if any(m < 1 for m in moduli):
        raise InputError("modulus must be positive")
    notices: list[str] = []
    usable = []
    for p in sorted(set(primes)):
        if not is_prime(p):
            notices.append(f"{p}: not prime, skipped")
        elif p <= d:
            notices.append(f"{p}: requires d < p, skipped")
        elif pattern[d - 1] % p == 0:
            notices.append(f"{p}: leading coefficient vanishes mod p, skipped")
        else:
            usable.append(p)

    vals: dict[int, list[Valuation]] = {}

    def ensure(ps: list[int]) -> None:
        todo = [p for p in ps if p not in vals]
        if valuations_fn is not None:
            for p in todo:
                vals[p] = valuations_fn(p)
        elif jobs > 1 and len(todo) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                for p, v in zip(todo, pool.map(_valuations_task, [(pattern, p, engine) for p in todo])):
                    vals[p] = v
        else:
            for p in todo:
                vals[p] = _valuations_task((pattern, p, engine))

    report = None
    tried = []
    for mod in moduli:
        tried.append(mod)
        local = list(notices)
        eligible = []
        for p in usable:
            if p <= mod:
                local.append(f"{p}: must exceed modulus {mod}, skipped")
            else:
                eligible.append(p)
        ensure(eligible)
        groups: dict[int, list[int]] = {}
        for p in eligible:
            groups.setdefault(p % mod, []).append(p)
        classes = []
        for residue in sorted(groups):
            c = ClassReport(residue, groups[residue])
            if len(c.primes) < 2:
                c.status = SKIPPED
                c.note = "fewer than 2 primes in class"
                local.append(f"class {residue} mod {mod}: fewer than 2 primes, skipped")
            else:
                _fit_class(c, vals, d, mod)
                if len(c.primes) == 2 and c.status == STABLE:
                    c.status = UNVALIDATED
                    c.note = "no third prime to validate against"
            classes.append(c)
        report = ClassificationReport(
            pattern, d, mod, engine, classes, {p: vals[p] for p in eligible}, local, list(tried)
        )
        if not any(c.status == TOO_SMALL for c in classes):
            break
    return report
