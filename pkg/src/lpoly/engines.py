"""Engine selection: direct sums, Dwork matrix, or both with agreement check."""

from __future__ import annotations

from dataclasses import dataclass

from .direct import LPolynomial, l_coeffs
from .dwork import DworkResult, run_dwork
from .errors import ComputationError, InputError
from .field import PolySpec
from .valuation import INF, AtLeast, Valuation

ENGINES = ("direct", "dwork", "both")


def consistent(dwork_val: Valuation, direct_val: Valuation) -> bool:
    """Finite values must match exactly; a lower-bound marker must not undercut the truth."""
    if isinstance(dwork_val, AtLeast):
        return direct_val == INF or direct_val >= dwork_val.bound
    return dwork_val == direct_val


@dataclass
class EngineRun:
    poly: PolySpec
    engine: str
    direct: LPolynomial | None = None
    dwork: DworkResult | None = None

    @property
    def valuations(self) -> list[Valuation]:
        """Authoritative ord_q M_n: exact direct values when available."""
        if self.direct is not None:
            return self.direct.valuations()
        return self.dwork.valuations()

    @property
    def agree(self) -> bool | None:
        if self.direct is None or self.dwork is None:
            return None
        return all(consistent(a, b) for a, b in zip(self.dwork.valuations(), self.direct.valuations()))


def run_engine(f: PolySpec, engine: str = "direct", K: int | None = None) -> EngineRun:
    if engine not in ENGINES:
        raise InputError(f"unknown engine {engine!r}")
    if engine in ("dwork", "both") and f.field.m != 1:
        raise InputError("dwork engine requires m=1")
    run = EngineRun(f, engine)
    if engine in ("direct", "both"):
        run.direct = l_coeffs(f)
    if engine in ("dwork", "both"):
        run.dwork = run_dwork(f, K)
    return run


def exact_valuations(f: PolySpec, engine: str = "direct", K: int | None = None) -> list[Valuation]:
    """Exact valuations from ``engine``; Dwork lower-bound markers are settled by the direct engine."""
    run = run_engine(f, engine, K)
    if run.agree is False:
        raise ComputationError(f"engines disagree on {f!r}")
    vals = run.valuations
    if any(isinstance(v, AtLeast) for v in vals):
        vals = l_coeffs(f).valuations()
    return vals
