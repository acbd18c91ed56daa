"""L-functions of one-variable exponential sums over finite fields.

Two independent engines compute the coefficients of L(f, T): brute-force
character sums in Z[zeta_p], and a Dwork-style Frobenius matrix over the
Eisenstein ring Z_p[pi] with pi^(p-1) = -p. Newton polygons, Hodge bounds
and residue-class slope fits sit on top of either engine.
"""

__version__ = "0.1.0"

from .errors import (
    CeilingExceeded,
    ComputationError,
    InputError,
    LPolyError,
    PrecisionError,
)
from .field import (
    ExtElem,
    FieldSpec,
    PolySpec,
    build_field,
    enumerate_field,
    eval_poly,
    trace_to_prime,
)
from .cyclotomic import CycInt, valuation, zeta_pow
from .direct import LPolynomial, consistency_check, exp_sum, l_coeffs, newton_points_direct
from .padic import PiAdic, teichmuller, theta_coeffs
from .dwork import frobenius_matrix, newton_points_dwork
from .polygon import (
    NewtonPolygon,
    SlopeForm,
    classify_family,
    fit_slope_form,
    hodge_polygon,
    lies_above,
    lower_hull,
    predict_ord,
)
