"""Classical, areal and operator Mahler measures."""

from .areal import (
    RadialWeight,
    areal_mahler_closed,
    areal_mahler_quadrature,
    bergman_op_mahler,
    chain_check,
    lehmer_limit_table,
    weighted_areal,
)
from .classical import MeasureResult, mahler_integral, mahler_roots, omega, pierce, pierce_growth_check
from .errors import (
    ArgumentError,
    IllConditionedError,
    InconclusiveError,
    MahlerLabError,
    ParseError,
    RootFindingError,
    RootOfUnityError,
    SearchTooLargeError,
)
from .operators import (
    FiniteOperator,
    VectorH,
    WeightedShiftSpec,
    e_quantity,
    is_subharmonic_finite,
    krylov_distance,
    op_mahler_on_vector,
    op_mahler_sup,
)
from .polynomials import ComplexPolynomial, IntPolynomial, is_cyclotomic, resultant, roots
from .search import lehmer_search
from .textformat import format_polynomial, parse_polynomial

__version__ = "0.1.0"
