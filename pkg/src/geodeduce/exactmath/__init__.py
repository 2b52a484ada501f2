from .poly import MonomialOrder, MultiPoly
from .groebner import (
    DEFAULT_BUDGET,
    GroebnerStats,
    eliminate,
    groebner_basis,
    normal_form,
    s_polynomial,
)
from .univariate import (
    Factorization,
    factor_univariate,
    isolate_real_roots,
    real_roots_numeric,
    squarefree_part,
    sturm_count,
)
from .algebraic import AlgebraicNumber, NonSurdRoot, extract_algebraic, quadratic_roots
