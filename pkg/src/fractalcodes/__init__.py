"""Fractalization of CSS stabilizer and subsystem codes over prime fields."""

from .algebra import LaurentPoly, Open, Periodic, boundary, parse_poly, periodic, poly_inverse
from .algrel import related_multi, related_pair, related_quad, related_triple
from .codes import (
    CodeSpec, InstantiatedCode, build_model, catalog, distance_bruteforce, excitation_code,
    instantiate, logical_basis, logical_count, spec_from_text, spec_to_text, structurally_equal,
)
from .errors import (
    BudgetExceeded, DomainError, FractalCodesError, PreconditionError, StructuralError,
    UnsupportedOperatorError,
)
from .fractalizer import (
    LcaRuleSet, commensurability_basis, fractalize_code, fractalize_nonlocal, fractalize_op,
    fractalize_op_ho,
)
from .pauli import CssOperator, commutation_poly, commutes, make_operator
from .subsystem import (
    GaugeCode, bare_logicals, build_bacon_shor, build_bbs, build_fbbs, build_fbs, center,
    dressed_distance, logical_qudits, tradeoff_report,
)
from .threestep import cx_synthesize, three_step, verify_three_step

__version__ = "0.1.0"
