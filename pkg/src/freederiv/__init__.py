"""Free derivatives of nc rational expressions via admissible linear systems."""

from .als import (Als, als_add, als_const, als_from_poly, als_inverse, als_letter, als_mul, als_scale, apply_transform, empty,
                  series_expand, solution_series)
from .compose import chain_derivative, substitute, total_derivative
from .derivation import directional, formal_derivative, gradient, higher, jacobian, partial
from .errors import *  # noqa: F401,F403
from .evaluation import Verdict, als_equal, als_eval, is_zero_probabilistic, pencil_eval
from .expr import als_from_matrix, als_from_text, expr_to_als, parse, to_text
from .minimize import minimize, rank
from .ncpoly import NcPoly, hausdorff_derive
from .newton import (NewtonProblem, NewtonTrace, StepPattern, build_step_system, commutative_baseline,
                     newton_solve, newton_step_pq, newton_step_probe)

__version__ = "0.1.0"
