"""Dynamics of hyperbolic transcendental entire functions.

Function families and singular values (:mod:`.zoo`), orbit and cycle
analysis (:mod:`.dynamics`), basin rendering (:mod:`.render`), theorem
predicates (:mod:`.audit`) and the comb-map construction of entire functions
with prescribed real critical values (:mod:`.mv`, :mod:`.combmap`).
"""
from .combmap import CombMap
from .dynamics import (AttractingCycle, HyperbolicityReport, PointFate, detect_cycles,
                       hyperbolicity_report, iterate, real_fixed_points)
from .errors import EntireDynError
from .kernels import BACKEND
from .mv import (SlitDomainSpec, build_slit_domain, cossqrt_threshold, example2_stage, g_eval,
                 phi_eval, solve_parameters, truncated_example1)
from .render import (ClassificationGrid, ImageBuffer, Palette, Viewport, classify_grid,
                     diameter_survey, render, write_image)
from .zoo import (ClosedFormMV0, Cosine, CosSqrt, ExpAffine, FunctionSpec, MVNumeric, SingularSet,
                  critical_points, evaluate, evaluate_deriv, function_from_json, singular_set)

__version__ = "0.1.0"
