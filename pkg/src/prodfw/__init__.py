"""Frank-Wolfe methods over product polytopes, with brute-force condition numbers."""

from .condition import (ConditionReport, affine_pyramidal_width, condition_report,
                        dist_affine_to_polytope, dist_polytope_to_polytope, min_norm_point,
                        product_pw_formula, product_pw_lower_bound, product_vf,
                        pyramidal_width, vertex_facet_distance)
from .estimators import (AlternatingLinearMinimization, AwayFrankWolfe,
                         BlockCoordinateFrankWolfe, ConditionNumbers, FeasibilitySolver,
                         FrankWolfe)
from .experiment import run_experiment
from .faces import Face, enumerate_proper_faces, face_lattice, facets, is_face, product_faces
from .feasibility import FeasibilityVerdict, Status, decide_feasibility
from .instances import Instance, generate, generate_disjoint, make_intersecting
from .objective import IntersectionObjective, LinearObjective, QuadraticObjective
from .polytope import (AffineSubspace, ProductPolytope, VPolytope, affine_hull,
                       cartesian_product, diameter, lmo, product_lmo)
from .solvers import (ActiveIterate, ActiveSetError, SolverConfig, fw_gap, run_afw, run_alm,
                      run_cbc_fw, run_fw)
from .trace import StepRecord, Trace

__version__ = "0.1.0"
