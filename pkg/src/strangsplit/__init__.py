"""Strang splitting for reaction-diffusion problems with moving Dirichlet data.

The package provides boundary-corrected splitting schemes that keep their
second order when the Dirichlet boundary values depend on time, together
with the spatial discretizations, phi-function machinery and benchmark
harness needed to study them.
"""

from .bench import (CSV_HEADER, PRESETS, EfficiencyReport, OrderSummary,
                    RunRecord, SweepConfig, efficiency_ranking,
                    group_by_scheme, observed_order, read_csv, run_sweep,
                    write_csv)
from .discretization import (Discretization, apply_operator, build,
                             elliptic_project)
from .expfuncs import make_evaluator, phi_combination, phi_scalar
from .integrators import (OdeStats, StepSizeUnderflow, ToleranceProfile,
                          integrate_affine, integrate_nonstiff,
                          integrate_stiff_linear)
from .problems import (ProblemSpec, boundary_trace, builtin_problem,
                       initial_state, max_error)
from .schemes import (SCHEME_IDS, BoundaryTaylorData, StepOutcome, Stepper,
                      boundary_taylor, boundary_ux_nd, build_q,
                      build_q_function, build_q_nd_1d, step_acr1, step_acr2,
                      step_acr2_nd, step_eo1, step_eo2, step_eo2_nd)

__all__ = [
    "CSV_HEADER", "PRESETS", "EfficiencyReport", "OrderSummary", "RunRecord",
    "SweepConfig", "efficiency_ranking", "group_by_scheme", "observed_order",
    "read_csv", "run_sweep", "write_csv",
    "Discretization", "apply_operator", "build", "elliptic_project",
    "make_evaluator", "phi_combination", "phi_scalar",
    "OdeStats", "StepSizeUnderflow", "ToleranceProfile",
    "integrate_affine", "integrate_nonstiff", "integrate_stiff_linear",
    "ProblemSpec", "boundary_trace", "builtin_problem", "initial_state",
    "max_error",
    "SCHEME_IDS", "BoundaryTaylorData", "StepOutcome", "Stepper",
    "boundary_taylor", "boundary_ux_nd", "build_q", "build_q_function",
    "build_q_nd_1d", "step_acr1", "step_acr2", "step_acr2_nd",
    "step_eo1", "step_eo2", "step_eo2_nd",
]

__version__ = "0.1.0"
