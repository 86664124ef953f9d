"""scalesplit: scale-splitting solvers for complex symmetric sparse systems.

Stationary iterations (SCSP, TSCSP, TTSCSP, PMHSS, GSOR) with exact Cholesky
or inexact PCG inner solves, the two-step splitting preconditioner and a
complex modified ILUT for BiCGSTAB, spectral convergence diagnostics, and the
benchmark problem generators behind the `bench` CLI.
"""

from ._kernels import available as kernel_backends
from ._kernels import backend_name as kernel_backend
from .factor import (CholeskyFactor, ComplexILU, IncompleteCholesky,
                     NonpositivePivotError, NotPositiveDefiniteError,
                     SymbolicCholesky, ZeroPivotError, cholesky,
                     cholesky_solve, complex_ilut, incomplete_cholesky,
                     incomplete_cholesky_ladder, reorder_fill_reducing)
from .krylov import (KrylovReport, bicgstab_on_problem, bicgstab_solve,
                     cg_solve, ilu_preconditioner, ttscsp_preconditioner)
from .mmio import read_matrix_market, write_matrix_market
from .problems import (ProblemInstance, exact_solution, example1, example2,
                       example3, load_instance, save_instance)
from .sparse import (ComplexVector, SparseSymMatrix, TripletBuffer, assemble,
                     complex_matvec, identity, kron_sum, lincomb, spmv,
                     tridiag)
from .spectral import (BoundReport, SpectrumSummary, ittscsp_bound,
                       lambda_value, min_inner_steps_for_contraction,
                       optimal_params, sigma_bound, spectral_radius_G,
                       spectrum_of_S, theorem1_region, theorem3_region)
from .stationary import (FactorCache, InnerSolveConfig, Method, PmhssV,
                         SolveReport, SplittingParams, StoppingRule,
                         gsor_solve, inexact_variant, ittscsp_solve,
                         iteration_constant_term, iteration_operator_apply,
                         pmhss_solve, scsp_solve, solve_stationary,
                         tscsp_solve, ttscsp_solve)

__version__ = "0.1.0"
