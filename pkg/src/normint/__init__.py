"""Surface reconstruction from gradient fields over irregular masked domains.

Fast-marching initialization, preconditioned conjugate-gradient Poisson
solves, frequency-domain baselines, and photometric-stereo front ends.
"""

from .datasets import (Dataset, GradientField, add_noise, gen_peaks,
                       gen_phantom, gen_sombrero, gen_vase,
                       gradient_from_image, inject_outliers, shepp_logan)
from .domain import (BoundaryClass, Domain, IsolatedPixelError, build_domain,
                     classify_boundary, connected_components, full_rect_domain)
from .estimators import FastMarchingIntegrator, PoissonIntegrator
from .fastmarching import (FmConfig, default_seeds, fm_prepare, integrate_fm,
                           local_update, solve_eikonal)
from .frequency import RectGradient, embed_masked, integrate_dct, integrate_fft
from .krylov import (CgBreakdownError, CholeskyFactor, PivotBreakdownError,
                     SolveStats, SolverConfig, apply_preconditioner,
                     build_preconditioner, cg_solve, ic_factorize,
                     mic_factorize)
from .metrics import Metrics, mse_opt, ssim
from .photometric import (NormalField, PsProblem, ReprojectionReport,
                          estimate_normals, gradient_to_normals,
                          normals_to_gradient, render_lambertian, reproject)
from .pipeline import RunSpec, RunResult, benchmark, run
from .poisson import (RobustifiedGradient, SparseSystem, assemble,
                      assemble_matrix, assemble_rhs, compatibilize,
                      export_matrix, robustify_gradient)

__version__ = "0.1.0"

__all__ = [
    "BoundaryClass", "CgBreakdownError", "CholeskyFactor", "Dataset",
    "Domain", "FastMarchingIntegrator", "FmConfig", "GradientField",
    "IsolatedPixelError", "Metrics", "NormalField", "PivotBreakdownError",
    "PoissonIntegrator", "PsProblem", "RectGradient", "ReprojectionReport",
    "RobustifiedGradient", "RunResult", "RunSpec", "SolveStats",
    "SolverConfig", "SparseSystem", "add_noise", "apply_preconditioner",
    "assemble", "assemble_matrix", "assemble_rhs", "benchmark",
    "build_domain", "build_preconditioner", "cg_solve", "classify_boundary",
    "compatibilize", "connected_components", "default_seeds",
    "embed_masked", "estimate_normals", "export_matrix", "fm_prepare",
    "full_rect_domain", "gen_peaks", "gen_phantom", "gen_sombrero",
    "gen_vase", "gradient_from_image", "gradient_to_normals", "ic_factorize",
    "inject_outliers", "integrate_dct", "integrate_fft", "integrate_fm",
    "local_update", "mic_factorize", "mse_opt", "normals_to_gradient",
    "render_lambertian", "reproject", "robustify_gradient", "run",
    "shepp_logan", "solve_eikonal", "ssim",
]
