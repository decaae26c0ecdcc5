"""Edge statistics of sample covariance matrices.

Tracy-Widom laws by two independent routes (Painleve II and Airy-kernel
Fredholm determinants), Monte Carlo tests of edge universality, and exact
Dyck-path / trace-moment combinatorics.
"""
__version__ = "0.1.0"

from .airy import AiryValue, ai_lower_integral, ai_upper_tail, airy, airy_arrays  # noqa: E402
from .airy_kernel import (  # noqa: E402
    FredholmConvergenceError, KernelDiscretization, RealEdgeKernel, airy_kernel, count_distribution,
    discretize, fredholm_gap, laguerre_functions, laguerre_kernel, real_edge_density, real_edge_kernel,
    rescaled_kernel_convergence, topk_cdf_complex)
from .combinatorics import (  # noqa: E402
    DyckPolynomial, PathSumSpec, dyck_polynomials, expected_trace_exact, gm_asymptotic,
    gprime_polynomials, theorem3_constant, verify_functional_equation, wigner_domination_check)
from .ensembles import (  # noqa: E402
    EnsembleSpec, EntryDistribution, Family, Field, MatrixSample, derive_seed, entry_moment,
    sample_matrix, validate_conditions)
from .harness import (  # noqa: E402
    EdgeRecord, ExperimentConfig, ks_statistic, run_edge_experiment, tail_bound_experiment,
    topk_joint_experiment, trace_moment_experiment, universality_comparison)
from .scaling import (  # noqa: E402
    ScalingConstants, mp_cdf, mp_density, mp_distance, rescale, scaling_constants, unrescale)
from .spectral import (  # noqa: E402
    BACKEND, Spectrum, empirical_spectral_distribution, gram_eigenvalues, top_k, trace_power)
from .tracy_widom import TWTable, hastings_mcleod, tw_quantile, tw_table  # noqa: E402

__all__ = [
    "AiryValue", "ai_lower_integral", "ai_upper_tail", "airy", "airy_arrays",
    "FredholmConvergenceError", "KernelDiscretization", "RealEdgeKernel", "airy_kernel",
    "count_distribution", "discretize", "fredholm_gap", "laguerre_functions", "laguerre_kernel",
    "real_edge_density", "real_edge_kernel", "rescaled_kernel_convergence", "topk_cdf_complex",
    "DyckPolynomial", "PathSumSpec", "dyck_polynomials", "expected_trace_exact", "gm_asymptotic",
    "gprime_polynomials", "theorem3_constant", "verify_functional_equation",
    "wigner_domination_check", "EnsembleSpec", "EntryDistribution", "Family", "Field",
    "MatrixSample", "derive_seed", "entry_moment", "sample_matrix", "validate_conditions",
    "EdgeRecord", "ExperimentConfig", "ks_statistic", "run_edge_experiment",
    "tail_bound_experiment", "topk_joint_experiment", "trace_moment_experiment",
    "universality_comparison", "ScalingConstants", "mp_cdf", "mp_density", "mp_distance", "rescale",
    "scaling_constants", "unrescale", "BACKEND", "Spectrum", "empirical_spectral_distribution",
    "gram_eigenvalues", "top_k", "trace_power", "TWTable", "hastings_mcleod", "tw_quantile",
    "tw_table",
]
