"""Query-specific exemplar selection via approximately-submodular greedy
maximization, with kernelized scoring, baselines, a submodularity-ratio
analyzer, and a synthetic linear-model benchmark.

Set KITE_BACKEND=numpy|numba|auto before import to pick the hot-loop
implementation (auto prefers numba when available).
"""

__version__ = "0.1.0"

from .bank import EmbeddingBank, load_bank, save_bank
from .baselines import (
    BaselineSpec,
    select_dense_topk,
    select_dpp_greedy,
    select_random,
)
from .design import DesignState, init_design, log_det_increment, quad_form, rank_one_update
from .errors import (
    InvalidArgumentError,
    KiteError,
    NumericalDegeneracyError,
    ParseError,
)
from .kernels import (
    KernelSpec,
    KernelState,
    extend_kernel_state,
    format_kernel_spec,
    init_kernel_state,
    kernel_eval,
    kernel_matrix,
    parse_kernel_spec,
    residual_kernel,
)
from .analysis import (
    GammaReport,
    coherence,
    coherence_max,
    estimate_gamma_min,
    farthest_point_sample,
    gamma_closed_form,
    gamma_exact,
    gamma_lower_bound,
    marginal_gain,
)
from .selector import SelectionConfig, SelectionResult, StepRecord, score_candidate, select
from .synthbench import (
    SynthConfig,
    SynthReport,
    generate_synthetic,
    mae_eval,
    ridge_fit,
    run_sweep,
)

__all__ = [
    "__version__",
    "EmbeddingBank",
    "load_bank",
    "save_bank",
    "BaselineSpec",
    "select_random",
    "select_dense_topk",
    "select_dpp_greedy",
    "DesignState",
    "init_design",
    "quad_form",
    "rank_one_update",
    "log_det_increment",
    "KiteError",
    "InvalidArgumentError",
    "ParseError",
    "NumericalDegeneracyError",
    "KernelSpec",
    "KernelState",
    "kernel_eval",
    "kernel_matrix",
    "parse_kernel_spec",
    "format_kernel_spec",
    "init_kernel_state",
    "residual_kernel",
    "extend_kernel_state",
    "GammaReport",
    "marginal_gain",
    "coherence",
    "coherence_max",
    "gamma_exact",
    "gamma_closed_form",
    "gamma_lower_bound",
    "farthest_point_sample",
    "estimate_gamma_min",
    "SelectionConfig",
    "SelectionResult",
    "StepRecord",
    "score_candidate",
    "select",
    "SynthConfig",
    "SynthReport",
    "generate_synthetic",
    "ridge_fit",
    "mae_eval",
    "run_sweep",
]
