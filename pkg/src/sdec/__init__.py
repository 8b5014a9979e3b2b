"""Scene de-contextualization toolkit for prompt-embedding matrices.

The package splits into a linear-algebra core (:mod:`sdec.spectral`), a
synthetic attention laboratory (:mod:`sdec.attention`, :mod:`sdec.bounds`),
the spectral refinement algorithm itself (:mod:`sdec.decontext`), a hard
subspace-intersection estimator (:mod:`sdec.intersection`), and the file
formats plus command-line surface (:mod:`sdec.npyio`, :mod:`sdec.reports`,
:mod:`sdec.cli`).
"""

from .attention import (
    AttentionRow,
    AttentionWeights,
    SubspaceSpec,
    SyntheticInstance,
    attention_forward,
    build_subspaces,
    contextualization_sweep,
    degenerate_suppression_check,
    make_degenerate_wv,
    random_weights,
    sample_embedding,
    sample_instance,
    split_contextualization,
)
from .bounds import BoundBreakdown, compute_bound, monte_carlo_bound_sweep
from .decontext import (
    ExcursionProfile,
    OptimizerConfig,
    OptimizeTrace,
    excursion,
    pca_suppress,
    refine,
    reweight,
    two_phase_optimize,
)
from .errors import ComputationError, SdecError, ValidationError
from .intersection import IntersectionEstimate, estimate_intersection, hard_suppress
from .npyio import load_array, save_array
from .reports import PromptPartition, RunReport
from .spectral import (
    Projector,
    SvdFactors,
    frobenius_norm,
    orth,
    principal_angle_cosines,
    projector_from_basis,
    spectral_norm,
    svd_decompose,
)

__version__ = "0.1.0"

__all__ = [
    "AttentionRow",
    "AttentionWeights",
    "BoundBreakdown",
    "ComputationError",
    "ExcursionProfile",
    "IntersectionEstimate",
    "OptimizeTrace",
    "OptimizerConfig",
    "Projector",
    "PromptPartition",
    "RunReport",
    "SdecError",
    "SubspaceSpec",
    "SvdFactors",
    "SyntheticInstance",
    "ValidationError",
    "attention_forward",
    "build_subspaces",
    "compute_bound",
    "contextualization_sweep",
    "degenerate_suppression_check",
    "estimate_intersection",
    "excursion",
    "frobenius_norm",
    "hard_suppress",
    "load_array",
    "make_degenerate_wv",
    "monte_carlo_bound_sweep",
    "orth",
    "pca_suppress",
    "principal_angle_cosines",
    "projector_from_basis",
    "random_weights",
    "refine",
    "reweight",
    "sample_embedding",
    "sample_instance",
    "save_array",
    "spectral_norm",
    "split_contextualization",
    "svd_decompose",
    "two_phase_optimize",
    "__version__",
]
