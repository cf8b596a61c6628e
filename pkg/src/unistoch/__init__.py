"""Stochastic-matrix taxonomy, unistochasticity certification, and the
projector-trace probability calculus between measurement contexts, with a
Monte-Carlo simulator for sequential context changes."""

from .errors import NumericalError, ValidationError
from .linalg import basis_projector, conjugate_by, haar_random_unitary
from .stochastic import (
    Classification,
    MatrixClass,
    classify,
    is_bistochastic,
    random_bistochastic,
    random_stochastic,
    squared_moduli,
    validate_stochastic,
)
from .decomposition import (
    ProjectorFrame,
    SigmaMatrix,
    SvdTriple,
    build_sigma,
    gleason_determinant,
    projector_frame,
    reconstruct,
    reconstruct_matrix,
    svd,
)
from .certification import (
    CertOptions,
    Certificate,
    ChainWitness,
    Verdict,
    certify_orthostochastic,
    certify_unistochastic,
    chain_condition_3x3,
    optimize_phases,
    phase_objective,
    unitarity_defect,
)
from .contexts import (
    Context,
    ContextTransform,
    Modality,
    born_probability,
    build_observable,
    computational_context,
    context_transform,
    make_context,
    modality,
    probability_matrix,
    random_context,
    reverse_matrix,
    shared_modalities,
)
from .simulator import (
    RunReport,
    SystemState,
    measure,
    run_sequence,
    spin_coupling_contexts,
)

__version__ = "0.1.0"

__all__ = [
    "NumericalError",
    "ValidationError",
    "basis_projector",
    "conjugate_by",
    "haar_random_unitary",
    "Classification",
    "MatrixClass",
    "classify",
    "is_bistochastic",
    "random_bistochastic",
    "random_stochastic",
    "squared_moduli",
    "validate_stochastic",
    "ProjectorFrame",
    "SigmaMatrix",
    "SvdTriple",
    "build_sigma",
    "gleason_determinant",
    "projector_frame",
    "reconstruct",
    "reconstruct_matrix",
    "svd",
    "CertOptions",
    "Certificate",
    "ChainWitness",
    "Verdict",
    "certify_orthostochastic",
    "certify_unistochastic",
    "chain_condition_3x3",
    "optimize_phases",
    "phase_objective",
    "unitarity_defect",
    "Context",
    "ContextTransform",
    "Modality",
    "born_probability",
    "build_observable",
    "computational_context",
    "context_transform",
    "make_context",
    "modality",
    "probability_matrix",
    "random_context",
    "reverse_matrix",
    "shared_modalities",
    "RunReport",
    "SystemState",
    "measure",
    "run_sequence",
    "spin_coupling_contexts",
    "__version__",
]
