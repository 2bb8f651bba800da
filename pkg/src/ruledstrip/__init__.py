"""Dirichlet Laplacians on strips in ruled surfaces: Hardy weights, Hardy
constants, spectral stability thresholds and their numerical verification."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    ConfigError,
    DomainError,
    HypothesisError,
    InconsistencyError,
    InfeasibleEnvelopeError,
    NoCertificateError,
    PreconditionError,
    QuadratureError,
    RuledStripError,
    SolverError,
    UnsupportedGeometryError,
)
from .geometry import (  # noqa: F401
    CurvatureEnvelope,
    FunctionSpec,
    StripGeometry,
    check_assumptions,
    eval_h,
    eval_h0,
    eval_K,
    eval_K_numeric,
    eval_V,
    f_bounds,
    first_mode_energy,
    load_geometry,
    sharp_bound_applies,
)
from .eigen import EigResult, smallest_eig, sturm_count  # noqa: F401
from .discretization import (  # noqa: F401
    Grid1D,
    Grid2D,
    assemble_mass,
    assemble_stiffness,
    assemble_transverse,
)
from .transverse import (  # noqa: F401
    LambdaTable,
    TransverseResult,
    lambda_profile,
    lambda_schrodinger,
    lambda_sl,
)
from .trials import TrialFunction, random_trials  # noqa: F401
from .hardy import (  # noqa: F401
    HardyCertificate,
    HardyTrial1D,
    StabilityReport,
    build_certificate,
    hardy_constant,
    stability_threshold,
    stability_weight,
    verify_curved_hardy,
    verify_hardy_1d,
    verify_lemma_kinetic,
    verify_local_hardy,
    verify_theorem1,
)
from .spectrum import truncated_ground_state  # noqa: F401
from .embedding import build_mesh, integrate_frenet, measure_metric  # noqa: F401
