"""
sympgrass: subspaces of a symplectic vector space with a compatible complex
structure.

Classification of subspaces up to the symplectic group (the type
(n0, n+, n-)), Kahler angles, relative Darboux bases, the energy
f(P) = 1/2 Tr([P, J]^2) on the Grassmannian with its gradient, Hessian and a
structure-preserving gradient flow, plus independent numerical oracles.
"""

from .darboux import (
    DarbouxBasis,
    KahlerBlocks,
    Splitting,
    canonical_splitting,
    construct_subspace_of_type,
    darboux_check,
    j_compatible_darboux,
    kahler_block_decomposition,
    relative_darboux_basis,
    totally_real_darboux,
)
from .energy_flow import (
    FlowConfig,
    FlowTrajectory,
    HessianReport,
    LieAlgebraElement,
    TangentVector,
    energy,
    energy_bounds,
    flow_run,
    flow_step,
    fundamental_field,
    hessian_at_critical,
    hessian_report,
    project_to_tangent,
    riemannian_gradient,
    stabilizer_dimension_oracle,
    stabilizer_dimensions,
    symmetry_generator,
)
from .errors import (
    ClassificationUnstable,
    DegeneratePairing,
    FlavorViolation,
    InconsistentSignature,
    InvalidSplitting,
    NonSymmetricInput,
    NotApplicable,
    NotCritical,
    NotHalfDimensional,
    NotJCompatible,
    NotTotallyReal,
    RankDeficient,
    SpectrumPairingFailure,
    StepRejected,
    SympGrassError,
)
from .symplectic_core import (
    KahlerSpectrum,
    Subspace,
    SymplecticSpace,
    Tolerances,
    TypeSignature,
    classify,
    coordinate_subspace,
    intersect,
    is_J_compatible,
    isotropic_kernel,
    kahler_spectrum,
    make_standard_space,
    max_complex_subspace,
    min_complex_check,
    orthogonal_complement,
    projection_distance,
    random_subspace,
    signatures,
    subspace_from_basis,
    subspace_from_spanning,
    symplectic_complement,
)

__version__ = "0.1.0"
