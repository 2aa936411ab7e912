"""Finite-time disentanglement simulation for bipartite quantum systems."""

from .tensor_algebra import (
    BipartiteDims,
    DimensionError,
    NotHermitianError,
    hermitian_eig,
    kron,
    partial_trace,
    partial_transpose,
)
from .states import (
    DensityOperator,
    InvalidStateError,
    PureState,
    bell_state,
    isotropic_mix,
    maximally_mixed,
    phase_family_all_product,
    schmidt_decompose,
    werner_state,
)
from .entanglement import (
    Classification,
    EntanglementVerdict,
    classify_separability,
    entanglement_mixing_threshold,
    min_pt_eigenvalue,
    negativity,
)
from .channels import (
    CNOT,
    Channel,
    NoWitnessExists,
    NotPurePreservingError,
    NotUnitalError,
    UnitaryClass,
    UnitaryTag,
    classify_product_preserving_unitary,
    find_entangled_to_product_witness,
    is_pure_state_preserving,
    is_unital,
    reconstruct_unitary_from_channel,
    swap_operator,
)
from .lindblad import (
    IntegrationError,
    LindbladGenerator,
    Trajectory,
    integrate,
    lindblad_rhs,
    purity_derivative_at_pure,
)
from .ftd import (
    ChannelFamily,
    DynamicsClass,
    FtdReport,
    LindbladSemigroup,
    NotApplicable,
    UnitaryFamily,
    classify_dynamics,
    closed_system_witness,
    detect_ftd,
    entanglement_trajectory,
    unital_qubit_witness,
    verify_report,
)

__version__ = "0.1.0"
