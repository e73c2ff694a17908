"""Probability representation of finite-dimensional quantum mechanics.

States become probability vectors over a MIC-POVM frame, channels and
measurements become pseudostochastic matrices, dynamics generators become
real matrices with zero column sums, and complete positivity, classicality
and circuit simulation are all decided without leaving probability space.
"""

from .errors import (
    BracketNotFound,
    ComputationError,
    DimensionMismatch,
    FrameMismatch,
    FrameSingular,
    InfeasibleParameters,
    MicRepError,
    NotGeneratorShaped,
    NotHermitian,
    NotNormalized,
    NotPositive,
    NotPseudoStochastic,
    NotTracePreserving,
    NotUnitary,
    ShapeMismatch,
    SymmetryViolation,
    TargetOutOfRange,
    ValidationError,
)
from .frames import (
    FrameTransition,
    MicPovmFrame,
    build_mic_from_effects,
    build_sic_from_fiducials,
    build_sic_qubit,
    tensor,
    transition_matrix,
)
from .states import (
    PhysicalityVerdict,
    ProbVector,
    char_poly_coeffs,
    from_prob,
    hs_inner,
    is_physical,
    is_pure,
    power_traces,
    star,
    to_prob,
)
from .channels import (
    ChoiProbVector,
    KrausChannel,
    PseudoStochasticMap,
    choi_prob,
    dual_map_action,
    is_cptp,
    kraus_to_map,
    map_apply,
    map_from_choi,
    max_entangled_prob,
    partial_trace_map,
    tensor_maps,
)
from .measurements import (
    MeasurementMap,
    Observable,
    circled_star,
    is_valid_measurement,
    map_to_povm,
    observable_from_operator,
    observable_mean,
    outcome_probs,
    povm_to_map,
)
from .dynamics import (
    GeneratorMatrix,
    HamiltonianCoeffs,
    OperatorBasis,
    basis_generators,
    dissipator_matrix,
    evolve,
    gksl_generator,
    hamiltonian_generator,
    heisenberg_evolve,
    is_gksl_generator,
    project_unitary,
    unitary_map,
)
from .classicality import (
    DecoherenceModel,
    NegativityReport,
    OptimizerConfig,
    min_negativity,
    negativity,
    povm_family,
    scan,
    spin_model_generator,
    tau_crit,
)
from .circuits import (
    CircuitProgram,
    GateOp,
    MeasureOp,
    MeasurementRecord,
    QubitRegister,
    embed,
    gate_library,
    grover_program,
    init_register,
    projective_measure_map,
    run,
    sample,
    single_qubit_map,
    two_qubit_map,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
