"""bornsim: projective quantum measurement simulator.

Pure-state and density-matrix measurement postulates, pointer-register
measurement schemes, selective/nonselective channels with entropy
bookkeeping, and an operational no-signaling test bench for comparing the
Born rule against alternative outcome-probability rules.
"""

from .core import (
    HERM_TOL,
    NORM_TOL,
    PSD_TOL,
    DensityMatrix,
    Operator,
    OutcomeDistribution,
    StateVector,
    apply,
    basis_state,
    density_from_pure,
    identity_operator,
    inner,
    partial_trace,
    tensor,
    tensor_operators,
    tv_distance,
    von_neumann_entropy,
)
from .errors import (
    BornsimError,
    InvalidDensityError,
    InvalidInputError,
    InvalidProjectorFamilyError,
    NotDecoheredError,
    NotHermitianError,
    NotUnitaryError,
    ZeroProbabilityBranchError,
)
from .measurement import (
    BORN,
    ZERO_PROB_CUTOFF,
    MeasurementRecord,
    ProbabilityRule,
    branch_weights,
    classical_selective,
    ll_channel,
    measure_selective,
    nonborn_exponent,
    nonselective_channel,
    phase_unitaries,
    project_update,
    rule_probabilities,
    state_preparation_unitaries,
)
from .observables import (
    Observable,
    embed_observable,
    observable_from_branches,
    observable_from_matrix,
)
from .pointer import (
    ONE_POINTER,
    TWO_POINTER,
    JointDistribution,
    PointerSchemeSetup,
    brute_force_joint,
    conditional_b_given_a,
    marginal_a,
    one_pointer_setup,
    projection_equivalence_report,
    run_one_pointer,
    run_two_pointer,
    shift_unitary_a,
    shift_unitary_b,
    two_pointer_setup,
)
from .signaling import (
    Ensemble,
    TelepathyScenario,
    alice_measures,
    bob_distribution_with_alice,
    bob_distribution_without_alice,
    channel_simulation,
    signaling_gap,
    swap_parties,
)

__version__ = "0.1.0"

__all__ = [
    "BORN",
    "BornsimError",
    "DensityMatrix",
    "Ensemble",
    "HERM_TOL",
    "InvalidDensityError",
    "InvalidInputError",
    "InvalidProjectorFamilyError",
    "JointDistribution",
    "MeasurementRecord",
    "NORM_TOL",
    "NotDecoheredError",
    "NotHermitianError",
    "NotUnitaryError",
    "ONE_POINTER",
    "Observable",
    "Operator",
    "OutcomeDistribution",
    "PSD_TOL",
    "PointerSchemeSetup",
    "ProbabilityRule",
    "StateVector",
    "TWO_POINTER",
    "TelepathyScenario",
    "ZERO_PROB_CUTOFF",
    "ZeroProbabilityBranchError",
    "alice_measures",
    "apply",
    "basis_state",
    "bob_distribution_with_alice",
    "bob_distribution_without_alice",
    "branch_weights",
    "brute_force_joint",
    "channel_simulation",
    "classical_selective",
    "conditional_b_given_a",
    "density_from_pure",
    "embed_observable",
    "identity_operator",
    "inner",
    "ll_channel",
    "marginal_a",
    "measure_selective",
    "nonborn_exponent",
    "nonselective_channel",
    "observable_from_branches",
    "observable_from_matrix",
    "one_pointer_setup",
    "partial_trace",
    "phase_unitaries",
    "project_update",
    "projection_equivalence_report",
    "rule_probabilities",
    "run_one_pointer",
    "run_two_pointer",
    "shift_unitary_a",
    "shift_unitary_b",
    "signaling_gap",
    "state_preparation_unitaries",
    "swap_parties",
    "tensor",
    "tensor_operators",
    "tv_distance",
    "two_pointer_setup",
    "von_neumann_entropy",
]
