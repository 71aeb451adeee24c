"""Relative-state quantum mechanics: branches, degrees of reality and future truth values."""

from .errors import (
    ContractViolation,
    DeadEnd,
    DimMismatch,
    EmptyBranch,
    EmptyPerspective,
    IoFormat,
    NotNormalized,
    ParseError,
    RangeError,
    RecordGap,
    RelStateError,
    RoleError,
    SingularBranch,
    TooManyDisjuncts,
    ZeroVector,
)
from .evolution import Hamiltonian, Propagator, evolve, propagator
from .future_truth import (
    Perspective,
    RecordSampler,
    SampledRecord,
    chain_value,
    consistency_defect,
    future_truth_table,
    future_truth_value,
    sample_record,
)
from .hilbert import (
    PRUNE_EPSILON,
    TOL,
    Factorization,
    Operator,
    StateVector,
    apply,
    basis_state,
    load_snapshot,
    make_state,
    projector_expectation,
    save_snapshot,
    tensor,
)
from .models import (
    CatModel,
    IdealMeasurementModel,
    RabiModel,
    cat_state_at,
    short_cat_state,
    ideal_measurement_state,
    rabi_propagator_reference,
    random_consistent_model,
    random_hermitian,
    random_state,
)
from .relative_state import BranchDecomposition, decompose, observer_count, relative_state
from .temporal_logic import (
    E,
    ExperienceProposition,
    History,
    Tense,
    classify_tense,
    disjoint_histories,
    evaluate,
    history_truth,
    parse,
)

__version__ = "0.1.0"
