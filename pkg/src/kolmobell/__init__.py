"""Classical probability space unifying incompatible Bell-test contexts.

Each context's outcome table becomes the conditional law of a single
Kolmogorov space in which the context itself is random.
"""

__version__ = "0.1.0"

from .errors import (
    BadSignPattern,
    ConditionHasZeroProbability,
    DimensionMismatch,
    EmptyContext,
    EntryAboveOne,
    IndexOutOfRange,
    InvariantViolation,
    MissingContext,
    NegativeEntry,
    NotTwoByTwo,
    RecordError,
    SumNotOne,
    ValidationError,
)
from .tables import (
    OUTCOMES,
    ContextFamily,
    OutcomeTable,
    SettingId,
    build_family,
    no_signaling_report,
    singlet_table,
    validate_table,
)
from .space import (
    OMEGA,
    Atom,
    ContextWeights,
    Event,
    KolmogorovSpace,
    a_value,
    b_value,
    build_space,
    conditional_probability,
    eval_A,
    eval_B,
    eval_eta_a,
    eval_eta_b,
    gate_a,
    gate_b,
    independence_check_eta,
    joint_distribution,
    probability,
)
from .correlations import (
    absolute_correlation,
    analyze,
    bound_report,
    chsh,
    conditional_correlation,
    max_chsh,
)
from .simulation import (
    SimulationConfig,
    TrialRecord,
    convergence_check,
    estimate,
    simulate,
)
