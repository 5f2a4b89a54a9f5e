"""Customer life-time value optimization over DAG-structured MDPs."""

from .errors import (
    BracketOverflow,
    CycleDetected,
    InvalidConfig,
    InvalidParameters,
    InvalidPolicy,
    ModeMismatch,
    MreoptError,
    TooManyPolicies,
    UnboundedLtv,
    UnboundedModel,
    UnknownFamily,
)
from .evaluation import (
    ComparisonRow,
    MetricsReport,
    RoundStats,
    SimReport,
    compare,
    enumerate_oracle,
    evaluate_policy,
    metrics,
    simulate_online,
)
from .model import (
    ActionSpec,
    Boundedness,
    DagModel,
    State,
    Transition,
    ValidationReport,
    Violation,
    check_boundedness,
    topological_order,
    validate_model,
)
from .push import ProbModel, PushScenarioConfig, build_push_dag, synth_prob_model
from .solvers import (
    MreoptResult,
    Policy,
    ValuePair,
    dp_pass,
    fixed_point_map,
    solve_bf_one_round,
    solve_bf_unrolled,
    solve_greedy,
    solve_mreopt,
)

__version__ = "0.1.0"
