"""Probabilities of slow-node (limpware) impact on replicated-storage protocols.

Closed-form evaluation, exact small-cluster enumeration, and Monte Carlo
simulation of degraded reads, writes and block regeneration in an n-node
cluster with 3-way replication and a single slow node.
"""

from .errors import (
    BudgetExceededError,
    InvalidParamsError,
    LowLoadWarning,
    PlanMismatchError,
)
from .model import (
    BlockDegradeBreakdown,
    DegradedNodeCountPmf,
    any_block_degrade_prob,
    block_degrade_breakdown,
    cluster_degrade_prob,
    degraded_node_count_pmf,
    node_degrade_prob,
    read_degrade_prob,
    read_user_degrade_prob,
    regen_load,
    slow_dest_prob,
    write_degrade_prob,
    write_user_degrade_prob,
)
from .oracle import enum_read_prob, enum_slow_dest_prob, enum_write_prob
from .params import ClusterParams, Probability, RegenParams, WorkloadParams
from .rng import TrialStream
from .sim import (
    Placement,
    RegenPlan,
    RegenScenario,
    TrialOutcome,
    classify_outcome,
    gen_placement,
    make_scenario,
    plan_regeneration,
)
from .stats import EstimateSummary, wilson_interval
from .trials import (
    ANY_BLOCK_DEGRADE,
    BLOCK_DEGRADE,
    CLUSTER_DEGRADE,
    NODE_DEGRADE,
    READ_USER_DEGRADE,
    WRITE_USER_DEGRADE,
    run_assumption_trials,
    run_protocol_trials,
    run_rw_trials,
)

__version__ = "0.1.0"

__all__ = [
    "ANY_BLOCK_DEGRADE",
    "BLOCK_DEGRADE",
    "BlockDegradeBreakdown",
    "BudgetExceededError",
    "CLUSTER_DEGRADE",
    "ClusterParams",
    "DegradedNodeCountPmf",
    "EstimateSummary",
    "InvalidParamsError",
    "LowLoadWarning",
    "NODE_DEGRADE",
    "Placement",
    "PlanMismatchError",
    "Probability",
    "READ_USER_DEGRADE",
    "RegenParams",
    "RegenPlan",
    "RegenScenario",
    "TrialOutcome",
    "TrialStream",
    "WRITE_USER_DEGRADE",
    "WorkloadParams",
    "any_block_degrade_prob",
    "block_degrade_breakdown",
    "classify_outcome",
    "cluster_degrade_prob",
    "degraded_node_count_pmf",
    "enum_read_prob",
    "enum_slow_dest_prob",
    "enum_write_prob",
    "gen_placement",
    "make_scenario",
    "node_degrade_prob",
    "plan_regeneration",
    "read_degrade_prob",
    "read_user_degrade_prob",
    "regen_load",
    "run_assumption_trials",
    "run_protocol_trials",
    "run_rw_trials",
    "slow_dest_prob",
    "wilson_interval",
    "write_degrade_prob",
    "write_user_degrade_prob",
]
