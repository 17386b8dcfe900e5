"""Closed-form probabilities of degraded reads, writes and regeneration.

The cluster has n nodes, one of which is slow.  Reads pick one of a block's
3 replicas uniformly; writes allocate a uniform 3-node pipeline.  After a
crash loses b blocks, every surviving node re-replicates on average
m = b/(n-1) blocks, each copy landing on the slow node with probability
p = 1/(n-2); a good node is degraded once two of its (two) regeneration
threads are stuck sending to the slow node.

All functions are pure and return :class:`Probability` (a validated float),
except :func:`regen_load` which returns the raw per-node load.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import LowLoadWarning
from .params import ClusterParams, Probability, RegenParams, WorkloadParams

# Residual larger than this in "should be zero/one" cancellations indicates a
# real bug, not floating-point noise; never clamp it away silently.
_CLAMP_GUARD = 1e-9


def _guarded_clamp(value: float, context: str) -> float:
    """Clamp rounding spill to [0, 1]; anything beyond the guard is a real error."""
    if 0.0 <= value <= 1.0:
        return value
    overshoot = max(-value, value - 1.0)
    if overshoot > _CLAMP_GUARD:
        raise AssertionError(f"{context}: value {value!r} out of [0, 1] by {overshoot:g}")
    return min(max(value, 0.0), 1.0)


@dataclass(frozen=True)
class DegradedNodeCountPmf:
    """Distribution of the number of degraded good nodes (0..n-2).

    Binomial over the n-2 good nodes, each independently degraded with the
    single-node probability from :func:`node_degrade_prob`.
    """

    n: int
    b: int
    mass: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.mass)

    def __getitem__(self, i: int) -> float:
        return self.mass[i]


@dataclass(frozen=True)
class BlockDegradeBreakdown:
    """Probability that one lost block cannot be regenerated promptly.

    both_on_degraded: both surviving copies sit on degraded good nodes.
    one_on_slow: one copy sits on the slow node, the other on a degraded
    good node.  The two cases are mutually exclusive; total is their sum.
    """

    both_on_degraded: Probability
    one_on_slow: Probability
    total: Probability


def _stable_complement_power(per_request: float, count: int) -> float:
    """1 - (1 - per_request)**count, computed via logs so large counts keep precision."""
    if count == 0 or per_request == 0.0:
        return 0.0
    if per_request >= 1.0:
        return 1.0
    return -math.expm1(count * math.log1p(-per_request))


def read_degrade_prob(params: ClusterParams) -> Probability:
    """Chance a single read is served from the slow node: 1/n.

    The slow node holds a replica with probability 3/n and the replica choice
    is uniform over the 3 copies.
    """
    return Probability(1.0 / params.n)


def read_user_degrade_prob(params: ClusterParams, workload: WorkloadParams) -> Probability:
    """Chance at least one of r reads is degraded: 1 - (1 - 1/n)**r."""
    return Probability(_stable_complement_power(1.0 / params.n, workload.r))


def write_degrade_prob(params: ClusterParams) -> Probability:
    """Chance a single write pipeline includes the slow node: 3/n."""
    return Probability(3.0 / params.n)


def write_user_degrade_prob(params: ClusterParams, workload: WorkloadParams) -> Probability:
    """Chance at least one of r writes is degraded: 1 - (1 - 3/n)**r."""
    return Probability(_stable_complement_power(3.0 / params.n, workload.r))


def regen_load(params: RegenParams) -> float:
    """Average number of blocks each surviving node must re-replicate: b/(n-1).

    Deliberately not rounded; the degraded-node formula uses the fractional
    value as an exponent.
    """
    return params.b / (params.n - 1)


def slow_dest_prob(params: RegenParams) -> Probability:
    """Chance one copy task from a good node targets the slow node: 1/(n-2).

    Composition of "slow node holds no replica yet", (n-3)/(n-2), with the
    uniform destination choice over the n-3 candidates.
    """
    return Probability(1.0 / (params.n - 2))


def node_degrade_prob(params: RegenParams) -> Probability:
    """Chance a good node gets at least two of its m copy tasks stuck on the slow node.

    Evaluates 1 - (1-p)**m - m*p*(1-p)**(m-1) with real-valued m = b/(n-1)
    and p = 1/(n-2).  For m <= 1 the result is exactly 0: a single task can
    never pin both regeneration threads (at m = 1 the expression cancels
    algebraically; below 1 it would extrapolate negative).  Emits
    :class:`LowLoadWarning` whenever m < 2, where the "at least two of m
    tasks" reading is already an extrapolation.
    """
    m = regen_load(params)
    if m < 2.0:
        warnings.warn(
            f"per-node regeneration load m = {m:g} < 2 (n={params.n}, b={params.b}); "
            "the degraded-node probability extrapolates the two-task model",
            LowLoadWarning,
            stacklevel=2,
        )
    if m <= 1.0:
        return Probability(0.0)
    p = 1.0 / (params.n - 2)
    none = math.exp(m * math.log1p(-p))
    one = m * p * math.exp((m - 1.0) * math.log1p(-p))
    value = 1.0 - none - one
    return Probability(_guarded_clamp(value, f"degraded-node probability (n={params.n}, b={params.b})"))


def cluster_degrade_prob(params: RegenParams) -> Probability:
    """Chance every good node is degraded at once: node probability to the power n-2."""
    return Probability(node_degrade_prob(params) ** (params.n - 2))


def _binomial_pmf(count: int, p: float) -> list[float]:
    """Binomial(count, p) mass function via log-gamma, safe for large counts."""
    if p <= 0.0:
        return [1.0] + [0.0] * count
    if p >= 1.0:
        return [0.0] * count + [1.0]
    log_p = math.log(p)
    log_q = math.log1p(-p)
    lg_n = math.lgamma(count + 1)
    mass = []
    for i in range(count + 1):
        log_coeff = lg_n - math.lgamma(i + 1) - math.lgamma(count - i + 1)
        mass.append(math.exp(log_coeff + i * log_p + (count - i) * log_q))
    return mass


def degraded_node_count_pmf(params: RegenParams) -> DegradedNodeCountPmf:
    """Full distribution of the degraded good-node count i = 0..n-2."""
    p_node = node_degrade_prob(params)
    return DegradedNodeCountPmf(params.n, params.b, tuple(_binomial_pmf(params.n - 2, p_node)))


def block_degrade_breakdown(params: RegenParams) -> BlockDegradeBreakdown:
    """Per-block degradation probability, split by case.

    Both summands run over the degraded-node-count distribution explicitly:
    with i degraded good nodes, the block's two surviving copies land on two
    of them with odds C(i,2)/C(n-1,2), or on the slow node plus one of them
    with odds i/C(n-1,2).  (The equivalent factorial-moment closed forms are
    reserved as an independent test oracle, so they are not used here.)
    """
    n = params.n
    pmf = degraded_node_count_pmf(params).mass
    pairs = math.comb(n - 1, 2)
    both = 0.0
    one_slow = 0.0
    for i in range(1, n - 1):
        one_slow += pmf[i] * i / pairs
        if i >= 2:
            both += pmf[i] * math.comb(i, 2) / pairs
    return BlockDegradeBreakdown(
        both_on_degraded=Probability(both),
        one_on_slow=Probability(one_slow),
        total=Probability(_guarded_clamp(both + one_slow, f"per-block probability (n={n}, b={params.b})")),
    )


def any_block_degrade_prob(params: RegenParams) -> Probability:
    """Chance at least one of the b lost blocks is degraded: 1 - (1 - p_block)**b."""
    if params.b == 0:
        return Probability(0.0)
    per_block = block_degrade_breakdown(params).total
    return Probability(_stable_complement_power(per_block, params.b))
