"""Privacy auditing of channels against hypothesis-testing adversaries and in
the (epsilon, delta) differential-privacy sense, plus the closed-form bounds
and parameter translations between the two notions.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from . import quantum
from .divergences import (
    LogBase,
    PriorPair,
    hockey_stick,
    neyman_pearson,
    trace_distance,
)
from .errors import (
    DeltaNotZero,
    DimensionMismatch,
    EmptyRelation,
    OutOfRange,
    WrongMode,
    ZeroMixing,
)
from .quantum import DensityOperator, DepolarizingChannel

FALSIFY_TOL = 1e-9
ASCENT_STEPS = 20


# --------------------------------------------------------------------------
# parameters and relations


@dataclass(frozen=True)
class HtPrivacyParams:
    epsilon: float
    eta: float

    def __post_init__(self):
        if not self.epsilon >= 0.0:
            raise OutOfRange(f"epsilon must be >= 0, got {self.epsilon!r}")
        if not 0.0 <= self.eta <= 1.0:
            raise OutOfRange(f"eta must lie in [0, 1], got {self.eta!r}")


@dataclass(frozen=True)
class HtPrivacyFamily:
    """The claim "(epsilon, eta)-private for every eta in [0, 1]"."""

    epsilon: float

    def at(self, eta: float) -> HtPrivacyParams:
        return HtPrivacyParams(self.epsilon, eta)


@dataclass(frozen=True)
class DpParams:
    epsilon: float
    delta: float

    def __post_init__(self):
        if not self.epsilon >= 0.0:
            raise OutOfRange(f"epsilon must be >= 0, got {self.epsilon!r}")
        if not 0.0 <= self.delta <= 1.0:
            raise OutOfRange(f"delta must lie in [0, 1], got {self.delta!r}")


@dataclass(frozen=True)
class TraceDistanceNeighborhood:
    """rho ~ sigma iff T(rho, sigma) <= d."""

    d: float

    def __post_init__(self):
        if not 0.0 < self.d <= 1.0:
            raise OutOfRange(f"neighborhood radius must lie in (0, 1], got {self.d!r}")

    def contains(self, rho, sigma) -> bool:
        return trace_distance(rho, sigma) <= self.d + FALSIFY_TOL


class ExplicitPairs:
    """A finite neighbouring relation given by pairs.

    The stored list is closed under swapping and contains every self-pair, so
    the relation is reflexive and symmetric on the states it mentions.
    """

    def __init__(self, pairs: Sequence[tuple]):
        states: list[DensityOperator] = []
        ordered: list[tuple[DensityOperator, DensityOperator]] = []

        def intern(x):
            x = quantum.as_density(x)
            for s in states:
                if s.dim == x.dim and np.array_equal(s.matrix, x.matrix):
                    return s
            states.append(x)
            return x

        def add(a, b):
            if not any(a is p and b is q for p, q in ordered):
                ordered.append((a, b))

        for k, (rho, sigma) in enumerate(pairs):
            a, b = intern(rho), intern(sigma)
            if a.dim != b.dim:
                raise DimensionMismatch(f"pair {k} mixes dimensions {a.dim} and {b.dim}")
            add(a, b)
            add(b, a)
        for s in states:
            add(s, s)
        self.given = len(pairs)
        self.pairs = ordered

    def __len__(self):
        return len(self.pairs)

    def contains(self, rho, sigma) -> bool:
        r, s = np.asarray(rho), np.asarray(sigma)
        return any(np.array_equal(a.matrix, r) and np.array_equal(b.matrix, s) for a, b in self.pairs)


NeighborhoodRelation = Union[TraceDistanceNeighborhood, ExplicitPairs]


# --------------------------------------------------------------------------
# objectives evaluated on channel outputs


@dataclass(frozen=True)
class DEtaObjective:
    eta: float
    base: LogBase = LogBase.NATURAL

    def __call__(self, out_rho, out_sigma) -> tuple[float, float]:
        res = neyman_pearson(out_rho, out_sigma, self.eta, self.base)
        return res.d_eta, res.dual_gap


@dataclass(frozen=True)
class HockeyStickObjective:
    epsilon: float
    base: LogBase = LogBase.NATURAL

    def __call__(self, out_rho, out_sigma) -> tuple[float, float]:
        return hockey_stick(out_rho, out_sigma, self.base.exp(self.epsilon)), 0.0


# --------------------------------------------------------------------------
# audit report


class Status(str, enum.Enum):
    CERTIFIED_CLOSED_FORM = "CERTIFIED_CLOSED_FORM"
    SATISFIED_ON_PAIRS = "SATISFIED_ON_PAIRS"
    FALSIFIED = "FALSIFIED"


@dataclass(frozen=True)
class PairEvaluation:
    index: int
    value: float
    dual_gap: float
    rho: DensityOperator = field(repr=False)
    sigma: DensityOperator = field(repr=False)


@dataclass
class AuditReport:
    mode: str  # "ht" or "dp"
    params: Union[HtPrivacyParams, DpParams]
    per_pair: list
    worst_value: float
    worst_index: int
    status: Status
    pairs_examined: int
    seed: int
    base: LogBase
    certificate: dict | None = None

    @property
    def worst_pair(self) -> tuple[DensityOperator, DensityOperator]:
        ev = self.per_pair[self.worst_index]
        return ev.rho, ev.sigma

    @property
    def budget(self) -> float:
        return self.params.epsilon if self.mode == "ht" else self.params.delta

    @property
    def max_dual_gap(self) -> float:
        return max((ev.dual_gap for ev in self.per_pair), default=0.0)


# --------------------------------------------------------------------------
# neighbour-pair search


def _pull_into_ball(rho: DensityOperator, sigma: DensityOperator, d: float) -> DensityOperator:
    t = trace_distance(rho, sigma)
    if t <= d:
        return sigma
    # shrink along the segment towards rho; convex combinations stay density operators
    lam = d / t * (1.0 - 1e-12)
    return quantum.repair_density(rho.matrix + lam * (sigma.matrix - rho.matrix))


def _perturb(state: DensityOperator, step: float, rng) -> DensityOperator:
    h = quantum.random_traceless_hermitian(state.dim, rng)
    return quantum.project_to_density(state.matrix + 0.5 * step * h)


def _search_one(channel, d: float, objective, seed_seq, steps: int):
    rng = np.random.default_rng(seed_seq)
    dim = channel.input_dim
    rho = quantum.random_density(dim, int(rng.integers(1, dim + 1)), rng)
    h = quantum.random_traceless_hermitian(dim, rng)
    radius = d * rng.uniform(0.5, 1.0)
    sigma = _pull_into_ball(rho, quantum.project_to_density(rho.matrix + radius * h), d)
    value, gap = objective(channel.apply(rho), channel.apply(sigma))
    step = d
    for _ in range(steps):
        if value == math.inf:
            break
        cand_rho = _perturb(rho, step, rng)
        cand_sigma = _pull_into_ball(cand_rho, _perturb(sigma, step, rng), d)
        cand_value, cand_gap = objective(channel.apply(cand_rho), channel.apply(cand_sigma))
        if cand_value > value:
            rho, sigma, value, gap = cand_rho, cand_sigma, cand_value, cand_gap
        else:
            step *= 0.5
    return rho, sigma, value, gap


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _sampled_pairs(channel, d, objective, budget, seed, workers=1, steps=ASCENT_STEPS):
    if budget < 1:
        raise OutOfRange(f"search budget must be >= 1, got {budget!r}")
    seqs = np.random.SeedSequence(seed).spawn(budget)
    results = _map(lambda sq: _search_one(channel, d, objective, sq, steps), seqs, workers)
    return [
        PairEvaluation(k, value, gap, rho, sigma)
        for k, (rho, sigma, value, gap) in enumerate(results)
    ]


def falsify_search(channel, d: float, objective, budget: int, seed: int = 0, workers: int = 1):
    """Best-effort search for the neighbour pair (T <= d) maximising ``objective``.

    Each of ``budget`` random pairs is refined by a 20-step randomized
    coordinate ascent whose step halves on every rejected move. The result is
    a lower bound on the true supremum, never a proof.

    Returns:
        ((rho, sigma), value) for the best pair found.
    """
    TraceDistanceNeighborhood(d)
    evals = _sampled_pairs(channel, d, objective, budget, seed, workers)
    best = _worst(evals)
    return (best.rho, best.sigma), best.value


def _worst(evals: list[PairEvaluation]) -> PairEvaluation:
    best = evals[0]
    for ev in evals[1:]:
        if ev.value > best.value:
            best = ev
    return best


def _explicit_evaluations(channel, relation: ExplicitPairs, objective, workers=1):
    if len(relation) == 0:
        raise EmptyRelation("neighbouring relation has no pairs")
    for k, (a, b) in enumerate(relation.pairs):
        if a.dim != channel.input_dim:
            raise DimensionMismatch(f"pair {k} has dim {a.dim}, channel expects {channel.input_dim}")

    def run(item):
        k, (a, b) = item
        value, gap = objective(channel.apply(a), channel.apply(b))
        return PairEvaluation(k, value, gap, a, b)

    return _map(run, list(enumerate(relation.pairs)), workers)


def _evaluate(channel, relation, objective, search_budget, seed, workers):
    if isinstance(relation, ExplicitPairs):
        return _explicit_evaluations(channel, relation, objective, workers)
    if isinstance(relation, TraceDistanceNeighborhood):
        return _sampled_pairs(channel, relation.d, objective, search_budget, seed, workers)
    raise TypeError(f"unsupported neighbouring relation {relation!r}")


def _status(worst: float, budget: float, certified: bool) -> Status:
    if worst > budget + FALSIFY_TOL:
        return Status.FALSIFIED
    return Status.CERTIFIED_CLOSED_FORM if certified else Status.SATISFIED_ON_PAIRS


def audit_ht(
    channel,
    relation: NeighborhoodRelation,
    eta: float,
    epsilon_budget: float,
    base: LogBase | str = LogBase.NATURAL,
    search_budget: int = 200,
    seed: int = 0,
    workers: int = 1,
) -> AuditReport:
    """Audit (epsilon, eta)-privacy: D^eta(E(rho) || E(sigma)) <= epsilon on neighbours.

    Explicit relations are checked exhaustively. Trace-distance relations are
    probed with :func:`falsify_search`-style sampling; only a depolarizing
    channel can be promoted to ``CERTIFIED_CLOSED_FORM``, and only when the
    provable bound ``log(1 + (1-p) D d / p) + log(1 / (1 - eta))`` fits the
    budget.
    """
    base = LogBase.parse(base)
    params = HtPrivacyParams(epsilon_budget, eta)
    evals = _evaluate(channel, relation, DEtaObjective(eta, base), search_budget, seed, workers)
    worst = _worst(evals)

    certificate = None
    if isinstance(channel, DepolarizingChannel) and isinstance(relation, TraceDistanceNeighborhood) and channel.p > 0:
        family = depolarizing_ht_epsilon(channel, relation.d, base)
        provable = ht_budget_from_pure_dp(family.epsilon, eta, base)
        certificate = {
            "family": "depolarizing",
            "p": channel.p,
            "dim": channel.dim,
            "d": relation.d,
            "kappa": "neighbourhood radius d",
            "dp_epsilon_at_zero_delta": family.epsilon,
            "provable_ht_epsilon": provable,
            "holds": provable <= epsilon_budget + 1e-12,
        }
    status = _status(worst.value, epsilon_budget, bool(certificate and certificate["holds"]))
    return AuditReport(
        mode="ht",
        params=params,
        per_pair=evals,
        worst_value=worst.value,
        worst_index=worst.index,
        status=status,
        pairs_examined=len(evals),
        seed=seed,
        base=base,
        certificate=certificate,
    )


def audit_dp(
    channel,
    relation: NeighborhoodRelation,
    epsilon: float,
    base: LogBase | str = LogBase.NATURAL,
    search_budget: int = 200,
    seed: int = 0,
    delta: float = 0.0,
    workers: int = 1,
) -> AuditReport:
    """Audit (epsilon, delta)-differential privacy.

    For each examined pair the smallest admissible delta over *all* effects M
    is the hockey-stick divergence tr((E(rho) - base^epsilon E(sigma))_+),
    so every per-pair value is exact.
    """
    base = LogBase.parse(base)
    params = DpParams(epsilon, delta)
    evals = _evaluate(channel, relation, HockeyStickObjective(epsilon, base), search_budget, seed, workers)
    worst = _worst(evals)

    certificate = None
    if isinstance(channel, DepolarizingChannel) and isinstance(relation, TraceDistanceNeighborhood):
        closed = depolarizing_dp_delta(channel, relation.d, epsilon, base)
        certificate = {
            "family": "depolarizing",
            "p": channel.p,
            "dim": channel.dim,
            "d": relation.d,
            "kappa": "neighbourhood radius d",
            "closed_form_delta": closed,
            "holds": closed <= delta + 1e-12,
        }
    status = _status(worst.value, delta, bool(certificate and certificate["holds"]))
    return AuditReport(
        mode="dp",
        params=params,
        per_pair=evals,
        worst_value=worst.value,
        worst_index=worst.index,
        status=status,
        pairs_examined=len(evals),
        seed=seed,
        base=base,
        certificate=certificate,
    )


def check_monotone_relaxation(report: AuditReport, params2: HtPrivacyParams) -> bool:
    """Whether an (epsilon, eta) guarantee implies (epsilon', eta') without recomputation."""
    if report.mode != "ht":
        raise WrongMode(f"expected an ht report, got mode {report.mode!r}")
    return params2.eta >= report.params.eta and params2.epsilon >= report.params.epsilon


# --------------------------------------------------------------------------
# closed-form bounds


def _priors(priors) -> PriorPair:
    return priors if isinstance(priors, PriorPair) else PriorPair(float(priors))


def gamma_bound(params: HtPrivacyParams, priors: PriorPair | float = 0.5) -> float:
    """Lower bound on the symmetric error of an (epsilon, eta)-private channel.

    max(p_max - epsilon * min(p_rho, p_sigma) * (1 - eta) / (2 eta), 0); the
    expression is undefined at eta = 0, where the vacuous bound 0 is returned.
    """
    pr = _priors(priors)
    if params.eta == 0.0:
        return 0.0
    slack = params.epsilon * min(pr.p_rho, pr.p_sigma) * (1.0 - params.eta) / (2.0 * params.eta)
    return max(pr.p_max - slack, 0.0)


def omega_bound(params: DpParams, eta: float, base: LogBase | str = LogBase.NATURAL) -> float:
    """Lower bound base^-epsilon (1 - eta - delta) on beta_eta for a DP channel."""
    base = LogBase.parse(base)
    if not 0.0 <= eta <= 1.0:
        raise OutOfRange(f"eta must lie in [0, 1], got {eta!r}")
    return base.exp(-params.epsilon) * max(1.0 - eta - params.delta, 0.0)


def theta_bound(params: DpParams, priors: PriorPair | float = 0.5, base: LogBase | str = LogBase.NATURAL) -> float:
    """Lower bound max(p_max + max(p_rho, p_sigma)(1 - base^epsilon - delta), 0) on p_err."""
    base = LogBase.parse(base)
    pr = _priors(priors)
    return max(pr.p_max + max(pr.p_rho, pr.p_sigma) * (1.0 - base.exp(params.epsilon) - params.delta), 0.0)


def ht_to_dp(params: HtPrivacyParams) -> DpParams:
    """(epsilon, eta)-privacy to (epsilon, sqrt(2 eta))-DP, delta capped at 1."""
    return DpParams(params.epsilon, min(math.sqrt(2.0 * params.eta), 1.0))


def dp_to_ht(epsilon: float, delta: float = 0.0) -> HtPrivacyFamily:
    """(epsilon, 0)-DP to the all-eta hypothesis-testing family.

    Only delta = 0 is covered. Note that D^eta(rho || rho) = -log(1 - eta), so
    for eta > 0 the family overstates what any channel achieves; use
    :func:`ht_budget_from_pure_dp` for a budget that provably holds.
    """
    if delta != 0.0:
        raise DeltaNotZero(f"translation requires delta = 0, got {delta!r}")
    if not epsilon >= 0.0:
        raise OutOfRange(f"epsilon must be >= 0, got {epsilon!r}")
    return HtPrivacyFamily(float(epsilon))


def ht_budget_from_pure_dp(epsilon: float, eta: float, base: LogBase | str = LogBase.NATURAL) -> float:
    """Provable D^eta budget of an (epsilon, 0)-DP channel: epsilon + log(1 / (1 - eta)).

    Follows from beta_eta >= base^-epsilon (1 - eta); equals epsilon at eta = 0.
    """
    base = LogBase.parse(base)
    if eta >= 1.0:
        return math.inf
    return epsilon + base.neg_log(1.0 - eta)


def depolarizing_dp_delta(channel: DepolarizingChannel, d: float, epsilon: float, base: LogBase | str = LogBase.NATURAL) -> float:
    """delta = max(0, (1 - base^epsilon) p / D + (1 - p) d) for the depolarizing channel on T <= d."""
    base = LogBase.parse(base)
    TraceDistanceNeighborhood(d)
    if not epsilon >= 0.0:
        raise OutOfRange(f"epsilon must be >= 0, got {epsilon!r}")
    p, dim = channel.p, channel.dim
    return max(0.0, (1.0 - base.exp(epsilon)) * p / dim + (1.0 - p) * d)


def depolarizing_ht_epsilon(channel: DepolarizingChannel, d: float, base: LogBase | str = LogBase.NATURAL) -> HtPrivacyFamily:
    """epsilon = log(1 + (1 - p) D d / p), the budget at which the DP delta vanishes."""
    base = LogBase.parse(base)
    TraceDistanceNeighborhood(d)
    if channel.p == 0.0:
        raise ZeroMixing("p = 0 is the identity channel; no finite budget exists")
    p, dim = channel.p, channel.dim
    return HtPrivacyFamily(base.log(1.0 + (1.0 - p) * dim * d / p))


__all__ = [
    "AuditReport",
    "DEtaObjective",
    "DpParams",
    "ExplicitPairs",
    "HockeyStickObjective",
    "HtPrivacyFamily",
    "HtPrivacyParams",
    "NeighborhoodRelation",
    "PairEvaluation",
    "Status",
    "TraceDistanceNeighborhood",
    "audit_dp",
    "audit_ht",
    "check_monotone_relaxation",
    "depolarizing_dp_delta",
    "depolarizing_ht_epsilon",
    "dp_to_ht",
    "falsify_search",
    "gamma_bound",
    "ht_budget_from_pure_dp",
    "ht_to_dp",
    "omega_bound",
    "theta_bound",
]
