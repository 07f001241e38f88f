import math

import numpy as np
import pytest

from htprivacy import quantum
from htprivacy.divergences import PriorPair, d_eta, d_max, helstrom, hockey_stick, neyman_pearson, trace_distance
from htprivacy.errors import DeltaNotZero, DimensionMismatch, EmptyRelation, OutOfRange, WrongMode, ZeroMixing
from htprivacy.privacy import (
    DEtaObjective,
    DpParams,
    ExplicitPairs,
    HockeyStickObjective,
    HtPrivacyFamily,
    HtPrivacyParams,
    Status,
    TraceDistanceNeighborhood,
    audit_dp,
    audit_ht,
    check_monotone_relaxation,
    depolarizing_dp_delta,
    depolarizing_ht_epsilon,
    dp_to_ht,
    falsify_search,
    gamma_bound,
    ht_budget_from_pure_dp,
    ht_to_dp,
    omega_bound,
    theta_bound,
)

from _support import KET0, KET1, MIXED, PLUS, random_pair

LN2 = math.log(2)
DEP = quantum.DepolarizingChannel(0.5, 2)


# -- parameter types -------------------------------------------------------


def test_parameter_validation():
    with pytest.raises(OutOfRange):
        HtPrivacyParams(-1.0, 0.1)
    with pytest.raises(OutOfRange):
        HtPrivacyParams(1.0, 1.5)
    with pytest.raises(OutOfRange):
        DpParams(1.0, -0.1)
    with pytest.raises(OutOfRange):
        TraceDistanceNeighborhood(0.0)
    assert HtPrivacyFamily(0.5).at(0.3) == HtPrivacyParams(0.5, 0.3)


def test_explicit_pairs_are_symmetrized():
    rel = ExplicitPairs([(KET0, KET1)])
    assert rel.given == 1
    assert len(rel) == 4  # (0,1), (1,0), (0,0), (1,1)
    assert rel.contains(KET1, KET0) and rel.contains(KET0, KET0)
    assert not rel.contains(KET0, MIXED)


def test_explicit_pairs_deduplicate():
    rel = ExplicitPairs([(KET0, KET1), (KET1, KET0), (KET0, KET0)])
    assert len(rel) == 4


def test_trace_distance_relation():
    rel = TraceDistanceNeighborhood(0.5)
    assert rel.contains(KET0, MIXED)
    assert not rel.contains(KET0, KET1)


# -- audits -----------------------------------------------------------------


def test_identity_on_orthogonal_pair_is_falsified():
    report = audit_ht(quantum.identity_channel(2), ExplicitPairs([(KET0, KET1)]), 0.0, 5.0)
    assert report.worst_value == math.inf
    assert report.status is Status.FALSIFIED
    assert report.pairs_examined == 4


def test_constant_channel_worst_value_is_self_pair_floor():
    # every output is I/2, so each pair scores D^eta(I/2 || I/2) = -log(1 - eta)
    eta = 0.1
    floor = -math.log(1 - eta)
    channel = quantum.DepolarizingChannel(1.0, 2)
    report = audit_ht(channel, ExplicitPairs([(KET0, KET1), (PLUS, MIXED)]), eta, 0.01)
    assert report.worst_value == pytest.approx(floor, abs=1e-12)
    assert report.status is Status.FALSIFIED
    assert audit_ht(channel, ExplicitPairs([(KET0, KET1)]), eta, 0.2).status is Status.SATISFIED_ON_PAIRS
    sampled = audit_ht(channel, TraceDistanceNeighborhood(0.5), eta, 0.2, search_budget=10)
    assert sampled.status is Status.CERTIFIED_CLOSED_FORM
    assert audit_ht(channel, ExplicitPairs([(KET0, KET1)]), 0.0, 0.01).worst_value == pytest.approx(0.0, abs=1e-12)


def test_depolarizing_sampled_audit_within_budget():
    report = audit_ht(DEP, TraceDistanceNeighborhood(0.5), 0.25, LN2, search_budget=100, seed=3)
    assert report.worst_value <= LN2 + 1e-7
    assert report.status is Status.SATISFIED_ON_PAIRS
    assert report.max_dual_gap <= 1e-7
    assert report.certificate["holds"] is False


def test_depolarizing_closed_form_certificate():
    budget = ht_budget_from_pure_dp(LN2, 0.25)
    report = audit_ht(DEP, TraceDistanceNeighborhood(0.5), 0.25, budget, search_budget=20)
    assert report.status is Status.CERTIFIED_CLOSED_FORM
    assert report.certificate["dp_epsilon_at_zero_delta"] == pytest.approx(LN2)


def test_audit_dp_examples():
    ident = quantum.identity_channel(2)
    rho = quantum.random_density(2, seed=0)
    assert audit_dp(ident, ExplicitPairs([(rho, rho)]), 0.0).worst_value == pytest.approx(0.0, abs=1e-12)
    report = audit_dp(ident, ExplicitPairs([(KET0, KET1)]), 1.0)
    assert report.worst_value == pytest.approx(1.0)
    assert report.status is Status.FALSIFIED
    assert audit_dp(ident, ExplicitPairs([(KET0, KET1)]), 1.0, delta=1.0).status is Status.SATISFIED_ON_PAIRS


def test_audit_dp_depolarizing_matches_closed_form():
    report = audit_dp(DEP, TraceDistanceNeighborhood(0.5), LN2, search_budget=60, seed=1)
    assert report.worst_value <= 1e-9
    assert report.status is Status.CERTIFIED_CLOSED_FORM
    # at epsilon = 0 the closed form gives delta = 0.25, and sampling must not exceed it
    zero = audit_dp(DEP, TraceDistanceNeighborhood(0.5), 0.0, search_budget=60, seed=1, delta=0.25)
    assert zero.worst_value <= 0.25 + 1e-7
    assert zero.status is Status.CERTIFIED_CLOSED_FORM


def test_audit_errors():
    with pytest.raises(DimensionMismatch):
        audit_ht(quantum.identity_channel(3), ExplicitPairs([(KET0, KET1)]), 0.1, 1.0)
    with pytest.raises(EmptyRelation):
        audit_ht(quantum.identity_channel(2), ExplicitPairs([]), 0.1, 1.0)
    with pytest.raises(OutOfRange):
        audit_ht(DEP, TraceDistanceNeighborhood(0.5), 0.1, 1.0, search_budget=0)


def test_ties_resolve_to_lowest_index():
    ident = quantum.identity_channel(2)
    report = audit_dp(ident, ExplicitPairs([(KET0, KET1), (PLUS, PLUS)]), 0.0)
    values = [ev.value for ev in report.per_pair]
    top = max(values)
    assert report.worst_index == values.index(top)


def test_falsified_report_reproduces():
    rng = np.random.default_rng(5)
    channel = quantum.random_channel(3, 2, rng)
    pairs = [random_pair(rng, 3) for _ in range(4)]
    report = audit_ht(channel, ExplicitPairs(pairs), 0.2, 0.05)
    assert report.status is Status.FALSIFIED
    rho, sigma = report.worst_pair
    again = d_eta(channel.apply(rho), channel.apply(sigma), 0.2)
    assert again == pytest.approx(report.worst_value, abs=1e-9)


def test_sampled_audit_is_deterministic_and_schedule_free():
    a = audit_ht(DEP, TraceDistanceNeighborhood(0.4), 0.1, 1.0, search_budget=12, seed=9)
    b = audit_ht(DEP, TraceDistanceNeighborhood(0.4), 0.1, 1.0, search_budget=12, seed=9, workers=4)
    assert [ev.value for ev in a.per_pair] == [ev.value for ev in b.per_pair]
    assert a.worst_index == b.worst_index


def test_monotone_relaxation():
    report = audit_ht(quantum.identity_channel(2), ExplicitPairs([(MIXED, MIXED)]), 0.1, 1.0)
    assert check_monotone_relaxation(report, HtPrivacyParams(1.5, 0.2))
    assert not check_monotone_relaxation(report, HtPrivacyParams(0.5, 0.2))
    zero = audit_ht(quantum.identity_channel(2), ExplicitPairs([(MIXED, MIXED)]), 0.0, 1.0)
    assert check_monotone_relaxation(zero, HtPrivacyParams(1.0, 0.7))
    dp = audit_dp(quantum.identity_channel(2), ExplicitPairs([(MIXED, MIXED)]), 1.0)
    with pytest.raises(WrongMode):
        check_monotone_relaxation(dp, HtPrivacyParams(1.0, 0.2))


# -- search -----------------------------------------------------------------


def test_search_on_constant_channel():
    constant = quantum.DepolarizingChannel(1.0, 2)
    _, value = falsify_search(constant, 0.5, HockeyStickObjective(0.0), 10, seed=0)
    assert value == pytest.approx(0.0, abs=1e-12)


def test_search_on_identity_respects_radius():
    (rho, sigma), value = falsify_search(quantum.identity_channel(2), 0.3, HockeyStickObjective(0.0), 30, seed=0)
    assert 0.0 < value <= 0.3 + 1e-9
    assert trace_distance(rho, sigma) <= 0.3 + 1e-9
    assert value > 0.29  # ascent reaches the boundary of the ball


def test_search_on_depolarizing_contracts():
    _, value = falsify_search(DEP, 0.5, HockeyStickObjective(0.0), 30, seed=0)
    assert value <= 0.25 + 1e-7


def test_search_is_deterministic():
    obj = DEtaObjective(0.2)
    first = falsify_search(DEP, 0.5, obj, 8, seed=42)
    second = falsify_search(DEP, 0.5, obj, 8, seed=42)
    assert first[1] == second[1]
    assert np.array_equal(np.asarray(first[0][0]), np.asarray(second[0][0]))


# -- closed forms ------------------------------------------------------------


@pytest.mark.parametrize("eps, eta, p_rho, expected", [(0.0, 0.5, 0.5, 0.5), (0.4, 0.5, 0.5, 0.4), (10.0, 0.1, 0.5, 0.0)])
def test_gamma_bound(eps, eta, p_rho, expected):
    assert gamma_bound(HtPrivacyParams(eps, eta), PriorPair(p_rho)) == pytest.approx(expected, abs=1e-12)


def test_gamma_bound_at_zero_eta_is_vacuous():
    assert gamma_bound(HtPrivacyParams(0.0, 0.0)) == 0.0


@pytest.mark.parametrize("eps, delta, eta, expected", [(0.0, 0.0, 0.0, 1.0), (LN2, 0.1, 0.1, 0.4), (0.0, 0.6, 0.5, 0.0)])
def test_omega_bound(eps, delta, eta, expected):
    assert omega_bound(DpParams(eps, delta), eta) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("eps, delta, p_rho, expected", [(0.0, 0.0, 0.5, 0.5), (0.0, 0.0, 0.7, 0.3), (5.0, 0.0, 0.5, 0.0)])
def test_theta_bound(eps, delta, p_rho, expected):
    assert theta_bound(DpParams(eps, delta), PriorPair(p_rho)) == pytest.approx(expected, abs=1e-12)


def test_bounds_nonincreasing_in_epsilon():
    grid = np.linspace(0, 4, 401)
    for eta in (0.0, 0.1, 0.5, 0.9):
        g = [gamma_bound(HtPrivacyParams(e, eta), 0.3) for e in grid]
        assert all(a >= b - 1e-12 for a, b in zip(g, g[1:]))
    for delta in (0.0, 0.1, 0.5):
        o = [omega_bound(DpParams(e, delta), 0.2) for e in grid]
        t = [theta_bound(DpParams(e, delta), 0.6) for e in grid]
        assert all(a >= b - 1e-12 for a, b in zip(o, o[1:]))
        assert all(a >= b - 1e-12 for a, b in zip(t, t[1:]))


@pytest.mark.parametrize("eps, eta, delta", [(1.0, 0.0, 0.0), (0.3, 0.02, 0.2), (1.0, 0.8, 1.0)])
def test_ht_to_dp(eps, eta, delta):
    out = ht_to_dp(HtPrivacyParams(eps, eta))
    assert out.epsilon == eps
    assert out.delta == pytest.approx(delta, abs=1e-15)


def test_dp_to_ht():
    assert dp_to_ht(0.0) == HtPrivacyFamily(0.0)
    assert dp_to_ht(LN2).epsilon == LN2
    with pytest.raises(DeltaNotZero):
        dp_to_ht(0.5, 0.1)


def test_depolarizing_dp_delta():
    assert depolarizing_dp_delta(quantum.DepolarizingChannel(1.0, 3), 0.7, 0.0) == 0.0
    assert depolarizing_dp_delta(DEP, 0.5, 0.0) == pytest.approx(0.25)
    assert depolarizing_dp_delta(DEP, 0.5, LN2) == pytest.approx(0.0, abs=1e-15)


def test_depolarizing_ht_epsilon():
    assert depolarizing_ht_epsilon(quantum.DepolarizingChannel(1.0, 2), 0.5).epsilon == 0.0
    assert depolarizing_ht_epsilon(DEP, 0.5).epsilon == pytest.approx(LN2)
    assert depolarizing_ht_epsilon(DEP, 0.5, "two").epsilon == pytest.approx(1.0)
    with pytest.raises(ZeroMixing):
        depolarizing_ht_epsilon(quantum.DepolarizingChannel(0.0, 2), 0.5)


def test_depolarizing_delta_bounds_example_pair():
    d, eps = 0.5, 0.1
    rho = np.diag([1.0, 0.0])
    sigma = np.diag([0.5, 0.5])
    value = hockey_stick(DEP.apply(rho), DEP.apply(sigma), math.exp(eps))
    assert value <= depolarizing_dp_delta(DEP, d, eps) + 1e-12


# -- guarantees on channel outputs --------------------------------------------


def test_pure_dp_budget_includes_type_one_slack():
    # identical outputs already score -log(1 - eta) > 0, so (eps, 0)-DP alone
    # cannot give D^eta <= eps; eps + log(1 / (1 - eta)) always holds
    rng = np.random.default_rng(6)
    for eta in (0.25, 0.5):
        assert d_eta(MIXED, MIXED, eta) > 0.0
        for _ in range(40):
            rho, sigma = random_pair(rng, full_rank=True)
            eps = d_max(rho, sigma)
            assert hockey_stick(rho, sigma, math.exp(eps)) <= 1e-9
            assert d_eta(rho, sigma, eta) <= ht_budget_from_pure_dp(eps, eta) + 1e-7


def test_hockey_stick_at_threshold_can_exceed_sqrt_two_eta():
    # classical pair p = (1/2, 1/2), q = (1, 0) at eta = 0.1: beta = 0.8 and the
    # hockey-stick divergence at 1/beta is 1/2 > sqrt(0.2)
    rho, sigma = np.diag([0.5, 0.5]), np.diag([1.0, 0.0])
    beta = neyman_pearson(rho, sigma, 0.1).beta
    assert beta == pytest.approx(0.8, abs=1e-12)
    assert hockey_stick(rho, sigma, 1 / beta) == pytest.approx(0.5, abs=1e-12)
    assert 0.5 > math.sqrt(0.2)


def test_post_processing_never_helps():
    rng = np.random.default_rng(7)
    for _ in range(200):
        dim = int(rng.integers(2, 4))
        e, n = quantum.random_channel(dim, 2, rng), quantum.random_channel(dim, 3, rng)
        rho, sigma = random_pair(rng, dim)
        a, b = e.apply(rho), e.apply(sigma)
        for eta in (0.0, 0.3):
            assert d_eta(n.apply(a), n.apply(b), eta) <= d_eta(a, b, eta) + 1e-7


@pytest.mark.parametrize("p_rho", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("eta", [0.1, 0.5])
def test_symmetric_error_floor_on_depolarizing(p_rho, eta):
    rng = np.random.default_rng(8)
    eps = depolarizing_ht_epsilon(DEP, 0.5).epsilon
    floor = gamma_bound(HtPrivacyParams(eps, eta), PriorPair(p_rho))
    (rho, sigma), _ = falsify_search(DEP, 0.5, HockeyStickObjective(0.0), 20, seed=int(rng.integers(1000)))
    assert helstrom(DEP.apply(rho), DEP.apply(sigma), p_rho).p_err >= floor - 1e-7
