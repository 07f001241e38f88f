"""Distinguishability measures: trace distance, Helstrom and Neyman-Pearson
tests, the eta-hypothesis-testing relative entropy, relative entropy, binary
entropy, max-relative entropy and the hockey-stick divergence.

Divergences that can diverge return ``math.inf``; they never substitute a
large finite number.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionMismatch, InfeasibleTolerance, OutOfRange

GAP_TOL = 1e-7
_MU_CAP = 1e16
_MAX_BRACKET_STEPS = 400


class LogBase(enum.Enum):
    """Logarithm base shared by every divergence in one computation."""

    NATURAL = "natural"
    TWO = "two"

    @classmethod
    def parse(cls, value) -> "LogBase":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise OutOfRange(f"unknown log base {value!r}; use 'natural' or 'two'") from None

    def log(self, x: float) -> float:
        if x <= 0.0:
            return -math.inf
        if x == math.inf:
            return math.inf
        return math.log(x) if self is LogBase.NATURAL else math.log2(x)

    def exp(self, x: float) -> float:
        if x == math.inf:
            return math.inf
        return math.exp(x) if self is LogBase.NATURAL else 2.0 ** x

    def neg_log(self, x: float) -> float:
        """-log(x) with -log(0) = +inf."""
        return math.inf if x <= 0.0 else -self.log(x)


@dataclass(frozen=True)
class PriorPair:
    p_rho: float

    def __post_init__(self):
        if not 0.0 <= self.p_rho <= 1.0:
            raise OutOfRange(f"p_rho must lie in [0, 1], got {self.p_rho!r}")

    @property
    def p_sigma(self) -> float:
        return 1.0 - self.p_rho

    @property
    def p_max(self) -> float:
        return 0.5 * (1.0 - abs(self.p_rho - self.p_sigma))


@dataclass(frozen=True, eq=False)
class TestOperator:
    """A measurement effect 0 <= Q <= I."""

    __test__ = False  # not a pytest class

    matrix: np.ndarray

    def __post_init__(self):
        m = linalg.as_matrix(self.matrix)
        vals = linalg.eigvalsh(m)
        if vals[0] < -1e-9 or vals[-1] > 1.0 + 1e-9:
            raise OutOfRange(f"test operator spectrum [{vals[0]:.3e}, {vals[-1]:.3e}] leaves [0, 1]")
        m = np.array(0.5 * (m + m.conj().T))
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def expectation(self, state) -> float:
        return float(np.real(np.trace(self.matrix @ np.asarray(state))))


@dataclass(frozen=True)
class SymmetricTestResult:
    p_err: float
    p_max: float
    optimal_test: TestOperator


@dataclass(frozen=True)
class AsymmetricTestResult:
    """Outcome of the Neyman-Pearson program min tr(Q sigma) s.t. tr(Q rho) >= 1 - eta.

    ``multiplier`` is the Lagrange multiplier mu of the type-I constraint; the
    optimal test is built from the positive eigenspace of ``mu*rho - sigma``
    with ``mixing_weight`` placed on the boundary directions. ``dual_value``
    is mu(1 - eta) - tr((mu*rho - sigma)_+), a certified lower bound on beta.
    """

    beta: float
    d_eta: float
    optimal_test: TestOperator
    dual_value: float
    dual_gap: float
    multiplier: float
    mixing_weight: float
    eta: float
    base: LogBase


def _pair(rho, sigma):
    r = linalg.as_hermitian(rho)
    s = linalg.as_hermitian(sigma)
    if r.shape != s.shape:
        raise DimensionMismatch(f"state shapes differ: {r.shape} vs {s.shape}")
    return r, s


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise OutOfRange(f"eta must lie in [0, 1], got {eta!r}")
    return eta


def trace_distance(rho, sigma) -> float:
    r, s = _pair(rho, sigma)
    return 0.5 * linalg.trace_norm(r - s)


def hockey_stick(rho, sigma, gamma: float) -> float:
    """sup over effects M of tr(M rho) - gamma tr(M sigma), i.e. tr((rho - gamma sigma)_+)."""
    if not gamma >= 0.0:
        raise OutOfRange(f"gamma must be >= 0, got {gamma!r}")
    r, s = _pair(rho, sigma)
    if gamma == math.inf:
        return 0.0
    # rounding in r - gamma*s grows with gamma; clamp to the range
    # [tr(r) - gamma tr(s), tr(r)] that the exact value always lies in
    tr_r, tr_s = float(np.real(np.trace(r))), float(np.real(np.trace(s)))
    value = linalg.positive_part_trace(r - gamma * s)
    return min(max(value, tr_r - gamma * tr_s, 0.0), tr_r)


def helstrom(rho, sigma, priors: PriorPair | float = 0.5) -> SymmetricTestResult:
    """Minimum prior-weighted error of a two-outcome test, with the optimal test.

    The test accepts rho on the positive eigenspace of p_rho rho - p_sigma sigma.
    """
    if not isinstance(priors, PriorPair):
        priors = PriorPair(float(priors))
    r, s = _pair(rho, sigma)
    vals, vecs = linalg.hermitian_eig(priors.p_rho * r - priors.p_sigma * s)
    sub = vecs[:, vals > 0.0]
    p_err = 0.5 * (1.0 - float(np.sum(np.abs(vals))))
    return SymmetricTestResult(
        p_err=min(max(p_err, 0.0), priors.p_max),
        p_max=priors.p_max,
        optimal_test=TestOperator(sub @ sub.conj().T),
    )


def error_rates(test, rho, sigma) -> tuple[float, float]:
    """(type-I, type-II) errors of the test accepting rho on ``test``."""
    q = np.asarray(test)
    alpha = 1.0 - float(np.real(np.trace(q @ np.asarray(rho))))
    beta = float(np.real(np.trace(q @ np.asarray(sigma))))
    return alpha, beta



@dataclass
class _Point:
    mu: float
    proj: np.ndarray
    accept: float  # tr(P rho)
    miss: float  # tr(P sigma)
    positive: float  # tr((mu rho - sigma)_+)

    def dual(self, target: float) -> float:
        return self.mu * target - self.positive


def _lagrangian_point(r, s, mu: float) -> _Point:
    vals, vecs = linalg.trusted_hermitian_eig(mu * r - s)
    floor = 4e-16 * (mu + 1.0) * len(vals)
    keep = vals > floor
    if np.all(keep):
        proj = np.eye(len(vals), dtype=np.complex128)
    else:
        sub = vecs[:, keep]
        proj = sub @ sub.conj().T
    return _Point(
        mu=mu,
        proj=proj,
        accept=float(np.real(np.vdot(proj, r))),
        miss=float(np.real(np.vdot(proj, s))),
        positive=float(np.sum(vals[vals > 0.0])),
    )


def _combine(lo: _Point, hi: _Point, target: float):
    span = hi.accept - lo.accept
    theta = (hi.accept - target) / span if span > 0.0 else 0.0
    theta = min(max(theta, 0.0), 1.0)
    beta = theta * lo.miss + (1.0 - theta) * hi.miss
    return theta, beta


def _result(beta, dual, q, mu, weight, eta, base):
    if dual - beta > 1e-12:
        raise InfeasibleTolerance(f"dual bound {dual!r} exceeds primal value {beta!r}")
    beta = min(max(beta, 0.0), 1.0)
    dual = min(dual, beta)
    return AsymmetricTestResult(
        beta=beta,
        d_eta=0.0 if beta >= 1.0 else base.neg_log(beta),
        optimal_test=TestOperator(q),
        dual_value=dual,
        dual_gap=beta - dual,
        multiplier=mu,
        mixing_weight=weight,
        eta=eta,
        base=base,
    )


def neyman_pearson(rho, sigma, eta: float, base: LogBase | str = LogBase.NATURAL) -> AsymmetricTestResult:
    """Optimal asymmetric test: minimise tr(Q sigma) subject to tr(Q rho) >= 1 - eta.

    The acceptance probability tr(P(mu) rho) of the projector P(mu) onto the
    positive part of ``mu*rho - sigma`` is nondecreasing in mu. The solver
    brackets the level 1 - eta between two multipliers and mixes the two
    projectors so the constraint holds with equality. The concave dual
    mu(1 - eta) - tr((mu*rho - sigma)_+) evaluated at the bracket ends
    certifies the result; the bracket is shrunk until the gap closes.
    """
    base = LogBase.parse(base)
    eta = _check_eta(eta)
    r, s = _pair(rho, sigma)
    n = r.shape[0]
    if eta >= 1.0:
        return _result(0.0, 0.0, np.zeros((n, n)), 0.0, 0.0, eta, base)
    if eta == 0.0:
        return _zero_eta(r, s, base)
    # Comparing against (1 - eta) tr(rho) keeps Q = I exactly feasible.
    target = (1.0 - eta) * float(np.real(np.trace(r)))

    # rho-weight on sigma's kernel is accepted at no type-II cost. Using the
    # same rank cutoff as d_zero keeps beta = 0 exact instead of ~1e-17 noise.
    kernel = np.eye(n) - linalg.support_projector(s)
    free = float(np.real(np.vdot(kernel, r)))
    if free >= target:
        theta = target / free
        return _result(0.0, 0.0, theta * kernel, 0.0, theta, eta, base)

    lo = _lagrangian_point(r, s, 0.0)
    if lo.accept >= target:
        # sigma's kernel alone carries enough rho-weight
        theta = target / lo.accept
        return _result(theta * lo.miss, lo.dual(target), theta * lo.proj, 0.0, theta, eta, base)

    mu = 1.0
    hi = _lagrangian_point(r, s, mu)
    while hi.accept < target:
        if mu >= _MU_CAP:
            raise InfeasibleTolerance(f"type-I level {target!r} not reached for mu <= {_MU_CAP:g}")
        lo = hi
        mu *= 4.0
        hi = _lagrangian_point(r, s, mu)

    # The dual is mu*target - h(mu) with h(mu) = tr((mu*rho - sigma)_+) convex and
    # h'(mu) = accept(mu). Intersecting the tangents of h at the bracket ends lands
    # exactly on a kink of h (where accept jumps) and converges superlinearly on
    # smooth stretches; every fourth step bisects as a safeguard.
    for step in range(_MAX_BRACKET_STEPS):
        theta, beta = _combine(lo, hi, target)
        dual = max(lo.dual(target), hi.dual(target))
        if beta - dual <= 1e-15 + 1e-13 * beta:
            break
        if hi.mu - lo.mu <= 4e-16 * hi.mu:
            break
        mid = 0.5 * (lo.mu + hi.mu)
        slope_gap = hi.accept - lo.accept
        if step % 4 != 3 and slope_gap > 0.0:
            cross = (hi.positive - lo.positive - hi.accept * hi.mu + lo.accept * lo.mu) / -slope_gap
            if lo.mu < cross < hi.mu:
                mid = cross
        pt = _lagrangian_point(r, s, mid)
        if pt.accept < target:
            lo = pt
        else:
            hi = pt
    theta, beta = _combine(lo, hi, target)
    q = theta * lo.proj + (1.0 - theta) * hi.proj
    if lo.dual(target) >= hi.dual(target):
        dual, mu = lo.dual(target), lo.mu
    else:
        dual, mu = hi.dual(target), hi.mu
    achieved = theta * lo.accept + (1.0 - theta) * hi.accept
    if achieved < target - 1e-10:
        raise InfeasibleTolerance(f"type-I constraint missed: {achieved!r} < {target!r}")
    return _result(beta, dual, q, mu, 1.0 - theta, eta, base)


def _zero_eta(r, s, base):
    # eta = 0 forces Q = I on supp(rho), so beta = tr(Pi_rho sigma). When supp(rho)
    # is not invariant under sigma the dual supremum is only reached as mu -> inf,
    # and evaluating tr((mu*rho - sigma)_+) directly loses ~1e-16*mu to rounding.
    # Instead, in rho's eigenbasis write sigma - mu*rho = L^dag diag(-M, F) L with
    # M = mu*R - S_KK and F = S_NN + C^dag M^-1 C (C = S_KN). Then
    # tr((sigma - mu*rho)_+) <= tr(F), giving the dual bound beta - tr(C^dag M^-1 C).
    vals, vecs = linalg.hermitian_eig(r)
    keep = vals > linalg.RANK_TOL * vals[-1]
    rotated = vecs.conj().T @ s @ vecs
    s_kk = rotated[np.ix_(keep, keep)]
    coupling = rotated[np.ix_(keep, ~keep)]
    beta = float(np.real(np.trace(s_kk)))
    if np.all(keep):
        proj = np.eye(len(vals), dtype=np.complex128)
    else:
        sub = vecs[:, keep]
        proj = sub @ sub.conj().T
    if beta <= linalg.RANK_TOL:
        # supports are orthogonal up to the rank cutoff
        return _result(0.0, 0.0, proj, 0.0, 1.0, 0.0, base)
    mu = 1e12 / float(vals[keep][0])
    defect = 0.0
    if coupling.size:
        m = mu * np.diag(vals[keep]) - s_kk
        defect = max(float(np.real(np.trace(coupling.conj().T @ np.linalg.solve(m, coupling)))), 0.0)
    return _result(beta, beta - defect, proj, mu, 1.0, 0.0, base)


def d_eta(rho, sigma, eta: float, base: LogBase | str = LogBase.NATURAL) -> float:
    """eta-hypothesis-testing relative entropy -log(beta_eta)."""
    return neyman_pearson(rho, sigma, eta, base).d_eta


def d_zero(rho, sigma, base: LogBase | str = LogBase.NATURAL, rank_tol: float = linalg.RANK_TOL) -> float:
    """-log tr(Pi_rho sigma), with Pi_rho the support projector of rho."""
    base = LogBase.parse(base)
    r, s = _pair(rho, sigma)
    overlap = float(np.real(np.trace(linalg.support_projector(r, rank_tol) @ s)))
    if overlap <= rank_tol:
        return math.inf
    return max(base.neg_log(min(overlap, 1.0)), 0.0)


def _support_deficit(r, s, rank_tol):
    # rho-weight outside supp(sigma)
    proj = linalg.support_projector(s, rank_tol)
    return float(np.real(np.trace(r))) - float(np.real(np.trace(proj @ r)))


def relative_entropy(rho, sigma, base: LogBase | str = LogBase.NATURAL, rank_tol: float = linalg.RANK_TOL) -> float:
    """Umegaki relative entropy tr(rho (log rho - log sigma))."""
    base = LogBase.parse(base)
    r, s = _pair(rho, sigma)
    if _support_deficit(r, s, rank_tol) > rank_tol:
        return math.inf
    p, u = linalg.hermitian_eig(r)
    q, w = linalg.hermitian_eig(s)
    p_pos = p > 0.0
    entropy_term = float(np.sum(p[p_pos] * np.log(p[p_pos])))
    q_keep = q > rank_tol * max(q[-1], 0.0)
    overlap = np.abs(u.conj().T @ w[:, q_keep]) ** 2  # |<u_i|w_j>|^2
    weights = np.clip(p, 0.0, None) @ overlap
    cross_term = float(np.sum(weights * np.log(q[q_keep])))
    value = entropy_term - cross_term
    if base is LogBase.TWO:
        value /= math.log(2.0)
    return max(value, 0.0) if value > -1e-9 else value


def binary_entropy(upsilon: float, base: LogBase | str = LogBase.NATURAL) -> float:
    base = LogBase.parse(base)
    if not 0.0 <= upsilon <= 1.0:
        raise OutOfRange(f"argument must lie in [0, 1], got {upsilon!r}")
    h = 0.0
    for x in (upsilon, 1.0 - upsilon):
        if x > 0.0:
            h -= x * math.log(x)
    return h if base is LogBase.NATURAL else h / math.log(2.0)


def d_max(rho, sigma, base: LogBase | str = LogBase.NATURAL, rank_tol: float = linalg.RANK_TOL) -> float:
    """Max-relative entropy log lambda_max(sigma^{-1/2} rho sigma^{-1/2})."""
    base = LogBase.parse(base)
    r, s = _pair(rho, sigma)
    if _support_deficit(r, s, rank_tol) > rank_tol:
        return math.inf
    b = linalg.inv_sqrt_on_support(s, rank_tol)
    top = linalg.eigvalsh(b @ r @ b)[-1]
    return max(base.log(top), 0.0)


__all__ = [
    "AsymmetricTestResult",
    "LogBase",
    "PriorPair",
    "SymmetricTestResult",
    "TestOperator",
    "binary_entropy",
    "d_eta",
    "d_max",
    "d_zero",
    "helstrom",
    "hockey_stick",
    "neyman_pearson",
    "relative_entropy",
    "error_rates",
    "trace_distance",
]
