"""Posterior calculus and utility functionals of the commitment game.

Bob's utility is what his round-2 trade earns: u_B = E_{s,b} G(p_{s,b})
- E_s G(p_s).  Alice's sender objective is its exact negation.  Her total
utility additionally collects the round-1 and round-3 score improvements;
the game is constant-sum with total V = E G(p_{A,B}) - G(p).

Three equivalent parameterizations of u_B are provided: by scheme, by a
posterior w over A, and by a posterior v over E x B.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import scoring
from .core import ConditionalTable, JointPrior, SignalingScheme, \
    marginals_and_conditionals
from .errors import PreconditionViolated, ValidationError, \
    ZeroProbabilityPair, ZeroProbabilitySignal
from .scoring import ScoreSpec


class SupportKind(str, enum.Enum):
    OVER_E = "E"
    OVER_A = "A"
    OVER_E_TIMES_B = "ExB"


@dataclass(frozen=True)
class PosteriorDistribution:
    """A point of a probability simplex (over E, A, or E x B)."""

    support_kind: SupportKind
    weights: np.ndarray

    def __post_init__(self):
        w = np.ascontiguousarray(np.asarray(self.weights, dtype=float))
        if w.ndim != 1:
            raise ValidationError("posterior weights must be a vector")
        if (w < -1e-12).any() or abs(float(w.sum()) - 1.0) > 1e-9:
            raise ValidationError(
                f"weights must be a distribution, got sum {float(w.sum())!r}")
        object.__setattr__(self, "weights", w)
        w.setflags(write=False)


def _table(prior: JointPrior,
           table: ConditionalTable | None) -> ConditionalTable:
    return marginals_and_conditionals(prior) if table is None else table


def posterior_e_given_s(prior: JointPrior, scheme: SignalingScheme, s: str,
                        table: ConditionalTable | None = None
                        ) -> PosteriorDistribution:
    """Pr(e|s) = sum_a mu(e|a) pi(s,a) / sum_a pi(s,a)."""
    t = _table(prior, table)
    row = scheme.pi[scheme.signal_index(s)]
    mass = float(row.sum())
    if mass <= 0.0:
        raise ZeroProbabilitySignal(f"signal {s!r} is never sent")
    active = row > 0.0
    numer = row[active] @ np.nan_to_num(t.e_given_a[active])
    return PosteriorDistribution(SupportKind.OVER_E, numer / mass)


def posterior_e_given_sb(prior: JointPrior, scheme: SignalingScheme, s: str,
                         b: int,
                         table: ConditionalTable | None = None
                         ) -> PosteriorDistribution:
    """Pr(e|s,b) = sum_a mu(e|a,b) pi(s,a) mu(b|a) / sum_a pi(s,a) mu(b|a)."""
    t = _table(prior, table)
    row = scheme.pi[scheme.signal_index(s)]
    weights = row * np.nan_to_num(t.b_given_a[:, b])
    mass = float(weights.sum())
    if mass <= 0.0:
        raise ZeroProbabilityPair(f"pair (s={s!r}, b={b}) has zero probability")
    active = weights > 0.0
    numer = weights[active] @ t.e_given_ab[active, b]
    return PosteriorDistribution(SupportKind.OVER_E, numer / mass)


def prob_b_given_s(prior: JointPrior, scheme: SignalingScheme, s: str,
                   table: ConditionalTable | None = None) -> np.ndarray:
    """Pr(b|s) = sum_a Pr(a|s) mu(b|a)."""
    t = _table(prior, table)
    row = scheme.pi[scheme.signal_index(s)]
    mass = float(row.sum())
    if mass <= 0.0:
        raise ZeroProbabilitySignal(f"signal {s!r} is never sent")
    active = row > 0.0
    return (row[active] / mass) @ np.nan_to_num(t.b_given_a[active])


def _scheme_terms(prior: JointPrior, score: ScoreSpec,
                  scheme: SignalingScheme,
                  table: ConditionalTable | None = None
                  ) -> tuple[float, float]:
    """(E_s G(p_s), E_{s,b} G(p_{s,b})); zero-probability signals dropped."""
    t = _table(prior, table)
    scheme.validate(prior)
    e_s = 0.0
    e_sb = 0.0
    for idx, label in enumerate(scheme.signal_labels):
        row = scheme.pi[idx]
        mass = float(row.sum())
        if mass <= 0.0:
            continue
        p_s = posterior_e_given_s(prior, scheme, label, t)
        e_s += mass * scoring.eval_G(score, p_s)
        for b in range(prior.n_bob):
            pair_mass = float(row @ np.nan_to_num(t.b_given_a[:, b]))
            if pair_mass <= 0.0:
                continue
            p_sb = posterior_e_given_sb(prior, scheme, label, b, t)
            e_sb += pair_mass * scoring.eval_G(score, p_sb)
    return e_s, e_sb


def bob_utility_of_scheme(prior: JointPrior, score: ScoreSpec,
                          scheme: SignalingScheme,
                          table: ConditionalTable | None = None) -> float:
    """u_B = E_{s,b} G(p_{s,b}) - E_s G(p_s); nonnegative for convex G."""
    e_s, e_sb = _scheme_terms(prior, score, scheme, table)
    return e_sb - e_s


def sender_objective(prior: JointPrior, score: ScoreSpec,
                     scheme: SignalingScheme,
                     table: ConditionalTable | None = None) -> float:
    """Alice's commitment objective E_s G(p_s) - E_{s,b} G(p_{s,b}) = -u_B."""
    return -bob_utility_of_scheme(prior, score, scheme, table)


def bob_utility_from_wA(prior: JointPrior, score: ScoreSpec, w,
                        table: ConditionalTable | None = None) -> float:
    """u_B of the single signal inducing posterior w over A.

    Requires w absolutely continuous w.r.t. mu(a); mass on a zero-probability
    alice outcome is rejected rather than extrapolated.
    """
    t = _table(prior, table)
    wv = np.asarray(getattr(w, "weights", w), dtype=float)
    if wv.shape != (prior.n_alice,):
        raise ValidationError(f"posterior over A must have {prior.n_alice} entries")
    if np.any((wv > 1e-12) & ~t.defined_a):
        raise PreconditionViolated(
            "posterior places mass on an alice outcome with mu(a) = 0")
    active = (wv > 0.0) & t.defined_a
    total = -scoring.eval_G(score, wv[active] @ t.e_given_a[active])
    for b in range(prior.n_bob):
        lam = float(wv[active] @ t.b_given_a[active, b])
        if lam > 0.0:
            post = (wv[active] * t.b_given_a[active, b]) @ \
                np.nan_to_num(t.e_given_ab[active, b]) / lam
            total += lam * scoring.eval_G(score, post)
    return total


def bob_utility_from_vEB(score: ScoreSpec, v, n_events: int | None = None,
                         n_bob: int | None = None) -> float:
    """u_B as a function of the joint posterior v over E x B.

    ``v`` is either a matrix [e, b] or a flat e-major vector with
    (n_events, n_bob) supplied.  Terms with lambda_b = 0 contribute zero.
    """
    vv = np.asarray(getattr(v, "weights", v), dtype=float)
    if vv.ndim == 1:
        if n_events is None or n_bob is None:
            raise ValidationError("flat v needs n_events and n_bob")
        vv = vv.reshape(n_events, n_bob)
    if abs(float(vv.sum()) - 1.0) > 1e-9 or (vv < -1e-12).any():
        raise ValidationError("v must be a distribution over E x B")
    total = -scoring.eval_G(score, vv.sum(axis=1))
    lam = vv.sum(axis=0)
    for b in range(vv.shape[1]):
        if lam[b] > 0.0:
            total += lam[b] * scoring.eval_G(score, vv[:, b] / lam[b])
    return total


def alice_total_utility(prior: JointPrior, score: ScoreSpec,
                        scheme: SignalingScheme,
                        table: ConditionalTable | None = None) -> float:
    """Alice's two trades: R(p_S)-R(p) plus R(p_{A,B})-R(p_{S,B}).

    Computed term by term from the round structure, so the constant-sum
    identity alice + bob = V is a genuine numerical check.
    """
    t = _table(prior, table)
    e_s, e_sb = _scheme_terms(prior, score, scheme, t)
    g_prior = scoring.eval_G(score, t.mu_e)
    e_ab = 0.0
    for a in range(prior.n_alice):
        for b in range(prior.n_bob):
            mass = t.mu_ab[a, b]
            if mass > 0.0:
                e_ab += mass * scoring.eval_G(score, t.e_given_ab[a, b])
    return (e_s - g_prior) + (e_ab - e_sb)


def induced_posterior_over_A(scheme: SignalingScheme, s: str) -> np.ndarray:
    """Pr(a|s) for a positive-probability signal."""
    row = scheme.pi[scheme.signal_index(s)]
    mass = float(row.sum())
    if mass <= 0.0:
        raise ZeroProbabilitySignal(f"signal {s!r} is never sent")
    return row / mass


def induced_posterior_over_EB(prior: JointPrior, scheme: SignalingScheme,
                              s: str,
                              table: ConditionalTable | None = None
                              ) -> np.ndarray:
    """Pr(e, b|s) as a matrix [e, b]."""
    t = _table(prior, table)
    row = scheme.pi[scheme.signal_index(s)]
    mass = float(row.sum())
    if mass <= 0.0:
        raise ZeroProbabilitySignal(f"signal {s!r} is never sent")
    active = row > 0.0
    v = np.einsum("a,aeb->eb", row[active], np.nan_to_num(t.eb_given_a[active]))
    return v / mass
