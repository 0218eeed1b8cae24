"""Brute-force oracle and cross-belief market simulator.

The oracle exhaustively searches schemes whose columns split mu(a) in
fixed fractions of a step grid, giving an independent check of the LP
solvers at small sizes.  The simulator evaluates the market when Bob's
model of Alice's scheme differs from what she actually plays, and verifies
the deviation inequality chain that makes the commitment optimum an
equilibrium of the underlying market.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels, belief, scoring
from .core import CheckReport, Classification, ConditionalTable, JointPrior, \
    Method, SignalingScheme, SolveReport, marginals_and_conditionals, \
    total_value
from .errors import PreconditionViolated, SizeCapExceeded, ValidationError
from .scoring import ScoreKind, ScoreSpec

DEFAULT_CANDIDATE_CAP = 10_000_000


def oracle_optimal(prior: JointPrior, score: ScoreSpec, grid_step: float = 0.02,
                   max_signals: int = 2,
                   cap_candidates: int = DEFAULT_CANDIDATE_CAP) -> SolveReport:
    """Exhaustive search over step-quantized schemes.

    Columns are pi(s, a) = f[s, a] * mu(a) with each fraction column f[:, a]
    a composition of 1 in multiples of grid_step.  The best scheme found is
    within the continuity modulus of one grid step of the true optimum
    (reported in diagnostics).
    """
    na, nb, ne = prior.n_alice, prior.n_bob, prior.n_events
    if na > 3 or max_signals > 3 or round(1.0 / grid_step) > 100:
        raise SizeCapExceeded(
            "oracle limits: |A| <= 3, max_signals <= 3, 1/grid_step <= 100")
    den = int(round(1.0 / grid_step))
    if abs(den * grid_step - 1.0) > 1e-9:
        raise ValidationError("grid_step must be the reciprocal of an integer")
    comps = _kernels.compositions(den, max_signals).astype(float) / den
    n_cand = comps.shape[0] ** na
    if n_cand > cap_candidates:
        raise SizeCapExceeded(
            f"oracle would scan {n_cand} candidates, cap is {cap_candidates}",
            required=n_cand)

    p = prior.p
    mu_ae = np.ascontiguousarray(p.sum(axis=2).T)          # (na, ne)
    mu_aeb = np.ascontiguousarray(np.transpose(p, (1, 0, 2)))  # (na, ne, nb)
    clip = 1e-9 if score.kind is ScoreKind.LOG else 0.0
    pr, pb = score.kernel_pieces(ne)
    best_val, best_idx = _kernels.oracle_scan(
        comps, na, 0, n_cand, mu_ae, mu_aeb, score.kind_code(), pr, pb, clip)

    digits = []
    q = best_idx
    for _ in range(na):
        digits.append(q % comps.shape[0])
        q //= comps.shape[0]
    frac = comps[digits].T                                  # (max_signals, na)
    pi = frac * prior.marginal_alice()[None, :]
    labels = tuple(f"s{j}" for j in range(max_signals))
    scheme = SignalingScheme(labels, pi).prune_zero_signals()

    bob = belief.bob_utility_of_scheme(prior, score, scheme)
    alpha, beta, _ = score.resolved_holder(ne)
    L = score.resolved_bound(ne)
    step_l1 = na * grid_step
    modulus = 3 * nb * L * step_l1 + 3 * alpha * step_l1 ** (1.0 - beta) \
        if beta < 1.0 else (3 * nb * L + 3 * alpha) * step_l1
    return SolveReport(
        scheme=scheme,
        sender_objective=-bob,
        bob_utility=bob,
        total_value_V=total_value(prior, score),
        classification=Classification.UNCLASSIFIED,
        method=Method.ORACLE,
        diagnostics={
            "candidates": n_cand,
            "grid_step": grid_step,
            "max_signals": max_signals,
            "scan_objective": best_val,
            "grid_modulus": modulus,
        },
    )


@dataclass(frozen=True)
class CrossBeliefPayoff:
    """Payoffs when Bob best-responds to a scheme Alice may not be using."""

    believed_scheme: SignalingScheme
    actual_scheme: SignalingScheme
    bob_utility: float
    alice_utility: float
    off_path_mass: float
    divergence_mass: float  # probability that Bob's report misses the truth


def bob_report(prior: JointPrior, believed: SignalingScheme, s: str, b: int,
               table: ConditionalTable | None = None
               ) -> tuple[belief.PosteriorDistribution, bool]:
    """Bob's round-2 report on seeing (s, b) under his believed scheme.

    On-path pairs Bayes-update the believed scheme; off-path signals fall
    back to the prior marginal over A, i.e. the report becomes Pr(e|b).
    Returns (posterior, off_path_flag).
    """
    t = marginals_and_conditionals(prior) if table is None else table
    if s in believed.signal_labels:
        row = believed.pi[believed.signal_index(s)]
        if float(row @ np.nan_to_num(t.b_given_a[:, b])) > 0.0:
            return belief.posterior_e_given_sb(prior, believed, s, b, t), False
    if t.mu_b[b] <= 0.0:
        raise ValidationError(f"bob outcome {b} has zero prior probability")
    post = t.mu_eb[:, b] / t.mu_b[b]
    return belief.PosteriorDistribution(belief.SupportKind.OVER_E, post), True


def cross_belief_utilities(prior: JointPrior, score: ScoreSpec,
                           believed: SignalingScheme,
                           actual: SignalingScheme) -> CrossBeliefPayoff:
    """Expected utilities when Alice draws from ``actual`` while Bob
    Bayes-updates against ``believed``.

    Alice predicts the true posterior of her realized signal at round 1 and
    p_{A,B} at round 3 (she learns Bob's outcome after his report).
    """
    t = marginals_and_conditionals(prior)
    believed.validate(prior)
    actual.validate(prior)
    bob = 0.0
    off_mass = 0.0
    diverged = 0.0
    e_s_term = 0.0
    for s in actual.signal_labels:
        row = actual.pi[actual.signal_index(s)]
        mass = float(row.sum())
        if mass <= 0.0:
            continue
        p_s = belief.posterior_e_given_s(prior, actual, s, t)
        e_s_term += mass * scoring.eval_G(score, p_s)
        for b in range(prior.n_bob):
            pair_mass = float(row @ np.nan_to_num(t.b_given_a[:, b]))
            if pair_mass <= 0.0:
                continue
            truth = belief.posterior_e_given_sb(prior, actual, s, b, t)
            report, off = bob_report(prior, believed, s, b, t)
            if off:
                off_mass += pair_mass
            if float(np.abs(report.weights - truth.weights).sum()) > 1e-9:
                diverged += pair_mass
            bob += pair_mass * scoring.expected_report_score(
                score, report, truth)
    bob -= e_s_term

    g_prior = scoring.eval_G(score, t.mu_e)
    e_ab = 0.0
    for a in range(prior.n_alice):
        for b in range(prior.n_bob):
            m = t.mu_ab[a, b]
            if m > 0.0:
                e_ab += m * scoring.eval_G(score, t.e_given_ab[a, b])
    # alice = [R(p_S) - R(p)] + [R(p_AB) - R(w_SB)]
    alice = (e_s_term - g_prior) + (e_ab - (bob + e_s_term))
    return CrossBeliefPayoff(believed, actual, bob, alice, off_mass, diverged)


def deviation_check(prior: JointPrior, score: ScoreSpec,
                    pi: SignalingScheme, pi_star: SignalingScheme,
                    tol: float = 1e-9) -> CheckReport:
    """Verify u_B(pi; pi*) <= u_B(pi*; pi*) <= u_B(pi; pi).

    The first inequality must be strict whenever Bob's cross-belief reports
    differ from the true posteriors on a set of mass > 1e-6.  Requires
    pi_star to be weakly better than pi for Alice.
    """
    if belief.sender_objective(prior, score, pi_star) < \
            belief.sender_objective(prior, score, pi) - 1e-12:
        raise PreconditionViolated(
            "pi_star must be weakly better than pi for Alice")
    cross = cross_belief_utilities(prior, score, pi, pi_star)
    star = cross_belief_utilities(prior, score, pi_star, pi_star)
    own = cross_belief_utilities(prior, score, pi, pi)
    chain = (cross.bob_utility <= star.bob_utility + tol and
             star.bob_utility <= own.bob_utility + tol)
    strict_needed = cross.divergence_mass > 1e-6
    strict_ok = (not strict_needed) or \
        (cross.bob_utility < star.bob_utility)
    details = {
        "u_b_cross": cross.bob_utility,
        "u_b_star": star.bob_utility,
        "u_b_own": own.bob_utility,
        "divergence_mass": cross.divergence_mass,
        "off_path_mass": cross.off_path_mass,
        "strict_required": strict_needed,
        "total_value_V": total_value(prior, score),
    }
    return CheckReport(passed=chain and strict_ok, details=details)
