"""Delta-optimal solvers over K-uniform posterior grids.

Two regimes: a grid over the simplex of posteriors on A (practical when
|A| is small) and a grid over the joint simplex on E x B (practical when
|E| and |B| are small).  Both pick epsilon from the target suboptimality
delta via the u_B continuity bound, size the grid so an empirical K-sample
approximation of any posterior stays within epsilon with probability
1 - epsilon, and solve one LP over the grid weights.

When the delta-mandated K exceeds the configured caps, the solver runs at
the capped K and reports the achievable (weaker) guarantee in diagnostics
instead of refusing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels, belief, scoring
from .core import Classification, JointPrior, Method, SignalingScheme, \
    SolveReport, marginals_and_conditionals, total_value
from .errors import BayesPlausibilityViolated, SizeCapExceeded, ValidationError
from .lp import LinearProgram, LPStatus, solve_lp
from .scoring import ScoreKind, ScoreSpec

DEFAULT_GRID_CAP = 5_000_000
DEFAULT_CELL_CAP = 25_000_000
LOG_CLIP = 1e-9
EPS_CEILING = 0.49  # grid_size_K needs eps < 1; beyond this the grid is tiny anyway


@dataclass(frozen=True)
class GridParameters:
    delta: float
    epsilon: float
    K: int
    d: int


def epsilon_for_delta(delta: float, n_bob: int, L: float, alpha: float,
                      beta: float) -> float:
    """Posterior-perturbation radius that keeps u_B within delta.

    beta < 1: min of the two branch values 0.5*(delta/(6|B|L))^(1/beta) and
    0.5*(delta/(6 alpha))^(1/(beta(1-beta))).  At beta = 1 the second
    exponent diverges; the branch is dropped and its alpha term absorbed by
    inflating the first denominator to 6|B|L + 6 alpha, which re-derives
    the same continuity bound for Lipschitz G.
    """
    if delta <= 0 or L <= 0 or alpha <= 0 or not (0 < beta <= 1) or n_bob < 1:
        raise ValidationError("need delta, L, alpha > 0, beta in (0,1], |B| >= 1")
    if beta == 1.0:
        return 0.5 * delta / (6.0 * n_bob * L + 6.0 * alpha)
    first = 0.5 * (delta / (6.0 * n_bob * L)) ** (1.0 / beta)
    second = 0.5 * (delta / (6.0 * alpha)) ** (1.0 / (beta * (1.0 - beta)))
    return min(first, second)


def grid_size_K(d: int, epsilon: float) -> int:
    """K >= log(2d/eps) d^2 / (2 eps^2), the K-sample approximation bound."""
    if d < 2:
        raise ValidationError("grid dimension must be at least 2")
    if not (0 < epsilon < 1):
        raise ValidationError("epsilon must lie in (0, 1)")
    return int(math.ceil(math.log(2.0 * d / epsilon) * d * d /
                         (2.0 * epsilon * epsilon)))


def count_k_uniform(d: int, k: int) -> int:
    return math.comb(k + d - 1, d - 1)


def enumerate_k_uniform(d: int, k: int,
                        cap_points: int = DEFAULT_GRID_CAP) -> np.ndarray:
    """All K-uniform points of the (d-1)-simplex, lexicographic, as rows."""
    if d < 1 or k < 0:
        raise ValidationError("need d >= 1 and K >= 0")
    count = count_k_uniform(d, k)
    if count > cap_points:
        raise SizeCapExceeded(
            f"K-uniform grid has {count} points, cap is {cap_points}",
            required=count)
    return _kernels.compositions(k, d).astype(float) / max(k, 1)


def sample_k_uniform(w: np.ndarray, k: int, n_samples: int,
                     rng: np.random.Generator) -> np.ndarray:
    """Empirical distributions of K draws from w (each row is K-uniform)."""
    w = np.asarray(w, dtype=float)
    return rng.multinomial(k, w, size=n_samples) / k


def _max_k_under(d: int, limit_points: int) -> int:
    if d == 2:
        return max(int(limit_points) - 1, 1)
    k = 1
    while count_k_uniform(d, k + 1) <= limit_points:
        k += 1
    return k


def _epsilon_for_grid(d: int, k: int) -> float:
    """Smallest epsilon whose grid_size_K fits within k (bisection).

    grid_size_K is decreasing in epsilon, so the achievable set is an
    up-interval; its left endpoint is the best guarantee k supports.
    """
    lo, hi = 1e-9, EPS_CEILING
    if grid_size_K(d, hi) > k:
        return hi  # even the coarsest grid is out of reach
    if grid_size_K(d, lo) <= k:
        return lo
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if grid_size_K(d, mid) <= k:
            hi = mid
        else:
            lo = mid
    return hi


def _delta_for_epsilon(eps: float, n_bob: int, L: float, alpha: float,
                       beta: float) -> float:
    """Smallest delta whose epsilon_for_delta reaches eps (inverse formula)."""
    if beta == 1.0:
        return 2.0 * eps * (6.0 * n_bob * L + 6.0 * alpha)
    return max(6.0 * n_bob * L * (2.0 * eps) ** beta,
               6.0 * alpha * (2.0 * eps) ** (beta * (1.0 - beta)))


def _resolve_grid(prior: JointPrior, score: ScoreSpec, delta: float, d: int,
                  grid_k: int | None, cap_points: int, max_lp_points: int
                  ) -> tuple[GridParameters, dict]:
    ne = prior.n_events
    alpha, beta, _ = score.resolved_holder(ne)
    L = score.resolved_bound(ne)
    eps = epsilon_for_delta(delta, prior.n_bob, L, alpha, beta)
    eps_used = min(eps, EPS_CEILING)
    k_target = grid_size_K(d, eps_used) if d >= 2 else 0
    if grid_k is not None:
        k = grid_k
        if count_k_uniform(d, k) > cap_points:
            raise SizeCapExceeded(f"grid_k={k} exceeds the point cap",
                                  required=count_k_uniform(d, k))
    else:
        k = max(min(k_target, _max_k_under(d, min(cap_points, max_lp_points))), 1)
    capped = k < k_target
    eps_eff = _epsilon_for_grid(d, k) if (capped and k >= 1) else eps_used
    guarantee = 4.0 * L * eps_eff + \
        (_delta_for_epsilon(eps_eff, prior.n_bob, L, alpha, beta)
         if capped else delta)
    diag = {
        "delta": delta,
        "epsilon": eps,
        "epsilon_effective": eps_eff,
        "K": k,
        "K_target": k_target,
        "grid_capped": capped,
        "guarantee": guarantee,
        "alpha": alpha,
        "beta": beta,
        "L": L,
    }
    return GridParameters(delta, eps_used, k, d), diag


def scheme_from_posteriors(prior: JointPrior, posteriors,
                           atol: float = 1e-8) -> SignalingScheme:
    """Turn a Bayes-plausible posterior decomposition into a scheme.

    ``posteriors`` is a sequence of (weight, posterior-over-A) pairs with
    weights summing to 1 and weighted posteriors averaging to mu(a);
    pi(s_j, a) = weight_j * w_j[a].
    """
    lams = np.array([float(p[0]) for p in posteriors])
    ws = np.array([np.asarray(getattr(p[1], "weights", p[1]), dtype=float)
                   for p in posteriors])
    if lams.size == 0 or ws.shape[1] != prior.n_alice:
        raise ValidationError("need posteriors over A with matching dimension")
    if (lams < -1e-12).any() or abs(float(lams.sum()) - 1.0) > atol:
        raise BayesPlausibilityViolated(
            f"weights sum to {float(lams.sum())!r}, not 1",
            residual=np.array([float(lams.sum()) - 1.0]))
    resid = lams @ ws - prior.marginal_alice()
    if np.abs(resid).max() > atol:
        raise BayesPlausibilityViolated(
            f"posterior mean misses the prior marginal by "
            f"{float(np.abs(resid).max())!r}", residual=resid)
    labels = tuple(f"w{j}" for j in range(lams.size))
    return SignalingScheme(labels, lams[:, None] * ws)


def fptas_a_const(prior: JointPrior, score: ScoreSpec, delta: float,
                  grid_k: int | None = None,
                  cap_grid_points: int = DEFAULT_GRID_CAP,
                  cell_cap: int = DEFAULT_CELL_CAP) -> SolveReport:
    """Minimize Bob's utility over schemes with K-uniform posteriors on A."""
    na = prior.n_alice
    table = marginals_and_conditionals(prior).zero_filled()
    if na == 1:
        scheme = SignalingScheme(("w0",), prior.marginal_alice()[None, :])
        bob = belief.bob_utility_of_scheme(prior, score, scheme)
        return SolveReport(scheme, -bob, bob, total_value(prior, score),
                           Classification.UNCLASSIFIED, Method.FPTAS_A,
                           {"K": 0, "grid_points": 1, "delta": delta})
    params, diag = _resolve_grid(prior, score, delta, na, grid_k,
                                 cap_grid_points, cell_cap // (na + 2))
    grid = enumerate_k_uniform(na, params.K, cap_grid_points)
    clip = LOG_CLIP if score.kind is ScoreKind.LOG else 0.0
    pr, pb = score.kernel_pieces(prior.n_events)
    ub = _kernels.ub_grid_wa(grid, table.b_given_a, table.e_given_ab,
                             table.e_given_a, score.kind_code(), pr, pb, clip)

    n = grid.shape[0]
    a_eq = np.empty((na + 1, n))
    a_eq[:na] = grid.T
    a_eq[na] = 1.0
    b_eq = np.concatenate((table.mu_a, [1.0]))
    lp = LinearProgram(-ub, a_eq, b_eq, np.zeros((0, n)), np.zeros(0))
    sol = solve_lp(lp, cell_cap)
    if sol.status is not LPStatus.OPTIMAL:
        raise ValidationError(f"grid LP reported {sol.status.value}; the "
                              "prior marginal always lies in the grid hull")

    support = np.nonzero(sol.x > 1e-12)[0]
    scheme = scheme_from_posteriors(
        prior, [(sol.x[j], grid[j]) for j in support])
    bob = belief.bob_utility_of_scheme(prior, score, scheme)
    diag.update({
        "grid_points": n,
        "lp_objective": -sol.objective,
        "lp_iterations": sol.iterations,
        "lp_duality_gap": sol.duality_gap,
        "log_clip": clip,
    })
    return SolveReport(scheme, -bob, bob, total_value(prior, score),
                       Classification.UNCLASSIFIED, Method.FPTAS_A, diag)


def _eb_lp_points_cap(na: int, ne: int, nb: int, cell_cap: int) -> int:
    """Largest grid size whose eb-LP tableau fits the cell cap."""
    lo, hi = 1, 1
    while _eb_cells(na, ne, nb, hi) <= cell_cap:
        hi *= 2
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if _eb_cells(na, ne, nb, mid) <= cell_cap:
            lo = mid
        else:
            hi = mid - 1
    return lo


def _eb_cells(na: int, ne: int, nb: int, n: int) -> int:
    rows = na + 2 * ne * nb * n
    cols = n * na + 2 * ne * nb * n + na
    return (rows + 1) * (cols + 1)


def fptas_eb_const(prior: JointPrior, score: ScoreSpec, delta: float,
                   consistency_eta: float | None = None,
                   grid_k: int | None = None,
                   cap_grid_points: int = DEFAULT_GRID_CAP,
                   cell_cap: int = DEFAULT_CELL_CAP) -> SolveReport:
    """Minimize Bob's utility over K-uniform joint posteriors on E x B.

    Variables pi(v, a) >= 0 carry marginal constraints sum_v pi(v,a) = mu(a)
    and eta-relaxed per-grid-point achievability constraints
    |sum_a (mu(e,b|a) - v_eb) pi(v,a)| <= eta * sum_a pi(v,a): Alice can only
    induce posteriors in the convex hull of {mu(.,.|a)}_a, which the plain
    Bayes constraint does not enforce.  Infeasibility (possible only for
    user-supplied eta below the rounding slack) retries with eta doubled,
    up to 4 times.
    """
    ne, na, nb = prior.n_events, prior.n_alice, prior.n_bob
    d = ne * nb
    table = marginals_and_conditionals(prior).zero_filled()
    params, diag = _resolve_grid(prior, score, delta, d, grid_k,
                                 cap_grid_points,
                                 _eb_lp_points_cap(na, ne, nb, cell_cap))
    k = max(params.K, 1)
    grid = enumerate_k_uniform(d, k, cap_grid_points)
    n = grid.shape[0]
    clip = LOG_CLIP if score.kind is ScoreKind.LOG else 0.0
    pr, pb = score.kernel_pieces(ne)
    ub = _kernels.ub_grid_veb(grid, ne, nb, score.kind_code(), pr, pb, clip)

    # mu(e,b|a) flattened e-major to match grid columns
    meb_a = np.transpose(table.eb_given_a, (1, 2, 0)).reshape(d, na)
    n_vars = n * na
    objective = np.repeat(-ub, na)
    a_eq = np.zeros((na, n_vars))
    for a in range(na):
        a_eq[a, a::na] = 1.0

    eta = consistency_eta if consistency_eta is not None else 2.0 / k
    retries = 0
    while True:
        a_ub = np.zeros((2 * d * n, n_vars))
        for v in range(n):
            dev = meb_a - grid[v][:, None]          # (d, na)
            a_ub[2 * d * v:2 * d * v + d, v * na:(v + 1) * na] = dev - eta
            a_ub[2 * d * v + d:2 * d * (v + 1), v * na:(v + 1) * na] = -dev - eta
        lp = LinearProgram(objective, a_eq, table.mu_a, a_ub,
                           np.zeros(2 * d * n))
        sol = solve_lp(lp, cell_cap)
        if sol.status is LPStatus.OPTIMAL:
            break
        if retries >= 4:
            raise ValidationError(
                f"achievability LP stayed {sol.status.value} after "
                f"{retries} eta doublings")
        eta *= 2.0
        retries += 1

    x = sol.x.reshape(n, na)
    mass = x.sum(axis=1)
    keep = np.nonzero(mass > 1e-12)[0]
    scheme = SignalingScheme(tuple(f"v{int(j)}" for j in keep), x[keep])
    bob = belief.bob_utility_of_scheme(prior, score, scheme)
    alpha, beta, L = diag["alpha"], diag["beta"], diag["L"]
    slack = eta * d
    if beta == 1.0:
        eta_term = (3 * nb * L + 3 * alpha) * slack
    else:
        eta_term = 3 * nb * L * slack + 3 * alpha * slack ** (1.0 - beta)
    diag.update({
        "grid_points": n,
        "eta": eta,
        "eta_retries": retries,
        "lp_objective": -sol.objective,
        "lp_iterations": sol.iterations,
        "lp_duality_gap": sol.duality_gap,
        "log_clip": clip,
        "guarantee": diag["guarantee"] + eta_term,
    })
    return SolveReport(scheme, -bob, bob, total_value(prior, score),
                       Classification.UNCLASSIFIED, Method.FPTAS_EB, diag)
