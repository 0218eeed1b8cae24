"""Proper scoring rules and their convex expected-score functions G.

A strictly proper scoring rule R(report, outcome) is characterized by a
strictly convex G with G(w) = E_{e~w} R(w, e).  Built-in rules: quadratic
G(w) = ||w||_2^2, log G(w) = sum_e w_e ln w_e, spherical G(w) = ||w||_2.
A piecewise-linear G (max of affine pieces) corresponds one-to-one with a
finite decision problem, which is what the exact solver exploits.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import BoundaryTangent, ValidationError


class ScoreKind(str, enum.Enum):
    QUADRATIC = "quadratic"
    LOG = "log"
    SPHERICAL = "spherical"
    PIECEWISE = "piecewise"


_KIND_CODES = {
    ScoreKind.QUADRATIC: _kernels.KIND_QUADRATIC,
    ScoreKind.LOG: _kernels.KIND_LOG,
    ScoreKind.SPHERICAL: _kernels.KIND_SPHERICAL,
    ScoreKind.PIECEWISE: _kernels.KIND_PIECEWISE,
}


@dataclass(frozen=True)
class HolderParams:
    """Local Holder continuity data: |G(x)-G(y)| <= alpha*|x-y|_1^beta
    whenever |x-y|_1 <= locality_c."""

    alpha: float
    beta: float
    locality_c: float = 0.5

    def __post_init__(self):
        if not (self.alpha > 0 and 0 < self.beta <= 1 and 0 < self.locality_c < 1):
            raise ValidationError(
                f"holder parameters out of range: alpha={self.alpha}, "
                f"beta={self.beta}, c={self.locality_c}")


@dataclass(frozen=True)
class ScoreSpec:
    """A scoring rule, given by its expected-score function G."""

    kind: ScoreKind
    pieces_r: np.ndarray | None = None   # (k, |E|) slopes, piecewise only
    pieces_b: np.ndarray | None = None   # (k,) offsets, piecewise only
    holder: HolderParams | None = None
    bound_L: float | None = None

    def __post_init__(self):
        if self.kind is ScoreKind.PIECEWISE:
            if self.pieces_r is None or self.pieces_b is None:
                raise ValidationError("piecewise score requires pieces")
            r = np.ascontiguousarray(np.atleast_2d(np.asarray(self.pieces_r, dtype=float)))
            b = np.ascontiguousarray(np.asarray(self.pieces_b, dtype=float).ravel())
            if r.shape[0] != b.shape[0] or r.shape[0] < 1:
                raise ValidationError("piecewise score needs k >= 1 aligned pieces")
            if not (np.isfinite(r).all() and np.isfinite(b).all()):
                raise ValidationError("piecewise coefficients must be finite")
            object.__setattr__(self, "pieces_r", r)
            object.__setattr__(self, "pieces_b", b)
            r.setflags(write=False)
            b.setflags(write=False)
        elif self.pieces_r is not None or self.pieces_b is not None:
            raise ValidationError(f"{self.kind.value} score does not take pieces")
        if self.bound_L is not None and not self.bound_L > 0:
            raise ValidationError("bound_L must be positive")

    @property
    def k_pieces(self) -> int:
        return 0 if self.pieces_r is None else self.pieces_r.shape[0]

    def kind_code(self) -> int:
        return _KIND_CODES[self.kind]

    def kernel_pieces(self, n_events: int) -> tuple[np.ndarray, np.ndarray]:
        """(pr, pb) arrays for the numeric kernels; empty for built-ins."""
        if self.kind is ScoreKind.PIECEWISE:
            return self.pieces_r, self.pieces_b
        return np.zeros((0, n_events)), np.zeros(0)

    def duplicate_piece_indices(self) -> list[tuple[int, int]]:
        """Pairs (i, j), i < j, of identical pieces (permitted but flagged)."""
        if self.kind is not ScoreKind.PIECEWISE:
            return []
        dupes = []
        for i in range(self.k_pieces):
            for j in range(i + 1, self.k_pieces):
                if (self.pieces_r[i] == self.pieces_r[j]).all() and \
                        self.pieces_b[i] == self.pieces_b[j]:
                    dupes.append((i, j))
        return dupes

    def resolved_holder(self, n_events: int) -> tuple[float, float, float]:
        """(alpha, beta, c), user-supplied or built-in default.

        Spherical carries no usable default and must be user-supplied.
        """
        if self.holder is not None:
            h = self.holder
            return h.alpha, h.beta, h.locality_c
        if self.kind is ScoreKind.QUADRATIC:
            return 2.0, 1.0, 0.5
        if self.kind is ScoreKind.LOG:
            # x*ln(x) is 0.6-nice (max_t t^0.4 ln(1/t) = 2.5/e < 1), so the
            # niceness route gives (n^0.4, 0.6) on the whole simplex.
            return float(n_events) ** 0.4, 0.6, 0.5
        if self.kind is ScoreKind.PIECEWISE:
            alpha = float(np.abs(self.pieces_r).max())
            return max(alpha, 1e-12), 1.0, 0.5
        raise ValidationError(
            "spherical score needs user-supplied holder parameters")

    def resolved_bound(self, n_events: int) -> float:
        """|G| bound L, user-supplied or built-in default."""
        if self.bound_L is not None:
            return self.bound_L
        if self.kind is ScoreKind.QUADRATIC:
            return 1.0
        if self.kind is ScoreKind.LOG:
            return math.log(n_events)
        if self.kind is ScoreKind.SPHERICAL:
            return 1.0
        # each piece is a convex combination over e of r_i[e] + b_i
        return float(np.abs(self.pieces_r + self.pieces_b[:, None]).max())


def quadratic_score(holder: HolderParams | None = None,
                    bound_L: float | None = None) -> ScoreSpec:
    return ScoreSpec(ScoreKind.QUADRATIC, holder=holder, bound_L=bound_L)


def log_score(holder: HolderParams | None = None,
              bound_L: float | None = None) -> ScoreSpec:
    return ScoreSpec(ScoreKind.LOG, holder=holder, bound_L=bound_L)


def spherical_score(holder: HolderParams | None = None,
                    bound_L: float | None = None) -> ScoreSpec:
    return ScoreSpec(ScoreKind.SPHERICAL, holder=holder, bound_L=bound_L)


def piecewise_score(pieces: list[tuple], holder: HolderParams | None = None,
                    bound_L: float | None = None) -> ScoreSpec:
    """Build a piecewise-linear G from (r, b) pairs, G(p) = max_i r_i.p + b_i."""
    r = np.array([np.asarray(p[0], dtype=float) for p in pieces])
    b = np.array([float(p[1]) for p in pieces])
    return ScoreSpec(ScoreKind.PIECEWISE, pieces_r=r, pieces_b=b,
                     holder=holder, bound_L=bound_L)


@dataclass(frozen=True)
class DecisionProblem:
    """Receiver utilities U[i][e]; max_i E_{e~p} U[i][e] reproduces G(p)."""

    utilities: np.ndarray

    def __post_init__(self):
        u = np.ascontiguousarray(np.atleast_2d(np.asarray(self.utilities, dtype=float)))
        object.__setattr__(self, "utilities", u)
        u.setflags(write=False)

    @property
    def n_actions(self) -> int:
        return self.utilities.shape[0]

    @property
    def n_events(self) -> int:
        return self.utilities.shape[1]

    def best_action(self, p: np.ndarray) -> int:
        """Utility-maximizing action at belief p; ties go to the lowest index."""
        return int(np.argmax(self.utilities @ np.asarray(p, dtype=float)))


def _weights(p) -> np.ndarray:
    return np.asarray(getattr(p, "weights", p), dtype=float)


def eval_G(score: ScoreSpec, p) -> float:
    """G(p).  For the log rule, boundary points use the limit 0*log 0 = 0."""
    w = _weights(p)
    pr, pb = score.kernel_pieces(w.shape[0])
    return float(_kernels.g_rows_np(w[None, :], score.kind_code(), pr, pb, 0.0)[0])


def grad_G(score: ScoreSpec, p) -> np.ndarray:
    """A (sub)gradient of G at p.

    Piecewise ties at piece boundaries resolve to the lowest piece index.
    """
    w = _weights(p)
    if score.kind is ScoreKind.QUADRATIC:
        return 2.0 * w
    if score.kind is ScoreKind.LOG:
        with np.errstate(divide="ignore"):
            return np.log(w) + 1.0
    if score.kind is ScoreKind.SPHERICAL:
        nrm = float(np.linalg.norm(w))
        if nrm == 0.0:
            raise ValidationError("spherical gradient undefined at the origin")
        return w / nrm
    i = int(np.argmax(score.pieces_r @ w + score.pieces_b))
    return score.pieces_r[i].copy()


def score_R(score: ScoreSpec, report, e: int) -> float:
    """Score R(report, e) of a forecast when outcome e is realized.

    Derived from G via the tangent form R(w, e) = G(w) + <grad G(w), d_e - w>.
    For the log rule with report[e] == 0 this returns -inf (the rule's own
    value), not an exception.
    """
    w = _weights(report)
    if score.kind is ScoreKind.QUADRATIC:
        return float(2.0 * w[e] - w @ w)
    if score.kind is ScoreKind.LOG:
        return float(np.log(w[e])) if w[e] > 0.0 else float("-inf")
    if score.kind is ScoreKind.SPHERICAL:
        return float(w[e] / np.linalg.norm(w))
    i = int(np.argmax(score.pieces_r @ w + score.pieces_b))
    return float(score.pieces_r[i, e] + score.pieces_b[i])


def expected_report_score(score: ScoreSpec, report, belief) -> float:
    """E_{e~belief} R(report, e); equals G(report) when belief == report."""
    w = _weights(report)
    q = _weights(belief)
    if score.kind is ScoreKind.LOG:
        if np.any((q > 0.0) & (w <= 0.0)):
            return float("-inf")
        mask = q > 0.0
        return float(np.sum(q[mask] * np.log(w[mask])))
    g = eval_G(score, w)
    return float(g + grad_G(score, w) @ (q - w))


def decision_problem_from_G(score: ScoreSpec) -> DecisionProblem:
    """U[i][e] = r_i[e] + b_i for a piecewise-linear G."""
    if score.kind is not ScoreKind.PIECEWISE:
        raise ValidationError("decision problems exist for piecewise G only")
    return DecisionProblem(score.pieces_r + score.pieces_b[:, None])


def linearize_smooth(score: ScoreSpec, tangent_points) -> ScoreSpec:
    """Lower-approximate a smooth G by the max of its tangent planes.

    The result matches G exactly at each tangent point and underestimates
    elsewhere.  Log tangents at boundary points raise BoundaryTangent.
    """
    if score.kind is ScoreKind.PIECEWISE:
        raise ValidationError("score is already piecewise-linear")
    pieces = []
    for p in tangent_points:
        w = _weights(p)
        if score.kind is ScoreKind.LOG and np.any(w <= 0.0):
            raise BoundaryTangent(
                f"log gradient diverges at tangent point {w.tolist()}")
        g = grad_G(score, w)
        pieces.append((g, eval_G(score, w) - float(g @ w)))
    if not pieces:
        raise ValidationError("at least one tangent point required")
    return piecewise_score(pieces, holder=score.holder, bound_L=score.bound_L)


def default_tangent_grid(score: ScoreSpec, n_events: int, k: int = 20) -> np.ndarray:
    """K-uniform tangent points for linearization (boundary dropped for log)."""
    grid = _kernels.compositions_np(k, n_events).astype(float) / k
    if score.kind is ScoreKind.LOG:
        grid = grid[(grid > 0.0).all(axis=1)]
    return grid


@dataclass(frozen=True)
class HolderCheck:
    passed: bool
    samples: int
    witness: dict | None = None


def check_holder(score: ScoreSpec, n_events: int | None = None,
                 sample_pairs: int = 1000, rng_seed: int = 0) -> HolderCheck:
    """Sample simplex pairs within the locality radius and test the bound.

    Returns a failing witness pair if |G(x)-G(y)| exceeds
    alpha*|x-y|_1^beta by more than 1e-9.
    """
    if n_events is None:
        if score.kind is not ScoreKind.PIECEWISE:
            raise ValidationError("n_events required for built-in kinds")
        n_events = score.pieces_r.shape[1]
    alpha, beta, c = score.resolved_holder(n_events)
    rng = np.random.default_rng(rng_seed)
    for _ in range(sample_pairs):
        x = rng.dirichlet(np.ones(n_events))
        y = rng.dirichlet(np.ones(n_events))
        dist = float(np.abs(x - y).sum())
        if dist > 0.0:
            # shrink y toward x so the pair lands inside the locality radius
            s = min(1.0, rng.uniform(0.0, 1.0) * c / dist)
            y = x + s * (y - x)
            dist = float(np.abs(x - y).sum())
        gap = abs(eval_G(score, x) - eval_G(score, y))
        if gap > alpha * dist ** beta + 1e-9:
            return HolderCheck(False, sample_pairs,
                               {"x": x, "y": y, "distance": dist, "gap": gap})
    return HolderCheck(True, sample_pairs)


def holder_from_niceness(lam: float, n: int) -> tuple[float, float]:
    """Holder constants (n^(1-lambda), lambda) implied by lambda-niceness."""
    if not (0 < lam <= 1):
        raise ValidationError("lambda must lie in (0, 1]")
    if n < 2:
        raise ValidationError("dimension must be at least 2")
    return float(n) ** (1.0 - lam), lam
