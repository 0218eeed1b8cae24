"""Dense two-phase primal simplex over an explicit tableau.

Maximizes c.x subject to A_eq x = b_eq, A_ub x <= b_ub, x >= 0.  Pricing is
Dantzig's rule, switching permanently to Bland's rule after a run of
degenerate pivots; ties in the ratio test break toward the smallest basis
index.  Artificial columns stay in the tableau (barred from entering) so
dual values can be read off the final objective row.

The pivot loop itself lives in ``_kernels`` (numba or numpy path).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NumericalFailure, SizeCapExceeded, ValidationError

FEAS_TOL = 1e-9
DEGENERACY_LIMIT = 100
DEFAULT_CELL_CAP = 25_000_000


class LPStatus(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class LinearProgram:
    """max objective.x  s.t.  a_eq x = b_eq, a_ub x <= b_ub, x >= 0."""

    objective: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray
    a_ub: np.ndarray
    b_ub: np.ndarray

    def __post_init__(self):
        c = np.ascontiguousarray(np.asarray(self.objective, dtype=float).ravel())
        n = c.shape[0]
        arrays = {
            "objective": c,
            "a_eq": np.ascontiguousarray(np.asarray(self.a_eq, dtype=float).reshape(-1, n)),
            "b_eq": np.ascontiguousarray(np.asarray(self.b_eq, dtype=float).ravel()),
            "a_ub": np.ascontiguousarray(np.asarray(self.a_ub, dtype=float).reshape(-1, n)),
            "b_ub": np.ascontiguousarray(np.asarray(self.b_ub, dtype=float).ravel()),
        }
        if arrays["a_eq"].shape[0] != arrays["b_eq"].shape[0] or \
                arrays["a_ub"].shape[0] != arrays["b_ub"].shape[0]:
            raise ValidationError("constraint matrix and rhs sizes disagree")
        for name, arr in arrays.items():
            if arr.size and not np.isfinite(arr).all():
                raise ValidationError(f"{name} contains NaN or Inf")
            object.__setattr__(self, name, arr)
            arr.setflags(write=False)

    @property
    def n_vars(self) -> int:
        return self.objective.shape[0]

    @property
    def n_rows(self) -> int:
        return self.a_eq.shape[0] + self.a_ub.shape[0]


@dataclass(frozen=True)
class LPSolution:
    status: LPStatus
    x: np.ndarray | None
    objective: float | None
    dual_eq: np.ndarray | None
    dual_ub: np.ndarray | None
    iterations: int
    duality_gap: float | None = None
    comp_slack_residual: float | None = None
    feasibility_residual: float | None = None


def debug_dump(lp: LinearProgram) -> str:
    """Plain-text dump: one row per line, space-separated coefficients."""
    lines = ["objective " + " ".join(repr(v) for v in lp.objective)]
    for row, rhs in zip(lp.a_eq, lp.b_eq):
        lines.append(" ".join(repr(v) for v in row) + f" = {rhs!r}")
    for row, rhs in zip(lp.a_ub, lp.b_ub):
        lines.append(" ".join(repr(v) for v in row) + f" <= {rhs!r}")
    return "\n".join(lines)


def solve_lp(lp: LinearProgram, cell_cap: int = DEFAULT_CELL_CAP) -> LPSolution:
    """Solve to an optimal vertex, or report Infeasible/Unbounded.

    Raises NumericalFailure when pivoting exceeds 50*(rows+cols) iterations
    and SizeCapExceeded when the tableau would not fit the cell cap.
    """
    n = lp.n_vars
    m_ub = lp.a_ub.shape[0]
    m_eq = lp.a_eq.shape[0]
    m = m_ub + m_eq

    # Standard form: ub rows get slacks; rows with negative rhs are negated
    # (turning the slack coefficient to -1) and, like eq rows, get artificials.
    rhs = np.concatenate((lp.b_ub, lp.b_eq))
    neg = rhs < 0.0
    rows = np.vstack((lp.a_ub, lp.a_eq)) if m else np.zeros((0, n))
    rows = np.where(neg[:, None], -rows, rows)
    rhs = np.abs(rhs)
    slack_sign = np.where(neg[:m_ub], -1.0, 1.0)
    needs_art = np.concatenate((neg[:m_ub], np.ones(m_eq, dtype=bool)))
    art_rows = np.nonzero(needs_art)[0]
    n_art = art_rows.size

    n_total = n + m_ub + n_art
    cells = (m + 1) * (n_total + 1)
    if cells > cell_cap:
        raise SizeCapExceeded(
            f"tableau needs {cells} cells, cap is {cell_cap}", required=cells)

    t = np.zeros((m + 1, n_total + 1))
    t[:m, :n] = rows
    for i in range(m_ub):
        t[i, n + i] = slack_sign[i]
    for j, i in enumerate(art_rows):
        t[i, n + m_ub + j] = 1.0
    t[:m, n_total] = rhs

    basis = np.empty(m, dtype=np.int64)
    for i in range(m):
        if needs_art[i]:
            basis[i] = n + m_ub + int(np.searchsorted(art_rows, i))
        else:
            basis[i] = n + i

    allowed = np.ones(n_total, dtype=np.bool_)
    allowed[n + m_ub:] = False  # artificials never enter
    max_iter = 50 * (m + n_total)
    total_iters = 0

    if n_art:
        # phase 1: maximize -(sum of artificials); reduced costs from the
        # artificial rows themselves
        t[m, :] = -t[art_rows, :].sum(axis=0)
        t[m, n + m_ub:n_total] = 0.0
        status, iters = _kernels.simplex_iterate(
            t, basis, allowed, FEAS_TOL, max_iter, DEGENERACY_LIMIT)
        total_iters += iters
        if status == _kernels._STATUS_ITERLIMIT:
            raise NumericalFailure(f"phase 1 exceeded {max_iter} pivots")
        infeas = -t[m, n_total]
        if infeas > 1e-7 * max(1.0, float(np.abs(rhs).max(initial=0.0))):
            return LPSolution(LPStatus.INFEASIBLE, None, None, None, None,
                              total_iters)
        # drive remaining zero-level artificials out of the basis
        for i in range(m):
            if basis[i] >= n + m_ub:
                row = t[i, :n + m_ub]
                ok = np.nonzero(np.abs(row) > 1e-9)[0]
                if ok.size:
                    _pivot(t, basis, i, int(ok[0]))
                # else: redundant row; artificial stays basic at level zero

    # phase 2 objective row rebuilt from scratch against the current basis
    c_full = np.zeros(n_total + 1)
    c_full[:n] = lp.objective
    t[m, :] = -c_full
    for i in range(m):
        cb = c_full[basis[i]]
        if cb != 0.0:
            t[m, :] += cb * t[i, :]
    status, iters = _kernels.simplex_iterate(
        t, basis, allowed, FEAS_TOL, max_iter, DEGENERACY_LIMIT)
    total_iters += iters
    if status == _kernels._STATUS_ITERLIMIT:
        raise NumericalFailure(f"phase 2 exceeded {max_iter} pivots")
    if status == _kernels._STATUS_UNBOUNDED:
        return LPSolution(LPStatus.UNBOUNDED, None, None, None, None,
                          total_iters)

    x = np.zeros(n_total)
    x[basis] = t[:m, n_total]
    xs = x[:n].copy()
    objective = float(lp.objective @ xs)

    # duals from the objective-row entries of slack/artificial columns
    dual = np.empty(m)
    for i in range(m_ub):
        dual[i] = t[m, n + i] * slack_sign[i]
    for j, i in enumerate(art_rows):
        dual[i] = t[m, n + m_ub + j]
    dual[neg] = -dual[neg]
    dual_ub = dual[:m_ub].copy()
    dual_eq = dual[m_ub:].copy()

    resid = 0.0
    if m_eq:
        resid = max(resid, float(np.abs(lp.a_eq @ xs - lp.b_eq).max()))
    slack_ub = np.zeros(0)
    if m_ub:
        slack_ub = lp.b_ub - lp.a_ub @ xs
        resid = max(resid, float(max(0.0, -slack_ub.min())))
    resid = max(resid, float(max(0.0, -xs.min(initial=0.0))))
    reduced = (dual_ub @ lp.a_ub if m_ub else 0.0) + \
        (dual_eq @ lp.a_eq if m_eq else 0.0) - lp.objective
    comp = float(np.abs(xs * reduced).sum())
    if m_ub:
        comp += float(np.abs(dual_ub * slack_ub).sum())
    dual_obj = float((dual_ub @ lp.b_ub if m_ub else 0.0) +
                     (dual_eq @ lp.b_eq if m_eq else 0.0))
    return LPSolution(LPStatus.OPTIMAL, xs, objective, dual_eq, dual_ub,
                      total_iters, duality_gap=abs(dual_obj - objective),
                      comp_slack_residual=comp, feasibility_residual=resid)


def _pivot(t: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    piv = t[row, col]
    t[row, :] /= piv
    factors = t[:, col].copy()
    factors[row] = 0.0
    t -= np.outer(factors, t[row, :])
    basis[row] = col
