############################################################################
#  Copyright 2026 regretforge contributors.
#
#  Licensed under the Apache License, Version 2.0 (the "License").
#  You may not use this file except in compliance with the License.
#  You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
#  Unless required by applicable law or agreed to in writing, software
#  distributed under the License is distributed on an "AS IS" BASIS,
#  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#  See the License for the specific language governing permissions and
#  limitations under the License.
############################################################################
"""Small deterministic optimization routines shared by the solvers.

:func:`solve_lp` is a dense two-phase simplex with Bland's rule. One-variable programs, which
is what every binary-support implementation problem reduces to, skip the tableau and intersect
intervals directly. :func:`minimize_1d` is a golden-section search that also probes caller
supplied candidates and both endpoints, so it does not rely on unimodality.
"""

from __future__ import annotations

import logging
import math
import sys
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

if sys.version_info >= (3, 8):
    from typing import Literal
else:
    from typing_extensions import Literal

__all__ = ["LinearProgram", "LPResult", "solve_lp", "minimize_1d", "FEASIBILITY_TOL"]

logger = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-9
_PIVOT_TOL = 1e-12

Sense = Literal["<=", ">=", "=="]
LPStatus = Literal["optimal", "infeasible", "unbounded"]


@dataclass
class LinearProgram:
    """A linear program ``objective @ x`` over rows ``rows @ x (sense) rhs``.

    Args:
        objective: Coefficients of the objective, one per variable.
        rows: Constraint matrix with one row per constraint. May have zero rows.
        senses: One of ``"<="``, ``">="`` or ``"=="`` per row.
        rhs: Right-hand sides.
        lower: Finite lower bound per variable.
        upper: Upper bound per variable, ``inf`` allowed.
    """

    objective: np.ndarray
    rows: np.ndarray
    senses: Sequence[Sense]
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        self.objective = np.asarray(self.objective, dtype=float).reshape(-1)
        n = self.objective.size
        if n == 0:
            raise ValueError("A linear program needs at least one variable")
        self.rows = np.asarray(self.rows, dtype=float).reshape(-1, n)
        self.rhs = np.asarray(self.rhs, dtype=float).reshape(-1)
        self.senses = tuple(self.senses)
        self.lower = np.broadcast_to(np.asarray(self.lower, dtype=float), (n,)).copy()
        if self.upper is None:
            self.upper = np.full(n, np.inf)
        self.upper = np.broadcast_to(np.asarray(self.upper, dtype=float), (n,)).copy()
        m = self.rows.shape[0]
        if self.rhs.size != m or len(self.senses) != m:
            raise ValueError(
                f"Got {m} rows, {self.rhs.size} right-hand sides and {len(self.senses)} senses"
            )
        bad = [s for s in self.senses if s not in ("<=", ">=", "==")]
        if bad:
            raise ValueError(f"Unknown constraint sense {bad[0]!r}")
        if not np.all(np.isfinite(self.lower)):
            raise ValueError("Lower bounds must be finite")
        if np.any(self.lower > self.upper):
            raise ValueError("Every variable needs lower <= upper")

    @property
    def n_vars(self) -> int:
        return int(self.objective.size)


@dataclass(frozen=True)
class LPResult:
    status: LPStatus
    x: Optional[np.ndarray]
    value: float

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _as_upper_rows(
    rows: np.ndarray, senses: Sequence[Sense], rhs: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Rewrite every row as ``a @ x <= b``."""
    a_parts: List[np.ndarray] = []
    b_parts: List[np.ndarray] = []
    for sense, sign in (("<=", 1.0), (">=", -1.0)):
        mask = np.array([s == sense for s in senses], dtype=bool)
        a_parts.append(sign * rows[mask])
        b_parts.append(sign * rhs[mask])
    eq = np.array([s == "==" for s in senses], dtype=bool)
    a_parts += [rows[eq], -rows[eq]]
    b_parts += [rhs[eq], -rhs[eq]]
    return np.concatenate(a_parts), np.concatenate(b_parts)


def _solve_interval(lp: LinearProgram, c: float, tol: float) -> Tuple[LPStatus, Optional[float]]:
    a_le, b_le = _as_upper_rows(lp.rows, lp.senses, lp.rhs)
    a = a_le[:, 0]
    lo, hi = float(lp.lower[0]), float(lp.upper[0])
    zero = a == 0
    if np.any(zero & (b_le < -tol)):
        return "infeasible", None
    pos, neg = a > 0, a < 0
    hi_eff = min(hi, float(np.min(b_le[pos] / a[pos]))) if pos.any() else hi
    lo_eff = max(lo, float(np.max(b_le[neg] / a[neg]))) if neg.any() else lo
    if lo_eff > hi_eff:
        x = 0.5 * (lo_eff + hi_eff)
        residual = float(np.max(a * x - b_le)) if a.size else 0.0
        if residual <= tol and lo - tol <= x <= hi + tol:
            return "optimal", min(max(x, lo), hi)
        return "infeasible", None
    if c >= 0:
        return "optimal", lo_eff
    if math.isinf(hi_eff):
        return "unbounded", None
    return "optimal", hi_eff


class _Tableau:
    """Canonical-form simplex tableau ``T z = b`` with an explicit basis."""

    def __init__(self, T: np.ndarray, b: np.ndarray, basis: List[int]):
        self.T = T
        self.b = b
        self.basis = basis
        self.iterations = 0

    def pivot(self, row: int, col: int) -> None:
        self.b[row] /= self.T[row, col]
        self.T[row] /= self.T[row, col]
        factors = self.T[:, col].copy()
        factors[row] = 0.0
        self.T -= np.outer(factors, self.T[row])
        self.b -= factors * self.b[row]
        self.basis[row] = col

    def run(self, cost: np.ndarray, allowed: np.ndarray, max_iter: int) -> bool:
        """Minimize ``cost @ z`` with Bland's rule. Returns False if unbounded."""
        while True:
            if self.iterations >= max_iter:
                raise RuntimeError(f"Simplex did not terminate within {max_iter} pivots")
            reduced = cost - cost[self.basis] @ self.T
            entering = np.flatnonzero(allowed & (reduced < -_PIVOT_TOL))
            if entering.size == 0:
                return True
            col = int(entering[0])
            column = self.T[:, col]
            candidates = np.flatnonzero(column > _PIVOT_TOL)
            if candidates.size == 0:
                return False
            ratios = np.maximum(self.b[candidates], 0.0) / column[candidates]
            best = ratios.min()
            ties = candidates[ratios <= best + _PIVOT_TOL]
            row = int(min(ties, key=lambda i: self.basis[i]))
            self.pivot(row, col)
            self.iterations += 1


def _solve_tableau(
    lp: LinearProgram, c: np.ndarray, tol: float
) -> Tuple[LPStatus, Optional[np.ndarray]]:
    n = lp.n_vars
    lo = lp.lower
    rows = [lp.rows]
    rhs = [lp.rhs - lp.rows @ lo]
    senses = list(lp.senses)
    finite_hi = np.flatnonzero(np.isfinite(lp.upper))
    if finite_hi.size:
        rows.append(np.eye(n)[finite_hi])
        rhs.append(lp.upper[finite_hi] - lo[finite_hi])
        senses += ["<="] * finite_hi.size
    A = np.concatenate(rows)
    b = np.concatenate(rhs)
    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0
    senses = [
        {"<=": ">=", ">=": "<="}.get(s, s) if f else s for s, f in zip(senses, flip)
    ]
    m = A.shape[0]
    if m == 0:
        if np.any(c < 0):
            return "unbounded", None
        return "optimal", lo.copy()

    n_slack = sum(s != "==" for s in senses)
    n_art = sum(s != "<=" for s in senses)
    width = n + n_slack + n_art
    T = np.zeros((m, width))
    T[:, :n] = A
    basis: List[int] = []
    slack = n
    art = n + n_slack
    for i, s in enumerate(senses):
        if s == "<=":
            T[i, slack] = 1.0
            basis.append(slack)
            slack += 1
            continue
        if s == ">=":
            T[i, slack] = -1.0
            slack += 1
        T[i, art] = 1.0
        basis.append(art)
        art += 1

    tab = _Tableau(T, b.copy(), basis)
    max_iter = 50 * (m + width) + 1000
    is_art = np.zeros(width, dtype=bool)
    is_art[n + n_slack :] = True
    if n_art:
        phase1 = is_art.astype(float)
        tab.run(phase1, np.ones(width, dtype=bool), max_iter)
        if float(phase1[tab.basis] @ tab.b) > tol:
            return "infeasible", None
        keep = []
        for i in range(m):
            if not is_art[tab.basis[i]]:
                keep.append(i)
                continue
            cols = np.flatnonzero(~is_art & (np.abs(tab.T[i]) > FEASIBILITY_TOL))
            if cols.size:
                tab.pivot(i, int(cols[0]))
                keep.append(i)
        if len(keep) < m:
            logger.debug("Dropping %d redundant rows after phase 1", m - len(keep))
            tab = _Tableau(tab.T[keep], tab.b[keep], [tab.basis[i] for i in keep])
            tab.iterations = 0

    cost = np.zeros(width)
    cost[:n] = c
    if not tab.run(cost, ~is_art, max_iter):
        return "unbounded", None
    z = np.zeros(width)
    z[tab.basis] = np.maximum(tab.b, 0.0)
    logger.debug("Simplex finished after %d pivots on %d rows", tab.iterations, m)
    # Round-off across pivots can overshoot a binding bound.
    return "optimal", np.clip(lo + z[:n], lo, lp.upper)


def solve_lp(
    lp: LinearProgram, sense: Literal["min", "max"] = "min", tol: float = FEASIBILITY_TOL
) -> LPResult:
    """Solve a small linear program exactly (up to floating point).

    Args:
        lp: The program.
        sense: ``"min"`` or ``"max"``.
        tol: Feasibility tolerance on constraint residuals.

    Returns:
        An :class:`LPResult`. Infeasible and unbounded programs are reported through
        ``status``; they never raise.
    """
    if sense not in ("min", "max"):
        raise ValueError(f"sense must be 'min' or 'max', got {sense!r}")
    c = lp.objective if sense == "min" else -lp.objective
    if lp.n_vars == 1:
        status, x1 = _solve_interval(lp, float(c[0]), tol)
        x = None if x1 is None else np.array([x1])
    else:
        status, x = _solve_tableau(lp, c, tol)
    if x is None:
        value = math.inf if status == "unbounded" else math.nan
        if sense == "min" and status == "unbounded":
            value = -math.inf
        return LPResult(status, None, value)
    return LPResult("optimal", x, float(lp.objective @ x))


def minimize_1d(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    candidates: Iterable[float] = (),
    max_iter: int = 500,
) -> Tuple[float, float]:
    """Minimize a scalar function on ``[lo, hi]``.

    Candidates inside the interval are evaluated first, then the golden-section result, then
    both endpoints. The first point with the strictly lowest value wins.

    Args:
        f: Function to minimize.
        lo: Left end of the interval.
        hi: Right end of the interval.
        tol: Width at which the golden-section bracket stops shrinking.
        candidates: Extra points to probe, typically analytic interior optima.
        max_iter: Cap on golden-section iterations.

    Returns:
        ``(xstar, fstar)``.
    """
    if not lo <= hi:
        raise ValueError(f"Need lo <= hi, got [{lo}, {hi}]")
    best: List[float] = []

    def consider(x: float) -> float:
        value = float(f(x))
        if math.isnan(value):
            raise ValueError(f"Objective returned NaN at {x!r}")
        if not best or value < best[1]:
            best[:] = [x, value]
        return value

    for x in candidates:
        if lo <= x <= hi:
            consider(float(x))

    ratio = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - ratio * (b - a)
    x2 = a + ratio * (b - a)
    f1, f2 = float(f(x1)), float(f(x2))
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if math.isnan(f1) or math.isnan(f2):
            raise ValueError("Objective returned NaN during the golden-section search")
        if f1 < f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - ratio * (b - a)
            f1 = float(f(x1))
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + ratio * (b - a)
            f2 = float(f(x2))
    consider(0.5 * (a + b))
    consider(lo)
    consider(hi)
    return best[0], best[1]
