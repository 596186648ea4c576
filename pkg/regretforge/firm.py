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
"""The firm's program: cheapest implementation of each action and equilibrium selection.

Payments at the positive grid levels are the LP variables (limited liability pins ``w(0) = 0``).
Incentive rows are generated lazily for grids with more than two levels: the program starts
from the participation row and the incentive rows of the mean-adjacent actions and adds the
most violated rows until the solution satisfies all of them.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from regretforge.kernel import LinearProgram, solve_lp
from regretforge.model import (
    EPS_TOL,
    Contract,
    EquilibriumOutcome,
    ImageConstrained,
    Interval,
    LinearFamily,
    Params,
    Regulation,
    Technology,
    check_technology,
)

__all__ = [
    "ImplementationResult",
    "worker_best_actions",
    "optimize_payment",
    "min_cost_implementation",
    "implementation_table",
    "firm_best_response",
    "worst_case_equilibrium",
    "IMAGE_LEVEL_LIMIT",
]

logger = logging.getLogger(__name__)

IMAGE_LEVEL_LIMIT = 3
_VIOLATION_TOL = 1e-11
_ROWS_PER_ROUND = 8
_SLOPE_TOL = 1e-12


@dataclass(frozen=True)
class ImplementationResult:
    """The contract implementing one action, or a record that none exists."""

    action_index: int
    contract: Optional[Contract]
    expected_payment: float
    feasible: bool

    @classmethod
    def infeasible(cls, idx: int) -> ImplementationResult:
        return cls(idx, None, math.nan, False)


def worker_best_actions(
    w: Contract, t: Technology, tol: float = EPS_TOL
) -> Tuple[float, List[int]]:
    """The worker's best surplus under ``w`` and every action attaining it within ``tol``."""
    if w.grid != t.grid:
        raise ValueError("Contract and technology are defined on different grids")
    surplus = t.probs @ w.payments - t.efforts
    best = float(surplus.max())
    return best, [int(i) for i in np.flatnonzero(surplus >= best - tol)]


def _check_index(t: Technology, idx: int) -> None:
    if not 0 <= idx < len(t):
        raise IndexError(f"Action index {idx} out of range for {len(t)} actions")


def _neighbours(means: np.ndarray, idx: int) -> List[int]:
    """The actions with the nearest mean below and above ``idx``."""
    others = np.delete(np.arange(means.size), idx)
    if others.size == 0:
        return []
    delta = means[others] - means[idx]
    picks = []
    below = others[delta <= 0]
    if below.size:
        picks.append(int(below[np.argmax(delta[delta <= 0])]))
    above = others[delta > 0]
    if above.size:
        picks.append(int(above[np.argmin(delta[delta > 0])]))
    return picks


def optimize_payment(
    t: Technology,
    idx: int,
    lower: Sequence[float],
    upper: Sequence[float],
    sense: str = "min",
    cap: Optional[float] = None,
) -> Optional[np.ndarray]:
    """Optimize the expected payment to action ``idx`` over a box of payment schedules.

    The schedule must make ``idx`` a best response of the worker (exactly) and give the worker
    a nonnegative surplus. ``cap`` bounds the expected payment from above, which is how the
    firm's participation enters the regulator's program.

    Args:
        t: The technology.
        idx: The action to implement.
        lower: Lower payment bound at each positive grid level.
        upper: Upper payment bound at each positive grid level.
        sense: ``"min"`` for the firm, ``"max"`` for the regulator.
        cap: Optional upper bound on the expected payment.

    Returns:
        The full payment vector (including ``w(0) = 0``) or None if no schedule exists.
    """
    probs = t.probs[:, 1:]
    target = probs[idx]
    e = t.efforts
    n_levels = len(t.grid)
    if n_levels == 1:
        if e[idx] > 0 or np.any(e < e[idx]) or (cap is not None and cap < 0):
            return None
        return np.zeros(1)
    lower_arr = np.asarray(lower, dtype=float)
    upper_arr = np.asarray(upper, dtype=float)
    if np.any(lower_arr > upper_arr):
        return None

    ic_rows = target - probs
    ic_rhs = e[idx] - e
    ic_rows = np.delete(ic_rows, idx, axis=0)
    ic_rhs = np.delete(ic_rhs, idx)
    others = np.delete(np.arange(len(t)), idx)

    base_rows = [target]
    base_rhs = [e[idx]]
    base_senses = [">="]
    if cap is not None:
        base_rows.append(target)
        base_rhs.append(cap)
        base_senses.append("<=")

    def solve(active: np.ndarray) -> Optional[np.ndarray]:
        rows = np.vstack([np.array(base_rows), ic_rows[active]])
        rhs = np.concatenate([base_rhs, ic_rhs[active]])
        senses = base_senses + [">="] * int(active.size)
        lp = LinearProgram(target, rows, senses, rhs, lower_arr, upper_arr)
        result = solve_lp(lp, sense)  # type: ignore[arg-type]
        return result.x if result.optimal else None

    if n_levels == 2:
        x = solve(np.arange(others.size))
        return None if x is None else np.concatenate([[0.0], x])

    position = {int(j): i for i, j in enumerate(others)}
    active = np.array([position[j] for j in _neighbours(t.means, idx)], dtype=int)
    for round_ in range(others.size + 1):
        x = solve(active)
        if x is None:
            return None
        slack = ic_rows @ x - ic_rhs
        slack[active] = np.inf
        violated = np.flatnonzero(slack < -_VIOLATION_TOL)
        if violated.size == 0:
            logger.debug(
                "Action %d implemented after %d rounds with %d incentive rows",
                idx,
                round_ + 1,
                active.size,
            )
            return np.concatenate([[0.0], x])
        worst = violated[np.argsort(slack[violated], kind="stable")[:_ROWS_PER_ROUND]]
        active = np.concatenate([active, worst])
    raise RuntimeError("Constraint generation did not converge")  # pragma: no cover


def _implement_linear(t: Technology, r: LinearFamily, idx: int) -> ImplementationResult:
    for slope in r.slopes:
        payments = slope * t.grid.levels
        surplus = t.probs @ payments - t.efforts
        if surplus[idx] >= -_SLOPE_TOL and surplus[idx] >= surplus.max() - _SLOPE_TOL:
            contract = Contract(t.grid, payments)
            return ImplementationResult(idx, contract, float(t.means[idx] * slope), True)
    return ImplementationResult.infeasible(idx)


def _boxes(t: Technology, r: Regulation) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Every product box of payments the regulation allows on the technology's grid."""
    if r.grid is not None and r.grid != t.grid:
        raise ValueError(f"{r!r} is defined on a different grid than the technology")
    if isinstance(r, ImageConstrained) and len(t.grid) > IMAGE_LEVEL_LIMIT:
        raise NotImplementedError(
            f"Image-constrained regulations are supported on at most {IMAGE_LEVEL_LIMIT} "
            f"grid levels, got {len(t.grid)}"
        )
    per_level: List[List[Interval]] = r.payment_intervals(t.grid)[1:]
    boxes = []
    for combo in itertools.product(*per_level):
        boxes.append((np.array([lo for lo, _ in combo]), np.array([hi for _, hi in combo])))
    return boxes


def min_cost_implementation(t: Technology, r: Regulation, idx: int) -> ImplementationResult:
    """The cheapest allowed contract that makes action ``idx`` the worker's best response.

    Args:
        t: The technology.
        r: The regulation the contract must satisfy.
        idx: Index of the action to implement.

    Returns:
        An :class:`ImplementationResult`; ``feasible`` is False if no allowed contract works.
    """
    _check_index(t, idx)
    if isinstance(r, LinearFamily):
        return _implement_linear(t, r, idx)
    best: Optional[np.ndarray] = None
    best_cost = math.inf
    for lower, upper in _boxes(t, r):
        payments = optimize_payment(t, idx, lower, upper, "min")
        if payments is None:
            continue
        cost = float(t.probs[idx] @ payments)
        if cost < best_cost:
            best, best_cost = payments, cost
    if best is None:
        return ImplementationResult.infeasible(idx)
    return ImplementationResult(idx, Contract(t.grid, best), best_cost, True)


def implementation_table(t: Technology, r: Regulation) -> List[ImplementationResult]:
    return [min_cost_implementation(t, r, i) for i in range(len(t))]


def _profits(
    t: Technology, table: Sequence[ImplementationResult]
) -> Tuple[np.ndarray, np.ndarray]:
    payments = np.array([res.expected_payment if res.feasible else np.nan for res in table])
    profits = np.where(np.isnan(payments), -np.inf, t.means - t.k - np.nan_to_num(payments))
    return profits, payments


def _outcome(t: Technology, res: ImplementationResult, profit: float) -> EquilibriumOutcome:
    i = res.action_index
    return EquilibriumOutcome(
        True, res.contract, i, float(profit), float(res.expected_payment - t.efforts[i])
    )


def firm_best_response(t: Technology, r: Regulation) -> EquilibriumOutcome:
    """The firm's profit-maximizing offer; the firm exits unless it earns more than EPS_TOL.

    Ties in profit go to the lowest action index.
    """
    table = implementation_table(t, r)
    profits, _ = _profits(t, table)
    best = int(np.argmax(profits))
    if not profits[best] > EPS_TOL:
        return EquilibriumOutcome.exit()
    return _outcome(t, table[best], profits[best])


def worst_case_equilibrium(t: Technology, r: Regulation, p: Params) -> EquilibriumOutcome:
    """Among the firm's optimal offers, the one worst for the regulator.

    Every action whose cheapest implementation earns within EPS_TOL of the maximal profit is a
    candidate; the regulator receives ``profit + alpha * worker_surplus`` and the candidate
    minimizing it is returned, ties to the lowest action index. If the maximal profit is at
    most EPS_TOL the firm exits.
    """
    check_technology(t, p)
    table = implementation_table(t, r)
    profits, payments = _profits(t, table)
    top = float(profits.max())
    if not top > EPS_TOL:
        return EquilibriumOutcome.exit()
    candidates = np.flatnonzero(profits >= top - EPS_TOL)
    payoff = profits[candidates] + p.alpha * (payments[candidates] - t.efforts[candidates])
    pick = int(candidates[int(np.argmin(payoff))])
    logger.debug("Worst-case equilibrium picks action %d of %d candidates", pick, candidates.size)
    return _outcome(t, table[pick], profits[pick])
