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
"""Worst-case regret of minimum piece-rate regulations and its minimization.

Against ``MPR(ell)`` nature has three kinds of worst-case technologies: a curve of actions on
which the firm never profits (no production), a curve on which the firm extracts all surplus
at the floor (extraction), and for ``ell > 1/2`` a single action. Their regrets are the
branches below; the optimal slope equalizes the first two.
"""

from __future__ import annotations

import logging
import math
import sys
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Optional, Tuple, Union

import numpy as np

from regretforge.kernel import minimize_1d
from regretforge.model import EPS_TOL, PROB_TOL, Action, Params, Technology

if sys.version_info >= (3, 8):
    from typing import Literal
else:
    from typing_extensions import Literal

__all__ = [
    "ell_star",
    "rbar",
    "rho_star",
    "optimal_band",
    "branch_no_production",
    "branch_extraction",
    "branch_single_action",
    "mpr_worst_case_regret",
    "BranchRow",
    "branch_curves",
    "MinmaxResult",
    "optimal_mpr",
    "optimal_mpr_numeric",
    "KnowledgeBox",
    "ConstrainedBranches",
    "constrained_branches",
    "optimal_mpr_constrained",
    "mlrp_geq",
    "fosd_geq",
    "technology_in_class",
]

logger = logging.getLogger(__name__)


def ell_star(alpha: float) -> float:
    """The optimal minimum piece rate ``(alpha - 1) / (2 alpha - 1)``."""
    return (alpha - 1.0) / (2.0 * alpha - 1.0)


def rbar(p: Params) -> float:
    """The minimal worst-case regret ``alpha^2 e^(-1/alpha) ybar / (2 alpha - 1)``."""
    return p.alpha**2 * math.exp(-1.0 / p.alpha) * p.ybar / (2.0 * p.alpha - 1.0)


def rho_star(alpha: float) -> float:
    """Profit share ``e^(-1/alpha) (1 - ell*)`` bounding the flexibility band."""
    return math.exp(-1.0 / alpha) * (1.0 - ell_star(alpha))


def optimal_band(y: float, p: Params) -> Tuple[float, float]:
    """The range a minimum guarantee at output ``y`` must stay in for optimality."""
    ls = ell_star(p.alpha)
    if y >= p.ybar:
        return ls * y, ls * y
    return max(0.0, y - (1.0 - ls) * p.ybar), min(y, ls * p.ybar)


def _check_ell(ell: float, closed: bool) -> None:
    ok = 0.0 <= ell <= 1.0 if closed else 0.0 <= ell < 1.0
    if not ok:
        raise ValueError(f"Slope {ell} out of {'[0, 1]' if closed else '[0, 1)'}")


def branch_no_production(ell: float, p: Params) -> float:
    """Regret when nature keeps the firm out: ``alpha e^((2l-1)/(1-l)) (1-l) ybar``."""
    _check_ell(ell, closed=False)
    return p.alpha * math.exp((2.0 * ell - 1.0) / (1.0 - ell)) * (1.0 - ell) * p.ybar


def branch_extraction(ell: float, p: Params) -> float:
    """Regret when the firm extracts all surplus at the floor: ``alpha e^(-1/alpha) (1-l) ybar``."""
    _check_ell(ell, closed=True)
    return p.alpha * math.exp(-1.0 / p.alpha) * (1.0 - ell) * p.ybar


def branch_single_action(ell: float, p: Params) -> float:
    _check_ell(ell, closed=True)
    return p.alpha * ell * p.ybar


def mpr_worst_case_regret(ell: float, p: Params) -> float:
    """Worst-case regret of ``MPR(ell)`` over all technologies."""
    _check_ell(ell, closed=True)
    extraction = branch_extraction(ell, p)
    if ell <= 0.5:
        return max(branch_no_production(ell, p), extraction)
    return max(branch_single_action(ell, p), extraction)


class BranchRow(NamedTuple):
    ell: float
    no_production: float
    extraction: float
    single_action: float
    worst_case: float


def branch_curves(ells: Iterable[float], p: Params) -> List[BranchRow]:
    """Tabulate every branch over ``ells``; ``no_production`` is nan at ``ell = 1``."""
    rows = []
    for ell in ells:
        ell = float(ell)
        g1 = branch_no_production(ell, p) if ell < 1.0 else math.nan
        rows.append(
            BranchRow(
                ell,
                g1,
                branch_extraction(ell, p),
                branch_single_action(ell, p),
                mpr_worst_case_regret(ell, p),
            )
        )
    return rows


@dataclass(frozen=True)
class MinmaxResult:
    """The regret-minimizing piece rate, its worst-case regret and both branch values there."""

    ell_star: float
    rbar: float
    branch_no_production: float
    branch_extraction: float
    method: str = "closed_form"


def optimal_mpr(p: Params) -> MinmaxResult:
    ls = ell_star(p.alpha)
    return MinmaxResult(
        ell_star=ls,
        rbar=rbar(p),
        branch_no_production=branch_no_production(ls, p),
        branch_extraction=branch_extraction(ls, p),
    )


def optimal_mpr_numeric(p: Params, tol: float = 1e-10) -> MinmaxResult:
    """Minimize the worst-case regret of ``MPR(ell)`` over ``ell in [0, 1/2]`` numerically.

    Slopes above 1/2 are dominated: the single-action branch already exceeds the value at 1/2.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    ell, value = minimize_1d(
        lambda x: mpr_worst_case_regret(x, p), 0.0, 0.5, tol, candidates=[ell_star(p.alpha)]
    )
    logger.info("Numeric minmax slope %r with worst-case regret %r", ell, value)
    return MinmaxResult(
        ell_star=ell,
        rbar=value,
        branch_no_production=branch_no_production(ell, p),
        branch_extraction=branch_extraction(ell, p),
        method="numeric",
    )


@dataclass(frozen=True)
class KnowledgeBox:
    """Known bounds on the production cost and on every action's mean output.

    Args:
        k_lo: Least possible production cost.
        k_hi: Largest possible production cost; must be positive.
        y_lo: Least possible mean output; must lie below ``ybar``.
    """

    k_lo: float = 0.0
    k_hi: float = math.inf
    y_lo: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.k_lo <= self.k_hi:
            raise ValueError(f"Need 0 <= k_lo <= k_hi, got [{self.k_lo}, {self.k_hi}]")
        if not self.k_hi > 0:
            raise ValueError("k_hi must be positive; no optimal regulation exists for k_hi = 0")
        if self.y_lo < 0:
            raise ValueError(f"y_lo must be nonnegative, got {self.y_lo}")

    def check(self, p: Params) -> None:
        if not self.y_lo < p.ybar:
            raise ValueError(f"y_lo must lie below ybar, got {self.y_lo} >= {p.ybar}")

    @classmethod
    def unconstrained(cls, p: Params) -> KnowledgeBox:
        return cls(0.0, p.ybar, 0.0)


class ConstrainedBranches(NamedTuple):
    b_single: float
    b_nohire: float
    b_extract: float


def _clamp(x: float, lo: float, hi: float) -> float:
    return min(max(x, lo), hi)


def _branch_floor(ell: float, p: Params, box: KnowledgeBox) -> float:
    # Technologies whose firm profit stays below (1 - ell) * y_lo.
    k_top = min(box.k_hi, (1.0 - ell) * box.y_lo)
    if box.y_lo <= 0 or box.k_lo > k_top:
        return 0.0
    slope = math.log(p.ybar / box.y_lo) - 1.0

    def value(k: float) -> float:
        return p.alpha * ((1.0 - ell) * box.y_lo + k * slope)

    return max(0.0, value(box.k_lo), value(k_top))


def _branch_nohire(ell: float, p: Params, box: KnowledgeBox, tol: float) -> float:
    if (1.0 - ell) * box.y_lo > box.k_hi:
        return _branch_floor(ell, p, box)
    ybar = p.ybar
    k_top = min(box.k_hi, (1.0 - ell) * ybar)
    if box.k_lo > k_top:
        return 0.0

    def value(k: float) -> float:
        i_lo = max(k / (1.0 - ell), box.y_lo)
        log_term = k * math.log(i_lo / ybar) if k > 0 else 0.0
        return p.alpha * (i_lo - k - log_term)

    interior = (
        (1.0 - ell) * ybar * math.exp((2.0 * ell - 1.0) / (1.0 - ell)) if ell <= 0.5 else k_top
    )
    candidates = [_clamp(interior, box.k_lo, k_top), _clamp((1 - ell) * box.y_lo, box.k_lo, k_top)]
    _, best = minimize_1d(lambda k: -value(k), box.k_lo, k_top, tol, candidates)
    return max(0.0, -best)


def _branch_extract(ell: float, p: Params, box: KnowledgeBox, tol: float) -> float:
    ybar, alpha = p.ybar, p.alpha
    flat = (alpha - 1.0) * ((1.0 - ell) * ybar - box.k_lo)
    floor = _branch_floor(ell, p, box)
    y_min = max(box.k_lo / (1.0 - ell), box.y_lo)
    if y_min > ybar:
        return max(0.0, flat, floor)

    def value(y: float) -> float:
        log_term = alpha * (1.0 - ell) * y * math.log(ybar / y) if y > 0 else 0.0
        return log_term + (alpha - 1.0) * ((1.0 - ell) * y - box.k_lo)

    candidate = _clamp(ybar * math.exp(-1.0 / alpha), y_min, ybar)
    _, best = minimize_1d(lambda y: -value(y), y_min, ybar, tol, [candidate])
    return max(0.0, flat, floor, -best)


def constrained_branches(
    ell: float, p: Params, box: KnowledgeBox, tol: float = 1e-10
) -> ConstrainedBranches:
    """Worst-case regret branches of ``MPR(ell)`` when technologies lie in ``box``.

    Args:
        ell: The piece rate, in ``[0, 1)``.
        p: Model parameters.
        box: Known bounds on ``k`` and on mean outputs.
        tol: Bracket width for the inner suprema.

    Returns:
        The single-action, no-hire and extraction branch values.
    """
    _check_ell(ell, closed=False)
    box.check(p)
    top = min(box.k_hi / (1.0 - ell), p.ybar)
    single = p.alpha * ell * top if top >= box.y_lo else 0.0
    return ConstrainedBranches(
        single, _branch_nohire(ell, p, box, tol), _branch_extract(ell, p, box, tol)
    )


def optimal_mpr_constrained(
    p: Params, box: KnowledgeBox, tol: float = 1e-9, grid_points: int = 201
) -> MinmaxResult:
    """Minimize the worst constrained branch over ``ell in [0, 1)``.

    A coarse scan locates the basin, then a golden-section refinement runs on the two scan
    cells around the best point with the unconstrained optimum as an extra candidate.
    """
    box.check(p)

    def worst(ell: float) -> float:
        return max(constrained_branches(ell, p, box))

    scan = np.linspace(0.0, 1.0 - 1.0 / grid_points, grid_points)
    values = [worst(float(x)) for x in scan]
    i = int(np.argmin(values))
    lo = float(scan[max(i - 1, 0)])
    hi = float(scan[min(i + 1, grid_points - 1)])
    ell, value = minimize_1d(worst, lo, hi, tol, [float(scan[i]), ell_star(p.alpha)])
    branches = constrained_branches(ell, p, box)
    logger.info("Constrained minmax slope %r with worst-case regret %r", ell, value)
    return MinmaxResult(
        ell_star=ell,
        rbar=value,
        branch_no_production=branches.b_nohire,
        branch_extraction=branches.b_extract,
        method="constrained",
    )


def _aligned(f: Action, g: Action) -> None:
    if f.probs.shape != g.probs.shape:
        raise ValueError("Actions are defined on different grids")


def mlrp_geq(f: Action, g: Action) -> bool:
    """Whether ``f`` dominates ``g`` in the likelihood-ratio order on their shared grid.

    For every pair of levels ``y' > y`` in the joint support, ``f(y') g(y) >= g(y') f(y)``.
    """
    _aligned(f, g)
    support = (f.probs + g.probs) > 0
    fp, gp = f.probs[support], g.probs[support]
    cross = np.outer(fp, gp)
    return bool(np.all(np.tril(cross - cross.T, -1) >= -PROB_TOL))


def fosd_geq(f: Action, g: Action) -> bool:
    """Whether ``f`` first-order stochastically dominates ``g``."""
    _aligned(f, g)
    return bool(np.all(np.cumsum(f.probs) <= np.cumsum(g.probs) + PROB_TOL))


TechnologyClass = Union[Literal["mlrp", "fosd"], KnowledgeBox]


def technology_in_class(
    t: Technology, cls: TechnologyClass, p: Optional[Params] = None
) -> bool:
    """Membership of ``t`` in a class of technologies.

    ``"mlrp"`` and ``"fosd"`` require costlier actions to dominate cheaper ones; actions of equal
    cost must dominate each other. A :class:`KnowledgeBox` requires ``k`` and every mean to lie
    within its bounds (and below ``p.ybar`` when ``p`` is given).
    """
    if isinstance(cls, KnowledgeBox):
        means_ok = bool(np.all(t.means >= cls.y_lo - PROB_TOL))
        if p is not None:
            means_ok = means_ok and bool(np.all(t.means <= p.ybar + PROB_TOL))
        return cls.k_lo - EPS_TOL <= t.k <= cls.k_hi + EPS_TOL and means_ok
    if cls not in ("mlrp", "fosd"):
        raise ValueError(f"Unknown technology class {cls!r}")
    geq = mlrp_geq if cls == "mlrp" else fosd_geq
    order = np.argsort(t.efforts, kind="stable")
    for lo, hi in zip(order[:-1], order[1:]):
        f, g = t.actions[hi], t.actions[lo]
        if not geq(f, g):
            return False
        if abs(f.effort - g.effort) <= EPS_TOL and not geq(g, f):
            return False
    return True
