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
"""Closed-form worst-case technologies.

The curves are discretized with ``n`` uniformly spaced means. Costs follow the chord
recursion ``e_j = e_{j-1} + (1 - c / i_j) (i_j - i_{j-1})``: at the slope that implements action
``j`` the firm earns exactly ``c - k``, so the regret of a discretized curve approaches its closed
form from below as ``n`` grows.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from regretforge.firm import worst_case_equilibrium
from regretforge.minmax import ell_star, optimal_band, rbar, rho_star
from regretforge.model import (
    EPS_TOL,
    MPR,
    Action,
    ImageConstrained,
    MinimumContract,
    OutputGrid,
    Params,
    Regulation,
    Technology,
    binary_technology,
)

__all__ = [
    "Counterexample",
    "construct_single_action",
    "optimal_k_no_production",
    "construct_no_production_curve",
    "optimal_muF",
    "construct_extraction_curve",
    "binarize_and_normalize",
    "construct_band_violation",
    "construct_gaming_violation",
    "construct_flexibility_violation",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Counterexample:
    """A technology whose regret under ``regulation`` exceeds the minmax regret.

    ``closed_form_regret`` is the value the discretized technology approaches and ``margin`` its
    excess over the minmax regret.
    """

    technology: Technology
    regulation: Regulation
    closed_form_regret: float
    margin: float
    parameters: Dict[str, float] = field(default_factory=dict)


def _chord_costs(means: np.ndarray, base: float, c: float) -> np.ndarray:
    steps = np.diff(means)
    slopes = 1.0 - c / means[1:]
    return base + np.concatenate([[0.0], np.cumsum(slopes * steps)])


def _check_n(n: int) -> None:
    if n < 2:
        raise ValueError(f"Need at least 2 actions on a curve, got {n}")


def construct_single_action(yprime: float, k: float) -> Technology:
    """One costless action producing ``yprime`` for sure, at production cost ``k``."""
    if not 0.0 <= k < yprime:
        raise ValueError(f"Need 0 <= k < yprime, got k={k}, yprime={yprime}")
    return Technology(k, OutputGrid([0.0, yprime]), [Action(0.0, [0.0, 1.0])])


def optimal_k_no_production(wbar: float, yprime: float) -> float:
    """The production cost maximizing the no-production curve's regret."""
    if yprime <= 0:
        raise ValueError(f"yprime must be positive, got {yprime}")
    if not 0.0 <= wbar <= yprime / 2 + EPS_TOL:
        raise ValueError(f"Need 0 <= wbar <= yprime / 2, got wbar={wbar}")
    return math.exp((2.0 * wbar - yprime) / (yprime - wbar)) * (yprime - wbar)


def construct_no_production_curve(
    wbar_at_yprime: float,
    yprime: float,
    k: float,
    n: int = 2000,
    top_mean: Optional[float] = None,
    bottom_mean: Optional[float] = None,
) -> Technology:
    """Binary actions on ``{0, yprime}`` none of which the firm can profitably implement.

    When ``bottom_mean`` lies above the break-even mean ``k / (1 - wbar / yprime)`` the curve
    starts there instead, with a bottom action costing ``bottom_mean - k`` so the firm still
    earns nothing.

    Args:
        wbar_at_yprime: The regulation's minimum payment at ``yprime``.
        yprime: The positive support level.
        k: Production cost.
        n: Number of actions.
        top_mean: Largest mean on the curve, ``yprime`` by default.
        bottom_mean: Least mean on the curve, the break-even mean by default.
    """
    _check_n(n)
    top = yprime if top_mean is None else top_mean
    if not 0.0 <= wbar_at_yprime <= yprime / 2 + EPS_TOL:
        raise ValueError(f"Need 0 <= wbar <= yprime / 2, got wbar={wbar_at_yprime}")
    if not 0.0 < k < yprime - wbar_at_yprime:
        raise ValueError(f"Need 0 < k < yprime - wbar, got k={k}")
    if not 0.0 < top <= yprime:
        raise ValueError(f"top_mean must lie in (0, {yprime}], got {top}")
    bottom = k / (1.0 - wbar_at_yprime / yprime)
    base = 0.0
    if bottom_mean is not None and bottom_mean > bottom:
        bottom, base = bottom_mean, bottom_mean - k
    if not bottom < top:
        raise ValueError(f"k={k} leaves no room for a curve below mean {top}")
    means = np.linspace(bottom, top, n)
    return binary_technology(k, means, _chord_costs(means, base, k), yprime)


def optimal_muF(p: Params, yprime: float) -> float:
    return yprime * math.exp(-1.0 / p.alpha)


def construct_extraction_curve(
    wbar_at_yprime: float,
    yprime: float,
    muF: float,
    n: int = 2000,
    top_mean: Optional[float] = None,
    k: float = 0.0,
) -> Technology:
    """Binary actions on ``{0, yprime}`` where the firm profits most from the bottom action.

    The floor contract implements the action with mean ``muF`` and leaves the worker nothing;
    every other action earns the firm the same profit but pays the worker a rent. A production
    cost ``k`` lowers every profit alike.
    """
    _check_n(n)
    top = yprime if top_mean is None else top_mean
    if not 0.0 <= wbar_at_yprime <= yprime:
        raise ValueError(f"Need 0 <= wbar <= yprime, got wbar={wbar_at_yprime}")
    if not 0.0 < top <= yprime:
        raise ValueError(f"top_mean must lie in (0, {yprime}], got {top}")
    if not 0.0 < muF <= top:
        raise ValueError(f"Need 0 < muF <= {top}, got {muF}")
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    slope = wbar_at_yprime / yprime
    means = np.linspace(muF, top, n)
    costs = _chord_costs(means, slope * muF, (1.0 - slope) * muF)
    return binary_technology(k, means, costs, yprime)


def binarize_and_normalize(t: Technology, r: Regulation, p: Params) -> Technology:
    """Map ``t`` to a binary technology with ``k = 0`` and at least the same regret under ``r``.

    Every effort rises by the equilibrium worker surplus, a floor-binding action carrying the
    firm's profit (plus ``k``) is added, and every distribution is replaced by the binary one on
    ``{0, ybar}`` with the same mean.

    Raises:
        ValueError: If ``r`` is not a minimum piece rate or the firm does not produce.
    """
    if not isinstance(r, MPR):
        raise ValueError(f"Binarization needs a minimum piece-rate regulation, got {r!r}")
    eq = worst_case_equilibrium(t, r, p)
    if not eq.participated:
        raise ValueError("Binarization needs a technology on which the firm makes a profit")
    mu_star = min((eq.profit + t.k) / (1.0 - r.ell), p.ybar)
    efforts = np.maximum(t.efforts + eq.worker_surplus, 0.0)
    means = np.minimum(np.append(t.means, mu_star), p.ybar)
    efforts = np.append(efforts, r.ell * mu_star)
    return binary_technology(0.0, means, efforts, p.ybar)


def _mixture_band_violation(
    yprime: float, w: float, p: Params, n: int, y_high: Optional[float]
) -> Tuple[Technology, Regulation, float, Dict[str, float]]:
    ybar, alpha = p.ybar, p.alpha
    ls = ell_star(alpha)
    y2 = 2.0 * ybar if y_high is None else y_high
    if not y2 > ybar:
        raise ValueError(f"y_high must exceed ybar, got {y2}")
    p_mix = (y2 - ybar) / (y2 - yprime)
    slope = (p_mix * w + (1.0 - p_mix) * ls * y2) / ybar
    grid = OutputGrid([0.0, yprime, ybar, y2])
    regulation = MinimumContract(grid, [0.0, w, ls * ybar, ls * y2])
    if slope < 0.5:
        k = optimal_k_no_production(slope * ybar, ybar)
        means = np.linspace(k / (1.0 - slope), ybar, n)
        costs = _chord_costs(means, 0.0, k)
        closed = alpha * k
    else:
        k = (1.0 - slope) * ybar
        means, costs = np.array([ybar]), np.array([0.0])
        closed = alpha * slope * ybar
    q = means[0] / ybar
    actions = [Action(0.0, [1.0 - q, q * p_mix, 0.0, q * (1.0 - p_mix)])]
    actions += [Action(e, [1.0 - m / ybar, 0.0, m / ybar, 0.0]) for m, e in zip(means, costs)]
    params = {"k": k, "effective_slope": slope, "y_high": y2, "p_mix": p_mix}
    return Technology(k, grid, actions), regulation, closed, params


def construct_band_violation(
    yprime: float, w_at_yprime: float, p: Params, n: int = 2000, y_high: Optional[float] = None
) -> Counterexample:
    """A technology beating the minmax regret of a regulation whose floor leaves the band.

    Args:
        yprime: Output level where the minimum guarantee is out of band.
        w_at_yprime: The regulation's minimum payment at ``yprime``.
        p: Model parameters.
        n: Number of actions on the curve.
        y_high: Upper mixing level used when ``yprime < ybar`` and the floor is too high;
            defaults to ``2 * ybar``.
    """
    if yprime <= 0 or not 0.0 <= w_at_yprime <= yprime:
        raise ValueError(f"Need yprime > 0 and 0 <= w <= yprime, got ({yprime}, {w_at_yprime})")
    lo, hi = optimal_band(yprime, p)
    w = w_at_yprime
    if lo - EPS_TOL <= w <= hi + EPS_TOL:
        raise ValueError(f"Payment {w} at {yprime} lies inside the optimal band [{lo}, {hi}]")
    ybar, alpha = p.ybar, p.alpha
    binary_reg = MinimumContract(OutputGrid([0.0, yprime]), [0.0, w])
    if yprime >= ybar:
        slope = w / yprime
        if w > hi and slope < 0.5:
            k = optimal_k_no_production(slope * ybar, ybar)
            tech = construct_no_production_curve(w, yprime, k, n, top_mean=ybar)
            closed = alpha * k
        elif w > hi:
            k = (1.0 - slope) * ybar
            tech = binary_technology(k, [ybar], [0.0], yprime)
            closed = alpha * slope * ybar
        else:
            k = 0.0
            tech = construct_extraction_curve(w, yprime, optimal_muF(p, ybar), n, top_mean=ybar)
            closed = alpha * math.exp(-1.0 / alpha) * (1.0 - slope) * ybar
        regulation: Regulation = binary_reg
        params = {"k": k, "slope": slope}
    elif w < lo:
        tech = construct_extraction_curve(w, yprime, optimal_muF(p, yprime), n)
        regulation = binary_reg
        closed = alpha * math.exp(-1.0 / alpha) * (yprime - w)
        params = {"k": 0.0, "slope": w / yprime}
    else:
        tech, regulation, closed, params = _mixture_band_violation(yprime, w, p, n, y_high)
    margin = closed - rbar(p)
    logger.info("Band violation at (%r, %r): closed-form margin %r", yprime, w, margin)
    return Counterexample(tech, regulation, closed, margin, params)


def construct_gaming_violation(
    y_pair: Tuple[float, float],
    w_low: Tuple[float, float],
    p_mix: float,
    p: Params,
    n: int = 2000,
) -> Counterexample:
    """A technology exploiting a floor whose mixture over ``y_pair`` pays less than ``ell* ybar``.

    Every action mixes ``y1`` and ``y2`` with weights ``(p_mix, 1 - p_mix)`` scaled by its
    mean, so the cheapest contract pays each action ``slope * mean`` with
    ``slope = (p_mix w(y1) + (1 - p_mix) w(y2)) / ybar``. The actions form an extraction curve
    at that slope.

    Args:
        y_pair: Outputs ``(y1, y2)`` with ``y1 < ybar < y2``.
        w_low: The regulation's minimum payments at ``y1`` and ``y2``.
        p_mix: Weight on ``y1``; the mixture must have mean ``ybar``.
        p: Model parameters, ``alpha > 1``.
        n: Number of actions.
    """
    _check_n(n)
    y1, y2 = y_pair
    w1, w2 = w_low
    ybar, alpha = p.ybar, p.alpha
    if alpha <= 1.0:
        raise ValueError("Gaming violations need alpha > 1")
    if not 0.0 < y1 < ybar < y2:
        raise ValueError(f"Need 0 < y1 < ybar < y2, got ({y1}, {y2})")
    if not 0.0 < p_mix < 1.0:
        raise ValueError(f"p_mix must lie in (0, 1), got {p_mix}")
    if abs(p_mix * y1 + (1.0 - p_mix) * y2 - ybar) > EPS_TOL * max(1.0, ybar):
        raise ValueError("The mixture of y1 and y2 must have mean ybar")
    if not (0.0 <= w1 <= y1 and 0.0 <= w2 <= y2):
        raise ValueError("Minimum payments must satisfy limited liability")
    ls = ell_star(alpha)
    slope = (p_mix * w1 + (1.0 - p_mix) * w2) / ybar
    if not slope < ls - EPS_TOL:
        raise ValueError(f"The mixture pays slope {slope}, not below ell* = {ls}")
    muF = optimal_muF(p, ybar)
    means = np.linspace(muF, ybar, n)
    costs = _chord_costs(means, slope * muF, (1.0 - slope) * muF)
    grid = OutputGrid([0.0, y1, ybar, y2])
    actions = [
        Action(e, [1.0 - m / ybar, m / ybar * p_mix, 0.0, m / ybar * (1.0 - p_mix)])
        for m, e in zip(means, costs)
    ]
    regulation = MinimumContract(grid, [0.0, w1, ls * ybar, w2])
    closed = alpha * math.exp(-1.0 / alpha) * (1.0 - slope) * ybar
    params = {"mixed_slope": slope, "muF": muF, "p_mix": p_mix}
    tech = Technology(0.0, grid, actions)
    return Counterexample(tech, regulation, closed, closed - rbar(p), params)


def construct_flexibility_violation(
    yprime: float,
    gap: Sequence[float],
    p: Params,
    eps: float = 1e-3,
    n: int = 2000,
) -> Counterexample:
    """A technology beating the minmax regret when ``(w1, w2)`` is missing from ``Im(C)(yprime)``.

    The no-production curve at ``k = rho* ybar`` is flattened to slope ``w1 / yprime + eps``
    between the means the firm would implement with ``w1`` and ``w2``. No allowed payment
    implements the flattened actions, which lowers the top action's cost by the convex slack.
    """
    _check_n(n)
    ybar, alpha = p.ybar, p.alpha
    if yprime < ybar:
        raise ValueError(f"Flexibility violations need yprime >= ybar, got {yprime}")
    w1, w2 = float(gap[0]), float(gap[1])
    ls, rho = ell_star(alpha), rho_star(alpha)
    if not w1 < w2:
        raise ValueError(f"Empty gap ({w1}, {w2})")
    if w1 < ls * yprime - EPS_TOL or w2 > (1.0 - rho) * yprime + EPS_TOL:
        raise ValueError(
            f"Gap ({w1}, {w2}) must lie in [{ls * yprime}, {(1.0 - rho) * yprime}]"
        )
    s1, s2 = w1 / yprime, w2 / yprime
    if not 0.0 < eps < s2 - s1:
        raise ValueError(f"eps must lie in (0, {s2 - s1}), got {eps}")
    flat = s1 + eps
    k = rho * ybar
    i1, i2 = k / (1.0 - s1), k / (1.0 - s2)
    base = np.linspace(k / (1.0 - ls), ybar, n)
    base = base[(np.abs(base - i1) > EPS_TOL) & (np.abs(base - i2) > EPS_TOL)]
    means = np.unique(np.concatenate([base, [i1, i2]]))
    slopes = 1.0 - k / means[1:]
    slopes[(means[1:] > i1) & (means[1:] <= i2)] = flat
    costs = np.concatenate([[0.0], np.cumsum(slopes * np.diff(means))])
    margin = alpha * ((1.0 - flat) * (i2 - i1) - k * math.log(i2 / i1))
    if not margin > 0:
        raise ValueError(f"eps={eps} is too large to leave any slack in the gap")
    regulation = ImageConstrained(
        OutputGrid([0.0, yprime]),
        [[(0.0, 0.0)], [(min(ls * yprime, w1), w1), (w2, yprime)]],
    )
    tech = binary_technology(k, means, costs, yprime)
    params = {"k": k, "i1": i1, "i2": i2, "flat_slope": flat}
    return Counterexample(tech, regulation, rbar(p) + margin, margin, params)
