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
"""Diagnostics for non-MPR regulations and comparative statics in ``alpha``."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from regretforge.minmax import (
    branch_extraction,
    branch_no_production,
    ell_star,
    optimal_band,
    rbar,
    rho_star,
)
from regretforge.model import EPS_TOL, PROB_TOL, Interval, LinearFamily, Params, Regulation

__all__ = [
    "PiecewiseLinear",
    "lower_convex_envelope",
    "GamingWitness",
    "NecessityReport",
    "necessity_check",
    "SweepRow",
    "sweep_alpha",
]

logger = logging.getLogger(__name__)

DEFAULT_PROBES = 200


class PiecewiseLinear:
    """A continuous piecewise-linear function through ``(xs[i], ys[i])``."""

    def __init__(self, xs: Sequence[float], ys: Sequence[float]):
        self.xs = np.asarray(xs, dtype=float)
        self.ys = np.asarray(ys, dtype=float)
        if self.xs.shape != self.ys.shape or self.xs.size == 0:
            raise ValueError("Need matching, nonempty breakpoint arrays")
        if np.any(np.diff(self.xs) <= 0):
            raise ValueError("Breakpoints must be strictly increasing")

    def __call__(self, y: float) -> float:
        if not self.xs[0] - PROB_TOL <= y <= self.xs[-1] + PROB_TOL:
            raise ValueError(f"{y} lies outside [{self.xs[0]}, {self.xs[-1]}]")
        return float(np.interp(y, self.xs, self.ys))

    def segment(self, y: float) -> Tuple[float, float]:
        """The breakpoints bracketing ``y``."""
        if self.xs.size == 1:
            return float(self.xs[0]), float(self.xs[0])
        i = int(np.clip(np.searchsorted(self.xs, y, side="right"), 1, self.xs.size - 1))
        return float(self.xs[i - 1]), float(self.xs[i])


def lower_convex_envelope(points: Iterable[Sequence[float]]) -> PiecewiseLinear:
    """The greatest convex function lying below every point.

    Raises:
        ValueError: If ``points`` is empty or two points share an abscissa.
    """
    pts = sorted((float(x), float(y)) for x, y in points)
    if not pts:
        raise ValueError("The envelope of an empty point set is undefined")
    if any(a[0] == b[0] for a, b in zip(pts, pts[1:])):
        raise ValueError("Envelope points must have distinct abscissae")
    hull: List[Tuple[float, float]] = []
    for x, y in pts:
        while len(hull) >= 2:
            (x0, y0), (x1, y1) = hull[-2], hull[-1]
            if (x1 - x0) * (y - y0) - (y1 - y0) * (x - x0) > 0:
                break
            hull.pop()
        hull.append((x, y))
    return PiecewiseLinear([x for x, _ in hull], [y for _, y in hull])


class GamingWitness(NamedTuple):
    """A contract paying ``ell* anchor`` at ``anchor`` whose envelope dips below ``ell* y``."""

    anchor: float
    y: float
    envelope: float
    y_low: float
    y_high: float
    p_mix: float


@dataclass(frozen=True)
class NecessityReport:
    """Outcome of the three necessary conditions for an optimal regulation.

    Each clause is checked on ``probes`` only. ``mixture_pairs`` counts the probe pairs
    straddling ``ybar`` the gaming clause can mix.
    """

    band_ok: bool
    band_violation: Optional[Tuple[float, float]]
    gaming_ok: bool
    gaming_witness: Optional[GamingWitness]
    flexibility_ok: bool
    flexibility_gap: Optional[Tuple[float, float, float]]
    rho_star: float
    probes: Tuple[float, ...]
    mixture_pairs: int

    @property
    def ok(self) -> bool:
        return self.band_ok and self.gaming_ok and self.flexibility_ok


def _probes(r: Regulation, p: Params, y_probe: Optional[Sequence[float]]) -> np.ndarray:
    if r.grid is not None:
        return np.array(r.grid.levels)
    if y_probe is None:
        y_probe = np.linspace(0.0, 2.0 * p.ybar, DEFAULT_PROBES)
    probes = np.unique(np.concatenate([[0.0, p.ybar], np.asarray(y_probe, dtype=float)]))
    if probes[0] < 0:
        raise ValueError("Probe outputs must be nonnegative")
    return probes


def _first_gap(intervals: Sequence[Interval], lo: float, hi: float) -> Optional[Interval]:
    cur = lo
    for a, b in sorted(intervals):
        if b < cur - EPS_TOL:
            continue
        if a > cur + EPS_TOL:
            return cur, min(a, hi)
        cur = max(cur, b)
        if cur >= hi - EPS_TOL:
            return None
    return (cur, hi) if cur < hi - EPS_TOL else None


def _gaming_witness(
    r: Regulation, p: Params, probes: np.ndarray, floor: np.ndarray
) -> Optional[GamingWitness]:
    ls = ell_star(p.alpha)
    high = probes[probes >= p.ybar - PROB_TOL]
    for anchor_i in np.flatnonzero(probes >= p.ybar - PROB_TOL):
        anchor = float(probes[anchor_i])
        target = ls * anchor
        if not any(a - EPS_TOL <= target <= b + EPS_TOL for a, b in r.image_at(anchor)):
            continue
        w = floor.copy()
        w[anchor_i] = target
        env = lower_convex_envelope(zip(probes, w))
        for y in high:
            value = env(float(y))
            if value < ls * y - EPS_TOL:
                y_low, y_high = env.segment(float(y))
                p_mix = (y_high - y) / (y_high - y_low) if y_high > y_low else 1.0
                return GamingWitness(anchor, float(y), value, y_low, y_high, float(p_mix))
    return None


def necessity_check(
    r: Regulation, p: Params, y_probe: Optional[Sequence[float]] = None
) -> NecessityReport:
    """Check a regulation against the necessary conditions for minmax-regret optimality.

    Band: the minimum guarantee stays within ``optimal_band``. Gaming: every allowed contract
    that pays ``ell* y`` at some output ``y >= ybar`` (built from the minimum guarantee
    elsewhere) has a convex envelope at least ``ell* y`` above ``ybar``. Flexibility: the
    allowed payments at every ``y >= ybar`` cover ``[ell* y, (1 - rho*) y]``.

    Args:
        r: The regulation.
        p: Model parameters.
        y_probe: Outputs to check. Defaults to 200 points on ``[0, 2 ybar]``; regulations
            defined on a grid are checked on their grid levels.

    Returns:
        A :class:`NecessityReport`; content problems never raise.
    """
    probes = _probes(r, p, y_probe)
    ls, rho = ell_star(p.alpha), rho_star(p.alpha)
    floor = np.array([r.min_guarantee(float(y)) for y in probes])

    band_violation = None
    for y, w in zip(probes, floor):
        lo, hi = optimal_band(float(y), p)
        if w < lo - EPS_TOL or w > hi + EPS_TOL:
            band_violation = (float(y), float(w))
            break

    witness = None
    if not isinstance(r, LinearFamily):
        witness = _gaming_witness(r, p, probes, floor)

    gap = None
    for y in probes[probes >= p.ybar - PROB_TOL]:
        found = _first_gap(r.image_at(float(y)), ls * y, (1.0 - rho) * y)
        if found is not None:
            gap = (float(y), found[0], found[1])
            break

    below = int(np.count_nonzero(probes < p.ybar - PROB_TOL))
    above = int(np.count_nonzero(probes > p.ybar + PROB_TOL))
    report = NecessityReport(
        band_ok=band_violation is None,
        band_violation=band_violation,
        gaming_ok=witness is None,
        gaming_witness=witness,
        flexibility_ok=gap is None,
        flexibility_gap=gap,
        rho_star=rho,
        probes=tuple(float(y) for y in probes),
        mixture_pairs=below * above,
    )
    logger.info(
        "Necessity check of %r on %d probes: band %s, gaming %s, flexibility %s",
        r,
        probes.size,
        report.band_ok,
        report.gaming_ok,
        report.flexibility_ok,
    )
    return report


class SweepRow(NamedTuple):
    alpha: float
    ell_star: float
    rbar: float
    g1: float
    g2: float


def sweep_alpha(
    alphas: Iterable[float],
    p_template: Optional[Params] = None,
    emit: Optional[Callable[[SweepRow], None]] = None,
) -> List[SweepRow]:
    """Tabulate the optimal piece rate and minimal regret over ``alphas``.

    Args:
        alphas: Weights on worker surplus, each at least 1.
        p_template: Supplies ``ybar``; defaults to ``Params()``.
        emit: Called with each row as it is produced.
    """
    template = Params() if p_template is None else p_template
    rows = []
    for alpha in alphas:
        p = Params(float(alpha), template.ybar)
        ls = ell_star(p.alpha)
        row = SweepRow(
            p.alpha, ls, rbar(p), branch_no_production(ls, p), branch_extraction(ls, p)
        )
        if emit is not None:
            emit(row)
        rows.append(row)
    return rows
