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
"""Domain types for the contracting game.

Outputs live on a finite :class:`OutputGrid` that always starts at 0. An :class:`Action` pairs an
effort cost with a distribution over that grid, a :class:`Technology` is a production cost plus
a set of actions, and a :class:`Contract` is a payment schedule obeying limited liability
(``0 <= w(y) <= y``). A :class:`Regulation` restricts the contracts a firm may offer.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "EPS_TOL",
    "PROB_TOL",
    "ALPHA_MAX",
    "Params",
    "OutputGrid",
    "Action",
    "Technology",
    "Contract",
    "Interval",
    "Regulation",
    "All",
    "MPR",
    "MinimumContract",
    "LinearFamily",
    "ImageConstrained",
    "EquilibriumOutcome",
    "validate_technology",
    "check_technology",
    "action_mean",
    "binary_action",
    "binary_technology",
    "linear_contract",
    "min_guarantee",
    "contract_allowed",
]

EPS_TOL = 1e-9
PROB_TOL = 1e-12
ALPHA_MAX = 1e12

Interval = Tuple[float, float]


def _frozen(values: Any, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Params:
    """Model parameters.

    Args:
        alpha: Weight the regulator puts on worker surplus, ``1 <= alpha <= ALPHA_MAX``.
        ybar: Upper bound on the expected output of any action.
    """

    alpha: float = 2.0
    ybar: float = 1.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.alpha) or self.alpha < 1:
            raise ValueError(f"alpha must be at least 1, got {self.alpha}")
        if self.alpha > ALPHA_MAX:
            raise ValueError(f"alpha is capped at {ALPHA_MAX:g}, got {self.alpha}")
        if not math.isfinite(self.ybar) or self.ybar <= 0:
            raise ValueError(f"ybar must be positive, got {self.ybar}")

    def scaled(self, lam: float) -> Params:
        return Params(self.alpha, self.ybar * lam)


class OutputGrid:
    """Strictly increasing output levels starting at 0."""

    def __init__(self, levels: Iterable[float]):
        arr = _frozen(list(levels), "grid levels")
        if arr.size == 0:
            raise ValueError("An output grid needs at least one level")
        if arr[0] != 0:
            raise ValueError(f"The first grid level must be 0, got {arr[0]}")
        if np.any(np.diff(arr) <= 0):
            raise ValueError("Grid levels must be strictly increasing")
        self.levels = arr

    @property
    def top(self) -> float:
        return float(self.levels[-1])

    def index_of(self, y: float, tol: float = 0.0) -> int:
        """Position of ``y`` on the grid, matching within ``tol``."""
        hits = np.flatnonzero(np.abs(self.levels - y) <= tol)
        if hits.size == 0:
            raise ValueError(f"Output {y} is not a grid level")
        return int(hits[0])

    def scaled(self, lam: float) -> OutputGrid:
        return OutputGrid(self.levels * lam)

    def __len__(self) -> int:
        return int(self.levels.size)

    def __iter__(self) -> Iterator[float]:
        return iter(float(y) for y in self.levels)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OutputGrid):
            return NotImplemented
        return bool(np.array_equal(self.levels, other.levels))

    def __hash__(self) -> int:
        return hash(tuple(self.levels.tolist()))

    def __repr__(self) -> str:
        return f"OutputGrid({self.levels.tolist()})"


@dataclass(frozen=True, eq=False)
class Action:
    """An effort cost paired with a distribution over a grid."""

    effort: float
    probs: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "effort", float(self.effort))
        object.__setattr__(self, "probs", _frozen(self.probs, "probs"))
        if not math.isfinite(self.effort):
            raise ValueError("effort must be finite")

    def mean(self, grid: OutputGrid) -> float:
        return action_mean(self, grid)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Action):
            return NotImplemented
        return self.effort == other.effort and bool(np.array_equal(self.probs, other.probs))

    def __hash__(self) -> int:
        return hash((self.effort, tuple(self.probs.tolist())))


class Technology:
    """A production cost ``k`` plus a nonempty set of actions on a shared grid.

    The probability matrix, effort vector and mean vector are precomputed since every solver
    works on them row-wise.
    """

    def __init__(self, k: float, grid: OutputGrid, actions: Sequence[Action]):
        self.k = float(k)
        self.grid = grid
        self.actions: Tuple[Action, ...] = tuple(actions)
        if not math.isfinite(self.k):
            raise ValueError("k must be finite")
        if not self.actions:
            raise ValueError("A technology needs at least one action")
        for i, action in enumerate(self.actions):
            if action.probs.size != len(grid):
                raise ValueError(
                    f"Action {i} has {action.probs.size} probabilities for a grid "
                    f"with {len(grid)} levels"
                )
        self.probs = np.vstack([a.probs for a in self.actions])
        self.probs.setflags(write=False)
        self.efforts = np.array([a.effort for a in self.actions])
        self.efforts.setflags(write=False)
        self.means = self.probs @ grid.levels
        self.means.setflags(write=False)

    @classmethod
    def from_arrays(
        cls, k: float, grid: OutputGrid, efforts: Sequence[float], probs: Any
    ) -> Technology:
        probs = np.atleast_2d(np.asarray(probs, dtype=float))
        return cls(k, grid, [Action(e, row) for e, row in zip(efforts, probs)])

    def scaled(self, lam: float) -> Technology:
        """Multiply outputs, efforts and ``k`` by ``lam``; probabilities are unchanged."""
        if lam <= 0:
            raise ValueError(f"Scale must be positive, got {lam}")
        return Technology(
            self.k * lam, self.grid.scaled(lam), [Action(a.effort * lam, a.probs) for a in self]
        )

    def __len__(self) -> int:
        return len(self.actions)

    def __iter__(self) -> Iterator[Action]:
        return iter(self.actions)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Technology):
            return NotImplemented
        return (
            self.k == other.k and self.grid == other.grid and self.actions == other.actions
        )

    def __repr__(self) -> str:
        return f"Technology(k={self.k!r}, grid={self.grid!r}, actions={len(self)})"


class Contract:
    """A payment schedule on a grid obeying limited liability.

    Payments within ``tol`` outside ``[0, y]`` are clipped onto it, so solver round-off never
    produces an invalid contract. Larger violations raise ``ValueError``.
    """

    def __init__(self, grid: OutputGrid, payments: Iterable[float], tol: float = EPS_TOL):
        arr = np.array(list(payments), dtype=float)
        if arr.shape != grid.levels.shape:
            raise ValueError(
                f"Contract has {arr.size} payments for a grid with {len(grid)} levels"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("Payments must be finite")
        if np.any(arr < -tol) or np.any(arr > grid.levels + tol):
            raise ValueError("Payments must satisfy 0 <= w(y) <= y")
        arr = np.clip(arr, 0.0, grid.levels)
        arr[0] = 0.0
        arr.setflags(write=False)
        self.grid = grid
        self.payments = arr

    def expected_payment(self, action: Action) -> float:
        return float(np.dot(action.probs, self.payments))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Contract):
            return NotImplemented
        return self.grid == other.grid and bool(np.array_equal(self.payments, other.payments))

    def __repr__(self) -> str:
        return f"Contract({self.payments.tolist()})"


def _check_slope(slope: float) -> float:
    slope = float(slope)
    if not 0.0 <= slope <= 1.0:
        raise ValueError(f"Slope {slope} out of [0, 1]")
    return slope


def _check_intervals(y: float, intervals: Iterable[Sequence[float]]) -> Tuple[Interval, ...]:
    out = []
    for pair in intervals:
        if len(pair) != 2:
            raise ValueError(f"Expected a (lo, hi) pair at output {y}, got {pair!r}")
        lo, hi = float(pair[0]), float(pair[1])
        if not (0.0 <= lo <= hi <= y + PROB_TOL):
            raise ValueError(f"Interval ({lo}, {hi}) is not inside [0, {y}]")
        out.append((lo, min(hi, y)))
    if not out:
        raise ValueError(f"Output {y} has no allowed payment interval")
    return tuple(sorted(out))


class Regulation(ABC):
    """A set of allowed contracts."""

    kind: str

    @abstractmethod
    def min_guarantee(self, y: float) -> float:
        """The least payment any allowed contract makes at output ``y``."""

    @abstractmethod
    def allows(self, w: Contract, tol: float = EPS_TOL) -> bool:
        """Whether ``w`` belongs to the regulation within ``tol``."""

    @abstractmethod
    def image_at(self, y: float) -> List[Interval]:
        """Payments allowed contracts make at ``y``, as closed intervals."""

    @property
    def grid(self) -> Optional[OutputGrid]:
        """The grid the regulation is defined on, or None for analytic kinds."""
        return None

    def payment_intervals(self, grid: OutputGrid) -> List[List[Interval]]:
        """Describe the regulation on ``grid`` as a product of per-level interval lists."""
        return [self.image_at(y) for y in grid]

    @abstractmethod
    def _key(self) -> Tuple[Any, ...]:
        ...

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Regulation):
            return NotImplemented
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash((type(self).__name__, self._key()))


class All(Regulation):
    """Laissez-faire: every limited-liability contract."""

    kind = "all"

    def min_guarantee(self, y: float) -> float:
        return 0.0

    def allows(self, w: Contract, tol: float = EPS_TOL) -> bool:
        return True

    def image_at(self, y: float) -> List[Interval]:
        return [(0.0, float(y))]

    def _key(self) -> Tuple[Any, ...]:
        return ()

    def __repr__(self) -> str:
        return "All()"


class MPR(Regulation):
    """Minimum piece rate: contracts pointwise above ``ell * y``."""

    kind = "mpr"

    def __init__(self, ell: float):
        self.ell = _check_slope(ell)

    def min_guarantee(self, y: float) -> float:
        return self.ell * y

    def allows(self, w: Contract, tol: float = EPS_TOL) -> bool:
        return bool(np.all(w.payments >= self.ell * w.grid.levels - tol))

    def image_at(self, y: float) -> List[Interval]:
        return [(self.ell * y, float(y))]

    def _key(self) -> Tuple[Any, ...]:
        return (self.ell,)

    def __repr__(self) -> str:
        return f"MPR({self.ell!r})"


class MinimumContract(Regulation):
    """Contracts pointwise above a floor schedule defined on a grid."""

    kind = "min_contract"

    def __init__(self, grid: OutputGrid, floor: Iterable[float]):
        floor_arr = np.array(list(floor), dtype=float)
        if floor_arr.shape != grid.levels.shape:
            raise ValueError("The floor must have one entry per grid level")
        if np.any(floor_arr < 0) or np.any(floor_arr > grid.levels + PROB_TOL):
            raise ValueError("The floor must satisfy 0 <= floor(y) <= y")
        floor_arr = np.minimum(floor_arr, grid.levels)
        floor_arr.setflags(write=False)
        self._grid = grid
        self.floor = floor_arr

    @property
    def grid(self) -> OutputGrid:
        return self._grid

    def min_guarantee(self, y: float) -> float:
        return float(self.floor[self._grid.index_of(y, PROB_TOL)])

    def allows(self, w: Contract, tol: float = EPS_TOL) -> bool:
        if w.grid != self._grid:
            return False
        return bool(np.all(w.payments >= self.floor - tol))

    def image_at(self, y: float) -> List[Interval]:
        i = self._grid.index_of(y, PROB_TOL)
        return [(float(self.floor[i]), float(self._grid.levels[i]))]

    def _key(self) -> Tuple[Any, ...]:
        return (tuple(self._grid.levels.tolist()), tuple(self.floor.tolist()))

    def __repr__(self) -> str:
        return f"MinimumContract({self._grid!r}, {self.floor.tolist()})"


class LinearFamily(Regulation):
    """A finite set of linear contracts ``s * y``."""

    kind = "linear_family"

    def __init__(self, slopes: Iterable[float]):
        self.slopes = tuple(sorted({_check_slope(s) for s in slopes}))
        if not self.slopes:
            raise ValueError("A linear family needs at least one slope")

    def min_guarantee(self, y: float) -> float:
        return self.slopes[0] * y

    def allows(self, w: Contract, tol: float = EPS_TOL) -> bool:
        return any(
            np.all(np.abs(w.payments - s * w.grid.levels) <= tol) for s in self.slopes
        )

    def image_at(self, y: float) -> List[Interval]:
        return [(s * y, s * y) for s in self.slopes]

    def payment_intervals(self, grid: OutputGrid) -> List[List[Interval]]:
        raise TypeError("A linear family is not a product of per-level intervals")

    def _key(self) -> Tuple[Any, ...]:
        return self.slopes

    def __repr__(self) -> str:
        return f"LinearFamily({list(self.slopes)!r})"


class ImageConstrained(Regulation):
    """Contracts whose payment at each grid level lies in one of that level's intervals."""

    kind = "image"

    def __init__(self, grid: OutputGrid, intervals: Sequence[Iterable[Sequence[float]]]):
        if len(intervals) != len(grid):
            raise ValueError("Need one interval list per grid level")
        self._grid = grid
        self.intervals: Tuple[Tuple[Interval, ...], ...] = tuple(
            _check_intervals(y, ivs) for y, ivs in zip(grid, intervals)
        )

    @property
    def grid(self) -> OutputGrid:
        return self._grid

    def min_guarantee(self, y: float) -> float:
        return self.intervals[self._grid.index_of(y, PROB_TOL)][0][0]

    def allows(self, w: Contract, tol: float = EPS_TOL) -> bool:
        if w.grid != self._grid:
            return False
        return all(
            any(lo - tol <= v <= hi + tol for lo, hi in ivs)
            for v, ivs in zip(w.payments, self.intervals)
        )

    def image_at(self, y: float) -> List[Interval]:
        return list(self.intervals[self._grid.index_of(y, PROB_TOL)])

    def _key(self) -> Tuple[Any, ...]:
        return (tuple(self._grid.levels.tolist()), self.intervals)

    def __repr__(self) -> str:
        return f"ImageConstrained({self._grid!r}, {[list(ivs) for ivs in self.intervals]!r})"


@dataclass(frozen=True)
class EquilibriumOutcome:
    """The contract the firm offers, the action the worker takes, and both payoffs."""

    participated: bool
    contract: Optional[Contract]
    action_index: Optional[int]
    profit: float
    worker_surplus: float

    @classmethod
    def exit(cls) -> EquilibriumOutcome:
        return cls(False, None, None, 0.0, 0.0)

    def payoff(self, alpha: float) -> float:
        """The regulator's weighted payoff ``profit + alpha * worker_surplus``."""
        return self.profit + alpha * self.worker_surplus


def validate_technology(t: Technology, p: Params) -> List[str]:
    """Report every invariant violation of ``t``; an empty list means valid."""
    problems = []
    if t.k < 0:
        problems.append(f"k is negative ({t.k})")
    for i, action in enumerate(t.actions):
        if action.effort < 0:
            problems.append(f"action {i}: effort is negative ({action.effort})")
        if np.any(action.probs < 0) or np.any(action.probs > 1):
            problems.append(f"action {i}: probabilities outside [0, 1]")
        total = float(action.probs.sum())
        if abs(total - 1.0) > PROB_TOL:
            problems.append(f"action {i}: probabilities do not sum to 1 (sum {total!r})")
        if t.means[i] > p.ybar + PROB_TOL:
            problems.append(f"action {i}: mean exceeds ybar ({t.means[i]!r} > {p.ybar!r})")
    return problems


def check_technology(t: Technology, p: Params) -> None:
    """Raise ``ValueError`` listing the violations found by :func:`validate_technology`."""
    problems = validate_technology(t, p)
    if problems:
        raise ValueError("Invalid technology: " + "; ".join(problems))


def action_mean(a: Action, g: OutputGrid) -> float:
    if a.probs.size != len(g):
        raise ValueError(f"Action has {a.probs.size} probabilities for {len(g)} grid levels")
    return float(np.dot(a.probs, g.levels))


def binary_action(mu: float, e: float, top: float) -> Action:
    """The action with mean ``mu`` supported on ``{0, top}``."""
    if top <= 0:
        raise ValueError(f"top must be positive, got {top}")
    if not 0.0 <= mu <= top:
        raise ValueError(f"Mean {mu} must lie in [0, {top}]")
    q = mu / top
    return Action(e, np.array([1.0 - q, q]))


def binary_technology(
    k: float, means: Sequence[float], efforts: Sequence[float], top: float
) -> Technology:
    """A technology whose actions are all supported on ``{0, top}``."""
    if len(means) != len(efforts):
        raise ValueError("means and efforts must have the same length")
    grid = OutputGrid([0.0, top])
    return Technology(k, grid, [binary_action(mu, e, top) for mu, e in zip(means, efforts)])


def linear_contract(slope: float, grid: OutputGrid) -> Contract:
    return Contract(grid, _check_slope(slope) * grid.levels)


def min_guarantee(r: Regulation, y: float) -> float:
    if y < 0:
        raise ValueError(f"Output must be nonnegative, got {y}")
    return r.min_guarantee(y)


def contract_allowed(r: Regulation, w: Contract, tol: float = EPS_TOL) -> bool:
    return r.allows(w, tol)

