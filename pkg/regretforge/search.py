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
"""Seeded adversarial search for high-regret technologies.

Binary candidates are screened in batches by :func:`screen_binary`, which solves the firm's and
the regulator's programs in slope space: on a grid ``{0, top}`` a contract is a single payment
``s * top``, incentive compatibility of action ``i`` is an interval of slopes bounded by the
cost chords to the other actions, and the regulation is a set of slope intervals at ``top``.
The winner is re-evaluated with :func:`regretforge.engine.regret`.

Candidates are generated in the calling thread; only screening runs in the worker pool and
chunk results are reassembled in submission order, so the outcome does not depend on the
number of threads.
"""

from __future__ import annotations

import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from regretforge.constructions import (
    construct_extraction_curve,
    construct_no_production_curve,
    optimal_k_no_production,
)
from regretforge.engine import regret
from regretforge.minmax import KnowledgeBox
from regretforge.model import (
    EPS_TOL,
    PROB_TOL,
    Action,
    LinearFamily,
    OutputGrid,
    Params,
    Regulation,
    Technology,
    binary_technology,
)

if sys.version_info >= (3, 8):
    from typing import Literal
else:
    from typing_extensions import Literal

__all__ = [
    "SearchConfig",
    "SearchResult",
    "random_binary_technology",
    "screen_binary",
    "adversarial_search",
]

logger = logging.getLogger(__name__)

_SLOPE_TOL = 1e-12

RngLike = Union[int, np.random.Generator, None]


@dataclass(frozen=True)
class SearchConfig:
    """Budget, sampling ranges and meta-parameters of an adversarial search.

    Args:
        seed: Seed of the candidate generator.
        budget: Number of random candidates.
        max_actions: Largest number of actions per random candidate.
        k_range: Closed range production costs are drawn from.
        mean_range: Closed range action means are drawn from.
        grid_top: The positive support level ``y'`` of binary candidates.
        support: ``"binary"`` or ``"three_point"`` candidates.
        elite_fraction: Share of the pool that is hill-climbed.
        rounds: Hill-climbing rounds.
        initial_step: First perturbation size; halved after a round without improvement.
        chunk_size: Candidates per screening call.
        seed_resolution: Number of actions on the seeded closed-form curves.
    """

    seed: int = 0
    budget: int = 10000
    max_actions: int = 20
    k_range: Tuple[float, float] = (0.0, 1.0)
    mean_range: Tuple[float, float] = (0.0, 1.0)
    grid_top: float = 1.0
    support: Literal["binary", "three_point"] = "binary"
    elite_fraction: float = 0.01
    rounds: int = 8
    initial_step: float = 0.05
    chunk_size: int = 2048
    seed_resolution: int = 2000

    def __post_init__(self) -> None:
        if self.budget < 0:
            raise ValueError(f"budget must be nonnegative, got {self.budget}")
        if self.max_actions < 1:
            raise ValueError(f"max_actions must be at least 1, got {self.max_actions}")
        for name in ("k_range", "mean_range"):
            lo, hi = getattr(self, name)
            if not 0.0 <= lo <= hi:
                raise ValueError(f"{name} must satisfy 0 <= lo <= hi, got ({lo}, {hi})")
        if self.grid_top <= 0 or self.mean_range[1] > self.grid_top + PROB_TOL:
            raise ValueError("grid_top must be positive and at least the largest mean")
        if self.support not in ("binary", "three_point"):
            raise ValueError(f"Unknown support {self.support!r}")
        if not 0.0 < self.elite_fraction <= 1.0:
            raise ValueError(f"elite_fraction must lie in (0, 1], got {self.elite_fraction}")
        if self.rounds < 0 or self.initial_step <= 0:
            raise ValueError("rounds must be nonnegative and initial_step positive")
        if self.chunk_size < 1 or self.seed_resolution < 2:
            raise ValueError("chunk_size must be positive and seed_resolution at least 2")

    @classmethod
    def for_params(cls, p: Params, **overrides: Any) -> SearchConfig:
        """Defaults scaled to ``p.ybar``, with keyword overrides."""
        scaled: Dict[str, Any] = {
            "k_range": (0.0, p.ybar),
            "mean_range": (0.0, p.ybar),
            "grid_top": p.ybar,
            "initial_step": 0.05 * p.ybar,
        }
        scaled.update(overrides)
        return cls(**scaled)

    @classmethod
    def for_box(cls, p: Params, box: KnowledgeBox, **overrides: Any) -> SearchConfig:
        """Defaults whose sampling ranges are the bounds of ``box``."""
        box.check(p)
        ranges: Dict[str, Any] = {
            "k_range": (box.k_lo, min(box.k_hi, p.ybar)),
            "mean_range": (box.y_lo, p.ybar),
        }
        ranges.update(overrides)
        return cls.for_params(p, **ranges)

    def check(self, p: Params) -> None:
        if self.mean_range[1] > p.ybar + PROB_TOL:
            raise ValueError(f"mean_range {self.mean_range} exceeds ybar={p.ybar}")


@dataclass(frozen=True)
class SearchResult:
    """The highest-regret technology found.

    ``regret`` is recomputed by the engine; ``screening_regret`` is the value the search ranked
    the candidate by. Unpacks as ``(technology, regret)``.
    """

    technology: Technology
    regret: float
    screening_regret: float
    candidate_index: int
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __iter__(self) -> Any:
        return iter((self.technology, self.regret))


@dataclass
class _Pool:
    """Padded binary candidates: columns at or past ``counts`` repeat column 0."""

    k: np.ndarray
    means: np.ndarray
    efforts: np.ndarray
    counts: np.ndarray

    def repad(self) -> None:
        cols = np.arange(self.means.shape[1])[None, :]
        live = cols < self.counts[:, None]
        self.means = np.where(live, self.means, self.means[:, :1])
        self.efforts = np.where(live, self.efforts, self.efforts[:, :1])

    def technology(self, i: int, top: float) -> Technology:
        c = int(self.counts[i])
        return binary_technology(float(self.k[i]), self.means[i, :c], self.efforts[i, :c], top)


def _draw_pool(cfg: SearchConfig, rng: np.random.Generator, size: int) -> _Pool:
    m = cfg.max_actions
    k = rng.uniform(cfg.k_range[0], cfg.k_range[1], size)
    counts = rng.integers(1, m + 1, size)
    means = rng.uniform(cfg.mean_range[0], cfg.mean_range[1], (size, m))
    efforts = rng.uniform(0.0, 1.0, (size, m)) * means
    pool = _Pool(k, means, efforts, counts)
    pool.repad()
    return pool


def random_binary_technology(cfg: SearchConfig, rng_state: RngLike = None) -> Technology:
    """Draw one binary technology on ``{0, cfg.grid_top}``.

    ``k`` is uniform on ``k_range``; between 1 and ``max_actions`` actions have means uniform on
    ``mean_range`` and costs uniform on ``[0, mean]``.
    """
    rng = np.random.default_rng(cfg.seed if rng_state is None else rng_state)
    return _draw_pool(cfg, rng, 1).technology(0, cfg.grid_top)


def _slope_intervals(r: Regulation, top: float) -> np.ndarray:
    if isinstance(r, LinearFamily):
        return np.array([(s, s) for s in r.slopes])
    grid = OutputGrid([0.0, top])
    if r.grid is not None and r.grid != grid:
        raise ValueError(f"{r!r} is not defined on the search grid {grid!r}")
    return np.array(r.image_at(top)) / top


def screen_binary(
    k: np.ndarray,
    means: np.ndarray,
    efforts: np.ndarray,
    slopes: np.ndarray,
    alpha: float,
) -> np.ndarray:
    """Regret of a batch of binary technologies under a regulation given by slope intervals.

    Args:
        k: Production costs, shape ``(B,)``.
        means: Action means, shape ``(B, M)``.
        efforts: Action costs, shape ``(B, M)``.
        slopes: Allowed slope intervals ``(lo, hi)`` at the top output, shape ``(J, 2)``.
        alpha: The regulator's weight on worker surplus.

    Returns:
        Regrets, shape ``(B,)``.
    """
    dm = means[:, :, None] - means[:, None, :]
    de = efforts[:, :, None] - efforts[:, None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        chord = de / dm
        ir = np.where(means > 0, efforts / means, np.where(efforts > 0, np.inf, 0.0))
    lower = np.where(dm > 0, chord, -np.inf).max(axis=2)
    upper = np.where(dm < 0, chord, np.inf).min(axis=2)
    # an equal-mean action that is strictly cheaper is always preferred
    blocked = ((dm == 0) & (de > 0)).any(axis=2)
    lo = np.where(blocked, np.inf, np.maximum(np.maximum(lower, ir), 0.0))
    hi = np.minimum(upper, 1.0)

    firm_slope = np.full(lo.shape, np.inf)
    for a, b in slopes:
        s = np.maximum(lo, a)
        ok = s <= np.minimum(hi, b) + _SLOPE_TOL
        firm_slope = np.where(ok, np.minimum(firm_slope, np.minimum(s, b)), firm_slope)
    feasible = np.isfinite(firm_slope)
    paid = np.where(feasible, firm_slope, 0.0) * means
    profit = np.where(feasible, means - paid - k[:, None], -np.inf)
    best = profit.max(axis=1)
    candidates = profit >= best[:, None] - EPS_TOL
    payoff = np.where(candidates, profit + alpha * (paid - efforts), np.inf).min(axis=1)
    payoff = np.where(best > EPS_TOL, payoff, 0.0)

    with np.errstate(divide="ignore", invalid="ignore"):
        cap = np.where(means > 0, (means - k[:, None] + EPS_TOL) / means, 0.0)
    top_slope = np.minimum(np.minimum(hi, 1.0), cap)
    ok = lo <= top_slope + _SLOPE_TOL
    transfer = np.minimum(np.maximum(top_slope, 0.0) * means, means - k[:, None])
    value = means - k[:, None] - transfer + alpha * (transfer - efforts)
    full_info = np.maximum(np.where(ok, value, -np.inf).max(axis=1), 0.0)
    return np.maximum(full_info - payoff, 0.0)


def _screen_pool(
    pool: _Pool, slopes: np.ndarray, alpha: float, chunk: int, threads: int
) -> np.ndarray:
    bounds = [(i, min(i + chunk, pool.k.size)) for i in range(0, pool.k.size, chunk)]

    def run(span: Tuple[int, int]) -> np.ndarray:
        lo, hi = span
        return screen_binary(
            pool.k[lo:hi], pool.means[lo:hi], pool.efforts[lo:hi], slopes, alpha
        )

    if not bounds:
        return np.zeros(0)
    if threads == 1 or len(bounds) == 1:
        return np.concatenate([run(b) for b in bounds])
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return np.concatenate(list(executor.map(run, bounds)))


def _climb(
    pool: _Pool,
    scores: np.ndarray,
    cfg: SearchConfig,
    slopes: np.ndarray,
    alpha: float,
    threads: int,
) -> Tuple[_Pool, np.ndarray]:
    """Greedy coordinate ascent on ``(k, means, costs)`` for every candidate in ``pool``."""
    n, m = pool.means.shape
    n_moves = 2 * (1 + 2 * m)
    coord = np.arange(n_moves) // 2
    sign = np.where(np.arange(n_moves) % 2 == 0, 1.0, -1.0)
    cols = np.arange(m)[None, :]
    on_mean = (cols == (coord - 1)[:, None]).astype(float)
    on_effort = (cols == (coord - 1 - m)[:, None]).astype(float)
    step = np.full(n, cfg.initial_step)
    for round_ in range(cfg.rounds):
        delta = sign[None, :] * step[:, None]
        trial = _Pool(
            np.clip(
                (pool.k[:, None] + np.where(coord == 0, delta, 0.0)).ravel(), *cfg.k_range
            ),
            np.clip(
                (pool.means[:, None, :] + delta[:, :, None] * on_mean[None]).reshape(-1, m),
                *cfg.mean_range,
            ),
            np.maximum(
                (pool.efforts[:, None, :] + delta[:, :, None] * on_effort[None]).reshape(-1, m),
                0.0,
            ),
            np.repeat(pool.counts, n_moves),
        )
        trial.repad()
        trial_scores = _screen_pool(trial, slopes, alpha, cfg.chunk_size, threads).reshape(
            n, n_moves
        )
        pick = np.argmax(trial_scores, axis=1)
        gain = trial_scores[np.arange(n), pick]
        better = gain > scores
        rows = np.flatnonzero(better) * n_moves + pick[better]
        pool.k[better] = trial.k[rows]
        pool.means[better] = trial.means[rows]
        pool.efforts[better] = trial.efforts[rows]
        scores = np.where(better, gain, scores)
        step = np.where(better, step, 0.5 * step)
        logger.debug("Hill-climb round %d improved %d of %d candidates", round_, better.sum(), n)
    return pool, scores


def _within_ranges(t: Technology, cfg: SearchConfig) -> bool:
    k_lo, k_hi = cfg.k_range
    y_lo, y_hi = cfg.mean_range
    k_ok = k_lo - EPS_TOL <= t.k <= k_hi + EPS_TOL
    return k_ok and bool(np.all((t.means >= y_lo - PROB_TOL) & (t.means <= y_hi + PROB_TOL)))


def _seed_technologies(
    r: Regulation, p: Params, cfg: SearchConfig
) -> List[Tuple[str, Dict[str, float], Technology]]:
    """The closed-form lower-bound technologies for the regulation's slope at ``grid_top``.

    Each construction is placed inside ``k_range`` and ``mean_range``; one that cannot be is
    dropped.
    """
    top = cfg.grid_top
    ceiling = min(p.ybar, cfg.mean_range[1])
    k_lo, k_hi = cfg.k_range
    y_lo = cfg.mean_range[0]
    ell = min(max(r.min_guarantee(top) / top, 0.0), 1.0)
    n = cfg.seed_resolution
    if ceiling <= y_lo:
        return []
    candidates: List[Tuple[str, Dict[str, float], Technology]] = []

    k_room = (1.0 - ell) * ceiling
    if ell < 0.5 and max(k_lo, EPS_TOL) < k_room:
        k_floor = (1.0 - ell) * y_lo
        if k_floor <= k_hi:
            k = optimal_k_no_production(ell * ceiling, ceiling)
            k = min(max(k, k_lo, k_floor), k_hi)
        else:
            k = k_hi
        k = min(max(k, EPS_TOL), k_room * (1.0 - 1e-6))
        tech = construct_no_production_curve(
            ell * top, top, k, n, top_mean=ceiling, bottom_mean=y_lo
        )
        candidates.append(("no_production", {"k": k, "ell": ell}, tech))

    if ell < 1.0:
        mu_f = max(ceiling * math.exp(-1.0 / p.alpha), y_lo, k_lo / (1.0 - ell))
        if mu_f < ceiling:
            tech = construct_extraction_curve(ell * top, top, mu_f, n, top_mean=ceiling, k=k_lo)
            candidates.append(("extraction", {"muF": mu_f, "k": k_lo, "ell": ell}, tech))

    if 0.0 < ell < 1.0:
        mean = min(k_hi / (1.0 - ell), ceiling)
        k = (1.0 - ell) * mean
        if mean >= y_lo and k >= k_lo:
            tech = binary_technology(k, [mean], [0.0], top)
            candidates.append(("single_action", {"k": k, "ell": ell}, tech))

    seeds = []
    for name, params, tech in candidates:
        if _within_ranges(tech, cfg):
            seeds.append((name, params, tech))
        else:
            logger.debug("Dropping seed %s outside the sampling ranges", name)
    return seeds


def _three_point_search(
    r: Regulation, p: Params, cfg: SearchConfig, threads: int
) -> Tuple[List[Technology], np.ndarray]:
    top = cfg.grid_top
    grid = OutputGrid([0.0, top / 2, top, 1.5 * top])
    if r.grid is not None and r.grid != grid:
        raise ValueError(f"{r!r} is not defined on the search grid {grid!r}")
    rng = np.random.default_rng(cfg.seed)
    techs = []
    for _ in range(cfg.budget):
        count = int(rng.integers(1, cfg.max_actions + 1))
        probs = rng.dirichlet(np.ones(len(grid)), size=count)
        means = probs @ grid.levels
        shrink = np.minimum(1.0, cfg.mean_range[1] / np.maximum(means, PROB_TOL))
        probs = probs * shrink[:, None]
        probs[:, 0] += 1.0 - probs.sum(axis=1)
        means = probs @ grid.levels
        # mix short rows with a point mass at top until they reach the least mean
        gap = (top - cfg.mean_range[0]) / np.maximum(top - means, PROB_TOL)
        lift = np.where(means < cfg.mean_range[0], gap, 1.0)
        probs = probs * lift[:, None]
        probs[:, 2] += 1.0 - lift
        efforts = rng.uniform(0.0, 1.0, count) * (probs @ grid.levels)
        k = float(rng.uniform(*cfg.k_range))
        techs.append(Technology(k, grid, [Action(e, row) for e, row in zip(efforts, probs)]))

    def run(t: Technology) -> float:
        return regret(t, r, p).regret

    if threads == 1:
        scores = [run(t) for t in techs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            scores = list(executor.map(run, techs))
    return techs, np.array(scores)


def adversarial_search(
    r: Regulation, p: Params, cfg: Optional[SearchConfig] = None, threads: int = 1
) -> SearchResult:
    """Search for the technology with the largest regret under ``r``.

    The closed-form lower-bound constructions at the regulation's slope are evaluated first,
    then ``cfg.budget`` random candidates; the best ``elite_fraction`` of the random pool is
    hill-climbed. Ties go to the earliest candidate, seeds before the random pool.

    Args:
        r: The regulation under test.
        p: Model parameters.
        cfg: Search configuration, ``SearchConfig.for_params(p)`` by default.
        threads: Worker threads for candidate screening; 0 uses every core.

    Returns:
        A :class:`SearchResult`; the regret is certified by the engine.
    """
    cfg = SearchConfig.for_params(p) if cfg is None else cfg
    cfg.check(p)
    if cfg.budget < 1:
        raise ValueError("An adversarial search needs a budget of at least 1")
    threads = threads or (os.cpu_count() or 1)
    logger.info(
        "Searching %s with %d %s candidates, seed %d", r, cfg.budget, cfg.support, cfg.seed
    )

    seed_grid_ok = cfg.support == "binary" or r.grid is None
    seeds = _seed_technologies(r, p, cfg) if seed_grid_ok else []
    seed_scores = np.array([regret(t, r, p).regret for _, _, t in seeds])
    provenance: Dict[str, Any] = {
        "config": asdict(cfg),
        "alpha": p.alpha,
        "ybar": p.ybar,
        "regulation": repr(r),
        "seeds": [
            {"name": name, "parameters": params, "regret": float(score)}
            for (name, params, _), score in zip(seeds, seed_scores)
        ],
    }

    if cfg.support == "three_point":
        techs, scores = _three_point_search(r, p, cfg, threads)
        climbed = scores
    else:
        slopes = _slope_intervals(r, cfg.grid_top)
        pool = _draw_pool(cfg, np.random.default_rng(cfg.seed), cfg.budget)
        scores = _screen_pool(pool, slopes, p.alpha, cfg.chunk_size, threads)
        n_elite = min(cfg.budget, max(1, math.ceil(cfg.elite_fraction * cfg.budget)))
        elite = np.sort(np.argsort(-scores, kind="stable")[:n_elite])
        logger.info("Hill-climbing %d elite candidates for %d rounds", n_elite, cfg.rounds)
        sub = _Pool(
            pool.k[elite].copy(),
            pool.means[elite].copy(),
            pool.efforts[elite].copy(),
            pool.counts[elite],
        )
        sub, elite_scores = _climb(sub, scores[elite], cfg, slopes, p.alpha, threads)
        pool.k[elite], pool.means[elite], pool.efforts[elite] = sub.k, sub.means, sub.efforts
        climbed = scores.copy()
        climbed[elite] = elite_scores

    ranking = np.concatenate([seed_scores, climbed])
    best = int(np.argmax(ranking))
    if best < len(seeds):
        name, _, tech = seeds[best]
        provenance["source"] = f"seed:{name}"
    else:
        i = best - len(seeds)
        tech = techs[i] if cfg.support == "three_point" else pool.technology(i, cfg.grid_top)
        provenance["source"] = "pool"
    certified = regret(tech, r, p).regret
    logger.info(
        "Best candidate %d: screening regret %r, engine regret %r", best, ranking[best], certified
    )
    return SearchResult(tech, certified, float(ranking[best]), best, provenance)
