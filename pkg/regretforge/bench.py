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
"""Throughput benchmark for the adversarial search."""

from __future__ import annotations

import logging
import statistics
import time
from dataclasses import dataclass
from typing import List, NamedTuple, Optional

from regretforge.minmax import ell_star
from regretforge.model import MPR, Params, Regulation
from regretforge.search import SearchConfig, adversarial_search

__all__ = ["BenchRow", "BenchReport", "bench_search"]

logger = logging.getLogger(__name__)


class BenchRow(NamedTuple):
    repetition: int
    seconds: float
    evaluations_per_second: float
    best_regret: float


@dataclass(frozen=True)
class BenchReport:
    rows: List[BenchRow]
    median_seconds: float
    median_evaluations_per_second: float

    @property
    def empty(self) -> bool:
        return not self.rows


def bench_search(
    cfg: SearchConfig,
    p: Optional[Params] = None,
    r: Optional[Regulation] = None,
    repetitions: int = 5,
    threads: int = 1,
) -> BenchReport:
    """Time ``repetitions`` identical searches and report medians.

    Args:
        cfg: The search configuration; a zero budget gives an empty report.
        p: Model parameters, ``Params()`` by default.
        r: The regulation searched against, the optimal piece rate by default.
        repetitions: Number of timed runs.
        threads: Worker threads, fixed for every run.
    """
    p = Params() if p is None else p
    r = MPR(ell_star(p.alpha)) if r is None else r
    if cfg.budget == 0 or repetitions < 1:
        return BenchReport([], 0.0, 0.0)
    rows = []
    for rep in range(repetitions):
        start = time.perf_counter()
        result = adversarial_search(r, p, cfg, threads=threads)
        seconds = time.perf_counter() - start
        rows.append(BenchRow(rep, seconds, cfg.budget / seconds, result.regret))
        logger.info("Benchmark run %d: %.3f s", rep, seconds)
    return BenchReport(
        rows,
        statistics.median(row.seconds for row in rows),
        statistics.median(row.evaluations_per_second for row in rows),
    )
