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

import pytest

from regretforge import *


def test_zero_budget_is_empty():
    cfg = SearchConfig(budget=0)
    report = bench_search(cfg)
    assert report.empty
    assert report.median_seconds == 0.0
    assert bench_search(SearchConfig(budget=100), repetitions=0).empty


def test_bench_rows():
    p = Params(2.0)
    cfg = SearchConfig.for_params(p, seed=5, budget=200, max_actions=6)
    report = bench_search(cfg, p, repetitions=3)
    assert [row.repetition for row in report.rows] == [0, 1, 2]
    assert all(row.seconds > 0 for row in report.rows)
    assert len({row.best_regret for row in report.rows}) == 1
    assert report.rows[0].best_regret <= rbar(p) + 1e-6
    assert report.median_evaluations_per_second > 0
    assert report.rows[0].evaluations_per_second == pytest.approx(200 / report.rows[0].seconds)
