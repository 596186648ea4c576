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

import numpy as np
import pytest

from regretforge import *


def point_technology(k):
    return Technology(k, OutputGrid([0.0, 0.5]), [Action(0.0, [0.0, 1.0])])


def test_regret_with_production():
    report = regret(point_technology(0.3), MPR(1 / 3), Params(2.0))
    assert report.participated
    assert report.scenario == "production"
    assert report.action_index == 0
    assert report.full_info_value == pytest.approx(0.4)
    assert report.profit == pytest.approx(1 / 30)
    assert report.worker_surplus == pytest.approx(1 / 6)
    assert report.regret == pytest.approx(0.4 - (1 / 30 + 2 / 6))


def test_regret_with_exit():
    report = regret(point_technology(0.4), MPR(1 / 3), Params(2.0))
    assert not report.participated
    assert report.scenario == "exit"
    assert report.action_index is None
    assert report.regret == pytest.approx(0.2)


def test_regret_decomposition():
    cfg = SearchConfig(max_actions=6)
    rng = np.random.default_rng(17)
    for _ in range(200):
        t = random_binary_technology(cfg, rng)
        alpha = float(rng.uniform(1.0, 5.0))
        p = Params(alpha)
        r = MPR(float(rng.uniform(0.0, 0.6)))
        report = regret(t, r, p)
        payoff = report.profit + alpha * report.worker_surplus
        assert report.regret >= 0.0
        assert report.regret == pytest.approx(report.full_info_value - payoff, abs=1e-9)


def test_regret_does_not_read_regulation_for_benchmark():
    t = binary_technology(0.1, [0.3, 0.9], [0.0, 0.2], 1.0)
    p = Params(2.0)
    values = {regret(t, r, p).full_info_value for r in (All(), MPR(0.3), LinearFamily([0.5]))}
    assert len(values) == 1


def test_regret_rejects_invalid_technology():
    t = Technology(0.0, OutputGrid([0.0, 1.0]), [Action(0.0, [0.5, 0.6])])
    with pytest.raises(ValueError):
        regret(t, All(), Params())
