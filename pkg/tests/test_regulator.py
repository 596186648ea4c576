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

GRID = OutputGrid([0.0, 1.0])


def test_max_transfer_implementation():
    t = Technology(0.0, GRID, [binary_action(0.5, 0.0, 1.0), binary_action(1.0, 0.2, 1.0)])
    res = max_transfer_implementation(t, 1)
    assert res.feasible
    assert res.contract.payments[1] == pytest.approx(1.0)
    assert res.expected_payment == pytest.approx(1.0)

    single = Technology(0.3, GRID, [binary_action(0.5, 0.0, 1.0)])
    res = max_transfer_implementation(single, 0)
    assert res.contract.payments[1] == pytest.approx(0.4)
    assert res.expected_payment == pytest.approx(0.2)

    costly = Technology(0.0, GRID, [binary_action(0.5, 0.6, 1.0)])
    assert not max_transfer_implementation(costly, 0).feasible

    with pytest.raises(IndexError):
        max_transfer_implementation(single, 1)


def test_full_info_value():
    p = Params(2.0)
    t = Technology(0.0, GRID, [binary_action(0.5, 0.0, 1.0), binary_action(1.0, 0.2, 1.0)])
    assert full_info_value(t, p) == pytest.approx(1.6)

    point = Technology(0.3, OutputGrid([0.0, 0.5]), [Action(0.0, [0.0, 1.0])])
    assert full_info_value(point, p) == pytest.approx(0.4)

    idle = binary_technology(0.9, [0.5, 0.8], [0.0, 0.1], 1.0)
    assert full_info_value(idle, p) == 0.0
    assert [res.feasible for res in transfer_table(idle)] == [False, False]


def test_full_info_value_rejects_invalid_technology():
    t = Technology(0.0, OutputGrid([0.0, 2.0]), [Action(0.0, [0.0, 1.0])])
    with pytest.raises(ValueError):
        full_info_value(t, Params())


@pytest.mark.parametrize("lam", [0.5, 2.0, 10.0])
def test_full_info_value_scales(lam):
    cfg = SearchConfig(max_actions=5)
    rng = np.random.default_rng(8)
    p = Params(2.0)
    for _ in range(50):
        t = random_binary_technology(cfg, rng)
        value = full_info_value(t, p)
        assert full_info_value(t.scaled(lam), p.scaled(lam)) == pytest.approx(
            lam * value, rel=1e-9, abs=1e-9 * lam
        )


def test_full_info_value_dominates_equilibria():
    cfg = SearchConfig(max_actions=6)
    rng = np.random.default_rng(9)
    p = Params(3.0)
    for _ in range(200):
        t = random_binary_technology(cfg, rng)
        value = full_info_value(t, p)
        for r in (All(), MPR(0.2), MPR(0.5), LinearFamily([0.3, 0.7])):
            assert value >= worst_case_equilibrium(t, r, p).payoff(p.alpha) - 1e-9
            assert value >= firm_best_response(t, r).payoff(p.alpha) - 1e-9


def test_max_transfer_payments_stay_within_output():
    ce = construct_gaming_violation((0.5, 1.5), (0.2, 0.2), 0.5, Params(2.0), 400)
    t = ce.technology
    res = max_transfer_implementation(t, len(t) - 1)
    assert res.feasible
    assert np.all(res.contract.payments <= t.grid.levels)
    assert np.all(res.contract.payments >= 0.0)
