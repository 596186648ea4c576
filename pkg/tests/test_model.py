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

import regretforge
from regretforge import *


def test_version_string():
    assert regretforge.__version__ == "0.1.0"


def test_params_validation():
    p = Params()
    assert (p.alpha, p.ybar) == (2.0, 1.0)
    assert p.scaled(3.0) == Params(2.0, 3.0)

    with pytest.raises(ValueError):
        Params(alpha=0.5)
    with pytest.raises(ValueError):
        Params(alpha=2e12)
    with pytest.raises(ValueError):
        Params(ybar=0.0)
    with pytest.raises(ValueError):
        Params(alpha=float("nan"))


def test_output_grid():
    g = OutputGrid([0.0, 0.5, 1.0])
    assert len(g) == 3
    assert g.top == 1.0
    assert g.index_of(0.5) == 1
    assert list(g.scaled(2.0)) == [0.0, 1.0, 2.0]
    assert g == OutputGrid([0, 0.5, 1])

    with pytest.raises(ValueError):
        OutputGrid([])
    with pytest.raises(ValueError):
        OutputGrid([0.1, 1.0])
    with pytest.raises(ValueError):
        OutputGrid([0.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        g.index_of(0.7)


def test_validate_technology():
    grid = OutputGrid([0.0, 1.0])
    t = Technology(0.0, grid, [Action(0.0, [0.5, 0.5])])
    assert validate_technology(t, Params()) == []
    check_technology(t, Params())

    bad = Technology(-0.1, grid, [Action(-0.2, [0.6, 0.5])])
    problems = validate_technology(bad, Params())
    assert len(problems) == 3
    assert any("k is negative" in msg for msg in problems)
    assert any("sum to 1" in msg for msg in problems)

    high = Technology(0.0, OutputGrid([0.0, 2.0]), [Action(0.0, [0.0, 1.0])])
    assert any("exceeds ybar" in msg for msg in validate_technology(high, Params()))
    with pytest.raises(ValueError):
        check_technology(high, Params())

    with pytest.raises(ValueError):
        Technology(0.0, grid, [])
    with pytest.raises(ValueError):
        Technology(0.0, grid, [Action(0.0, [0.2, 0.3, 0.5])])


def test_action_mean():
    grid = OutputGrid([0.0, 1.0])
    assert action_mean(Action(0.0, [0.5, 0.5]), grid) == 0.5
    assert action_mean(Action(0.0, [0.3, 0.7]), grid) == pytest.approx(0.7)
    with pytest.raises(ValueError):
        action_mean(Action(0.0, [1.0]), grid)


def test_binary_action():
    a = binary_action(0.5, 0.1, 1.0)
    np.testing.assert_allclose(a.probs, [0.5, 0.5])
    assert a.effort == 0.1
    np.testing.assert_allclose(binary_action(0.7, 0.2, 1.0).probs, [0.3, 0.7])

    with pytest.raises(ValueError):
        binary_action(1.2, 0.0, 1.0)
    with pytest.raises(ValueError):
        binary_action(0.5, 0.0, 0.0)

    t = binary_technology(0.1, [0.2, 0.8], [0.0, 0.3], 1.0)
    np.testing.assert_allclose(t.means, [0.2, 0.8])
    np.testing.assert_allclose(t.efforts, [0.0, 0.3])
    assert t.k == 0.1


def test_technology_scaling():
    t = binary_technology(0.1, [0.2, 0.8], [0.0, 0.3], 1.0)
    s = t.scaled(2.0)
    np.testing.assert_allclose(s.means, [0.4, 1.6])
    np.testing.assert_allclose(s.efforts, [0.0, 0.6])
    np.testing.assert_allclose(s.probs, t.probs)
    assert s.k == pytest.approx(0.2)
    with pytest.raises(ValueError):
        t.scaled(0.0)


def test_contract_limited_liability():
    grid = OutputGrid([0.0, 0.5, 1.0])
    w = Contract(grid, [0.0, 0.2, 1.0 + 1e-12])
    assert w.payments[-1] == 1.0
    with pytest.raises(ValueError):
        Contract(grid, [0.0, 0.6, 1.0])
    with pytest.raises(ValueError):
        Contract(grid, [0.0, -0.1, 1.0])
    with pytest.raises(ValueError):
        Contract(grid, [0.0, 1.0])


def test_min_guarantee():
    assert min_guarantee(MPR(1 / 3), 0.9) == pytest.approx(0.3)
    assert min_guarantee(All(), 5.0) == 0.0
    assert min_guarantee(LinearFamily([0.4, 0.6]), 1.0) == 0.4

    grid = OutputGrid([0.0, 0.5, 1.0])
    floor = MinimumContract(grid, [0.0, 0.1, 0.4])
    assert min_guarantee(floor, 1.0) == 0.4
    with pytest.raises(ValueError):
        min_guarantee(floor, 0.7)

    image = ImageConstrained(grid, [[(0.0, 0.0)], [(0.2, 0.3), (0.1, 0.15)], [(0.5, 1.0)]])
    assert min_guarantee(image, 0.5) == 0.1
    with pytest.raises(ValueError):
        min_guarantee(MPR(0.2), -1.0)


def test_contract_allowed():
    grid = OutputGrid([0.0, 1.0])
    assert contract_allowed(MPR(1 / 3), linear_contract(0.4, grid))
    assert not contract_allowed(MPR(1 / 3), linear_contract(0.3, grid))
    assert contract_allowed(LinearFamily([0.5]), linear_contract(0.5, grid))
    assert not contract_allowed(LinearFamily([0.5]), linear_contract(0.6, grid))
    assert contract_allowed(All(), linear_contract(0.0, grid))

    image = ImageConstrained(grid, [[(0.0, 0.0)], [(0.2, 0.3), (0.6, 0.8)]])
    assert contract_allowed(image, linear_contract(0.7, grid))
    assert not contract_allowed(image, linear_contract(0.5, grid))
    floor = MinimumContract(grid, [0.0, 0.25])
    assert contract_allowed(floor, linear_contract(0.25, grid))
    assert not contract_allowed(floor, linear_contract(0.25, OutputGrid([0.0, 2.0])))


def test_regulation_validation():
    with pytest.raises(ValueError):
        MPR(1.2)
    with pytest.raises(ValueError):
        LinearFamily([])
    with pytest.raises(ValueError):
        LinearFamily([0.2, -0.1])
    with pytest.raises(TypeError):
        LinearFamily([0.2]).payment_intervals(OutputGrid([0.0, 1.0]))

    grid = OutputGrid([0.0, 1.0])
    with pytest.raises(ValueError):
        MinimumContract(grid, [0.0, 1.5])
    with pytest.raises(ValueError):
        ImageConstrained(grid, [[(0.0, 0.0)]])
    with pytest.raises(ValueError):
        ImageConstrained(grid, [[(0.0, 0.0)], []])
    with pytest.raises(ValueError):
        ImageConstrained(grid, [[(0.0, 0.0)], [(0.6, 0.4)]])


def test_regulation_equality():
    assert MPR(0.25) == MPR(0.25)
    assert MPR(0.25) != MPR(0.3)
    assert LinearFamily([0.6, 0.4, 0.4]) == LinearFamily([0.4, 0.6])
    assert LinearFamily([0.6, 0.4]).slopes == (0.4, 0.6)
    assert All() != MPR(0.0)
    assert len({MPR(0.2), MPR(0.2), All()}) == 2


def test_equilibrium_outcome_payoff():
    out = EquilibriumOutcome(True, None, 0, 0.3, 0.2)
    assert out.payoff(2.0) == pytest.approx(0.7)
    gone = EquilibriumOutcome.exit()
    assert not gone.participated
    assert gone.payoff(5.0) == 0.0
