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

import math

import numpy as np
import pytest

from regretforge import *

P2 = Params(2.0)


def small_config(p=P2, **overrides):
    settings = dict(seed=7, budget=1000, max_actions=10)
    settings.update(overrides)
    return SearchConfig.for_params(p, **settings)


def test_search_config_validation():
    cfg = SearchConfig()
    assert cfg.budget == 10000
    assert cfg.support == "binary"
    with pytest.raises(ValueError):
        SearchConfig(budget=-1)
    with pytest.raises(ValueError):
        SearchConfig(max_actions=0)
    with pytest.raises(ValueError):
        SearchConfig(k_range=(0.5, 0.2))
    with pytest.raises(ValueError):
        SearchConfig(mean_range=(0.0, 2.0))
    with pytest.raises(ValueError):
        SearchConfig(support="dense")
    with pytest.raises(ValueError):
        SearchConfig(elite_fraction=0.0)
    with pytest.raises(ValueError):
        SearchConfig(seed_resolution=1)


def test_search_config_for_params():
    cfg = SearchConfig.for_params(Params(2.0, 4.0), seed=3)
    assert cfg.seed == 3
    assert cfg.k_range == (0.0, 4.0)
    assert cfg.mean_range == (0.0, 4.0)
    assert cfg.grid_top == 4.0
    assert cfg.initial_step == pytest.approx(0.2)
    cfg.check(Params(2.0, 4.0))
    with pytest.raises(ValueError):
        cfg.check(Params(2.0, 1.0))


def test_random_binary_technology():
    cfg = SearchConfig(max_actions=20)
    first = random_binary_technology(cfg, 42)
    assert first == random_binary_technology(cfg, 42)
    assert random_binary_technology(SearchConfig(seed=42)) == random_binary_technology(
        SearchConfig(seed=42)
    )

    rng = np.random.default_rng(0)
    for _ in range(100):
        t = random_binary_technology(cfg, rng)
        assert 1 <= len(t) <= 20
        assert validate_technology(t, Params()) == []
        assert np.all(t.efforts <= t.means)
        assert list(t.grid) == [0.0, 1.0]

    zero_k = SearchConfig(k_range=(0.0, 0.0))
    assert all(random_binary_technology(zero_k, s).k == 0.0 for s in range(20))


def test_screen_binary_matches_engine():
    cfg = SearchConfig(max_actions=6)
    rng = np.random.default_rng(5)
    agree = total = 0
    for _ in range(300):
        t = random_binary_technology(cfg, rng)
        ell = float(rng.choice([0.0, 0.2, 1 / 3, 0.6]))
        screened = screen_binary(
            np.array([t.k]), t.means[None, :], t.efforts[None, :], np.array([[ell, 1.0]]), 2.0
        )[0]
        total += 1
        agree += abs(screened - regret(t, MPR(ell), P2).regret) <= 1e-7
    assert agree >= 0.98 * total


def test_screen_binary_linear_family():
    t = binary_technology(0.0, [0.5, 1.0], [0.0, 0.2], 1.0)
    slopes = np.array([[0.3, 0.3], [0.45, 0.45]])
    screened = screen_binary(np.array([0.0]), t.means[None, :], t.efforts[None, :], slopes, 2.0)
    expected = regret(t, LinearFamily([0.3, 0.45]), P2).regret
    assert screened[0] == pytest.approx(expected, abs=1e-9)


def test_search_is_deterministic():
    cfg = small_config()
    r = MPR(1 / 3)
    first = adversarial_search(r, P2, cfg)
    second = adversarial_search(r, P2, cfg)
    assert first.regret == second.regret
    assert first.technology == second.technology
    assert first.candidate_index == second.candidate_index
    assert first.provenance == second.provenance

    threaded = adversarial_search(r, P2, cfg, threads=4)
    assert threaded.regret == first.regret
    assert threaded.technology == first.technology


def test_search_respects_minmax_regret():
    target = rbar(P2)
    result = adversarial_search(MPR(ell_star(2.0)), P2, small_config(budget=2000, max_actions=20))
    assert target * 0.99 <= result.regret <= target + 1e-6
    technology, value = result
    assert value == result.regret
    assert result.provenance["config"]["seed"] == 7
    assert result.provenance["source"].startswith(("seed:", "pool"))
    assert [s["name"] for s in result.provenance["seeds"]] == [
        "no_production",
        "extraction",
        "single_action",
    ]


def test_search_laissez_faire():
    result = adversarial_search(All(), P2, small_config())
    assert result.regret == pytest.approx(2 * math.exp(-0.5), rel=0.01)

    p1 = Params(1.0)
    result = adversarial_search(All(), p1, small_config(p1))
    assert math.exp(-1) * 0.99 <= result.regret <= math.exp(-1) + 1e-6


def test_search_half_piece_rate():
    result = adversarial_search(MPR(0.5), P2, small_config())
    assert result.regret == pytest.approx(1.0, rel=0.01)


def test_search_three_point():
    cfg = small_config(budget=40, max_actions=4, support="three_point")
    result = adversarial_search(MPR(1 / 3), P2, cfg)
    assert result.regret <= rbar(P2) + 1e-6
    assert result.regret >= 0.99 * rbar(P2)

    grid_bound = MinimumContract(OutputGrid([0.0, 1.0]), [0.0, 0.3])
    with pytest.raises(ValueError):
        adversarial_search(grid_bound, P2, cfg)


def test_search_rejects_bad_inputs():
    with pytest.raises(ValueError):
        adversarial_search(MPR(0.3), P2, small_config(budget=0))
    with pytest.raises(ValueError):
        adversarial_search(MPR(0.3), Params(2.0, 0.5), small_config())
    with pytest.raises(ValueError):
        adversarial_search(MinimumContract(OutputGrid([0.0, 2.0]), [0.0, 0.5]), P2, small_config())


def test_search_config_for_box():
    box = KnowledgeBox(0.1, 5.0, 0.3)
    cfg = SearchConfig.for_box(P2, box, seed=3)
    assert cfg.k_range == (0.1, 1.0)
    assert cfg.mean_range == (0.3, 1.0)
    assert cfg.grid_top == 1.0
    assert cfg.seed == 3
    with pytest.raises(ValueError):
        SearchConfig.for_box(P2, KnowledgeBox(0.0, 1.0, 1.0))


@pytest.mark.parametrize(
    "box, tight",
    [
        (KnowledgeBox(0.6, 1.0, 0.0), True),
        (KnowledgeBox(0.1, 0.5, 0.3), True),
        (KnowledgeBox(0.05, 0.2, 0.5), False),
    ],
)
def test_search_stays_in_knowledge_box(box, tight):
    ell = ell_star(2.0)
    bound = max(constrained_branches(ell, P2, box))
    cfg = SearchConfig.for_box(P2, box, seed=7, budget=200, max_actions=5)
    result = adversarial_search(MPR(ell), P2, cfg)
    assert technology_in_class(result.technology, box, P2)
    assert result.regret <= bound + 1e-6
    if tight:
        assert result.regret >= 0.98 * bound


def test_search_drops_seeds_outside_the_box():
    box = KnowledgeBox(0.05, 0.2, 0.5)
    cfg = SearchConfig.for_box(P2, box, seed=1, budget=50, max_actions=3)
    result = adversarial_search(MPR(ell_star(2.0)), P2, cfg)
    assert [s["name"] for s in result.provenance["seeds"]] == ["no_production", "extraction"]


def test_three_point_search_stays_in_knowledge_box():
    box = KnowledgeBox(0.1, 0.5, 0.3)
    cfg = SearchConfig.for_box(P2, box, seed=5, budget=40, max_actions=4, support="three_point")
    result = adversarial_search(MPR(1 / 3), P2, cfg)
    assert technology_in_class(result.technology, box, P2)
    assert result.regret <= max(constrained_branches(1 / 3, P2, box)) + 1e-6
