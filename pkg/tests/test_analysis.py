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
from hypothesis import given
from hypothesis import strategies as st

from regretforge import *

P2 = Params(2.0)
LS2 = 1 / 3
GRID = OutputGrid([0.0, 0.5, 1.0, 1.5])


def test_lower_convex_envelope():
    env = lower_convex_envelope([(0, 0), (1, 0.8), (2, 0.4)])
    assert env(1.0) == pytest.approx(0.2)
    assert list(env.xs) == [0.0, 2.0]

    line = lower_convex_envelope([(0, 0), (1, 0.5), (2, 1.0), (3, 1.5)])
    assert line(2.5) == pytest.approx(1.25)

    chord = lower_convex_envelope([(2, 1.0), (0, 0)])
    assert chord(1.0) == pytest.approx(0.5)
    assert chord.segment(1.0) == (0.0, 2.0)

    with pytest.raises(ValueError):
        lower_convex_envelope([])
    with pytest.raises(ValueError):
        lower_convex_envelope([(0, 0), (0, 1)])
    with pytest.raises(ValueError):
        chord(3.0)


def test_piecewise_linear():
    f = PiecewiseLinear([0.0, 1.0, 3.0], [0.0, 1.0, 2.0])
    assert f(2.0) == pytest.approx(1.5)
    assert f.segment(2.0) == (1.0, 3.0)
    assert f.segment(3.0) == (1.0, 3.0)
    assert PiecewiseLinear([1.0], [2.0]).segment(1.0) == (1.0, 1.0)
    with pytest.raises(ValueError):
        PiecewiseLinear([0.0, 0.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        PiecewiseLinear([0.0, 1.0], [1.0])


@given(
    st.lists(
        st.tuples(st.integers(0, 50), st.floats(min_value=0.0, max_value=10.0)),
        min_size=1,
        max_size=12,
        unique_by=lambda pt: pt[0],
    )
)
def test_envelope_is_convex_minorant(points):
    env = lower_convex_envelope(points)
    for x, y in points:
        assert env(x) <= y + 1e-9
    slopes = np.diff(env.ys) / np.diff(env.xs)
    assert np.all(np.diff(slopes) >= -1e-9)


def test_necessity_of_optimal_rate():
    for alpha in np.linspace(1.0, 100.0, 12):
        p = Params(float(alpha))
        report = necessity_check(MPR(ell_star(p.alpha)), p)
        assert report.ok, alpha
        assert report.rho_star == pytest.approx(math.exp(-1 / alpha) * (1 - ell_star(alpha)))


def test_necessity_probes():
    report = necessity_check(MPR(LS2), P2)
    assert report.probes[0] == 0.0
    assert 1.0 in report.probes
    assert len(report.probes) <= 201
    below = sum(y < 1.0 for y in report.probes)
    above = sum(y > 1.0 for y in report.probes)
    assert report.mixture_pairs == below * above

    custom = necessity_check(MPR(LS2), P2, [0.5, 3.0])
    assert custom.probes == (0.0, 0.5, 1.0, 3.0)

    floor = MinimumContract(GRID, [0.0, 0.1, LS2, 0.5])
    assert necessity_check(floor, P2, [0.7]).probes == (0.0, 0.5, 1.0, 1.5)


def test_band_violation_detected():
    floor = MinimumContract(GRID, 0.5 * LS2 * GRID.levels)
    report = necessity_check(floor, P2)
    assert not report.band_ok
    assert not report.ok
    y, w = report.band_violation
    assert y == 1.0
    assert w == pytest.approx(LS2 / 2)

    ce = construct_band_violation(y, w, P2, 500)
    assert regret(ce.technology, ce.regulation, P2).regret > rbar(P2) + 1e-4


def test_gaming_violation_detected():
    floor = MinimumContract(GRID, [0.0, 0.1, LS2, 0.5])
    report = necessity_check(floor, P2)
    assert report.band_ok
    assert report.flexibility_ok
    assert not report.gaming_ok
    witness = report.gaming_witness
    assert witness.anchor == 1.0
    assert witness.envelope == pytest.approx(0.3)
    assert (witness.y_low, witness.y_high) == (0.5, 1.5)
    assert witness.p_mix == pytest.approx(0.5)

    pair = (witness.y_low, witness.y_high)
    ce = construct_gaming_violation(pair, (0.1, 0.5), witness.p_mix, P2, 300)
    assert regret(ce.technology, ce.regulation, P2).regret > rbar(P2) + 1e-4


def test_flexibility_violation_detected():
    report = necessity_check(LinearFamily([LS2]), P2)
    assert report.band_ok
    assert report.gaming_ok
    assert not report.flexibility_ok
    y, lo, hi = report.flexibility_gap
    assert y == 1.0
    assert lo == pytest.approx(LS2)
    assert hi == pytest.approx(1 - rho_star(2.0))

    image = ImageConstrained(
        OutputGrid([0.0, 1.0]), [[(0.0, 0.0)], [(LS2, 0.4), (0.5, 1.0)]]
    )
    y, lo, hi = necessity_check(image, P2).flexibility_gap
    assert (y, lo, hi) == (1.0, 0.4, 0.5)


def test_laissez_faire_fails_band_for_alpha_above_one():
    assert not necessity_check(All(), P2).band_ok
    assert necessity_check(All(), Params(1.0)).ok


def test_sweep_alpha():
    seen = []
    rows = sweep_alpha([1.0, 2.0, 5.0], emit=seen.append)
    assert rows == seen
    assert [row.ell_star for row in rows] == pytest.approx([0.0, 1 / 3, 4 / 9])
    assert rows[0].rbar == pytest.approx(math.exp(-1))
    for row in rows:
        assert row.g1 == pytest.approx(row.g2, rel=1e-12)

    single = sweep_alpha([3.0], Params(ybar=2.0))
    assert len(single) == 1
    assert single[0].rbar == pytest.approx(2 * rbar(Params(3.0)))

    with pytest.raises(ValueError):
        sweep_alpha([0.5])
