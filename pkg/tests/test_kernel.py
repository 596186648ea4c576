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

import itertools
import math

import numpy as np
import pytest

from regretforge import *


def vertex_min(lp):
    """Minimum of the objective over every basic feasible point of ``lp``."""
    n = lp.n_vars
    a, b = [], []
    for row, sense, rhs in zip(lp.rows, lp.senses, lp.rhs):
        if sense in ("<=", "=="):
            a.append(row)
            b.append(rhs)
        if sense in (">=", "=="):
            a.append(-row)
            b.append(-rhs)
    for j in range(n):
        unit = np.eye(n)[j]
        a.append(-unit)
        b.append(-lp.lower[j])
        if math.isfinite(lp.upper[j]):
            a.append(unit)
            b.append(lp.upper[j])
    a, b = np.array(a), np.array(b)
    best = math.inf
    for combo in itertools.combinations(range(len(b)), n):
        sub = a[list(combo)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        x = np.linalg.solve(sub, b[list(combo)])
        if np.all(a @ x <= b + 1e-9):
            best = min(best, float(lp.objective @ x))
    return best


def random_program(rng):
    n = int(rng.integers(1, 4))
    m = int(rng.integers(1, 5))
    x0 = rng.uniform(0.0, 1.0, n)
    rows = rng.normal(size=(m, n))
    senses = [("<=", ">=")[int(rng.integers(0, 2))] for _ in range(m)]
    slack = rng.uniform(0.0, 0.5, m)
    rhs = rows @ x0 + np.where(np.array(senses) == "<=", slack, -slack)
    return LinearProgram(rng.normal(size=n), rows, senses, rhs, np.zeros(n), np.ones(n))


def test_linear_program_validation():
    with pytest.raises(ValueError):
        LinearProgram([], np.zeros((0, 0)), [], [], [])
    with pytest.raises(ValueError):
        LinearProgram([1.0, 1.0], [[1.0, 1.0]], ["<"], [1.0], [0.0, 0.0])
    with pytest.raises(ValueError):
        LinearProgram([1.0, 1.0], [[1.0, 1.0]], ["<=", "<="], [1.0], [0.0, 0.0])
    with pytest.raises(ValueError):
        LinearProgram([1.0], [[1.0]], [">="], [0.0], [1.0], [0.5])
    with pytest.raises(ValueError):
        LinearProgram([1.0], [[1.0]], [">="], [0.0], [-math.inf])

    lp = LinearProgram([1.0, 2.0], np.zeros((0, 2)), [], [], 0.0)
    assert lp.n_vars == 2
    assert np.all(np.isinf(lp.upper))


def test_solve_lp_small_programs():
    lp = LinearProgram([1.0, 1.0], [[1.0, 2.0], [3.0, 1.0]], [">=", ">="], [2.0, 3.0], [0, 0])
    res = solve_lp(lp)
    assert res.optimal
    np.testing.assert_allclose(res.x, [0.8, 0.6], atol=1e-9)
    assert res.value == pytest.approx(1.4)

    res = solve_lp(LinearProgram([1.0, 1.0], [[1.0, 1.0]], ["<="], [3.0], [0, 0]), "max")
    assert res.value == pytest.approx(3.0)

    res = solve_lp(LinearProgram([1.0, -1.0], [[1.0, 1.0]], ["=="], [1.0], [0, 0], [1, 1]))
    np.testing.assert_allclose(res.x, [0.0, 1.0], atol=1e-9)

    with pytest.raises(ValueError):
        solve_lp(lp, "maximize")


def test_solve_lp_statuses():
    infeasible = LinearProgram([1.0, 1.0], [[1.0, 1.0]], [">="], [3.0], [0, 0], [1, 1])
    res = solve_lp(infeasible)
    assert res.status == "infeasible"
    assert res.x is None
    assert math.isnan(res.value)

    unbounded = LinearProgram([-1.0, 0.0], [[0.0, 1.0]], ["<="], [1.0], [0, 0])
    res = solve_lp(unbounded)
    assert res.status == "unbounded"
    assert res.value == -math.inf

    res = solve_lp(LinearProgram([1.0], [[1.0]], [">="], [2.0], [0.0], [1.0]))
    assert res.status == "infeasible"
    res = solve_lp(LinearProgram([1.0], [[1.0]], [">="], [0.5], [0.0]), "max")
    assert res.status == "unbounded"
    assert res.value == math.inf


def test_solve_lp_one_variable():
    lp = LinearProgram([0.5], [[0.5], [-0.5]], [">=", ">="], [0.1, -0.4], [0.0], [1.0])
    res = solve_lp(lp)
    assert res.x[0] == pytest.approx(0.2)
    res = solve_lp(lp, "max")
    assert res.x[0] == pytest.approx(0.8)


def test_solve_lp_matches_vertex_enumeration():
    rng = np.random.default_rng(2023)
    for _ in range(1000):
        lp = random_program(rng)
        res = solve_lp(lp)
        expected = vertex_min(lp)
        assert res.optimal
        assert res.value == pytest.approx(expected, abs=1e-9)
        residual = lp.rows @ res.x - lp.rhs
        for r, sense in zip(residual, lp.senses):
            assert (r <= 1e-9) if sense == "<=" else (r >= -1e-9)


def test_solve_lp_is_deterministic():
    rng = np.random.default_rng(5)
    lp = random_program(rng)
    first, second = solve_lp(lp), solve_lp(lp)
    assert np.array_equal(first.x, second.x)


def test_minimize_1d():
    x, fx = minimize_1d(lambda x: (x - 0.3) ** 2, 0.0, 1.0, tol=1e-8)
    assert x == pytest.approx(0.3, abs=1e-6)
    assert fx == pytest.approx(0.0, abs=1e-12)

    x, fx = minimize_1d(lambda x: x, 0.0, 1.0)
    assert x == 0.0

    x, fx = minimize_1d(lambda x: -x, 0.0, 1.0)
    assert x == 1.0

    x, fx = minimize_1d(lambda x: x, 2.0, 2.0)
    assert (x, fx) == (2.0, 2.0)


def test_minimize_1d_candidates():
    def dip(x):
        return -1.0 if abs(x - 0.123456) < 1e-9 else abs(x - 0.9)

    x, fx = minimize_1d(dip, 0.0, 1.0, candidates=[0.123456, 5.0])
    assert x == 0.123456
    assert fx == -1.0

    alpha = 2.0
    p = Params(alpha)
    x, _ = minimize_1d(
        lambda ell: mpr_worst_case_regret(ell, p), 0.0, 0.5, candidates=[ell_star(alpha)]
    )
    assert x == pytest.approx(1 / 3, abs=1e-9)


def test_minimize_1d_errors():
    with pytest.raises(ValueError):
        minimize_1d(lambda x: x, 1.0, 0.0)
    with pytest.raises(ValueError):
        minimize_1d(lambda x: math.nan, 0.0, 1.0)


def test_solve_lp_respects_bounds_after_many_pivots():
    rng = np.random.default_rng(11)
    for sense in ("min", "max"):
        for _ in range(200):
            lp = random_program(rng)
            res = solve_lp(lp, sense)
            if res.optimal:
                assert np.all(res.x >= lp.lower)
                assert np.all(res.x <= lp.upper)

    n = 40
    levels = np.linspace(0.1, 3.0, n)
    target = np.full(n, 1.0 / n)
    cap = float(target @ levels) - 1e-3
    lp = LinearProgram(target, [target], ["<="], [cap], np.zeros(n), levels)
    res = solve_lp(lp, "max")
    assert res.optimal
    assert res.value == pytest.approx(cap)
    assert np.all(res.x <= levels)
    assert np.all(res.x >= 0.0)


def test_solve_lp_matches_linprog():
    linprog = pytest.importorskip("scipy.optimize").linprog
    rng = np.random.default_rng(31)
    for sense in ("min", "max"):
        for _ in range(200):
            lp = random_program(rng)
            sign = np.where(np.array(lp.senses) == ">=", -1.0, 1.0)
            bounds = [(lo, hi if math.isfinite(hi) else None) for lo, hi in zip(lp.lower, lp.upper)]
            c = lp.objective if sense == "min" else -lp.objective
            ref = linprog(
                c, A_ub=lp.rows * sign[:, None], b_ub=lp.rhs * sign, bounds=bounds, method="highs"
            )
            res = solve_lp(lp, sense)
            assert res.optimal == (ref.status == 0)
            if res.optimal:
                assert res.value == pytest.approx(float(lp.objective @ ref.x), abs=1e-7)
