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
"""Named acceptance checks, run by ``regretforge verify``.

Every check returns a :class:`CheckResult` instead of raising, so one failure does not hide the
others. ``quick=True`` shrinks budgets and instance counts for smoke runs.
"""

from __future__ import annotations

import itertools
import logging
import math
from typing import Callable, List, NamedTuple, Optional, Tuple

import numpy as np

from regretforge.analysis import necessity_check
from regretforge.constructions import (
    binarize_and_normalize,
    construct_band_violation,
    construct_extraction_curve,
    construct_flexibility_violation,
    construct_gaming_violation,
    construct_no_production_curve,
    optimal_k_no_production,
    optimal_muF,
)
from regretforge.engine import regret
from regretforge.firm import firm_best_response, min_cost_implementation, worst_case_equilibrium
from regretforge.kernel import LinearProgram, solve_lp
from regretforge.minmax import (
    KnowledgeBox,
    branch_extraction,
    branch_no_production,
    constrained_branches,
    ell_star,
    optimal_band,
    optimal_mpr_constrained,
    optimal_mpr_numeric,
    rbar,
    rho_star,
    technology_in_class,
)
from regretforge.model import MPR, All, LinearFamily, Params, Regulation, Technology
from regretforge.search import SearchConfig, adversarial_search, random_binary_technology
from regretforge.serialization import serialize_report

__all__ = ["CheckResult", "CHECKS", "run_checks"]

logger = logging.getLogger(__name__)


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str


def _closed_form_optimum(quick: bool) -> CheckResult:
    worst = 0.0
    for alpha in (1.0, 1.5, 2.0, 5.0, 10.0, 100.0):
        p = Params(alpha)
        res = optimal_mpr_numeric(p)
        if abs(res.ell_star - ell_star(alpha)) > 1e-6:
            return CheckResult("closed_form_optimum", False, f"slope {res.ell_star} at {alpha}")
        worst = max(worst, abs(res.rbar - rbar(p)) / rbar(p))
    return CheckResult("closed_form_optimum", worst <= 1e-9, f"max relative error {worst:.3g}")


def _branch_equalization(quick: bool) -> CheckResult:
    worst = 0.0
    for alpha in np.logspace(0.0, 6.0, 50):
        p = Params(float(alpha))
        ls = ell_star(p.alpha)
        g1, g2 = branch_no_production(ls, p), branch_extraction(ls, p)
        worst = max(worst, abs(g1 - g2) / g2)
    return CheckResult("branch_equalization", worst <= 1e-12, f"max relative gap {worst:.3g}")


def _lower_bound_constructions(quick: bool) -> CheckResult:
    n = 400 if quick else 2000
    worst = 0.0
    for alpha in (1.0, 2.0, 5.0):
        p = Params(alpha)
        ls = ell_star(alpha)
        r = MPR(ls)
        k = optimal_k_no_production(ls, 1.0)
        techs = [
            construct_no_production_curve(ls, 1.0, k, n),
            construct_extraction_curve(ls, 1.0, optimal_muF(p, 1.0), n),
        ]
        for t in techs:
            worst = max(worst, abs(regret(t, r, p).regret - rbar(p)) / rbar(p))
    return CheckResult("lower_bound_constructions", worst <= 0.01, f"max relative gap {worst:.3g}")


def _search_bounds(
    name: str, r_for: Callable[[Params], Regulation], alpha: float, quick: bool
) -> CheckResult:
    p = Params(alpha)
    target = rbar(p)
    budget = 2000 if quick else 100000
    seeds = (7,) if quick else (7, 42, 1337)
    found = []
    for seed in seeds:
        cfg = SearchConfig.for_params(p, seed=seed, budget=budget, max_actions=20)
        found.append(adversarial_search(r_for(p), p, cfg).regret)
    ok = max(found) <= target + 1e-6 and min(found) >= 0.99 * target
    return CheckResult(name, ok, f"regrets {found} against {target!r}")


def _upper_bound_certificate(quick: bool) -> CheckResult:
    return _search_bounds(
        "upper_bound_certificate", lambda p: MPR(ell_star(p.alpha)), 2.0, quick
    )


def _laissez_faire_boundary(quick: bool) -> CheckResult:
    if ell_star(1.0) != 0.0:
        return CheckResult("laissez_faire_boundary", False, "ell* at alpha = 1 is not 0")
    return _search_bounds("laissez_faire_boundary", lambda p: All(), 1.0, quick)


def _monotone_piece_rate(quick: bool) -> CheckResult:
    slopes = [ell_star(float(a)) for a in np.linspace(1.0, 100.0, 100)]
    ok = all(b >= a for a, b in zip(slopes, slopes[1:]))
    return CheckResult("monotone_piece_rate", ok, f"{len(slopes)} grid points")


def _best_response_reductions(quick: bool) -> CheckResult:
    count = 50 if quick else 500
    p = Params(2.0)
    cfg = SearchConfig.for_params(p, max_actions=6)
    rng = np.random.default_rng(2024)
    checked = binarized = 0
    for ell in (0.0, 0.2, 1.0 / 3.0):
        r = MPR(ell)
        family = LinearFamily([ell, min(1.0, ell + 0.25), min(1.0, ell + 0.5)])
        for _ in range(count):
            t = random_binary_technology(cfg, rng)
            eq = worst_case_equilibrium(t, r, p)
            if eq.participated and eq.contract is not None:
                if np.allclose(eq.contract.payments, ell * t.grid.levels, atol=1e-9):
                    gap = abs(regret(t, family, p).regret - regret(t, r, p).regret)
                    if gap > 1e-8:
                        return CheckResult("best_response_reductions", False, f"gap {gap}")
                    checked += 1
                before = regret(t, r, p).regret
                after = regret(binarize_and_normalize(t, r, p), r, p).regret
                if after < before - 1e-9:
                    return CheckResult(
                        "best_response_reductions", False, f"binarize lost {before - after}"
                    )
                binarized += 1
            elif firm_best_response(t, family).participated:
                return CheckResult("best_response_reductions", False, "hired under the family")
    detail = f"{checked} floor-contract instances, {binarized} binarized"
    return CheckResult("best_response_reductions", True, detail)


def _band_samples() -> List[Tuple[float, float]]:
    p = Params(2.0)
    ls = ell_star(p.alpha)
    samples = []
    for y in (1.0, 1.2, 1.5, 2.0, 3.0):
        samples += [(y, ls * y + 0.1), (y, ls * y - 0.1)]
        samples += [(y, 0.6 * y), (y, 0.9 * y)]
    for y in (0.5, 0.8):
        hi = optimal_band(y, p)[1]
        samples.append((y, min(y, hi + 0.05)))
    samples += [(0.9, 0.0), (0.95, 0.05)]
    return samples


def _necessity_loop(quick: bool) -> CheckResult:
    p = Params(2.0)
    target = rbar(p) + 1e-4 * p.ybar
    n = 200 if quick else 400
    for y, w in _band_samples():
        ce = construct_band_violation(y, w, p, n)
        value = regret(ce.technology, ce.regulation, p).regret
        if not value > target:
            return CheckResult("necessity_loop", False, f"band ({y}, {w}): regret {value}")
    for w in (0.0, 0.1, 0.2, 0.25, 0.3):
        ce = construct_gaming_violation((0.5, 1.5), (w, w), 0.5, p, n)
        value = regret(ce.technology, ce.regulation, p).regret
        if not (value > target and abs(value - ce.closed_form_regret) <= 0.01 * value):
            return CheckResult("necessity_loop", False, f"gaming {w}: regret {value}")
    ls, rho = ell_star(p.alpha), rho_star(p.alpha)
    for y in (1.0, 1.5):
        for frac in ((0.05, 0.5), (0.2, 0.8), (0.0, 1.0)):
            lo, hi = ls * y, (1.0 - rho) * y
            gap = (lo + frac[0] * (hi - lo), lo + frac[1] * (hi - lo))
            ce = construct_flexibility_violation(y, gap, p, 1e-3, n)
            value = regret(ce.technology, ce.regulation, p).regret
            if not value > target:
                return CheckResult("necessity_loop", False, f"flexibility {gap}: {value}")
    for alpha in (1.0, 2.0, 5.0, 100.0):
        if not necessity_check(MPR(ell_star(alpha)), Params(alpha)).ok:
            return CheckResult("necessity_loop", False, f"optimal rate fails at {alpha}")
    return CheckResult("necessity_loop", True, "all constructions exceed the minmax regret")


def _constrained_regression(quick: bool) -> CheckResult:
    for alpha in (1.5, 2.0, 5.0):
        p = Params(alpha)
        box = KnowledgeBox.unconstrained(p)
        res = optimal_mpr_constrained(p, box)
        if abs(res.ell_star - ell_star(alpha)) > 1e-4:
            return CheckResult("constrained_regression", False, f"slope {res.ell_star}")
        for ell in (0.0, 0.2, ell_star(alpha), 0.45):
            b = constrained_branches(ell, p, box)
            if abs(b.b_nohire - branch_no_production(ell, p)) > 1e-9:
                return CheckResult("constrained_regression", False, f"no-hire at {ell}")
            if abs(b.b_extract - branch_extraction(ell, p)) > 1e-9:
                return CheckResult("constrained_regression", False, f"extraction at {ell}")
        ls = ell_star(alpha)
        t = construct_no_production_curve(ls, 1.0, optimal_k_no_production(ls, 1.0), 200)
        if not (technology_in_class(t, "mlrp") and technology_in_class(t, box, p)):
            return CheckResult("constrained_regression", False, "construction outside class")
    return CheckResult("constrained_regression", True, "matches the unconstrained solution")


def _box_constrained_search(quick: bool) -> CheckResult:
    p = Params(2.0)
    ell = ell_star(p.alpha)
    budget = 200 if quick else 5000
    found = []
    boxes = (KnowledgeBox(0.6, 1.0, 0.0), KnowledgeBox(0.1, 0.5, 0.3), KnowledgeBox(0.05, 0.2, 0.5))
    for box in boxes:
        bound = max(constrained_branches(ell, p, box))
        cfg = SearchConfig.for_box(p, box, seed=7, budget=budget, max_actions=5)
        result = adversarial_search(MPR(ell), p, cfg)
        if not technology_in_class(result.technology, box, p):
            return CheckResult("box_constrained_search", False, f"{box} left its class")
        if result.regret > bound + 1e-6:
            return CheckResult("box_constrained_search", False, f"{box}: {result.regret} > {bound}")
        found.append(round(result.regret, 6))
    return CheckResult("box_constrained_search", True, f"in-class regrets {found} within bounds")


def _binary_slope_oracle(t: Technology, ell: float, idx: int) -> Optional[float]:
    mu, e = t.means, t.efforts
    lo, hi = max(ell, e[idx] / mu[idx] if mu[idx] > 0 else 0.0), 1.0
    for j in range(len(t)):
        if j == idx:
            continue
        if mu[j] < mu[idx]:
            lo = max(lo, (e[idx] - e[j]) / (mu[idx] - mu[j]))
        elif mu[j] > mu[idx]:
            hi = min(hi, (e[j] - e[idx]) / (mu[j] - mu[idx]))
        elif e[j] < e[idx]:
            return None
    return float(lo * mu[idx]) if lo <= hi + 1e-12 else None


def _lp_by_vertices(lp: LinearProgram) -> float:
    n = lp.n_vars
    rows = [(r, s, b) for r, s, b in zip(lp.rows, lp.senses, lp.rhs)]
    for i in range(n):
        unit = np.eye(n)[i]
        rows += [(unit, ">=", lp.lower[i]), (unit, "<=", lp.upper[i])]
    best = math.inf
    for combo in itertools.combinations(range(len(rows)), n):
        a = np.array([rows[i][0] for i in combo])
        if abs(np.linalg.det(a)) < 1e-12:
            continue
        x = np.linalg.solve(a, np.array([rows[i][2] for i in combo]))
        feasible = all(
            (s == "<=" and r @ x <= b + 1e-9)
            or (s == ">=" and r @ x >= b - 1e-9)
            or (s == "==" and abs(r @ x - b) <= 1e-9)
            for r, s, b in rows
        )
        if feasible:
            best = min(best, float(lp.objective @ x))
    return best


def _oracle_equivalence(quick: bool) -> CheckResult:
    count = 100 if quick else 1000
    rng = np.random.default_rng(99)
    cfg = SearchConfig(max_actions=8)
    for case in range(count):
        t = random_binary_technology(cfg, rng)
        ell = float(rng.choice([0.0, 0.2, 1.0 / 3.0, 0.5]))
        idx = int(rng.integers(len(t)))
        res = min_cost_implementation(t, MPR(ell), idx)
        expected = _binary_slope_oracle(t, ell, idx)
        if (expected is None) != (not res.feasible) or (
            expected is not None and abs(res.expected_payment - expected) > 1e-8
        ):
            return CheckResult("oracle_equivalence", False, f"implementation case {case}")
    for case in range(count):
        n = int(rng.integers(2, 4))
        m = int(rng.integers(1, 5))
        lp = LinearProgram(
            rng.normal(size=n),
            rng.normal(size=(m, n)),
            [str(s) for s in rng.choice(["<=", ">="], size=m)],
            rng.normal(size=m),
            np.zeros(n),
            np.full(n, 2.0),
        )
        result = solve_lp(lp)
        expected = _lp_by_vertices(lp)
        if math.isinf(expected) != (not result.optimal) or (
            result.optimal and abs(result.value - expected) > 1e-9
        ):
            return CheckResult("oracle_equivalence", False, f"LP case {case}")
    return CheckResult("oracle_equivalence", True, f"{count} implementations, {count} programs")


def _search_determinism(quick: bool) -> CheckResult:
    p = Params(2.0)
    cfg = SearchConfig.for_params(p, seed=7, budget=500 if quick else 5000, chunk_size=256)
    r = MPR(ell_star(p.alpha))
    outputs = {serialize_report(adversarial_search(r, p, cfg, threads=t)) for t in (1, 4)}
    return CheckResult("search_determinism", len(outputs) == 1, "threads 1 and 4")


CHECKS: List[Tuple[str, Callable[[bool], CheckResult]]] = [
    ("closed_form_optimum", _closed_form_optimum),
    ("branch_equalization", _branch_equalization),
    ("lower_bound_constructions", _lower_bound_constructions),
    ("upper_bound_certificate", _upper_bound_certificate),
    ("laissez_faire_boundary", _laissez_faire_boundary),
    ("monotone_piece_rate", _monotone_piece_rate),
    ("best_response_reductions", _best_response_reductions),
    ("necessity_loop", _necessity_loop),
    ("constrained_regression", _constrained_regression),
    ("box_constrained_search", _box_constrained_search),
    ("oracle_equivalence", _oracle_equivalence),
    ("search_determinism", _search_determinism),
]


def run_checks(quick: bool = False, only: Optional[List[str]] = None) -> List[CheckResult]:
    """Run the named checks (all by default) and collect their results."""
    known = {name for name, _ in CHECKS}
    unknown = set(only or ()) - known
    if unknown:
        raise ValueError(f"Unknown checks: {sorted(unknown)}")
    results = []
    for name, check in CHECKS:
        if only and name not in only:
            continue
        try:
            result = check(quick)
        except (ValueError, RuntimeError, NotImplementedError) as e:
            result = CheckResult(name, False, f"{type(e).__name__}: {e}")
        logger.info("Check %s: %s (%s)", name, "pass" if result.passed else "FAIL", result.detail)
        results.append(result)
    return results
