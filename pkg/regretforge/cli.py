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
"""Command-line interface.

Exit codes: 0 on success, 1 when ``verify`` finds a failing check, 2 for invalid input (bad
arguments, schema or domain violations), 3 for inputs outside the supported envelope.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from regretforge.analysis import DEFAULT_PROBES, necessity_check, sweep_alpha
from regretforge.bench import bench_search
from regretforge.constructions import (
    construct_band_violation,
    construct_extraction_curve,
    construct_flexibility_violation,
    construct_gaming_violation,
    construct_no_production_curve,
    construct_single_action,
)
from regretforge.engine import regret
from regretforge.firm import firm_best_response, implementation_table, worst_case_equilibrium
from regretforge.minmax import (
    KnowledgeBox,
    branch_curves,
    constrained_branches,
    optimal_mpr,
    optimal_mpr_constrained,
    optimal_mpr_numeric,
)
from regretforge.model import MPR, All, LinearFamily, Params, Regulation, Technology
from regretforge.regulator import full_info_value, transfer_table
from regretforge.search import SearchConfig, adversarial_search
from regretforge.serialization import (
    csv_text,
    parse_regulation_json,
    parse_technology_json,
    serialize_report,
)
from regretforge.verification import CHECKS, run_checks

__all__ = ["main", "run_cli", "load_regulation", "load_technology", "threads_from_env"]

logger = logging.getLogger(__name__)

THREADS_ENV = "REGRETFORGE_THREADS"


def _read(arg: str) -> str:
    stripped = arg.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        return arg
    with open(arg, encoding="utf-8") as f:
        return f.read()


def _floats(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise ValueError(f"Expected comma-separated numbers, got {text!r}") from e


def load_technology(arg: str) -> Technology:
    """A technology from a JSON file path or an inline JSON document."""
    return parse_technology_json(_read(arg))


def load_regulation(arg: str) -> Regulation:
    """A regulation from ``all``, ``mpr:<ell>``, ``linear:<s1>,<s2>,...``, a path or inline JSON."""
    if arg == "all":
        return All()
    if arg.startswith("mpr:"):
        values = _floats(arg[4:])
        if len(values) != 1:
            raise ValueError(f"Expected mpr:<ell>, got {arg!r}")
        return MPR(values[0])
    if arg.startswith("linear:"):
        return LinearFamily(_floats(arg[7:]))
    return parse_regulation_json(_read(arg))


def threads_from_env(environ: Optional[Dict[str, str]] = None) -> int:
    """Worker threads from ``REGRETFORGE_THREADS``; unset or 0 means every core."""
    raw = (os.environ if environ is None else environ).get(THREADS_ENV, "0").strip() or "0"
    try:
        threads = int(raw)
    except ValueError as e:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from e
    if threads < 0:
        raise ValueError(f"{THREADS_ENV} must be nonnegative, got {threads}")
    return threads or (os.cpu_count() or 1)


def _params(args: argparse.Namespace) -> Params:
    return Params(args.alpha, args.ybar)


def _emit(args: argparse.Namespace, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _cmd_solve_firm(args: argparse.Namespace) -> int:
    t, r, p = load_technology(args.tech), load_regulation(args.reg), _params(args)
    report = {
        "best_response": firm_best_response(t, r),
        "worst_case": worst_case_equilibrium(t, r, p),
        "implementations": implementation_table(t, r),
    }
    _emit(args, serialize_report(report))
    return 0


def _cmd_solve_regulator(args: argparse.Namespace) -> int:
    t, p = load_technology(args.tech), _params(args)
    report = {"full_info_value": full_info_value(t, p), "transfers": transfer_table(t)}
    _emit(args, serialize_report(report))
    return 0


def _cmd_regret(args: argparse.Namespace) -> int:
    t, r, p = load_technology(args.tech), load_regulation(args.reg), _params(args)
    _emit(args, serialize_report(regret(t, r, p)))
    return 0


def _box(args: argparse.Namespace, p: Params) -> Optional[KnowledgeBox]:
    bounds = (getattr(args, "k_lo", None), getattr(args, "k_hi", None), getattr(args, "y_lo", None))
    if all(b is None for b in bounds):
        return None
    k_lo, k_hi, y_lo = bounds
    return KnowledgeBox(k_lo or 0.0, p.ybar if k_hi is None else k_hi, y_lo or 0.0)


def _search_config(args: argparse.Namespace, p: Params) -> SearchConfig:
    overrides: Dict[str, Any] = {
        "seed": args.seed,
        "budget": args.budget,
        "max_actions": args.max_actions,
    }
    if getattr(args, "support", None):
        overrides["support"] = args.support
    if getattr(args, "grid_top", None) is not None:
        overrides["grid_top"] = args.grid_top
    box = _box(args, p)
    if box is not None:
        return SearchConfig.for_box(p, box, **overrides)
    return SearchConfig.for_params(p, **overrides)


def _cmd_worst_case(args: argparse.Namespace) -> int:
    r, p = load_regulation(args.reg), _params(args)
    result = adversarial_search(r, p, _search_config(args, p), threads=threads_from_env())
    _emit(args, serialize_report(result))
    return 0


def _cmd_minmax(args: argparse.Namespace) -> int:
    p = _params(args)
    result = optimal_mpr_numeric(p) if args.numeric else optimal_mpr(p)
    _emit(args, serialize_report(result))
    return 0


def _cmd_minmax_constrained(args: argparse.Namespace) -> int:
    p = _params(args)
    box = _box(args, p) or KnowledgeBox.unconstrained(p)
    result = optimal_mpr_constrained(p, box)
    report = {"result": result, "branches": constrained_branches(result.ell_star, p, box)}
    _emit(args, serialize_report(report))
    return 0


def _cmd_necessity(args: argparse.Namespace) -> int:
    r, p = load_regulation(args.reg), _params(args)
    top = 2.0 * p.ybar if args.probe_max is None else args.probe_max
    report = necessity_check(r, p, np.linspace(0.0, top, args.probes))
    _emit(args, serialize_report(report))
    return 0


def _cmd_sweep_alpha(args: argparse.Namespace) -> int:
    if args.alphas:
        alphas: Sequence[float] = _floats(args.alphas)
    else:
        alphas = np.geomspace(args.alpha_min, args.alpha_max, args.num).tolist()
    rows = sweep_alpha(alphas, Params(ybar=args.ybar))
    _emit(args, csv_text(rows, header=("alpha", "ell_star", "rbar", "g1", "g2")))
    return 0


def _cmd_branches(args: argparse.Namespace) -> int:
    rows = branch_curves(np.linspace(0.0, 1.0, args.num), _params(args))
    _emit(args, csv_text(rows, header=rows[0]._fields if rows else ("ell",)))
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    results = run_checks(quick=args.quick, only=args.check or None)
    _emit(args, csv_text(results, header=("name", "passed", "detail")))
    return 0 if all(res.passed for res in results) else 1


def _cmd_bench(args: argparse.Namespace) -> int:
    p = _params(args)
    cfg = SearchConfig.for_params(
        p, seed=args.seed, budget=args.budget, max_actions=args.max_actions
    )
    report = bench_search(cfg, p, repetitions=args.repetitions, threads=args.threads)
    header = ("repetition", "seconds", "evaluations_per_second", "best_regret")
    _emit(args, csv_text(report.rows, header=header))
    logger.info(
        "Median %.3f s, %.0f evaluations per second",
        report.median_seconds,
        report.median_evaluations_per_second,
    )
    return 0


def _require(args: argparse.Namespace, *names: str) -> List[float]:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise ValueError(f"construct {args.kind} needs {flags}")
    return [float(getattr(args, n)) for n in names]


def _cmd_construct(args: argparse.Namespace) -> int:
    p = _params(args)
    kind, n = args.kind, args.n
    result: Any
    if kind == "single-action":
        yprime, k = _require(args, "yprime", "k")
        result = construct_single_action(yprime, k)
    elif kind == "no-production":
        wbar, yprime, k = _require(args, "wbar", "yprime", "k")
        result = construct_no_production_curve(wbar, yprime, k, n)
    elif kind == "extraction":
        wbar, yprime, mu_f = _require(args, "wbar", "yprime", "muF")
        result = construct_extraction_curve(wbar, yprime, mu_f, n)
    elif kind == "band":
        yprime, w = _require(args, "yprime", "w")
        result = construct_band_violation(yprime, w, p, n)
    elif kind == "gaming":
        y1, y2, w1, w2, p_mix = _require(args, "y1", "y2", "w1", "w2", "p_mix")
        result = construct_gaming_violation((y1, y2), (w1, w2), p_mix, p, n)
    else:
        yprime, w1, w2 = _require(args, "yprime", "w1", "w2")
        result = construct_flexibility_violation(yprime, (w1, w2), p, args.eps, n)
    _emit(args, serialize_report(result))
    return 0


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument(
        "--alpha", type=float, default=2.0, help="weight on worker surplus, in [1, 1e12]"
    )
    sp.add_argument("--ybar", type=float, default=1.0, help="bound on expected output")
    sp.add_argument("--out", help="write the result here instead of stdout")
    sp.add_argument("-v", "--verbose", action="count", default=0, help="more logging")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regretforge", description="Minmax-regret regulation of moral-hazard contracting."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, handler: Any, help_text: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_text)
        _add_common(sp)
        sp.set_defaults(handler=handler)
        return sp

    sp = command("solve-firm", _cmd_solve_firm, "firm best response and worst-case equilibrium")
    sp.add_argument("--tech", required=True)
    sp.add_argument("--reg", required=True)

    sp = command("solve-regulator", _cmd_solve_regulator, "full-information value")
    sp.add_argument("--tech", required=True)

    sp = command("regret", _cmd_regret, "regret of a regulation against a technology")
    sp.add_argument("--tech", required=True)
    sp.add_argument("--reg", required=True)

    sp = command("worst-case", _cmd_worst_case, "adversarial search for high-regret technologies")
    sp.add_argument("--reg", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=int, default=10000)
    sp.add_argument("--max-actions", type=int, default=20)
    sp.add_argument("--support", choices=("binary", "three_point"), default="binary")
    sp.add_argument("--grid-top", type=float)
    sp.add_argument("--k-lo", type=float, help="least production cost of searched technologies")
    sp.add_argument("--k-hi", type=float, help="largest production cost, ybar by default")
    sp.add_argument("--y-lo", type=float, help="least mean output of searched technologies")

    sp = command("minmax", _cmd_minmax, "optimal minimum piece rate")
    sp.add_argument("--numeric", action="store_true", help="minimize numerically")

    sp = command("minmax-constrained", _cmd_minmax_constrained, "optimal rate with bounds")
    sp.add_argument("--k-lo", type=float)
    sp.add_argument("--k-hi", type=float, help="defaults to ybar")
    sp.add_argument("--y-lo", type=float)

    sp = command("necessity", _cmd_necessity, "necessary conditions for optimality")
    sp.add_argument("--reg", required=True)
    sp.add_argument("--probes", type=int, default=DEFAULT_PROBES)
    sp.add_argument("--probe-max", type=float, help="largest probed output, 2 ybar by default")

    sp = command("sweep-alpha", _cmd_sweep_alpha, "optimal rate and regret over alpha (CSV)")
    sp.add_argument("--alphas", help="comma-separated values")
    sp.add_argument("--alpha-min", type=float, default=1.0)
    sp.add_argument("--alpha-max", type=float, default=100.0)
    sp.add_argument("--num", type=int, default=50)

    sp = command("branches", _cmd_branches, "regret branches over the piece rate (CSV)")
    sp.add_argument("--num", type=int, default=101)

    sp = command("verify", _cmd_verify, "run the acceptance checks (CSV)")
    sp.add_argument("--quick", action="store_true", help="small budgets for smoke runs")
    sp.add_argument("--check", action="append", choices=[name for name, _ in CHECKS])

    sp = command("bench", _cmd_bench, "search throughput (CSV)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=int, default=10000)
    sp.add_argument("--max-actions", type=int, default=10)
    sp.add_argument("--repetitions", type=int, default=5)
    sp.add_argument("--threads", type=int, default=1)

    sp = command("construct", _cmd_construct, "emit a closed-form technology")
    sp.add_argument(
        "kind",
        choices=("single-action", "no-production", "extraction", "band", "gaming", "flexibility"),
    )
    for name in ("yprime", "k", "wbar", "muF", "w", "y1", "y2", "w1", "w2", "p-mix"):
        sp.add_argument(f"--{name}", type=float)
    sp.add_argument("--eps", type=float, default=1e-3)
    sp.add_argument("--n", type=int, default=2000)
    return parser


def _configure_logging(verbosity: int) -> None:
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(verbosity, 2)]
    logging.basicConfig(
        stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s"
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one sub-command and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    _configure_logging(args.verbose)
    try:
        return int(args.handler(args))
    except NotImplementedError as e:
        print(f"regretforge: unsupported input: {e}", file=sys.stderr)
        return 3
    except (ValueError, LookupError, OSError) as e:
        print(f"regretforge: error: {e}", file=sys.stderr)
        return 2


run_cli = main
