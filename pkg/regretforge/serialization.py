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
"""JSON documents for technologies, regulations and reports, and CSV tables.

Floats are written with ``repr``, the shortest string that round-trips, so documents and tables
are stable under re-serialization.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from typing import IO, Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from regretforge.model import (
    PROB_TOL,
    Action,
    All,
    Contract,
    ImageConstrained,
    LinearFamily,
    MinimumContract,
    MPR,
    OutputGrid,
    Regulation,
    Technology,
)

__all__ = [
    "SchemaError",
    "technology_from_obj",
    "technology_to_obj",
    "regulation_from_obj",
    "regulation_to_obj",
    "parse_technology_json",
    "serialize_technology",
    "parse_regulation_json",
    "serialize_regulation",
    "to_jsonable",
    "serialize_report",
    "write_csv",
    "csv_text",
]


class SchemaError(ValueError):
    """A document that does not match its schema; ``path`` is a JSON pointer to the problem."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path or '/'}: {message}")
        self.path = path


def _load(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError("", f"invalid JSON ({e.msg} at line {e.lineno})") from e


def _field(obj: Any, key: str, path: str) -> Any:
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object")
    if key not in obj:
        raise SchemaError(f"{path}/{key}", "missing required field")
    return obj[key]


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(path, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise SchemaError(path, "expected a finite number")
    return float(value)


def _numbers(value: Any, path: str) -> List[float]:
    if not isinstance(value, list):
        raise SchemaError(path, "expected an array of numbers")
    return [_number(v, f"{path}/{i}") for i, v in enumerate(value)]


def _grid(value: Any, path: str) -> OutputGrid:
    levels = _numbers(value, path)
    try:
        return OutputGrid(levels)
    except ValueError as e:
        raise SchemaError(path, str(e)) from e


def technology_from_obj(obj: Any) -> Technology:
    k = _number(_field(obj, "k", ""), "/k")
    grid = _grid(_field(obj, "grid", ""), "/grid")
    raw_actions = _field(obj, "actions", "")
    if not isinstance(raw_actions, list) or not raw_actions:
        raise SchemaError("/actions", "expected a nonempty array")
    actions = []
    for i, raw in enumerate(raw_actions):
        path = f"/actions/{i}"
        effort = _number(_field(raw, "e", path), f"{path}/e")
        probs = _numbers(_field(raw, "probs", path), f"{path}/probs")
        if len(probs) != len(grid):
            raise SchemaError(f"{path}/probs", f"expected {len(grid)} probabilities")
        if any(q < 0 for q in probs) or abs(math.fsum(probs) - 1.0) > PROB_TOL:
            raise SchemaError(f"{path}/probs", f"not a distribution (sum {math.fsum(probs)!r})")
        try:
            actions.append(Action(effort, probs))
        except ValueError as e:
            raise SchemaError(path, str(e)) from e
    try:
        return Technology(k, grid, actions)
    except ValueError as e:
        raise SchemaError("", str(e)) from e


def technology_to_obj(t: Technology) -> Dict[str, Any]:
    return {
        "k": t.k,
        "grid": t.grid.levels.tolist(),
        "actions": [{"e": a.effort, "probs": a.probs.tolist()} for a in t.actions],
    }


def _intervals(value: Any, path: str) -> List[List[float]]:
    if not isinstance(value, list):
        raise SchemaError(path, "expected an array of [lo, hi] pairs")
    out = []
    for i, pair in enumerate(value):
        nums = _numbers(pair, f"{path}/{i}")
        if len(nums) != 2:
            raise SchemaError(f"{path}/{i}", "expected a [lo, hi] pair")
        out.append(nums)
    return out


def regulation_from_obj(obj: Any) -> Regulation:
    """Build a regulation from its tagged-union document.

    Tags: ``all``; ``mpr`` with ``ell``; ``min_contract`` with ``grid`` and ``floor``;
    ``linear_family`` with ``slopes``; ``image`` with ``grid`` and per-level ``intervals``.
    """
    kind = _field(obj, "type", "")
    try:
        if kind == "all":
            return All()
        if kind == "mpr":
            return MPR(_number(_field(obj, "ell", ""), "/ell"))
        if kind == "linear_family":
            return LinearFamily(_numbers(_field(obj, "slopes", ""), "/slopes"))
        if kind == "min_contract":
            grid = _grid(_field(obj, "grid", ""), "/grid")
            return MinimumContract(grid, _numbers(_field(obj, "floor", ""), "/floor"))
        if kind == "image":
            grid = _grid(_field(obj, "grid", ""), "/grid")
            raw = _field(obj, "intervals", "")
            if not isinstance(raw, list):
                raise SchemaError("/intervals", "expected one interval list per grid level")
            levels = [_intervals(v, f"/intervals/{i}") for i, v in enumerate(raw)]
            return ImageConstrained(grid, levels)
    except SchemaError:
        raise
    except ValueError as e:
        raise SchemaError("", str(e)) from e
    raise SchemaError("/type", f"unknown regulation type {kind!r}")


def regulation_to_obj(r: Regulation) -> Dict[str, Any]:
    if isinstance(r, All):
        return {"type": "all"}
    if isinstance(r, MPR):
        return {"type": "mpr", "ell": r.ell}
    if isinstance(r, LinearFamily):
        return {"type": "linear_family", "slopes": list(r.slopes)}
    if isinstance(r, MinimumContract):
        return {"type": "min_contract", "grid": r.grid.levels.tolist(), "floor": r.floor.tolist()}
    if isinstance(r, ImageConstrained):
        return {
            "type": "image",
            "grid": r.grid.levels.tolist(),
            "intervals": [[list(iv) for iv in ivs] for ivs in r.intervals],
        }
    raise TypeError(f"Cannot serialize regulation of type {type(r).__name__}")


def parse_technology_json(text: str) -> Technology:
    """Parse ``{"k": ..., "grid": [...], "actions": [{"e": ..., "probs": [...]}]}``.

    Raises:
        SchemaError: With a JSON pointer to the offending field.
    """
    return technology_from_obj(_load(text))


def serialize_technology(t: Technology) -> str:
    return json.dumps(technology_to_obj(t))


def parse_regulation_json(text: str) -> Regulation:
    return regulation_from_obj(_load(text))


def serialize_regulation(r: Regulation) -> str:
    return json.dumps(regulation_to_obj(r))


def to_jsonable(value: Any) -> Any:
    """Convert results (dataclasses, named tuples, arrays, model objects) to plain JSON data.

    Non-finite floats become ``null``.
    """
    if isinstance(value, Technology):
        return technology_to_obj(value)
    if isinstance(value, Regulation):
        return regulation_to_obj(value)
    if isinstance(value, Contract):
        return value.payments.tolist()
    if isinstance(value, OutputGrid):
        return value.levels.tolist()
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: to_jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, tuple) and hasattr(value, "_fields"):
        return {name: to_jsonable(v) for name, v in zip(value._fields, value)}
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    return value


def serialize_report(value: Any, indent: Optional[int] = 2) -> str:
    return json.dumps(to_jsonable(value), indent=indent)


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(stream: IO[str], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """Write an RFC 4180 table with a header row and LF line endings."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])


def csv_text(rows: Sequence[Any], header: Optional[Sequence[str]] = None) -> str:
    """Render named tuples (or plain rows with an explicit ``header``) as CSV text."""
    if header is None:
        if not rows:
            raise ValueError("Need a header for an empty table")
        header = rows[0]._fields
    buffer = io.StringIO()
    write_csv(buffer, header, rows)
    return buffer.getvalue()
