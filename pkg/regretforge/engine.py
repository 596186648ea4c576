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
"""Regret of a regulation against a technology."""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Optional

from regretforge.firm import worst_case_equilibrium
from regretforge.model import Params, Regulation, Technology
from regretforge.regulator import full_info_value

if sys.version_info >= (3, 8):
    from typing import Literal
else:
    from typing_extensions import Literal

__all__ = ["RegretReport", "regret"]


@dataclass(frozen=True)
class RegretReport:
    """The regret of a regulation together with its decomposition.

    ``regret`` equals ``full_info_value - (profit + alpha * worker_surplus)``, where the payoff
    terms come from the worst-case equilibrium.
    """

    full_info_value: float
    profit: float
    worker_surplus: float
    participated: bool
    regret: float
    scenario: Literal["exit", "production"] = "exit"
    action_index: Optional[int] = None


def regret(t: Technology, r: Regulation, p: Params) -> RegretReport:
    """Compute ``R(C, T)`` for regulation ``r`` and technology ``t``.

    Raises:
        ValueError: If ``t`` violates a model invariant.
    """
    value = full_info_value(t, p)
    eq = worst_case_equilibrium(t, r, p)
    loss = value - eq.payoff(p.alpha)
    if loss < -1e-9:
        raise RuntimeError(
            f"Negative regret {loss!r}: the full-information value lies below an equilibrium"
        )
    return RegretReport(
        full_info_value=value,
        profit=eq.profit,
        worker_surplus=eq.worker_surplus,
        participated=eq.participated,
        regret=max(loss, 0.0),
        scenario="production" if eq.participated else "exit",
        action_index=eq.action_index,
    )
