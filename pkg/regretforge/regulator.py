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
"""The regulator's full-information benchmark ``V(T)``."""

from __future__ import annotations

import logging
from typing import List

import numpy as np

from regretforge.firm import ImplementationResult, _check_index, optimize_payment
from regretforge.model import EPS_TOL, Contract, Params, Technology, check_technology

__all__ = ["max_transfer_implementation", "transfer_table", "full_info_value"]

logger = logging.getLogger(__name__)


def max_transfer_implementation(t: Technology, idx: int) -> ImplementationResult:
    """The largest expected transfer to the worker that still implements ``idx``.

    The contract is unregulated apart from limited liability, and the firm must break even:
    its profit may fall short of zero by at most EPS_TOL.
    """
    _check_index(t, idx)
    levels = t.grid.levels[1:]
    cap = float(t.means[idx] - t.k) + EPS_TOL
    if cap < 0:
        return ImplementationResult.infeasible(idx)
    payments = optimize_payment(t, idx, np.zeros_like(levels), levels, "max", cap=cap)
    if payments is None:
        return ImplementationResult.infeasible(idx)
    transfer = float(t.probs[idx] @ payments)
    return ImplementationResult(idx, Contract(t.grid, payments), transfer, True)


def transfer_table(t: Technology) -> List[ImplementationResult]:
    return [max_transfer_implementation(t, i) for i in range(len(t))]


def full_info_value(t: Technology, p: Params) -> float:
    """``V(T)``: the best weighted payoff a regulator who knows ``t`` can secure.

    Since ``alpha >= 1`` the payoff ``mean - k - T + alpha * (T - e)`` increases in the
    transfer ``T``, so each action is evaluated at its largest feasible transfer. Declining to
    contract gives 0.
    """
    check_technology(t, p)
    best = 0.0
    for res in transfer_table(t):
        if not res.feasible:
            continue
        i = res.action_index
        transfer = min(res.expected_payment, float(t.means[i] - t.k))
        value = float(t.means[i] - t.k - transfer + p.alpha * (transfer - t.efforts[i]))
        best = max(best, value)
    logger.debug("Full-information value %r over %d actions", best, len(t))
    return best
