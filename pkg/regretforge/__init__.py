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
"""Minmax-regret regulation of moral-hazard contracting."""

__version__ = "0.1.0"
from regretforge.analysis import *
from regretforge.bench import *
from regretforge.constructions import *
from regretforge.engine import *
from regretforge.firm import *
from regretforge.kernel import *
from regretforge.minmax import *
from regretforge.model import *
from regretforge.regulator import *
from regretforge.search import *
from regretforge.serialization import *
from regretforge.verification import *
