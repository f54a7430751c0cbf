#
# Copyright 2026, bayeslab contributors.
# All Rights Reserved
#
# Licensed under the Apache License, Version 2.0 (the "License")
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#
import enum
import math
import numbers
from collections.abc import Mapping

import attr

from typing import *

JSON = Union[str, int, float, bool, None, Mapping[str, 'JSON'], List['JSON']]

try:
    from bayeslab_core._version import __version__
except ImportError:
    __version__ = "0.1.0"

INFINITY = float('inf')
TOLERANCE = 1e-9


class Objective(enum.Enum):
    UTILITY = 'utility'
    COST = 'cost'

    def better(self,
               value,  # type: float
               incumbent  # type: float
               ):
        # type: (...) -> bool
        """
        Strict improvement in the direction of this objective.
        """
        if self is Objective.UTILITY:
            return value > incumbent
        return value < incumbent

    @property
    def worst(self):
        # type: (...) -> float
        return -INFINITY if self is Objective.UTILITY else INFINITY


class Marker(enum.Enum):
    """
    Qualifies a numeric result that is not an ordinary finite figure.
    """
    FINITE = 'finite'
    INFINITE = 'infinite'
    NONE_FOUND = 'none-found'
    UNBOUNDED = 'unbounded'


def marker_of(value  # type: Optional[float]
              ):
    # type: (...) -> Marker
    if value is None:
        return Marker.NONE_FOUND
    if math.isinf(value):
        return Marker.INFINITE
    return Marker.FINITE


def _float_repr(value  # type: float
                ):
    # type: (...) -> JSON
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def to_jsonable(obj  # type: Any
                ):
    # type: (...) -> JSON
    """
    Convert results, maps and records into plain JSON values.

    Mappings come back with string keys, tuples and sets as lists, enums as
    their values and infinities as the strings ``"inf"``/``"-inf"``, so that
    ``json.dumps(..., sort_keys=True)`` output is stable.
    """
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, numbers.Integral):
        return int(obj)
    if isinstance(obj, numbers.Real):
        return _float_repr(float(obj))
    if hasattr(obj, 'as_dict'):
        return to_jsonable(obj.as_dict())
    if attr.has(type(obj)):
        return to_jsonable(attr.asdict(obj, recurse=False))
    if isinstance(obj, Mapping):
        return {_key(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return [to_jsonable(v) for v in sorted(obj, key=repr)]
    if hasattr(obj, 'tolist'):
        return to_jsonable(obj.tolist())
    if isinstance(obj, Iterable):
        return [to_jsonable(v) for v in obj]
    return repr(obj)


def _key(k  # type: Any
         ):
    # type: (...) -> str
    if isinstance(k, str):
        return k
    if isinstance(k, enum.Enum):
        return str(k.value)
    if isinstance(k, tuple):
        return "|".join(_key(x) for x in k)
    return str(k)
