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
import json

import attr
from attr.validators import instance_of as io
from pyrsistent import pmap, PMap

from bayeslab.exceptions import CertificateFailedException
from bayeslab_core import JSON, INFINITY, to_jsonable
from bayeslab_core.tuples import partitioned

from typing import *


def _tuple_or_none(value):
    return None if value is None else tuple(value)


@attr.s(frozen=True)
class Verdict(object):
    """
    Outcome of checking an inequality over a finite set of tuples.

    ``worst_margin`` is the smallest (left side minus right side) value seen,
    oriented so that a nonnegative margin means the inequality holds; the
    check passes when it is at least ``-(slack + tolerance)``.
    """
    label = attr.ib(validator=io(str))  # type: str
    passed = attr.ib(validator=io(bool))  # type: bool
    worst_margin = attr.ib(converter=float)  # type: float
    witness = attr.ib(default=None)  # type: Any
    checked = attr.ib(default=0, validator=io(int))  # type: int
    sampled = attr.ib(default=False, validator=io(bool))  # type: bool
    slack = attr.ib(default=0.0, converter=float)  # type: float
    parameters = attr.ib(default=pmap(), converter=pmap)  # type: PMap
    flags = attr.ib(default=(), converter=tuple)  # type: Tuple[str, ...]
    margins = attr.ib(default=None, converter=_tuple_or_none, repr=False)  # type: Optional[Tuple[Tuple[int, float], ...]]

    def __bool__(self):
        return self.passed

    def as_dict(self):
        # type: (...) -> Dict[str, JSON]
        result = {
            'label': self.label,
            'passed': self.passed,
            'worst_margin': to_jsonable(self.worst_margin),
            'witness': to_jsonable(self.witness),
            'checked': self.checked,
            'sampled': self.sampled,
            'slack': to_jsonable(self.slack),
            'parameters': to_jsonable(self.parameters),
            'flags': list(self.flags),
        }
        return result

    def as_json(self):
        # type: (...) -> str
        return json.dumps(self.as_dict(), sort_keys=True)

    def raise_for_failure(self):
        # type: (...) -> Verdict
        if not self.passed:
            raise CertificateFailedException.pyexc(
                "{0} failed with margin {1!r}".format(self.label, self.worst_margin),
                witness=to_jsonable(self.witness))
        return self


def scan_margins(label,  # type: str
                 indices,  # type: Sequence[int]
                 margin_of,  # type: Callable[[int], float]
                 witness_of,  # type: Callable[[int], Any]
                 options,  # type: Mapping[str, Any]
                 sampled=False,  # type: bool
                 parameters=None,  # type: Mapping[str, Any]
                 flags=()  # type: Sequence[str]
                 ):
    # type: (...) -> Verdict
    """
    Evaluate ``margin_of`` on every index, partitioned over
    ``options['threads']`` workers, and merge into one :class:`Verdict`.

    The merged worst margin is the minimum over all chunks; the witness is
    the lowest index attaining it, so the verdict does not depend on the
    number of threads.
    """
    collect = bool(options.get('collect_margins'))

    def work(chunk):
        worst, worst_index, rows = INFINITY, None, []
        for index in chunk:
            margin = margin_of(index)
            if margin < worst or (margin == worst and worst_index is not None and index < worst_index):
                worst, worst_index = margin, index
            if collect:
                rows.append((index, margin))
        return worst, worst_index, rows

    worst, worst_index, rows = INFINITY, None, []
    for part_worst, part_index, part_rows in partitioned(indices, work, options.get('threads', 1)):
        if part_index is not None and (part_worst < worst or
                                       (part_worst == worst and part_index < worst_index)):
            worst, worst_index = part_worst, part_index
        rows.extend(part_rows)

    slack = float(options.get('slack', 0.0))
    tolerance = float(options.get('tolerance', 0.0))
    passed = worst_index is None or worst >= -(slack + tolerance)
    return Verdict(label=label,
                   passed=bool(passed),
                   worst_margin=worst,
                   witness=None if worst_index is None else witness_of(worst_index),
                   checked=len(indices),
                   sampled=sampled,
                   slack=slack,
                   parameters=parameters or {},
                   flags=flags,
                   margins=rows if collect else None)
