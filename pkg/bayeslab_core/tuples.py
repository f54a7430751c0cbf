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
import bisect
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from bayeslab_core._logutil import get_logger

from typing import *

log = get_logger('tuples')

K = TypeVar('K')
R = TypeVar('R')


class TupleSpace(Generic[K]):
    """
    A finite union of mixed-radix blocks addressed by one global index.

    Each block is a key (for instance a type profile) with a list of radices
    (for instance the action-set sizes under that type profile). Indices run
    over the blocks in the order given and, within a block, in lexicographic
    order with the last digit varying fastest.
    """

    def __init__(self,
                 blocks  # type: Sequence[Tuple[K, Sequence[int]]]
                 ):
        self._keys = []  # type: List[K]
        self._radices = []  # type: List[Tuple[int, ...]]
        self._offsets = [0]
        for key, radices in blocks:
            size = 1
            for r in radices:
                size *= int(r)
            self._keys.append(key)
            self._radices.append(tuple(int(r) for r in radices))
            self._offsets.append(self._offsets[-1] + size)

    def __len__(self):
        return self._offsets[-1]

    @property
    def size(self):
        # type: (...) -> int
        return self._offsets[-1]

    def decode(self,
               index  # type: int
               ):
        # type: (...) -> Tuple[K, Tuple[int, ...]]
        if index < 0 or index >= self.size:
            raise IndexError(index)
        block = bisect.bisect_right(self._offsets, index) - 1
        local = index - self._offsets[block]
        radices = self._radices[block]
        digits = [0] * len(radices)
        for pos in range(len(radices) - 1, -1, -1):
            local, digits[pos] = divmod(local, radices[pos])
        return self._keys[block], tuple(digits)

    def indices(self,
                max_tuples,  # type: int
                samples,  # type: int
                seed  # type: int
                ):
        # type: (...) -> Tuple[Sequence[int], bool]
        """
        The indices to visit and whether they are a sample.

        Spaces up to ``max_tuples`` are visited in full. Larger spaces are
        sampled; the k-th sample is drawn from a generator seeded with
        ``(seed, k)`` so any partitioning of the work samples the same tuples.
        """
        if self.size <= max_tuples:
            return range(self.size), False
        log.warning("tuple space of size %d exceeds %d; sampling %d tuples with seed %d",
                    self.size, max_tuples, samples, seed)
        picked = [int(np.random.default_rng([seed, k]).integers(self.size))
                  for k in range(samples)]
        return picked, True


def chunks(items,  # type: Sequence[Any]
           parts  # type: int
           ):
    # type: (...) -> List[Sequence[Any]]
    """
    Split into at most ``parts`` contiguous, order-preserving pieces.
    """
    total = len(items)
    parts = max(1, min(int(parts), total)) if total else 1
    bounds = [total * p // parts for p in range(parts + 1)]
    return [items[bounds[p]:bounds[p + 1]] for p in range(parts)]


def partitioned(items,  # type: Sequence[Any]
                fn,  # type: Callable[[Sequence[Any]], R]
                threads=1  # type: int
                ):
    # type: (...) -> List[R]
    """
    Apply ``fn`` to contiguous chunks of ``items`` and return the per-chunk
    results in chunk order, regardless of which worker finished first.
    """
    pieces = chunks(items, threads)
    if len(pieces) <= 1:
        return [fn(p) for p in pieces]
    with ThreadPoolExecutor(max_workers=len(pieces)) as executor:
        return list(executor.map(fn, pieces))
