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
import copy

from pyrsistent import pmap

from typing import *

OptionBlockBase = dict

T = TypeVar('T', bound=OptionBlockBase)

DEFAULTS = pmap({
    'threads': 1,
    'max_tuples': 10 ** 7,
    'max_profiles': 10 ** 7,
    'samples': 10 ** 4,
    'seed': 0,
    'slack': 0.0,
    'tolerance': 1e-9,
    'collect_margins': False,
    'mu_max': 3.0,
    'mu_points': 61,
    'refinements': 6,
    'bound_tolerance': 1e-3,
})


class OptionBlock(OptionBlockBase):
    def __init__(self,
                 *args,  # type: Any
                 **kwargs  # type: Any
                 ):
        # type: (...) -> None
        """
        A set of options for a verifier or search. It can be passed in as a
        positional option block and overridden by keyword arguments of the
        same name.

        :param kwargs: parameters to pass in to the OptionBlock; ``None``
            values are dropped so that defaults apply
        """
        super(OptionBlock, self).__init__(**{k: v for k, v in kwargs.items() if v is not None})
        self._args = args


class EnumerationOptions(OptionBlock):
    def __init__(self,  # type: EnumerationOptions
                 threads=None,  # type: int
                 max_tuples=None,  # type: int
                 max_profiles=None,  # type: int
                 samples=None,  # type: int
                 seed=None,  # type: int
                 slack=None,  # type: float
                 tolerance=None,  # type: float
                 collect_margins=None,  # type: bool
                 **kwargs  # type: Any
                 ):
        # type: (...) -> None
        """
        Options governing tuple and profile enumeration.

        :param threads: worker threads for partitioned enumeration
        :param max_tuples: tuple spaces larger than this are sampled
        :param max_profiles: guard on strategy and action profile enumeration
        :param samples: number of sampled tuples when sampling applies
        :param seed: seed of the counter-based sampler
        :param slack: additive slack allowed on every checked inequality
        :param tolerance: floating point tolerance added to the slack
        :param collect_margins: keep every per-tuple margin on the verdict
        """
        super(EnumerationOptions, self).__init__(threads=threads, max_tuples=max_tuples,
                                                 max_profiles=max_profiles, samples=samples,
                                                 seed=seed, slack=slack, tolerance=tolerance,
                                                 collect_margins=collect_margins, **kwargs)


class SearchOptions(EnumerationOptions):
    def __init__(self,  # type: SearchOptions
                 mu_max=None,  # type: float
                 mu_points=None,  # type: int
                 refinements=None,  # type: int
                 bound_tolerance=None,  # type: float
                 **kwargs  # type: Any
                 ):
        # type: (...) -> None
        """
        Options for the (lambda, mu) parameter search.

        :param mu_max: upper end of the mu grid for utility games
        :param mu_points: size of the initial mu grid
        :param refinements: maximum number of grid refinements
        :param bound_tolerance: stop refining once the bound moves less than this
        """
        super(SearchOptions, self).__init__(mu_max=mu_max, mu_points=mu_points,
                                            refinements=refinements,
                                            bound_tolerance=bound_tolerance, **kwargs)


def forward_args(arg_vars,  # type: Optional[Dict[str,Any]]
                 *options  # type: OptionBlock
                 ):
    # type: (...) -> Dict[str,Any]
    """
    Merge library defaults, option blocks and explicit keyword arguments,
    later sources winning.
    """
    end_options = dict(DEFAULTS)
    for block in options:
        if block:
            end_options.update(copy.copy(block))
    end_options.update({k: v for k, v in (arg_vars or {}).items() if v is not None})
    return end_options
