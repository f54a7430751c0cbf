# coding=utf-8
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
from typing import *

try:
    from typing import TypedDict
except ImportError:
    from typing_extensions import TypedDict


class LabException(Exception):
    """Base exception for bayeslab errors

    This is the base class for all exceptions raised by the library.

    **Exception Attributes**

      .. py:attribute:: message

        Human readable description of the problem.

      .. py:attribute:: inner_cause

        If this exception was triggered by another exception, it is
        present here.

      .. py:attribute:: witness

        The tuple (type profile, action profiles, ...) that exhibits the
        problem, if there is one.

      .. py:attribute:: path

        For input problems, a slash separated location inside the
        instance or run-spec document.

      .. py:attribute:: EXIT_CODE

        Class level attribute: the process exit status the command line
        harness uses when this exception ends a run.
    """

    EXIT_CODE = 2

    ParamType = TypedDict('ParamType',
                          {'message': str,
                           'inner_cause': Exception,
                           'objextra': Any,
                           'witness': Any,
                           'path': str,
                           'size': int,
                           'limit': int})

    def __init__(self,  # type: LabException
                 params=None  # type: Union[LabException.ParamType,str]
                 ):
        if isinstance(params, str):
            params = {'message': params}
        elif isinstance(params, LabException):
            self.__dict__.update(params.__dict__)
            return
        params = params or {}

        self.message = params.get('message', None)
        self.inner_cause = params.get('inner_cause', None)
        self.objextra = params.get('objextra', None)
        self.witness = params.get('witness', None)
        self.path = params.get('path', None)
        self.size = params.get('size', None)
        self.limit = params.get('limit', None)
        super(LabException, self).__init__(self.message)

    @classmethod
    def pyexc(cls, message=None, obj=None, inner=None, **extra):
        params = {'message': message,
                  'objextra': obj,
                  'inner_cause': inner}
        params.update(extra)
        return cls(params)

    def __str__(self):
        details = []
        if self.message:
            details.append(self.message)
        if self.path is not None:
            details.append("path={0}".format(self.path))
        if self.size is not None:
            details.append("size={0}".format(self.size))
        if self.limit is not None:
            details.append("limit={0}".format(self.limit))
        if self.witness is not None:
            details.append("witness={0}".format(self.witness))
        if self.inner_cause:
            details.append("inner_cause={0}".format(self.inner_cause))
        if self.objextra is not None:
            details.append("OBJ={0}".format(repr(self.objextra)))
        return "<{0}>".format(", ".join(details))


class InvalidArgumentException(LabException):
    """Raised when a provided argument has an invalid value or type"""


class InvalidProfileException(InvalidArgumentException):
    """An action profile lies outside the action sets of its type profile"""


class InvalidActionException(InvalidArgumentException):
    """An action is infeasible for the declared type (wrong rate, budget overrun, ...)"""


class WrongVariantException(LabException):
    """The requested check does not apply to this game (for instance a plain
    smoothness check on a game whose action sets depend on types)"""


class InputException(LabException):
    """Problems found while loading an instance or run-spec document"""


class SchemaViolationException(InputException):
    """The document does not match its schema"""


class InvariantViolationException(InputException):
    """The document parses but a model invariant fails"""


class UnnormalizedProbabilityException(InputException):
    """A type distribution does not sum to one within tolerance"""


class GuardExceededException(LabException):
    """An enumeration would exceed its size guard and was refused"""

    EXIT_CODE = 3


class CertificateFailedException(LabException):
    """A verified inequality was violated beyond its slack"""

    EXIT_CODE = 1
