# src/hnets/exceptions.py

from typing import Any, Optional


class HnetsError(Exception):
    """Base class for every error raised by hnets.

    ``witness`` names the object that made the check fail (a region, a
    simplex, a pair of group elements ...) so that reports can point at it.
    """

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.witness = witness


class PosetError(HnetsError):
    pass


class DisconnectedPosetError(PosetError):
    pass


class PathError(HnetsError):
    pass


class RelationViolation(HnetsError):
    """A candidate homomorphism sends some relator to a non-identity element."""


class GroupError(HnetsError):
    pass


class NotNormalError(GroupError):
    pass


class TrivializationError(HnetsError):
    pass


class CoverageError(HnetsError):
    pass


class IncompatibleFamilyError(HnetsError):
    pass


class ChargeError(HnetsError):
    pass


class GeometryError(HnetsError):
    """No causally disjoint pair of regions where one is needed."""


class NormalizerError(HnetsError):
    pass


class FluxError(HnetsError):
    pass


class LiftChoiceError(HnetsError):
    pass


class FormatError(HnetsError):
    def __init__(self, message: str, line: Optional[int] = None, source: Optional[str] = None):
        location = f"{source or '<input>'}:{line}: " if line is not None else ""
        super().__init__(f"{location}{message}", witness=line)
        self.line = line
        self.source = source


class ScenarioError(HnetsError):
    pass
