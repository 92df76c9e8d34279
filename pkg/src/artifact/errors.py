"""Exception types shared across the package.

Every operational failure raises a subclass of :class:`ArtifactError` so that
callers (and the command line driver) can distinguish bad input from a genuine
bug.  The class names double as stable error tags: the CLI prints
``error.__class__.__name__`` and maps it to an exit code.
"""

from __future__ import annotations


class ArtifactError(Exception):
    """Base class for all failures raised by this package."""


# ---------------------------------------------------------------- diagram


class InvalidFamilyParams(ArtifactError):
    """Family parameters violate the family's preconditions."""


class NonPositiveEntry(ArtifactError):
    """An incidence entry that must be positive is zero or negative."""


class VertexOutOfSet(ArtifactError):
    """A vertex index lies outside the vertex set of its level."""


class MissingBoundedSizeParams(ArtifactError):
    """The operation needs bounded-size parameters the diagram does not carry."""


class EmptyCuts(ArtifactError):
    """Telescoping requires at least two cut levels."""


class WindowOverflow(ArtifactError):
    """A requested window exceeds what can be materialized exactly."""


# ---------------------------------------------------------------- combinatorics


class WindowTooSmall(ArtifactError):
    """The supplied window does not cover the supports needed for the result."""


class DepthCapExceeded(ArtifactError):
    """Path enumeration was asked to go deeper than the safety cap."""


# ---------------------------------------------------------------- measure


class MissingTailDescriptor(ArtifactError):
    """A vertex function over an infinite set lacks a tail description."""


class OutsideSupport(ArtifactError):
    """The cylinder lies outside the support of the measure."""


class ParamOutOfRange(ArtifactError):
    """A numeric parameter is outside its admissible open range."""


# ---------------------------------------------------------------- perron


class NotIrreducible(ArtifactError):
    """The matrix is not irreducible, so the eigen routine refuses to run."""


class NotAperiodic(ArtifactError):
    """The matrix is irreducible but periodic."""


class NoConvergence(ArtifactError):
    """Iteration failed to reach the requested tolerance."""


class NoFiniteLambda(ArtifactError):
    """No finite dominant rate exists for the requested parameters."""


class BracketFailure(ArtifactError):
    """Root bracketing failed while searching for the dominant rate."""


# ---------------------------------------------------------------- extension


class NotAdmissible(ArtifactError):
    """The vertex subset breaks the admissibility requirements."""


class EntryExceedsParent(ArtifactError):
    """A retained multiplicity exceeds the parent diagram's entry."""


class UnknownTail(ArtifactError):
    """The series cannot be classified from the available descriptors."""


class SupNotComputable(ArtifactError):
    """A required supremum cannot be evaluated exactly."""


class NotSimple(ArtifactError):
    """The operation requires a simple (strictly nested) structure."""


class NotERS(ArtifactError):
    """The operation requires equal row sums."""


class NoSmallTower(ArtifactError):
    """No tower with small enough mass was found within the search bound."""


# ---------------------------------------------------------------- dynamics


class MaximalWithinDepth(ArtifactError):
    """The path is maximal within the inspected depth; no successor exists."""


# ---------------------------------------------------------------- cli


class ConfigParse(ArtifactError):
    """The run configuration could not be parsed or validated."""
