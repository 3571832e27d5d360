"""Exception taxonomy.

Two families: mathematical failures (a hypothesis of a construction fails,
an obstruction is detected, numerical data does not support the requested
operation) and usage failures (bad scenario files, missing inputs).  The CLI
maps mathematical failures to exit status 2 and usage failures to exit
status 1.
"""


class DropDecompError(Exception):
    """Base class for all package errors."""


class MathematicalError(DropDecompError):
    """A construction hypothesis or invariant failed on the given data."""


class UsageError(DropDecompError):
    """Bad input plumbing: schema violations, missing files, unknown ops."""


class ClassMismatchError(MathematicalError):
    """Multisets live in different (n, k) classes or have different totals."""


class MalformedRepresentationError(MathematicalError):
    """Block data, unitary, or boundary blocks are inconsistent."""


class BlockStructureError(MathematicalError):
    """Eigenvalue data is not the spectrum of a dimension-drop representation."""


class MeshIncompatibilityError(MathematicalError):
    """Two sampled objects do not share a mesh."""


class DomainError(MathematicalError):
    """Operation applied to data outside its declared domain."""


class BranchAmbiguityError(MathematicalError):
    """A principal matrix logarithm hit the branch cut (eigenvalue -1)."""


class GapViolationError(MathematicalError):
    """An eigenvalue lies inside the protective gap of a spectral window."""


class UndersamplingError(MathematicalError):
    """Adjacent samples are too far apart to resolve a phase or spectrum."""


class PartitionHypothesisError(MathematicalError):
    """Interval components violate the grouping preconditions."""


class EndpointIncompatibilityError(MathematicalError):
    """Edge endpoints carry incompatible zero-block counts or ranks."""


class ObstructionError(MathematicalError):
    """The requested extension does not exist (zero-block count 0)."""


class HypothesisError(MathematicalError):
    """A theorem hypothesis fails at a reported sample."""


class ContinuityError(MathematicalError):
    """Sampled data jumps more than the declared modulus allows."""


class ResourceLimitError(MathematicalError):
    """An iterative refinement exceeded its configured cap."""


class PunctureError(MathematicalError):
    """A puncture point is invalid (on a face boundary)."""


class PunctureSearchError(MathematicalError):
    """No puncture with positive margin found at the configured resolution."""


class GeneratorError(MathematicalError):
    """The supplied function family does not separate the sample grid."""


class ClusterCollisionError(MathematicalError):
    """Spectral clusters merge: the separation hypothesis fails."""


class RankError(MathematicalError):
    """A rank target is infeasible for the given projection field."""


class StructureError(MathematicalError):
    """A claimed sub-complex is not a sub-complex of the stored structure."""


class InfeasibleFixtureError(MathematicalError):
    """Fixture parameters cannot satisfy the requested hypothesis."""


class ScenarioError(UsageError):
    """Scenario file violates the schema."""
