"""Custom exceptions for harmonic_bimodules."""


class GroupFormatException(Exception):
    """Raised when a group file cannot be parsed."""

    pass


class GroupAxiomException(Exception):
    """Raised when a Cayley table violates a group axiom."""

    pass


class GroupSizeException(Exception):
    """Raised when a group exceeds the configured order cap."""

    pass


class DimensionMismatchException(Exception):
    """Raised when subspaces or vectors live in different ambient spaces."""

    pass


class InvalidSubspaceChoiceException(Exception):
    """Raised when a choice of s_pi lies outside [0, d_pi]."""

    pass


class NotLeftIdealException(Exception):
    """Raised when an explicit ideal is not invariant under left translations."""

    pass


class InvalidIdealException(Exception):
    """Raised when an ideal of A(Gamma) is not spanned by delta functions."""

    pass


class DecompositionException(Exception):
    """Raised when the irrep splitting does not converge."""

    pass


class CrossCheckException(Exception):
    """Raised when two independent computations of the same object disagree."""

    pass


class NonAbelianGroupException(Exception):
    """Raised when an abelian-only construction gets a non-abelian group."""

    pass


class NotHarmonicException(Exception):
    """Raised when an operator is not in the harmonic space it must belong to."""

    pass


class ProbabilityMeasureException(Exception):
    """Raised when a probability measure is required or its weights are invalid."""

    pass


class BoundaryStructureException(Exception):
    """Raised when the Choi-Effros product fails an algebra axiom."""

    pass


class InvalidConfigException(Exception):
    """Raised for invalid workbench or run configurations."""

    pass


class InvalidBackendTypeException(Exception):
    """Raised when an unsupported orthonormalization backend is requested."""

    pass
