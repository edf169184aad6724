"""Harmonic analysis and bimodule duality on finite groups."""

__version__ = "0.1.0"

from .workbench import Workbench
from .exceptions import (
    BoundaryStructureException,
    CrossCheckException,
    DecompositionException,
    DimensionMismatchException,
    GroupAxiomException,
    GroupFormatException,
    GroupSizeException,
    InvalidBackendTypeException,
    InvalidConfigException,
    InvalidIdealException,
    InvalidSubspaceChoiceException,
    NonAbelianGroupException,
    NotHarmonicException,
    NotLeftIdealException,
    ProbabilityMeasureException,
)
from .models.group import FiniteGroup, make_builtin, resolve_group
from .models.measure import LeftIdeal, Measure, SuperOperator
from .models.report import Report
from .models.subspace import Numerics, OperatorSubspace

__all__ = [
    "Workbench",
    "FiniteGroup",
    "make_builtin",
    "resolve_group",
    "LeftIdeal",
    "Measure",
    "SuperOperator",
    "Report",
    "Numerics",
    "OperatorSubspace",
    "BoundaryStructureException",
    "CrossCheckException",
    "DecompositionException",
    "DimensionMismatchException",
    "GroupAxiomException",
    "GroupFormatException",
    "GroupSizeException",
    "InvalidBackendTypeException",
    "InvalidConfigException",
    "InvalidIdealException",
    "InvalidSubspaceChoiceException",
    "NonAbelianGroupException",
    "NotHarmonicException",
    "NotLeftIdealException",
    "ProbabilityMeasureException",
]
