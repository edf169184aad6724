"""Models subpackage for harmonic_bimodules."""

from .group import FiniteGroup, GroupElement
from .subspace import Numerics, OperatorSubspace, SubspaceCertificate, TracePairing
from .representation import Irrep, IsotypicData
from .measure import LeftIdeal, Measure, SuperOperator
from .report import Report, ReportBuilder
from .case import VerificationCase
from .run_config import RunConfig

__all__ = [
    "FiniteGroup",
    "GroupElement",
    "Numerics",
    "OperatorSubspace",
    "SubspaceCertificate",
    "TracePairing",
    "Irrep",
    "IsotypicData",
    "LeftIdeal",
    "Measure",
    "SuperOperator",
    "Report",
    "ReportBuilder",
    "VerificationCase",
    "RunConfig",
]
