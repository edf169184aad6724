"""
Verification reports: structured pass/fail documents with dimensions,
principal angles, residuals and witnesses.
"""

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from .. import __version__
from .subspace import SubspaceCertificate, encode_complex

SCOPE = "finite-group verification"
WITNESS_DIGITS = 9


@dataclass
class Report:
    """
    Result of one verification case.

    Attributes:
        theorem_id: CLI theorem id, e.g. "main-duality".
        group: Group name.
        case: Ideal or measure description (serialized as "ideal_spec").
        passed: Every check of the case held.
        dims: Named subspace dimensions.
        max_principal_angle: Largest angle over the equality certificates, None without any.
        residuals: Named numerical residuals.
        failures: Names of the checks that failed.
        witness: First failing check and a vector demonstrating it.
        notes: Free-form remarks (peripheral spectrum, skipped parts, ...).
        seed: Seed of the randomized parts, None for deterministic cases.
        tol: Angle tolerance used.
        runtime_ms: Wall time when timings are recorded, else None.

    Rounding: angles and residuals (including max_principal_angle) carry
    three significant digits; witness vectors keep WITNESS_DIGITS decimals;
    runtime_ms keeps three decimals.
    """

    theorem_id: str
    group: str
    case: Dict[str, Any]
    passed: bool
    dims: Dict[str, int] = field(default_factory=dict)
    max_principal_angle: Optional[float] = None
    residuals: Dict[str, float] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)
    witness: Optional[Dict[str, Any]] = None
    notes: List[str] = field(default_factory=list)
    seed: Optional[int] = None
    tol: float = 1e-8
    runtime_ms: Optional[float] = None
    scope: str = SCOPE
    version: str = __version__

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "theorem_id": self.theorem_id,
            "group": self.group,
            "ideal_spec": self.case,
            "dims": self.dims,
            "max_principal_angle": self.max_principal_angle,
            "pass": self.passed,
            "residuals": self.residuals,
            "failures": self.failures,
            "witness": self.witness,
            "notes": self.notes,
            "seed": self.seed,
            "tol": self.tol,
            "runtime_ms": self.runtime_ms,
            "scope": self.scope,
            "version": self.version,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Report":
        return cls(
            theorem_id=data["theorem_id"],
            group=data["group"],
            case=data.get("ideal_spec", {}),
            passed=bool(data["pass"]),
            dims=dict(data.get("dims", {})),
            max_principal_angle=data.get("max_principal_angle"),
            residuals=dict(data.get("residuals", {})),
            failures=list(data.get("failures", [])),
            witness=data.get("witness"),
            notes=list(data.get("notes", [])),
            seed=data.get("seed"),
            tol=data.get("tol", 1e-8),
            runtime_ms=data.get("runtime_ms"),
            scope=data.get("scope", SCOPE),
            version=data.get("version", __version__),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def __repr__(self) -> str:
        return (
            f"Report(theorem_id={self.theorem_id!r}, group={self.group!r}, status={self.status!r}, "
            f"max_principal_angle={self.max_principal_angle!r})"
        )


def _round(value: float) -> float:
    return float(f"{value:.2e}")


class ReportBuilder:
    """Collects checks for one case and produces a `Report`."""

    def __init__(
        self,
        theorem_id: str,
        group: str,
        case: Dict[str, Any],
        tol: float,
        seed: Optional[int] = None,
    ):
        self.theorem_id = theorem_id
        self.group = group
        self.case = case
        self.tol = tol
        self.seed = seed
        self.passed = True
        self.dims: Dict[str, int] = {}
        self.angles: List[float] = []
        self.residuals: Dict[str, float] = {}
        self.failures: List[str] = []
        self.witness: Optional[Dict[str, Any]] = None
        self.notes: List[str] = []

    def _fail(self, name: str, vector: Optional[np.ndarray] = None) -> None:
        self.passed = False
        self.failures.append(name)
        if self.witness is None:
            self.witness = {"check": name, "vector": None if vector is None else encode_complex(vector, digits=WITNESS_DIGITS)}

    def dim(self, name: str, value: int) -> "ReportBuilder":
        self.dims[name] = int(value)
        return self

    def certificate(self, name: str, cert: SubspaceCertificate) -> "ReportBuilder":
        self.angles.append(cert.max_angle)
        self.residuals[f"{name}.angle"] = _round(cert.max_angle)
        if not cert.equal:
            self._fail(name, cert.witness)
        return self

    def containment(self, name: str, ok: bool, residual: float, witness: Optional[np.ndarray] = None) -> "ReportBuilder":
        self.residuals[name] = _round(residual)
        if not ok:
            self._fail(name, witness)
        return self

    def residual(self, name: str, value: float, bound: float) -> "ReportBuilder":
        self.residuals[name] = _round(value)
        if not value <= bound:
            self._fail(name)
        return self

    def check(self, name: str, ok: bool) -> "ReportBuilder":
        if not ok:
            self._fail(name)
        return self

    def note(self, text: str) -> "ReportBuilder":
        self.notes.append(text)
        return self

    def build(self) -> Report:
        return Report(
            theorem_id=self.theorem_id,
            group=self.group,
            case=self.case,
            passed=self.passed,
            dims=dict(self.dims),
            max_principal_angle=_round(max(self.angles)) if self.angles else None,
            residuals=dict(self.residuals),
            failures=list(self.failures),
            witness=self.witness,
            notes=list(self.notes),
            seed=self.seed,
            tol=self.tol,
        )
