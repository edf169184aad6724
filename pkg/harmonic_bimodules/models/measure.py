"""
Measures on a finite group, left ideals of l^1(G) and superoperators.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from ..exceptions import DimensionMismatchException, ProbabilityMeasureException
from .group import FiniteGroup
from .subspace import DEFAULT_NUMERICS, Numerics, OperatorSubspace, decode_complex, encode_complex, kernel

logger = logging.getLogger(__name__)

PROBABILITY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Measure:
    """
    Complex measure on G given by its point masses.

    Attributes:
        weights: Vector of length |G|.
        probability: When True the weights must be real, non-negative and sum to 1.
        label: Name used in reports.
    """

    weights: np.ndarray
    probability: bool = False
    label: str = "mu"

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=complex).ravel()
        if not np.all(np.isfinite(w)):
            raise ProbabilityMeasureException(f"Measure {self.label} has non-finite weights.")
        if self.probability:
            if np.abs(w.imag).max(initial=0.0) > PROBABILITY_TOL:
                raise ProbabilityMeasureException(f"Probability measure {self.label} has complex weights.")
            if w.real.min(initial=0.0) < -PROBABILITY_TOL:
                raise ProbabilityMeasureException(f"Probability measure {self.label} has negative weights.")
            if abs(w.real.sum() - 1.0) > PROBABILITY_TOL:
                raise ProbabilityMeasureException(
                    f"Probability measure {self.label} has total mass {w.real.sum():.15g}, expected 1."
                )
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def order(self) -> int:
        return int(self.weights.shape[0])

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(int(i) for i in np.nonzero(np.abs(self.weights) > PROBABILITY_TOL)[0])

    def total_mass(self) -> complex:
        return complex(self.weights.sum())

    def fixes_constants(self) -> bool:
        """P_mu(1) = 1, i.e. the total mass is one."""
        return abs(self.total_mass() - 1.0) <= PROBABILITY_TOL

    def is_adapted(self, group: FiniteGroup) -> bool:
        """Probability measure whose support generates the whole group."""
        return self.probability and len(group.generated_subgroup(self.support)) == group.order

    def check_group(self, group: FiniteGroup) -> None:
        if self.order != group.order:
            raise DimensionMismatchException(
                f"Measure {self.label} has {self.order} weights but {group.name} has order {group.order}."
            )

    # -------------------------------------------------------------------------
    # Constructors
    # -------------------------------------------------------------------------

    @classmethod
    def delta(cls, group: FiniteGroup, s: int = 0, label: Optional[str] = None) -> "Measure":
        weights = np.zeros(group.order)
        weights[group.element(s).index] = 1.0
        return cls(weights, probability=True, label=label or f"delta_{group.labels[s]}")

    @classmethod
    def uniform(cls, group: FiniteGroup, label: str = "uniform") -> "Measure":
        return cls(np.full(group.order, 1.0 / group.order), probability=True, label=label)

    @classmethod
    def on_subset(cls, group: FiniteGroup, subset: Iterable[int], label: Optional[str] = None) -> "Measure":
        """Uniform probability on the given element indices."""
        indices = sorted({group.element(i).index for i in subset})
        if not indices:
            raise ProbabilityMeasureException("Cannot build a probability measure on an empty subset.")
        weights = np.zeros(group.order)
        weights[indices] = 1.0 / len(indices)
        return cls(weights, probability=True, label=label or f"uniform{indices}")

    @classmethod
    def random(
        cls,
        group: FiniteGroup,
        rng: np.random.Generator,
        support_size: Optional[int] = None,
        adapted: bool = False,
        label: str = "random",
    ) -> "Measure":
        """
        Dirichlet-uniform weights on a random support.

        Args:
            support_size: Number of support points; random in [1, |G|] when None.
            adapted: Enlarge the support until it generates the group.
        """
        n = group.order
        size = int(rng.integers(1, n + 1)) if support_size is None else min(max(int(support_size), 1), n)
        support = [int(x) for x in rng.permutation(n)[:size]]
        if adapted:
            remaining = [int(x) for x in rng.permutation(n) if int(x) not in support]
            while len(group.generated_subgroup(support)) < n:
                support.append(remaining.pop(0))
        weights = np.zeros(n)
        weights[support] = rng.dirichlet(np.ones(len(support)))
        weights /= weights.sum()
        return cls(weights, probability=True, label=label)

    # -------------------------------------------------------------------------
    # Serialization / JSON handling
    # -------------------------------------------------------------------------

    def to_dict(self) -> Dict:
        return {
            "label": self.label,
            "weights": encode_complex(self.weights, digits=16),
            "probability": self.probability,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "Measure":
        weights = decode_complex(data["weights"], ndim=1)
        probability = bool(data.get("probability", False))
        return cls(weights, probability=probability, label=str(data.get("label", "mu")))

    @classmethod
    def load_from_file(cls, filepath: str | Path, group: Optional[FiniteGroup] = None) -> "Measure":
        """
        Load a measure file {"group": ref, "weights": [...], "probability": bool}.

        Args:
            group: When given, the weights must match its order.
        """
        data = json.loads(Path(filepath).read_text(encoding="utf-8"))
        measure = cls.from_dict(data)
        if group is not None:
            measure.check_group(group)
        return measure

    def __repr__(self) -> str:
        return f"Measure(label={self.label!r}, order={self.order!r}, probability={self.probability!r})"


@dataclass(frozen=True, eq=False)
class LeftIdeal:
    """
    Left ideal of l^1(G), equivalently a left-translation invariant subspace.

    Attributes:
        subspace: Subspace of C^n.
        provenance: One of "from_measures", "from_subspaces", "generated", "explicit".
        spec: JSON-ready description recorded in reports.
    """

    subspace: OperatorSubspace
    provenance: str = "explicit"
    spec: Dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.subspace.dim

    @property
    def order(self) -> int:
        return self.subspace.ambient_dim

    def invariance_residual(self, group: FiniteGroup) -> float:
        """Largest relative residual of lambda_x J against J over all x and basis vectors."""
        if self.dim == 0:
            return 0.0
        translated = np.einsum("xij,kj->xki", group.left_regular_all, self.subspace.basis)
        return float(self.subspace.residuals(translated).max())

    def is_left_invariant(self, group: FiniteGroup, numerics: Numerics = DEFAULT_NUMERICS) -> bool:
        return self.invariance_residual(group) <= numerics.angle_tol

    def to_dict(self) -> Dict:
        return {"provenance": self.provenance, "spec": self.spec, "dim": self.dim}

    def __repr__(self) -> str:
        return f"LeftIdeal(provenance={self.provenance!r}, dim={self.dim!r}, order={self.order!r})"


@dataclass(frozen=True, eq=False)
class SuperOperator:
    """
    Linear map on flattened operators (shape (n, n)) or functions (shape (n,)).

    Attributes:
        matrix: (d, d) array with d = prod(shape), acting on row-major vectors.
        shape: Shape of the objects it acts on.
        label: Name used in reports.
    """

    matrix: np.ndarray
    shape: Tuple[int, ...]
    label: str = "S"

    def __post_init__(self) -> None:
        mat = np.array(self.matrix, dtype=complex)
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "shape", tuple(int(x) for x in self.shape))

    @property
    def size(self) -> int:
        return int(self.matrix.shape[0])

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if x.size != self.size:
            raise DimensionMismatchException(f"{self.label} acts on size {self.size}, got {x.shape}.")
        return (self.matrix @ x.ravel()).reshape(self.shape)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.apply(x)

    def __matmul__(self, other: "SuperOperator") -> "SuperOperator":
        if other.shape != self.shape:
            raise DimensionMismatchException(f"Cannot compose {self.label} and {other.label}.")
        return SuperOperator(self.matrix @ other.matrix, self.shape, f"{self.label}*{other.label}")

    def fixed_space(self, numerics: Numerics = DEFAULT_NUMERICS) -> OperatorSubspace:
        return kernel([self.matrix - np.eye(self.size)], self.shape, numerics)

    def choi(self) -> np.ndarray:
        """Choi matrix sum_{c,d} E_cd (x) S(E_cd), ordered ((c, a), (d, b))."""
        if len(self.shape) != 2:
            raise DimensionMismatchException("The Choi matrix is defined for maps on operators.")
        n = self.shape[0]
        return self.matrix.reshape(n, n, n, n).transpose(2, 0, 3, 1).reshape(n * n, n * n)

    def min_choi_eigenvalue(self) -> float:
        choi = self.choi()
        return float(np.linalg.eigvalsh((choi + choi.conj().T) / 2).min())

    def to_dict(self) -> Dict:
        return {"label": self.label, "shape": list(self.shape), "matrix": encode_complex(self.matrix)}

    def __repr__(self) -> str:
        return f"SuperOperator(label={self.label!r}, shape={self.shape!r})"

