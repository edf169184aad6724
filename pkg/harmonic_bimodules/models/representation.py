"""
Numerical unitary irreducible representations of a finite group.

The regular representation is split by eigenspaces of group-averaged random
Hermitian matrices; the resulting blocks are grouped into equivalence classes
with the averaged-intertwiner test.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from ..exceptions import DecompositionException, InvalidSubspaceChoiceException
from .group import FiniteGroup, GroupElement
from .subspace import encode_complex

logger = logging.getLogger(__name__)

CLUSTER_TOL = 1e-8
INTERTWINER_TOL = 1e-8
MAX_SPLIT_ATTEMPTS = 8


@dataclass(frozen=True, eq=False)
class Irrep:
    """
    Unitary irreducible representation given by its matrices.

    Attributes:
        matrices: (n, d, d) array, matrices[s] = pi(g_s).
        label: Short name, "pi0" is the trivial representation.
        basis_split: s_pi; the first s_pi basis vectors span E_pi.
    """

    matrices: np.ndarray
    label: str = "pi"
    basis_split: Optional[int] = None

    def __post_init__(self) -> None:
        mats = np.array(self.matrices, dtype=complex)
        mats.setflags(write=False)
        object.__setattr__(self, "matrices", mats)
        split = self.dim if self.basis_split is None else int(self.basis_split)
        if not 0 <= split <= self.dim:
            raise InvalidSubspaceChoiceException(f"s_pi = {split} outside [0, {self.dim}] for {self.label}.")
        object.__setattr__(self, "basis_split", split)

    @property
    def dim(self) -> int:
        return int(self.matrices.shape[1])

    @property
    def character(self) -> np.ndarray:
        return np.einsum("sii->s", self.matrices)

    def coefficient(self, i: int, j: int) -> np.ndarray:
        """The function s -> pi_ij(s) as a vector over G."""
        if not (0 <= i < self.dim and 0 <= j < self.dim):
            raise IndexError(f"Coefficient ({i}, {j}) outside a {self.dim}-dimensional irrep.")
        return np.array(self.matrices[:, i, j])

    def with_split(self, split: int) -> "Irrep":
        return Irrep(matrices=self.matrices, label=self.label, basis_split=split)

    def homomorphism_residual(self, group: FiniteGroup) -> float:
        """max |pi(s)pi(t) - pi(st)| together with unitarity and pi(e) = I."""
        mats = self.matrices
        products = np.einsum("sij,tjk->stik", mats, mats)
        expected = mats[group.table]
        unit = np.abs(mats[0] - np.eye(self.dim)).max()
        unitary = np.abs(np.einsum("sji,sjk->sik", mats.conj(), mats) - np.eye(self.dim)).max()
        return float(max(np.abs(products - expected).max(), unit, unitary))

    def to_dict(self) -> Dict:
        return {
            "label": self.label,
            "dim": self.dim,
            "basis_split": self.basis_split,
            "character": encode_complex(self.character),
            "matrices": encode_complex(self.matrices),
        }

    def __repr__(self) -> str:
        return f"Irrep(label={self.label!r}, dim={self.dim!r}, basis_split={self.basis_split!r})"


@dataclass
class IsotypicData:
    """
    Peter-Weyl block of an irrep inside l^2(G).

    Attributes:
        projection: n x n orthogonal projection P_pi.
        character: chi_pi(s) for every element.
        block_dim: d_pi ** 2, the trace of P_pi.
    """

    label: str
    projection: np.ndarray
    character: np.ndarray
    block_dim: int

    def to_dict(self) -> Dict:
        return {
            "label": self.label,
            "block_dim": self.block_dim,
            "character": encode_complex(self.character),
            "projection": encode_complex(self.projection),
        }

    def __repr__(self) -> str:
        return f"IsotypicData(label={self.label!r}, block_dim={self.block_dim!r})"


# ----------------------------------------------------------------------
# Decomposition of the regular representation
# ----------------------------------------------------------------------
def _character_norm(mats: np.ndarray) -> float:
    chi = np.einsum("sii->s", mats)
    return float(np.real(np.vdot(chi, chi))) / mats.shape[0]


def _restrict(mats: np.ndarray, columns: np.ndarray) -> np.ndarray:
    return np.einsum("ij,sjk,kl->sil", columns.conj().T, mats, columns)


def _cluster(eigenvalues: np.ndarray) -> List[np.ndarray]:
    """Group sorted eigenvalues closer than CLUSTER_TOL * spectral radius."""
    radius = max(float(np.abs(eigenvalues).max()), 1.0)
    groups = [[0]]
    for k in range(1, eigenvalues.shape[0]):
        if eigenvalues[k] - eigenvalues[k - 1] <= CLUSTER_TOL * radius:
            groups[-1].append(k)
        else:
            groups.append([k])
    return [np.array(g) for g in groups]


def _random_hermitian(rng: np.random.Generator, m: int) -> np.ndarray:
    x = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return (x + x.conj().T) / 2


def _split_invariant(mats: np.ndarray, rng: np.random.Generator) -> List[np.ndarray]:
    """
    Split an invariant subspace into irreducible pieces.

    Args:
        mats: (n, m, m) unitary matrices of the restricted representation.

    Returns:
        List of (m, k) column bases, each spanning an irreducible piece.
    """
    m = mats.shape[1]
    if _character_norm(mats) < 1.5:
        return [np.eye(m, dtype=complex)]

    for _ in range(MAX_SPLIT_ATTEMPTS):
        h = _random_hermitian(rng, m)
        averaged = np.einsum("sij,jk,slk->il", mats, h, mats.conj()) / mats.shape[0]
        averaged = (averaged + averaged.conj().T) / 2
        eigenvalues, vectors = scipy.linalg.eigh(averaged)
        clusters = _cluster(eigenvalues)
        if len(clusters) > 1:
            break
    else:
        raise DecompositionException(f"Averaged commutant stayed scalar on a reducible block of size {m}.")

    pieces = []
    for idx in clusters:
        columns = vectors[:, idx]
        for local in _split_invariant(_restrict(mats, columns), rng):
            pieces.append(columns @ local)
    return pieces


def _equivalent(a: np.ndarray, b: np.ndarray, rng: np.random.Generator) -> bool:
    """Nonzero averaged intertwiner between blocks a and b means equivalence (Schur)."""
    if a.shape[1] != b.shape[1]:
        return False
    d = a.shape[1]
    x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    averaged = np.einsum("sij,jk,slk->il", a, x, b.conj()) / a.shape[0]
    return bool(np.linalg.norm(averaged) > INTERTWINER_TOL * np.linalg.norm(x))


def _sort_key(mats: np.ndarray) -> Tuple:
    chi = np.einsum("sii->s", mats)
    if mats.shape[1] == 1:
        fractions = np.round(np.mod(np.angle(chi) / (2 * np.pi), 1.0), 9)
        fractions[fractions >= 1.0] = 0.0
        return (1, tuple(fractions.tolist()))
    parts = np.round(np.stack([chi.real, chi.imag], axis=1), 9) + 0.0
    return (mats.shape[1], tuple(-parts.ravel()))


def _decompose_once(group: FiniteGroup, rng: np.random.Generator) -> List[np.ndarray]:
    regular = np.array(group.right_regular_all)
    blocks = [_restrict(regular, cols) for cols in _split_invariant(regular, rng)]

    classes: List[np.ndarray] = []
    for block in blocks:
        if not any(_equivalent(rep, block, rng) for rep in classes):
            classes.append(block)

    total = sum(rep.shape[1] ** 2 for rep in classes)
    if total != group.order:
        raise DecompositionException(f"Sum of squared irrep dimensions is {total}, expected {group.order}.")
    return classes


def decompose_regular(group: FiniteGroup, seed: int = 0, max_retries: int = 3) -> List[Irrep]:
    """
    Complete list of pairwise-inequivalent unitary irreps of `group`.

    Args:
        group: The finite group.
        seed: Seed of the randomized splitting; the output is deterministic per seed.
        max_retries: Fresh seeds tried after a failed attempt.

    Returns:
        List[Irrep]: Sorted by dimension, the trivial representation first.

    Raises:
        DecompositionException: No attempt produced a complete decomposition.
    """
    last_error: Optional[Exception] = None
    for attempt in range(max_retries + 1):
        rng = np.random.default_rng([seed, attempt])
        try:
            classes = _decompose_once(group, rng)
        except DecompositionException as e:
            logger.warning("Decomposition of %s failed on attempt %d: %s", group.name, attempt, e)
            last_error = e
            continue
        classes.sort(key=_sort_key)
        irreps = [Irrep(matrices=mats, label=f"pi{k}") for k, mats in enumerate(classes)]
        logger.debug("Decomposed %s into irreps of dims %s", group.name, [p.dim for p in irreps])
        return irreps
    raise DecompositionException(f"Could not decompose {group.name} after {max_retries + 1} attempts: {last_error}")


# ----------------------------------------------------------------------
# Coefficients, Schur orthogonality, isotypic blocks
# ----------------------------------------------------------------------
def matrix_coefficient(pi: Irrep, i: int, j: int, s: GroupElement | int) -> complex:
    """pi_ij(s) = (pi(s) e_j, e_i), 0-based indices."""
    index = s.index if isinstance(s, GroupElement) else int(s)
    return complex(pi.coefficient(i, j)[index])


def schur_check(pi_a: Irrep, pi_b: Irrep, same_class: Optional[bool] = None) -> float:
    """
    Residual of the Schur orthogonality relations between two irreps.

    max |(1/|G|) sum_s conj(a_kl(s)) b_ij(s) - [a ~ b] delta_ki delta_lj / d|

    Args:
        same_class: Whether a and b are the same class. Defaults to comparing
            the matrices, which is right for irreps from one decomposition.
    """
    a = pi_a.matrices
    b = pi_b.matrices
    if same_class is None:
        same_class = a.shape == b.shape and bool(np.allclose(a, b, atol=1e-12))
    gram = np.einsum("skl,sij->klij", a.conj(), b) / a.shape[0]
    expected = np.zeros_like(gram)
    if same_class:
        d = a.shape[1]
        eye = np.eye(d)
        expected = np.einsum("ki,lj->klij", eye, eye) / d
    return float(np.abs(gram - expected).max())


def coefficient_matrix(irreps: Sequence[Irrep], normalized: bool = True) -> np.ndarray:
    """
    Rows sqrt(d_pi) pi_ij over all irreps, ordered (pi, i, j).

    Orthonormal under the (1/|G|)-normalized inner product when `normalized`.
    """
    rows = []
    for pi in irreps:
        scale = np.sqrt(pi.dim) if normalized else 1.0
        for i in range(pi.dim):
            for j in range(pi.dim):
                rows.append(scale * pi.coefficient(i, j))
    return np.array(rows)


def isotypic_projection(group: FiniteGroup, pi: Irrep) -> IsotypicData:
    """
    Orthogonal projection of l^2(G) onto span{pi_ij}.

    P_pi = (d_pi / |G|) sum_s chi_pi(s) lambda_s; with (lambda_s f)(t) = f(s^-1 t)
    this has range the coefficient space of pi.
    """
    chi = pi.character
    projection = (pi.dim / group.order) * np.einsum("s,sij->ij", chi, group.left_regular_all)
    return IsotypicData(label=pi.label, projection=projection, character=chi, block_dim=pi.dim**2)


def block(operator: np.ndarray, left: IsotypicData | np.ndarray, right: IsotypicData | np.ndarray) -> np.ndarray:
    """The Peter-Weyl block P_pi T P_pi'."""
    p_left = left.projection if isinstance(left, IsotypicData) else np.asarray(left)
    p_right = right.projection if isinstance(right, IsotypicData) else np.asarray(right)
    return p_left @ np.asarray(operator) @ p_right
