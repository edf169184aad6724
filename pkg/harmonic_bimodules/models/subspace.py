"""
Tolerance-controlled linear subspaces of C^n and of the operator space M_n.

Every subspace keeps an orthonormal basis stored as rows of flattened
(row-major) vectors. Lattice operations re-orthonormalize through the
backend named in `Numerics`.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from ..exceptions import DimensionMismatchException
from ..services import IOrthonormalizer, get_orthonormalizer

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Numerics:
    """
    Tolerances and backend shared by every computation.

    Attributes:
        rank_tol: Singular values below rank_tol * largest are dropped.
        angle_tol: Largest principal angle accepted as "equal".
        orthonormalizer: Key in ORTHONORMALIZER_CLASSES.
    """

    rank_tol: float = 1e-9
    angle_tol: float = 1e-8
    orthonormalizer: str = "svd"

    @property
    def backend(self) -> IOrthonormalizer:
        return get_orthonormalizer(self.orthonormalizer)

    def with_tol(self, tol: Optional[float]) -> "Numerics":
        """Copy with a different angle tolerance, or self when tol is None."""
        if tol is None:
            return self
        return Numerics(rank_tol=self.rank_tol, angle_tol=float(tol), orthonormalizer=self.orthonormalizer)

    def to_dict(self) -> Dict:
        return {
            "rank_tol": self.rank_tol,
            "angle_tol": self.angle_tol,
            "orthonormalizer": self.orthonormalizer,
        }


DEFAULT_NUMERICS = Numerics()


# ----------------------------------------------------------------------
# Complex array encoding
# ----------------------------------------------------------------------
def encode_complex(array: np.ndarray, digits: int = 12):
    """Nested lists with each entry as a [re, im] pair, rounded for stable output."""
    array = np.asarray(array, dtype=complex)
    pairs = np.stack([np.round(array.real, digits), np.round(array.imag, digits)], axis=-1)
    pairs = pairs + 0.0  # turns -0.0 into 0.0
    return pairs.tolist()


def decode_complex(data, ndim: int) -> np.ndarray:
    """
    Inverse of `encode_complex` for an array of logical dimension `ndim`.

    Plain real entries (one level shallower) are accepted as well.
    """
    array = np.asarray(data, dtype=float)
    if array.ndim == ndim + 1 and array.shape[-1] == 2:
        return array[..., 0] + 1j * array[..., 1]
    if array.ndim == ndim:
        return array.astype(complex)
    raise ValueError(f"Expected a {ndim}-dimensional array of numbers or [re, im] pairs, got shape {array.shape}.")


# ----------------------------------------------------------------------
# Pairing
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class TracePairing:
    """
    Bilinear pairing between operators and trace-class symbols.

    On matrices: <T, h> = sum_{x,y} T(x, y) h(y, x), i.e. trace(T h).
    On vectors (l^inf against l^1): <a, f> = sum_x a(x) f(x).

    The pairing is stored as an index permutation of the flattened symbol.
    """

    def permutation(self, shape: Tuple[int, ...]) -> np.ndarray:
        size = math.prod(shape)
        if len(shape) == 2:
            return np.arange(size).reshape(shape).T.ravel()
        return np.arange(size)

    def pair(self, left: np.ndarray, right: np.ndarray) -> complex:
        left = np.asarray(left)
        right = np.asarray(right)
        if left.shape != right.shape:
            raise DimensionMismatchException(f"Cannot pair shapes {left.shape} and {right.shape}.")
        perm = self.permutation(left.shape)
        return complex(np.dot(left.ravel(), right.ravel()[perm]))


TRACE_PAIRING = TracePairing()


# ----------------------------------------------------------------------
# Subspace
# ----------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class OperatorSubspace:
    """
    Subspace of C^d with d = prod(shape).

    Attributes:
        basis: (k, d) array with orthonormal rows.
        shape: (n,) for function spaces, (n, n) for operator spaces.
        tol: Rank tolerance used to build the basis.
    """

    basis: np.ndarray
    shape: Tuple[int, ...]
    tol: float = DEFAULT_NUMERICS.rank_tol

    def __post_init__(self) -> None:
        shape = tuple(int(x) for x in self.shape)
        basis = np.asarray(self.basis, dtype=complex).reshape(-1, math.prod(shape))
        basis.setflags(write=False)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def ambient_dim(self) -> int:
        return int(self.basis.shape[1])

    def matrices(self) -> np.ndarray:
        """Basis vectors reshaped to `shape`; array of shape (k, *shape)."""
        return self.basis.reshape((self.dim,) + self.shape)

    def project(self, vector: np.ndarray) -> np.ndarray:
        """Orthogonal projection of `vector` onto the subspace, same shape as input."""
        v = np.asarray(vector, dtype=complex)
        flat = v.reshape(-1)
        if flat.shape[0] != self.ambient_dim:
            raise DimensionMismatchException(f"Vector of size {flat.shape[0]} in ambient {self.ambient_dim}.")
        coeffs = self.basis.conj() @ flat
        return (coeffs @ self.basis).reshape(v.shape)

    def residual(self, vector: np.ndarray) -> float:
        """Relative distance from `vector` to the subspace (0 for the zero vector)."""
        v = np.asarray(vector, dtype=complex)
        scale = np.linalg.norm(v)
        if scale == 0.0:
            return 0.0
        return float(np.linalg.norm(v - self.project(v)) / scale)

    def residuals(self, vectors: np.ndarray) -> np.ndarray:
        """Relative residuals of a stack of vectors, one per leading index."""
        flat = np.asarray(vectors, dtype=complex).reshape(-1, self.ambient_dim)
        scale = np.linalg.norm(flat, axis=1)
        rest = np.linalg.norm(flat - (flat @ self.basis.conj().T) @ self.basis, axis=1)
        return np.divide(rest, scale, out=np.zeros_like(rest), where=scale > 0)

    def projector(self) -> np.ndarray:
        """Orthogonal projector as a (d, d) matrix acting on flattened vectors."""
        return self.basis.T @ self.basis.conj()

    def to_dict(self) -> Dict:
        return {
            "shape": list(self.shape),
            "dim": self.dim,
            "tol": self.tol,
            "basis": encode_complex(self.matrices()),
        }

    def __repr__(self) -> str:
        return f"OperatorSubspace(dim={self.dim!r}, ambient_dim={self.ambient_dim!r}, shape={self.shape!r})"


@dataclass
class SubspaceCertificate:
    """
    Outcome of a subspace comparison.

    Attributes:
        equal: Dimensions match and the largest principal angle is below tol.
        dim_a, dim_b: Dimensions of the compared subspaces.
        max_angle: Largest principal angle (pi/2 when dimensions differ).
        witness: On failure, a unit vector of one space far from the other.
    """

    equal: bool
    dim_a: int
    dim_b: int
    max_angle: float
    tol: float
    witness: Optional[np.ndarray] = None

    def __bool__(self) -> bool:
        return self.equal

    def to_dict(self) -> Dict:
        return {
            "equal": self.equal,
            "dim_a": self.dim_a,
            "dim_b": self.dim_b,
            "max_angle": self.max_angle,
            "tol": self.tol,
            "witness": None if self.witness is None else encode_complex(self.witness),
        }

    def __repr__(self) -> str:
        return (
            f"SubspaceCertificate(equal={self.equal!r}, dims=({self.dim_a}, {self.dim_b}), "
            f"max_angle={self.max_angle:.3e})"
        )


# ----------------------------------------------------------------------
# Construction
# ----------------------------------------------------------------------
def _stack(vectors: Sequence[np.ndarray] | np.ndarray, shape: Optional[Tuple[int, ...]]) -> Tuple[np.ndarray, Tuple[int, ...]]:
    if isinstance(vectors, np.ndarray):
        items: List[np.ndarray] = list(vectors) if vectors.ndim > 1 or vectors.size == 0 else [vectors]
    else:
        items = [np.asarray(v, dtype=complex) for v in vectors]
    if not items:
        if shape is None:
            raise DimensionMismatchException("span of an empty family needs an explicit shape.")
        return np.zeros((0, math.prod(shape)), dtype=complex), tuple(shape)

    first = tuple(np.shape(items[0]))
    target = tuple(shape) if shape is not None else first
    for v in items:
        if math.prod(np.shape(v)) != math.prod(target):
            raise DimensionMismatchException(f"Vector of shape {np.shape(v)} does not fit ambient shape {target}.")
    stacked = np.array([np.ravel(v) for v in items], dtype=complex)
    if not np.all(np.isfinite(stacked)):
        raise ValueError("Spanning family contains non-finite entries.")
    return stacked, target


def span(
    vectors: Sequence[np.ndarray] | np.ndarray,
    shape: Optional[Tuple[int, ...]] = None,
    numerics: Numerics = DEFAULT_NUMERICS,
) -> OperatorSubspace:
    """
    Orthonormal basis of the linear span of a family.

    Args:
        vectors: Matrices or vectors of a common size; an (m, ...) array is
            read as m stacked vectors.
        shape: Ambient shape; inferred from the first vector when omitted.
        numerics: Rank tolerance and backend.

    Raises:
        DimensionMismatchException: Vectors of different sizes, or an empty
            family without `shape`.
    """
    stacked, target = _stack(vectors, shape)
    basis = numerics.backend.orthonormalize(stacked, numerics.rank_tol) if stacked.shape[0] else stacked
    return OperatorSubspace(basis=basis, shape=target, tol=numerics.rank_tol)


def zero_space(shape: Tuple[int, ...]) -> OperatorSubspace:
    return OperatorSubspace(basis=np.zeros((0, math.prod(shape)), dtype=complex), shape=shape)


def full_space(shape: Tuple[int, ...]) -> OperatorSubspace:
    return OperatorSubspace(basis=np.eye(math.prod(shape), dtype=complex), shape=shape)


def complement(space: OperatorSubspace, numerics: Numerics = DEFAULT_NUMERICS) -> OperatorSubspace:
    """Hermitian orthogonal complement."""
    if space.dim == 0:
        return full_space(space.shape)
    null = scipy.linalg.null_space(space.basis.conj(), rcond=numerics.rank_tol)
    return OperatorSubspace(basis=null.T, shape=space.shape, tol=numerics.rank_tol)


def annihilator(
    space: OperatorSubspace,
    pairing: TracePairing = TRACE_PAIRING,
    numerics: Numerics = DEFAULT_NUMERICS,
) -> OperatorSubspace:
    """
    {T : <T, h> = 0 for all h in space}.

    <T, h> = vec(T) . vec(h)[perm], so the annihilator is the Hermitian
    complement of the conjugated, permuted basis.
    """
    perm = pairing.permutation(space.shape)
    dual = OperatorSubspace(basis=space.basis[:, perm].conj(), shape=space.shape, tol=space.tol)
    return complement(dual, numerics)


# ----------------------------------------------------------------------
# Lattice operations
# ----------------------------------------------------------------------
def _check_same_ambient(a: OperatorSubspace, b: OperatorSubspace) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatchException(f"Ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}.")


def _farthest_vector(source: OperatorSubspace, target: OperatorSubspace) -> Optional[np.ndarray]:
    """Basis vector of `source` with the largest residual against `target`."""
    if source.dim == 0:
        return None
    residuals = target.residuals(source.basis)
    return source.basis[int(np.argmax(residuals))].reshape(source.shape)


def equal(
    a: OperatorSubspace,
    b: OperatorSubspace,
    tol: Optional[float] = None,
    numerics: Numerics = DEFAULT_NUMERICS,
) -> SubspaceCertificate:
    """Compare two subspaces by dimension and largest principal angle."""
    _check_same_ambient(a, b)
    tol = numerics.angle_tol if tol is None else tol

    if a.dim != b.dim:
        bigger, smaller = (a, b) if a.dim > b.dim else (b, a)
        return SubspaceCertificate(False, a.dim, b.dim, math.pi / 2, tol, _farthest_vector(bigger, smaller))
    if a.dim == 0:
        return SubspaceCertificate(True, 0, 0, 0.0, tol)

    angles = scipy.linalg.subspace_angles(a.basis.T, b.basis.T)
    max_angle = float(np.max(angles))
    if max_angle <= tol:
        return SubspaceCertificate(True, a.dim, b.dim, max_angle, tol)
    return SubspaceCertificate(False, a.dim, b.dim, max_angle, tol, _farthest_vector(a, b))


def intersect(a: OperatorSubspace, b: OperatorSubspace, numerics: Numerics = DEFAULT_NUMERICS) -> OperatorSubspace:
    """
    Intersection through the principal vectors of `a` at angle zero to `b`.

    The singular values of the residual of a's basis against b are the sines
    of the principal angles; directions with sine below angle_tol are kept.
    """
    _check_same_ambient(a, b)
    if a.dim == 0 or b.dim == 0:
        return zero_space(a.shape)

    residual = a.basis - (a.basis @ b.basis.conj().T) @ b.basis
    u, s, _ = scipy.linalg.svd(residual, full_matrices=True)
    sines = np.zeros(a.dim)
    sines[: s.shape[0]] = s
    keep = sines <= numerics.angle_tol
    if not np.any(keep):
        return zero_space(a.shape)
    vectors = u[:, keep].conj().T @ a.basis
    return span(vectors, shape=a.shape, numerics=numerics)


def subspace_sum(a: OperatorSubspace, b: OperatorSubspace, numerics: Numerics = DEFAULT_NUMERICS) -> OperatorSubspace:
    _check_same_ambient(a, b)
    return span(np.vstack([a.basis, b.basis]), shape=a.shape, numerics=numerics)


def contains(
    space: OperatorSubspace,
    vector: np.ndarray,
    tol: Optional[float] = None,
    numerics: Numerics = DEFAULT_NUMERICS,
) -> bool:
    tol = numerics.angle_tol if tol is None else tol
    return space.residual(vector) <= tol


def is_subspace(
    inner: OperatorSubspace,
    outer: OperatorSubspace,
    tol: Optional[float] = None,
    numerics: Numerics = DEFAULT_NUMERICS,
) -> Tuple[bool, float, Optional[np.ndarray]]:
    """
    Containment check over the basis of `inner`.

    Returns:
        (contained, largest residual, witness basis vector or None)
    """
    _check_same_ambient(inner, outer)
    tol = numerics.angle_tol if tol is None else tol
    if inner.dim == 0:
        return True, 0.0, None
    residuals = outer.residuals(inner.basis)
    worst = int(np.argmax(residuals))
    ok = bool(residuals[worst] <= tol)
    return ok, float(residuals[worst]), None if ok else inner.basis[worst].reshape(inner.shape)


def kernel(
    operators: Iterable[np.ndarray],
    shape: Tuple[int, ...],
    numerics: Numerics = DEFAULT_NUMERICS,
) -> OperatorSubspace:
    """
    Joint kernel of linear maps given as (d, d) matrices on flattened vectors.

    An empty family has the whole space as its joint kernel.
    """
    mats = [np.asarray(op, dtype=complex) for op in operators]
    if not mats:
        return full_space(shape)
    stacked = np.vstack(mats)
    if stacked.shape[1] != math.prod(shape):
        raise DimensionMismatchException(f"Operators act on size {stacked.shape[1]}, ambient shape is {shape}.")
    if not np.any(stacked):
        return full_space(shape)
    null = scipy.linalg.null_space(stacked, rcond=numerics.rank_tol)
    return OperatorSubspace(basis=null.T, shape=shape, tol=numerics.rank_tol)


def image(
    operators: Iterable[np.ndarray],
    shape: Tuple[int, ...],
    numerics: Numerics = DEFAULT_NUMERICS,
) -> OperatorSubspace:
    """Sum of the column spaces of linear maps on flattened vectors."""
    mats = [np.asarray(op, dtype=complex) for op in operators]
    if not mats:
        return zero_space(shape)
    return span(np.hstack(mats).T, shape=shape, numerics=numerics)
