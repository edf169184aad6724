"""
Noncommutative Poisson boundary of a probability measure and its crossed
product picture.

Tensor legs: l^2(G) (x) l^2(G) is indexed by (s, t) -> s * n + t and the
first leg is the new one, so that

    (V xi)(s, t) = xi(st, t)
    Gamma~(T) = V (T (x) I) V^*
    Gamma~(lambda_r) = lambda_r (x) I
    Gamma~(M_phi) = alpha~(phi) = diag((s, t) -> phi(st))
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .duality import bim, multiplication_space
from .exceptions import (
    BoundaryStructureException,
    CrossCheckException,
    NotHarmonicException,
    ProbabilityMeasureException,
)
from .harmonic import harmonic_functions, multiplication_operator, theta
from .models.group import FiniteGroup
from .models.measure import Measure, SuperOperator
from .models.report import Report, ReportBuilder
from .models.subspace import (
    DEFAULT_NUMERICS,
    Numerics,
    OperatorSubspace,
    encode_complex,
    equal,
    image,
    intersect,
    kernel,
    span,
)

logger = logging.getLogger(__name__)

PERIPHERAL_TOL = 1e-9
DEFAULT_MAX_TRIPLES = 20000


@dataclass(frozen=True, eq=False)
class ConditionalExpectation:
    """
    Projection onto the harmonic operators along range(id - Theta(mu)).

    Attributes:
        superop: The projection as a superoperator on M_n.
        fixed_space: H~(mu) = ker(id - Theta(mu)).
        complement: range(id - Theta(mu)).
        peripheral: Eigenvalues of Theta(mu) of modulus one other than 1.
    """

    superop: SuperOperator
    fixed_space: OperatorSubspace
    complement: OperatorSubspace
    measure: Measure
    peripheral: Tuple[complex, ...] = ()

    @property
    def order(self) -> int:
        return self.fixed_space.shape[0]

    def apply(self, operator: np.ndarray) -> np.ndarray:
        return self.superop.apply(operator)

    def to_dict(self) -> Dict:
        return {
            "measure": self.measure.to_dict(),
            "fixed_dim": self.fixed_space.dim,
            "complement_dim": self.complement.dim,
            "peripheral_spectrum": encode_complex(np.array(self.peripheral, dtype=complex), digits=9),
            "superop": encode_complex(self.superop.matrix),
        }

    def __repr__(self) -> str:
        return (
            f"ConditionalExpectation(measure={self.measure.label!r}, fixed_dim={self.fixed_space.dim!r}, "
            f"peripheral={len(self.peripheral)!r})"
        )


@dataclass
class CesaroValidation:
    """
    Distances from convex-combination schemes of Theta(mu) iterates to the
    algebraic projection.

    Attributes:
        plain_gaps: {N: max |C_N - E|} for the Cesaro means C_N.
        lazy_gap: max |((I + Theta)/2)^N - E| at the smallest N.
        shrinking: The plain gap decreases from the smaller N to the larger.
    """

    plain_gaps: Dict[int, float]
    lazy_gap: float
    shrinking: bool
    bound: float

    @property
    def passed(self) -> bool:
        return self.shrinking and self.lazy_gap < self.bound

    def to_dict(self) -> Dict:
        return {
            "plain_gaps": {str(k): v for k, v in self.plain_gaps.items()},
            "lazy_gap": self.lazy_gap,
            "shrinking": self.shrinking,
            "bound": self.bound,
            "passed": self.passed,
        }


# ----------------------------------------------------------------------
# Conditional expectation
# ----------------------------------------------------------------------
def _require_probability(mu: Measure) -> None:
    if not mu.probability:
        raise ProbabilityMeasureException(f"Measure {mu.label} must be a probability measure here.")


def poisson_projection(group: FiniteGroup, mu: Measure, numerics: Numerics = DEFAULT_NUMERICS) -> ConditionalExpectation:
    """
    E~ = projection onto ker(id - Theta(mu)) along range(id - Theta(mu)).

    With K and R column bases of the kernel and the range, E~ = [K R] diag(I, 0) [K R]^-1.

    Raises:
        ProbabilityMeasureException: `mu` is not a probability measure.
        CrossCheckException: Kernel and range overlap or do not fill M_n.
    """
    _require_probability(mu)
    mu.check_group(group)
    n = group.order
    size = n * n
    op = theta(group, mu).matrix
    defect = np.eye(size) - op
    fixed = kernel([defect], (n, n), numerics)
    rng_space = image([defect], (n, n), numerics)

    overlap = intersect(fixed, rng_space, numerics)
    if overlap.dim or fixed.dim + rng_space.dim != size:
        raise CrossCheckException(
            f"ker(id - Theta) (dim {fixed.dim}) and range(id - Theta) (dim {rng_space.dim}) "
            f"do not decompose M_n (overlap dim {overlap.dim})."
        )

    columns = np.hstack([fixed.basis.T, rng_space.basis.T])
    inverse = scipy.linalg.inv(columns)
    matrix = columns[:, : fixed.dim] @ inverse[: fixed.dim, :]

    eigenvalues = scipy.linalg.eigvals(op)
    peripheral = sorted(
        (complex(z) for z in eigenvalues if abs(abs(z) - 1) < PERIPHERAL_TOL and abs(z - 1) > PERIPHERAL_TOL),
        key=lambda z: (round(np.angle(z), 9), round(z.real, 9)),
    )
    if peripheral:
        logger.info("Theta(%s) has %d peripheral eigenvalues besides 1", mu.label, len(peripheral))

    return ConditionalExpectation(
        superop=SuperOperator(matrix, (n, n), f"E[{mu.label}]"),
        fixed_space=fixed,
        complement=rng_space,
        measure=mu,
        peripheral=tuple(peripheral),
    )


def cesaro_mean(op: np.ndarray, terms: int) -> np.ndarray:
    """(1/N) sum_{k<N} op^k for N a power of two, by doubling."""
    if terms < 1 or terms & (terms - 1):
        raise ValueError("Cesaro length must be a power of two.")
    total = np.eye(op.shape[0], dtype=complex)
    power = np.array(op, dtype=complex)
    count = 1
    while count < terms:
        total = total + power @ total
        power = power @ power
        count *= 2
    return total / terms


def lazy_power(op: np.ndarray, terms: int) -> np.ndarray:
    """((I + op)/2)^N for N a power of two, by repeated squaring."""
    if terms < 1 or terms & (terms - 1):
        raise ValueError("Power must be a power of two.")
    result = (np.eye(op.shape[0]) + op) / 2
    count = 1
    while count < terms:
        result = result @ result
        count *= 2
    return result


def validate_cesaro(
    group: FiniteGroup,
    expectation: ConditionalExpectation,
    lengths: Sequence[int] = (2**10, 2**11),
    bound: float = 1e-6,
) -> CesaroValidation:
    """Compare Cesaro and lazy convex combinations of Theta(mu) iterates with E~."""
    op = theta(group, expectation.measure).matrix
    target = expectation.superop.matrix
    gaps = {int(N): float(np.abs(cesaro_mean(op, N) - target).max()) for N in lengths}
    ordered = [gaps[int(N)] for N in sorted(lengths)]
    shrinking = all(b < a or b <= 1e-12 for a, b in zip(ordered, ordered[1:]))
    lazy_gap = float(np.abs(lazy_power(op, min(lengths)) - target).max())
    return CesaroValidation(plain_gaps=gaps, lazy_gap=lazy_gap, shrinking=shrinking, bound=bound)


# ----------------------------------------------------------------------
# Choi-Effros product and the boundary algebra
# ----------------------------------------------------------------------
def _as_harmonic(expectation: ConditionalExpectation, operator: np.ndarray, numerics: Numerics) -> np.ndarray:
    residual = expectation.fixed_space.residual(operator)
    if residual > numerics.angle_tol:
        raise NotHarmonicException(f"Operator is not harmonic (relative residual {residual:.3e}).")
    return expectation.fixed_space.project(operator)


def choi_effros(
    expectation: ConditionalExpectation,
    left: np.ndarray,
    right: np.ndarray,
    numerics: Numerics = DEFAULT_NUMERICS,
) -> np.ndarray:
    """
    T <> S = E~(T S) for T, S harmonic.

    Raises:
        NotHarmonicException: An argument is not in H~(mu) within tolerance.
    """
    t = _as_harmonic(expectation, left, numerics)
    s = _as_harmonic(expectation, right, numerics)
    return expectation.apply(t @ s)


@dataclass(frozen=True, eq=False)
class BoundaryAlgebra:
    """
    H~(mu) with the Choi-Effros product.

    Attributes:
        expectation: The projection E~.
        basis: (k, n, n) Hilbert-Schmidt orthonormal basis of H~(mu).
        structure: (k, k, k) constants, B_i <> B_j = sum_l structure[i, j, l] B_l.
        functions: H(mu); the operators M_phi with phi in H(mu) form a subalgebra.
    """

    expectation: ConditionalExpectation
    basis: np.ndarray
    structure: np.ndarray
    functions: OperatorSubspace

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    def coords(self, operator: np.ndarray) -> np.ndarray:
        return self.basis.reshape(self.dim, -1).conj() @ np.asarray(operator, dtype=complex).ravel()

    def element(self, coords: np.ndarray) -> np.ndarray:
        return np.einsum("k,kij->ij", coords, self.basis)

    def product(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        return self.expectation.apply(left @ right)

    def left_multiplication(self, coords: np.ndarray) -> np.ndarray:
        """Matrix of Y -> X <> Y in the basis, X given by its coordinates."""
        return np.einsum("i,ijl->lj", coords, self.structure)

    def unit_residual(self) -> float:
        unit = self.coords(np.eye(self.basis.shape[1]))
        return float(np.abs(self.left_multiplication(unit) - np.eye(self.dim)).max())

    def commutator_residual(self) -> float:
        return float(np.abs(self.structure - self.structure.transpose(1, 0, 2)).max()) if self.dim else 0.0

    def is_commutative(self, tol: float = 1e-8) -> bool:
        return self.commutator_residual() <= tol

    def center_dim(self, numerics: Numerics = DEFAULT_NUMERICS) -> int:
        """Dimension of {X : X <> B = B <> X for all B}."""
        if self.dim == 0:
            return 0
        # column i, row (j, l): c[i, j, l] - c[j, i, l]
        defect = (self.structure - self.structure.transpose(1, 0, 2)).transpose(1, 2, 0).reshape(-1, self.dim)
        if not np.any(np.abs(defect) > numerics.rank_tol):
            return self.dim
        return int(scipy.linalg.null_space(defect, rcond=numerics.rank_tol).shape[1])

    def associativity_residual(
        self,
        rng: Optional[np.random.Generator] = None,
        max_triples: int = DEFAULT_MAX_TRIPLES,
    ) -> Tuple[float, Optional[Tuple[int, int, int]]]:
        """
        max |(B_i <> B_j) <> B_l - B_i <> (B_j <> B_l)| over basis triples,
        exhaustive when k^3 <= max_triples, otherwise over a random sample.
        """
        k = self.dim
        if k == 0:
            return 0.0, None
        c = self.structure
        if k**3 <= max_triples:
            lhs = np.einsum("ijm,mlp->ijlp", c, c)
            rhs = np.einsum("jlm,imp->ijlp", c, c)
            gaps = np.abs(lhs - rhs).max(axis=-1)
            worst = np.unravel_index(int(np.argmax(gaps)), gaps.shape)
            return float(gaps[worst]), tuple(int(x) for x in worst)

        rng = np.random.default_rng(0) if rng is None else rng
        triples = rng.integers(0, k, size=(max_triples, 3))
        best = (0.0, None)
        for i, j, l in triples:
            lhs = np.einsum("m,mp->p", c[i, j], c[:, l])
            rhs = np.einsum("m,mp->p", c[j, l], c[i])
            gap = float(np.abs(lhs - rhs).max())
            if gap > best[0]:
                best = (gap, (int(i), int(j), int(l)))
        return best

    def involution_residual(self) -> float:
        """
        max |(B_i <> B_j)^* - B_j^* <> B_i^*| over basis pairs, in coordinates.

        H~(mu) is closed under adjoints, so B_i^* = sum_r adj[i, r] B_r.
        """
        if self.dim == 0:
            return 0.0
        c = self.structure
        adj = np.array([self.coords(b.conj().T) for b in self.basis])
        lhs = np.einsum("ijm,mr->ijr", c.conj(), adj)
        rhs = np.einsum("jp,iq,pqr->ijr", adj, adj, c)
        closure = max(float(np.abs(self.element(row) - b.conj().T).max()) for row, b in zip(adj, self.basis))
        return max(float(np.abs(lhs - rhs).max()), closure)

    def positivity_residual(self, samples: Sequence[np.ndarray]) -> float:
        """
        Most negative spectral value of T^* <> T over the samples, read off the
        left multiplication matrix; 0 when every spectrum is non-negative.
        """
        worst = 0.0
        for t in samples:
            square = self.product(t.conj().T, t)
            scale = max(float(np.abs(square).max()), 1.0)
            spectrum = scipy.linalg.eigvals(self.left_multiplication(self.coords(square)))
            worst = max(worst, float(-spectrum.real.min()) / scale, float(np.abs(spectrum.imag).max()) / scale)
        return max(worst, 0.0)

    def function_closure_residual(self) -> float:
        """Largest residual of M_phi <> M_psi against {M_phi : phi in H(mu)}."""
        if self.functions.dim == 0:
            return 0.0
        target = multiplication_space(self.functions)
        worst = 0.0
        for a in self.functions.basis:
            for b in self.functions.basis:
                value = self.product(multiplication_operator(a), multiplication_operator(b))
                worst = max(worst, target.residual(value))
        return worst

    def to_dict(self) -> Dict:
        return {
            "measure": self.expectation.measure.to_dict(),
            "dim": self.dim,
            "basis": encode_complex(self.basis),
            "structure_constants": encode_complex(self.structure),
            "harmonic_functions_dim": self.functions.dim,
        }

    def __repr__(self) -> str:
        return f"BoundaryAlgebra(measure={self.expectation.measure.label!r}, dim={self.dim!r})"


def boundary_algebra(
    group: FiniteGroup,
    mu: Measure,
    numerics: Numerics = DEFAULT_NUMERICS,
    expectation: Optional[ConditionalExpectation] = None,
    rng: Optional[np.random.Generator] = None,
    max_triples: int = DEFAULT_MAX_TRIPLES,
) -> BoundaryAlgebra:
    """
    Structure constants of the Choi-Effros product on H~(mu).

    Raises:
        BoundaryStructureException: Associativity fails, naming the triple.
    """
    expectation = poisson_projection(group, mu, numerics) if expectation is None else expectation
    basis = expectation.fixed_space.matrices()
    k = basis.shape[0]
    products = np.einsum("iab,jbc->ijac", basis, basis).reshape(k * k, -1)
    projected = products @ expectation.superop.matrix.T
    structure = (projected @ expectation.fixed_space.basis.conj().T).reshape(k, k, k)

    algebra = BoundaryAlgebra(
        expectation=expectation,
        basis=basis,
        structure=structure,
        functions=harmonic_functions(group, [mu], numerics),
    )
    gap, triple = algebra.associativity_residual(rng, max_triples)
    if gap > numerics.angle_tol:
        raise BoundaryStructureException(f"Choi-Effros product not associative on basis triple {triple}: {gap:.3e}.")
    logger.debug("Boundary algebra of %s has dim %d", mu.label, k)
    return algebra


# ----------------------------------------------------------------------
# Action, fundamental unitary and crossed product
# ----------------------------------------------------------------------
def alpha(group: FiniteGroup, s: int, function: np.ndarray) -> np.ndarray:
    """(alpha_s phi)(t) = phi(s^-1 t)."""
    return group.left_regular_all[s] @ np.asarray(function, dtype=complex)


def function_product(algebra: BoundaryAlgebra, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """phi <> psi on H(mu), read off the diagonal of M_phi <> M_psi."""
    return np.diag(algebra.product(multiplication_operator(left), multiplication_operator(right)))


def fundamental_unitary(group: FiniteGroup) -> np.ndarray:
    """Permutation matrix (V xi)(s, t) = xi(st, t)."""
    n = group.order
    s, t = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    v = np.zeros((n * n, n * n))
    v[(s * n + t).ravel(), (group.table[s, t] * n + t).ravel()] = 1.0
    return v


def gamma_tilde(group: FiniteGroup, operator: np.ndarray, unitary: Optional[np.ndarray] = None) -> np.ndarray:
    """Gamma~(T) = V (T (x) I) V^*."""
    v = fundamental_unitary(group) if unitary is None else unitary
    return v @ np.kron(np.asarray(operator, dtype=complex), np.eye(group.order)) @ v.T


def gamma_tilde_inverse(group: FiniteGroup, operator: np.ndarray, unitary: Optional[np.ndarray] = None) -> np.ndarray:
    """Compression of V^* X V to second-leg index 0; inverts Gamma~ on its image."""
    n = group.order
    v = fundamental_unitary(group) if unitary is None else unitary
    pulled = v.T @ np.asarray(operator, dtype=complex) @ v
    rows = np.arange(n) * n
    return pulled[np.ix_(rows, rows)]


def alpha_tilde(group: FiniteGroup, function: np.ndarray) -> np.ndarray:
    """Diagonal operator (s, t) -> phi(st); its first-leg s block is M_{alpha_{s^-1} phi}."""
    phi_values = np.asarray(function, dtype=complex)
    return np.diag(phi_values[group.table].ravel())


def lambda_tilde(group: FiniteGroup, s: int) -> np.ndarray:
    return np.kron(group.left_regular_all[s], np.eye(group.order))


@dataclass(frozen=True, eq=False)
class CrossedProduct:
    """
    span{alpha~(phi) lambda~_s : phi in H(mu), s in G} inside M_{n^2}.

    Attributes:
        subspace: Subspace of matrices of shape (n^2, n^2).
        generator_log: Dimension of H(mu) and number of generators.
    """

    subspace: OperatorSubspace
    generator_log: Dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.subspace.dim

    def __repr__(self) -> str:
        return f"CrossedProduct(dim={self.dim!r}, generator_log={self.generator_log!r})"


def crossed_product(group: FiniteGroup, mu: Measure, numerics: Numerics = DEFAULT_NUMERICS) -> CrossedProduct:
    _require_probability(mu)
    n = group.order
    functions = harmonic_functions(group, [mu], numerics)
    generators = [alpha_tilde(group, phi_) @ lambda_tilde(group, s) for phi_ in functions.basis for s in range(n)]
    subspace = span(generators, shape=(n * n, n * n), numerics=numerics)
    log = {"harmonic_dim": functions.dim, "generators": len(generators)}
    return CrossedProduct(subspace=subspace, generator_log=log)


def _map_operators(group: FiniteGroup, space: OperatorSubspace, unitary: np.ndarray, numerics: Numerics) -> OperatorSubspace:
    n = group.order
    images = [gamma_tilde(group, m, unitary) for m in space.matrices()]
    return span(images, shape=(n * n, n * n), numerics=numerics)


def _sample_pairs(k: int, rng: np.random.Generator, limit: int = 64) -> List[Tuple[int, int]]:
    pairs = [(i, j) for i in range(k) for j in range(k)]
    if len(pairs) <= limit:
        return pairs
    picks = rng.choice(len(pairs), size=limit, replace=False)
    return [pairs[int(p)] for p in sorted(picks)]


def verify_cross_iso(
    group: FiniteGroup,
    mu: Measure,
    rng: np.random.Generator,
    numerics: Numerics = DEFAULT_NUMERICS,
    seed: Optional[int] = None,
) -> Report:
    """
    Certificates for the crossed-product picture of the Poisson boundary:
        (i) Gamma~(Bim(H(mu))) equals the crossed product,
        (ii) Gamma~ is injective on H~(mu) with image the crossed product,
        (iii) Gamma~(T <> S) = E'(Gamma~(T) Gamma~(S)) with E' = Gamma~ E~ Gamma~^-1,
        (iv) Gamma~ preserves adjoints,
        (v) alpha_s(phi <> psi) = alpha_s(phi) <> alpha_s(psi) on H(mu).
    """
    _require_probability(mu)
    builder = ReportBuilder("cross-iso", group.name, {"type": "measure", "measure": mu.to_dict()}, numerics.angle_tol, seed)
    unitary = fundamental_unitary(group)
    expectation = poisson_projection(group, mu, numerics)
    algebra = boundary_algebra(group, mu, numerics, expectation=expectation, rng=rng)
    functions = algebra.functions
    harmonic_ops = expectation.fixed_space
    crossed = crossed_product(group, mu, numerics)

    builder.dim("H", functions.dim).dim("H_tilde", harmonic_ops.dim).dim("crossed_product", crossed.dim)
    if expectation.peripheral:
        builder.note(f"peripheral spectrum of Theta(mu): {len(expectation.peripheral)} eigenvalues of modulus 1 besides 1")
    builder.note("axioms of one von Neumann structure checked; uniqueness is not tested")

    # (i)
    bim_image = _map_operators(group, bim(group, functions, numerics).subspace, unitary, numerics)
    builder.certificate("(i) Gamma(Bim(H))=crossed", equal(bim_image, crossed.subspace, numerics=numerics))

    # (ii)
    harmonic_image = _map_operators(group, harmonic_ops, unitary, numerics)
    builder.check("(ii) injective", harmonic_image.dim == harmonic_ops.dim)
    builder.certificate("(ii) Gamma(H_tilde)=crossed", equal(harmonic_image, crossed.subspace, numerics=numerics))

    # (iii) and (iv) on basis pairs
    basis = algebra.basis
    mult_gap = 0.0
    adjoint_gap = 0.0
    for i, j in _sample_pairs(algebra.dim, rng):
        t_img = gamma_tilde(group, basis[i], unitary)
        s_img = gamma_tilde(group, basis[j], unitary)
        transported = gamma_tilde(group, expectation.apply(gamma_tilde_inverse(group, t_img @ s_img, unitary)), unitary)
        direct = gamma_tilde(group, algebra.product(basis[i], basis[j]), unitary)
        mult_gap = max(mult_gap, float(np.abs(transported - direct).max()))
    for t in basis:
        adjoint_gap = max(adjoint_gap, float(np.abs(gamma_tilde(group, t.conj().T, unitary) - gamma_tilde(group, t, unitary).conj().T).max()))
    builder.residual("(iii) multiplicativity", mult_gap, numerics.angle_tol)
    builder.residual("(iv) adjoints", adjoint_gap, numerics.angle_tol)
    builder.residual("involution", algebra.involution_residual(), numerics.angle_tol)

    # (v)
    equivariance = 0.0
    for a in functions.basis:
        for b in functions.basis:
            product = function_product(algebra, a, b)
            for s in range(group.order):
                lhs = alpha(group, s, product)
                rhs = function_product(algebra, alpha(group, s, a), alpha(group, s, b))
                equivariance = max(equivariance, float(np.abs(lhs - rhs).max()))
    builder.residual("(v) alpha-equivariance", equivariance, numerics.angle_tol)
    builder.check("dim crossed = dim H_tilde", crossed.dim == harmonic_ops.dim)
    return builder.build()


def boundary_report(
    group: FiniteGroup,
    mu: Measure,
    rng: np.random.Generator,
    numerics: Numerics = DEFAULT_NUMERICS,
    seed: Optional[int] = None,
) -> Report:
    """Properties of E~ and of the Choi-Effros algebra for one measure."""
    _require_probability(mu)
    n = group.order
    builder = ReportBuilder("boundary", group.name, {"type": "measure", "measure": mu.to_dict()}, numerics.angle_tol, seed)
    expectation = poisson_projection(group, mu, numerics)
    e = expectation.superop.matrix
    op = theta(group, mu).matrix
    builder.dim("H_tilde", expectation.fixed_space.dim)
    builder.residual("idempotent", float(np.abs(e @ e - e).max()), 1e-10)
    builder.residual("unital", float(np.abs(expectation.apply(np.eye(n)) - np.eye(n)).max()), 1e-10)
    builder.residual("choi_min_eigenvalue", max(0.0, -expectation.superop.min_choi_eigenvalue()), 1e-9)
    builder.residual("range_fixed", float(np.abs(op @ e - e).max()), 1e-10)

    lam = group.left_regular_all
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    s, t = (int(v) for v in rng.integers(0, n, size=2))
    bimodule_gap = np.abs(expectation.apply(lam[s] @ x @ lam[t]) - lam[s] @ expectation.apply(x) @ lam[t]).max()
    builder.residual("bimodule_map", float(bimodule_gap), 1e-10)

    cesaro = validate_cesaro(group, expectation)
    for length, gap in cesaro.plain_gaps.items():
        builder.residual(f"cesaro_gap_{length}", gap, np.inf)
    builder.check("cesaro_shrinking", cesaro.shrinking)
    if expectation.peripheral:
        builder.note("plain Cesaro means converge slowly under peripheral spectrum; lazy scheme reported")
    builder.residual("lazy_gap", cesaro.lazy_gap, cesaro.bound)

    algebra = boundary_algebra(group, mu, numerics, expectation=expectation, rng=rng)
    gap, _ = algebra.associativity_residual(rng)
    builder.residual("associativity", gap, 1e-8)
    builder.residual("unit", algebra.unit_residual(), 1e-8)
    builder.residual("involution", algebra.involution_residual(), 1e-8)
    builder.residual("function_closure", algebra.function_closure_residual(), 1e-8)
    samples = [algebra.element(rng.standard_normal(algebra.dim) + 1j * rng.standard_normal(algebra.dim)) for _ in range(3)]
    builder.residual("positivity", algebra.positivity_residual(samples), 1e-8)
    builder.dim("center", algebra.center_dim(numerics))
    return builder.build()
