"""
VN(G)-bimodules generated by multiplication operators, saturations of left
ideals in the trace class and the verifiers relating them.

Bim(U) is spanned by lambda_s M_a lambda_t. Since
lambda_s M_a lambda_t = M_{alpha_s a} lambda_{st}, the operators M_b lambda_u
with b in the translation hull of U and u in G already span it; for an
orthonormal hull basis they are orthonormal in the Hilbert-Schmidt product.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .exceptions import CrossCheckException
from .harmonic import (
    annihilator_ideal,
    harmonic_functions,
    harmonic_operators,
    ideal_from_measures,
    ideal_from_subspaces,
    multiplication_operator,
    non_markov_measures,
    normalize_splits,
    remark_identity,
    theorem_identity,
    theta,
    theta_predual,
)
from .models.group import FiniteGroup
from .models.measure import LeftIdeal, Measure
from .models.report import Report, ReportBuilder
from .models.representation import Irrep, block, isotypic_projection
from .models.subspace import (
    DEFAULT_NUMERICS,
    Numerics,
    OperatorSubspace,
    annihilator,
    equal,
    image,
    intersect,
    is_subspace,
    kernel,
    span,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BimSpace:
    """
    Bim(U) with a log of the generators used.

    Attributes:
        subspace: Subspace of M_n.
        generator_log: Dimensions of U and of its translation hull, and the
            generator family M_b lambda_u.
    """

    subspace: OperatorSubspace
    generator_log: Dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.subspace.dim

    def __repr__(self) -> str:
        return f"BimSpace(dim={self.dim!r}, generator_log={self.generator_log!r})"


@dataclass(frozen=True, eq=False)
class RanSpace:
    """Ran J = span{theta(f)(h) : f in J, h in T(G)}."""

    subspace: OperatorSubspace
    ideal_dim: int = 0

    @property
    def dim(self) -> int:
        return self.subspace.dim

    def __repr__(self) -> str:
        return f"RanSpace(dim={self.dim!r}, ideal_dim={self.ideal_dim!r})"


# ----------------------------------------------------------------------
# Constructions
# ----------------------------------------------------------------------
def translation_hull(group: FiniteGroup, functions: OperatorSubspace, numerics: Numerics = DEFAULT_NUMERICS) -> OperatorSubspace:
    """span{alpha_s a : s in G, a in U} with (alpha_s a)(t) = a(s^-1 t)."""
    if functions.dim == 0:
        return functions
    translates = np.einsum("sij,kj->ski", group.left_regular_all, functions.basis)
    return span(translates.reshape(-1, group.order), shape=(group.order,), numerics=numerics)


def bim(group: FiniteGroup, functions: OperatorSubspace, numerics: Numerics = DEFAULT_NUMERICS) -> BimSpace:
    """Bim(U) = span{lambda_s M_a lambda_t : a in U, s, t in G}."""
    n = group.order
    hull = translation_hull(group, functions, numerics)
    # rows M_b lambda_u for b in the hull basis and u in G
    generators = np.einsum("ki,uij->kuij", hull.basis, group.left_regular_all).reshape(-1, n * n)
    subspace = OperatorSubspace(basis=generators, shape=(n, n), tol=numerics.rank_tol)
    log = {"source_dim": functions.dim, "hull_dim": hull.dim, "generators": "M_b lambda_u"}
    return BimSpace(subspace=subspace, generator_log=log)


def ran(group: FiniteGroup, ideal: LeftIdeal, numerics: Numerics = DEFAULT_NUMERICS) -> RanSpace:
    """
    Ran J as the joint column space of theta(f), f in a basis of J.

    The columns of theta(f) are the images of the matrix units.
    """
    n = group.order
    maps = [theta_predual(group, f).matrix for f in ideal.subspace.basis]
    return RanSpace(subspace=image(maps, (n, n), numerics), ideal_dim=ideal.dim)


def ran_perp(group: FiniteGroup, ideal: LeftIdeal, numerics: Numerics = DEFAULT_NUMERICS) -> OperatorSubspace:
    """
    (Ran J)^perp, computed as the annihilator of Ran J and as the joint
    kernel of Theta(f) over a basis of J.

    Raises:
        CrossCheckException: The two computations disagree.
    """
    n = group.order
    by_pairing = annihilator(ran(group, ideal, numerics).subspace, numerics=numerics)
    by_kernel = kernel([theta(group, f).matrix for f in ideal.subspace.basis], (n, n), numerics)
    cert = equal(by_pairing, by_kernel, numerics=numerics)
    if not cert.equal:
        raise CrossCheckException(
            f"(Ran J)^perp by annihilator (dim {cert.dim_a}) and by kernels (dim {cert.dim_b}) "
            f"differ, max angle {cert.max_angle:.3e}."
        )
    return by_kernel


def diagonal_mask(group: FiniteGroup, t: int) -> np.ndarray:
    """Boolean mask of the positions (s, t^-1 s)."""
    n = group.order
    mask = np.zeros((n, n), dtype=bool)
    rows = np.arange(n)
    mask[rows, group.table[group.inverses[t], rows]] = True
    return mask


def diagonal_part(group: FiniteGroup, operator: np.ndarray, t: int) -> np.ndarray:
    """D_t(X) = lambda_t D(lambda_{t^-1} X), the entries of X at (s, t^-1 s)."""
    x = np.asarray(operator, dtype=complex)
    return np.where(diagonal_mask(group, t), x, 0.0)


def masa(group: FiniteGroup) -> OperatorSubspace:
    """The diagonal algebra D = {M_phi}."""
    n = group.order
    return OperatorSubspace(basis=np.eye(n * n)[np.arange(n) * (n + 1)], shape=(n, n))


def multiplication_space(functions: OperatorSubspace) -> OperatorSubspace:
    """{M_a : a in U}."""
    n = functions.ambient_dim
    if functions.dim == 0:
        return OperatorSubspace(basis=np.zeros((0, n * n)), shape=(n, n))
    return OperatorSubspace(
        basis=np.array([multiplication_operator(a).ravel() for a in functions.basis]),
        shape=(n, n),
        tol=functions.tol,
    )


def bimodule_residual(group: FiniteGroup, space: OperatorSubspace) -> float:
    """Largest residual of lambda_s B and B lambda_s against the space, B in its basis."""
    if space.dim == 0:
        return 0.0
    lam = group.left_regular_all
    mats = space.matrices()
    left = np.einsum("sij,kjl->skil", lam, mats)
    right = np.einsum("kij,sjl->skil", mats, lam)
    return float(max(space.residuals(left).max(), space.residuals(right).max()))


# ----------------------------------------------------------------------
# Verifiers
# ----------------------------------------------------------------------
def _builder(theorem_id: str, group: FiniteGroup, case: Dict, numerics: Numerics, seed: Optional[int] = None) -> ReportBuilder:
    return ReportBuilder(theorem_id, group.name, case, numerics.angle_tol, seed)


def verify_inclusion(group: FiniteGroup, ideal: LeftIdeal, numerics: Numerics = DEFAULT_NUMERICS) -> Report:
    """Bim(J^perp) is contained in (Ran J)^perp."""
    builder = _builder("inclusion", group, ideal.spec, numerics)
    perp = annihilator_ideal(ideal, numerics)
    bim_space = bim(group, perp, numerics).subspace
    rp = ran_perp(group, ideal, numerics)
    ok, worst, witness = is_subspace(bim_space, rp, numerics=numerics)
    builder.dim("J", ideal.dim).dim("J_perp", perp.dim).dim("Bim", bim_space.dim).dim("Ran_perp", rp.dim)
    builder.containment("Bim_in_Ran_perp", ok, worst, witness)
    return builder.build()


def verify_main_theorem(group: FiniteGroup, ideal: LeftIdeal, numerics: Numerics = DEFAULT_NUMERICS) -> Report:
    """(Ran J)^perp = Bim(J^perp), with dimension duality and the bimodule property."""
    n = group.order
    builder = _builder("main-duality", group, ideal.spec, numerics)
    perp = annihilator_ideal(ideal, numerics)
    bim_space = bim(group, perp, numerics).subspace
    ran_space = ran(group, ideal, numerics).subspace
    rp = ran_perp(group, ideal, numerics)
    builder.dim("J", ideal.dim).dim("J_perp", perp.dim).dim("Bim", bim_space.dim)
    builder.dim("Ran", ran_space.dim).dim("Ran_perp", rp.dim)
    builder.certificate("Ran_perp=Bim", equal(rp, bim_space, numerics=numerics))
    builder.check("dim_Ran+dim_Ran_perp=n^2", ran_space.dim + rp.dim == n * n)
    builder.residual("Ran_perp_bimodule", bimodule_residual(group, rp), numerics.angle_tol)

    # Theta(f) on lambda_s^* M_a lambda_t, and the pairing identity behind the duality
    delta_e = np.zeros(n)
    delta_e[0] = 1.0
    f = ideal.subspace.basis[0] if ideal.dim else delta_e
    a = perp.basis[0] if perp.dim else np.ones(n)
    pairs = {(0, 0), (n - 1, 1 % n)}
    builder.residual("theta_on_bimodule_generators", max(remark_identity(group, f, a, s, t) for s, t in pairs), 1e-10)
    operator = rp.matrices()[0] if rp.dim else np.eye(n)
    symbol = ran_space.matrices()[0] if ran_space.dim else np.eye(n)
    uniform = np.full(n, 1.0 / n)
    builder.residual("pairing_identity", theorem_identity(group, f, uniform, operator, symbol), 1e-9)
    return builder.build()


def verify_masa_slice(group: FiniteGroup, ideal: LeftIdeal, numerics: Numerics = DEFAULT_NUMERICS) -> Report:
    """Bim(J^perp) and (Ran J)^perp both meet the diagonal masa in {M_a : a in J^perp}."""
    builder = _builder("masa-slice", group, ideal.spec, numerics)
    diag = masa(group)
    perp = annihilator_ideal(ideal, numerics)
    expected = multiplication_space(perp)
    bim_slice = intersect(bim(group, perp, numerics).subspace, diag, numerics)
    ran_slice = intersect(ran_perp(group, ideal, numerics), diag, numerics)
    builder.dim("J_perp", perp.dim).dim("Bim_cap_D", bim_slice.dim).dim("Ran_perp_cap_D", ran_slice.dim)
    builder.certificate("Bim_cap_D=M(J_perp)", equal(bim_slice, expected, numerics=numerics))
    builder.certificate("Ran_perp_cap_D=M(J_perp)", equal(ran_slice, expected, numerics=numerics))
    return builder.build()


def je_perp_spanning_set(irreps: Sequence[Irrep], splits: Sequence[int]) -> List[np.ndarray]:
    """Conjugate coefficients conj(pi_ij) with column j >= s_pi."""
    return [
        np.conj(pi.coefficient(i, j)) for pi, s in zip(irreps, splits) for i in range(pi.dim) for j in range(s, pi.dim)
    ]


def verify_je_perp(
    group: FiniteGroup,
    irreps: Sequence[Irrep],
    splits: Sequence[int],
    numerics: Numerics = DEFAULT_NUMERICS,
) -> Report:
    """J(E)^perp is the span of the conjugate coefficients outside E."""
    values = normalize_splits(irreps, splits)
    ideal = ideal_from_subspaces(group, irreps, values, numerics)
    builder = _builder("je-perp", group, ideal.spec, numerics)
    perp = annihilator_ideal(ideal, numerics)
    expected = span(je_perp_spanning_set(irreps, values), shape=(group.order,), numerics=numerics)
    predicted = group.order - sum(pi.dim * s for pi, s in zip(irreps, values))
    builder.dim("J_E", ideal.dim).dim("J_E_perp", perp.dim).dim("predicted", predicted)
    builder.check("dim_J_E_perp=|G|-sum(d*s)", perp.dim == predicted)
    builder.certificate("J_E_perp=span(S)", equal(perp, expected, numerics=numerics))
    return builder.build()


def verify_joint_harmonic(
    group: FiniteGroup,
    measures: Sequence[Measure],
    numerics: Numerics = DEFAULT_NUMERICS,
) -> Report:
    """H~(Lambda) = (Ran J_Lambda)^perp = Bim(H(Lambda)), and H(Lambda) = J_Lambda^perp."""
    ideal = ideal_from_measures(group, measures, numerics)
    builder = _builder("joint-harmonic", group, ideal.spec, numerics)
    functions = harmonic_functions(group, measures, numerics)
    operators = harmonic_operators(group, measures, numerics)
    rp = ran_perp(group, ideal, numerics)
    bim_space = bim(group, functions, numerics).subspace
    builder.dim("H", functions.dim).dim("H_tilde", operators.dim).dim("J_Lambda", ideal.dim)
    builder.dim("Ran_perp", rp.dim).dim("Bim_H", bim_space.dim)
    builder.certificate("H=J_Lambda_perp", equal(functions, annihilator_ideal(ideal, numerics), numerics=numerics))
    builder.certificate("H_tilde=Ran_perp", equal(operators, rp, numerics=numerics))
    builder.certificate("H_tilde=Bim_H", equal(operators, bim_space, numerics=numerics))
    flagged = non_markov_measures(measures)
    if flagged:
        builder.note(f"measures without unit mass, P_mu(1) != 1: {flagged}")
    return builder.build()


def verify_membership_lemma(
    group: FiniteGroup,
    ideal: LeftIdeal,
    rng: np.random.Generator,
    numerics: Numerics = DEFAULT_NUMERICS,
    seed: Optional[int] = None,
) -> Report:
    """
    lambda_s^* M_a lambda_t lies in (Ran J)^perp exactly when a lies in J^perp.

    Checked for a random a in J^perp (every s, t must give a member) and for
    a unit a orthogonal to J^perp (no s, t may give a member).
    """
    n = group.order
    builder = _builder("membership", group, ideal.spec, numerics, seed)
    lam = group.left_regular_all
    perp = annihilator_ideal(ideal, numerics)
    rp = ran_perp(group, ideal, numerics)
    builder.dim("J_perp", perp.dim).dim("Ran_perp", rp.dim)

    def sandwiches(a: np.ndarray) -> np.ndarray:
        return np.einsum("sji,jk,tkl->stil", lam.conj(), multiplication_operator(a), lam).reshape(-1, n * n)

    if perp.dim:
        inside = rng.standard_normal(perp.dim) @ perp.basis
        residuals = rp.residuals(sandwiches(inside))
        builder.residual("inside_max_residual", float(residuals.max()), numerics.angle_tol)
    else:
        builder.note("J^perp = {0}: no inside sample")

    if perp.dim < n:
        outside_space = kernel([perp.basis.conj()], (n,), numerics)
        outside = rng.standard_normal(outside_space.dim) @ outside_space.basis
        outside /= np.linalg.norm(outside)
        residuals = rp.residuals(sandwiches(outside))
        builder.residual("outside_min_residual", float(residuals.min()), np.inf)
        builder.check("outside_never_member", bool(residuals.min() > numerics.angle_tol))
    else:
        builder.note("J^perp is everything: no outside sample")
    return builder.build()


def verify_diagonals(
    group: FiniteGroup,
    ideal: LeftIdeal,
    rng: np.random.Generator,
    numerics: Numerics = DEFAULT_NUMERICS,
    seed: Optional[int] = None,
) -> Report:
    """
    Diagonals of elements of (Ran J)^perp stay inside it and add back up to
    the element; the main diagonal commutes with every Theta(f).
    """
    n = group.order
    builder = _builder("diagonals", group, ideal.spec, numerics, seed)
    rp = ran_perp(group, ideal, numerics)
    builder.dim("Ran_perp", rp.dim)
    masks = np.array([diagonal_mask(group, t) for t in range(n)])
    builder.check("diagonals_partition", bool(np.array_equal(masks.sum(axis=0), np.ones((n, n), dtype=int))))

    if rp.dim:
        mats = rp.matrices()
        parts = np.where(masks[None, :, :, :], mats[:, None, :, :], 0.0)
        builder.residual("D_t_in_Ran_perp", float(rp.residuals(parts).max()), numerics.angle_tol)
        builder.residual("sum_of_diagonals", float(np.abs(parts.sum(axis=1) - mats).max()), 1e-12)

    f = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    op = theta(group, f)
    gap = np.abs(op.apply(diagonal_part(group, x, 0)) - diagonal_part(group, op.apply(x), 0)).max()
    builder.residual("Theta_commutes_with_D", float(gap), 1e-10)
    return builder.build()


def verify_blocks(
    group: FiniteGroup,
    ideal: LeftIdeal,
    irreps: Sequence[Irrep],
    rng: np.random.Generator,
    numerics: Numerics = DEFAULT_NUMERICS,
    seed: Optional[int] = None,
) -> Report:
    """
    For a random T in (Ran J)^perp and in Bim(J^perp), every Peter-Weyl block
    P_pi T P_pi' stays in the space and the blocks sum back to T.
    """
    builder = _builder("blocks", group, ideal.spec, numerics, seed)
    projections = [isotypic_projection(group, pi) for pi in irreps]
    spaces = {
        "Ran_perp": ran_perp(group, ideal, numerics),
        "Bim": bim(group, annihilator_ideal(ideal, numerics), numerics).subspace,
    }
    for name, space in spaces.items():
        builder.dim(name, space.dim)
        if space.dim == 0:
            continue
        sample = (rng.standard_normal(space.dim) @ space.basis).reshape(space.shape)
        blocks = np.array([block(sample, a, b) for a in projections for b in projections])
        norms = np.linalg.norm(blocks.reshape(len(blocks), -1), axis=1)
        nonzero = blocks[norms > 1e-12 * np.linalg.norm(sample)]
        worst = float(space.residuals(nonzero).max()) if len(nonzero) else 0.0
        builder.residual(f"blocks_in_{name}", worst, numerics.angle_tol)
        builder.residual(f"blocks_sum_{name}", float(np.abs(blocks.sum(axis=0) - sample).max()), 1e-10)
    return builder.build()
