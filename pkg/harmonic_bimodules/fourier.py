"""
Fourier bridge for finite abelian groups.

Conventions:
    chars[x, s] = x(s), characters ordered as the 1-dimensional irreps
    f^(x) = sum_s conj(x(s)) f(s)              (unnormalized)
    F = conj(chars) / sqrt(n)                  (unitary)
    Phi(T) = F T F^*, so Phi(M_x) = lambda_x on the dual group
    Psi(h)(x, y) = F2(h)(x, y^-1) with F2(h) = F h F^T
    (N(u) h)(s, t) = u(t s^-1) h(s, t)
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from .duality import bim, ran, ran_perp
from .exceptions import InvalidIdealException, NonAbelianGroupException
from .harmonic import annihilator_ideal, multiplication_operator, theta_predual
from .models.group import FiniteGroup
from .models.measure import LeftIdeal
from .models.report import Report, ReportBuilder
from .models.representation import Irrep, decompose_regular
from .models.subspace import (
    DEFAULT_NUMERICS,
    Numerics,
    OperatorSubspace,
    annihilator,
    encode_complex,
    equal,
    span,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DualGroup:
    """
    Characters of a finite abelian group.

    Attributes:
        source: The group G.
        characters: (n, n) array, characters[x, s] = x(s).
        group: The dual group as a FiniteGroup under pointwise product.
    """

    source: FiniteGroup
    characters: np.ndarray
    group: FiniteGroup

    @property
    def order(self) -> int:
        return self.source.order

    def unitary(self) -> np.ndarray:
        return unitary_F(self)

    def to_dict(self) -> Dict:
        return {
            "group": self.source.name,
            "order": self.order,
            "characters": encode_complex(self.characters),
            "dual_table": self.group.table.tolist(),
        }

    def __repr__(self) -> str:
        return f"DualGroup(group={self.source.name!r}, order={self.order!r})"


def dual_group(group: FiniteGroup, irreps: Optional[Sequence[Irrep]] = None, seed: int = 0) -> DualGroup:
    """
    Characters of an abelian group, taken from the 1-dimensional irreps.

    Raises:
        NonAbelianGroupException: `group` is not abelian.
    """
    if not group.is_abelian():
        raise NonAbelianGroupException(f"{group.name} is not abelian; its dual is not a group of characters.")
    irreps = decompose_regular(group, seed=seed) if irreps is None else irreps
    if any(pi.dim != 1 for pi in irreps) or len(irreps) != group.order:
        raise NonAbelianGroupException(f"{group.name} has irreps of dimension > 1.")
    characters = np.array([pi.matrices[:, 0, 0] for pi in irreps])

    n = group.order
    table = np.empty((n, n), dtype=int)
    for x in range(n):
        products = characters[x] * characters
        distance = np.abs(products[:, None, :] - characters[None, :, :]).max(axis=-1)
        table[x] = np.argmin(distance, axis=1)
    dual = FiniteGroup(table=table, labels=tuple(f"chi{k}" for k in range(n)), name=f"dual({group.name})")
    dual.validate()
    return DualGroup(source=group, characters=characters, group=dual)


def hat(dual: DualGroup, f: np.ndarray) -> np.ndarray:
    """f^(x) = sum_s conj(x(s)) f(s)."""
    return dual.characters.conj() @ np.asarray(f, dtype=complex)


def unitary_F(dual: DualGroup) -> np.ndarray:
    """Unitary normalization F = f -> f^ / sqrt(n)."""
    return dual.characters.conj() / np.sqrt(dual.order)


def phi(dual: DualGroup, operator: np.ndarray) -> np.ndarray:
    """Phi(T) = F T F^*."""
    f = unitary_F(dual)
    return f @ np.asarray(operator, dtype=complex) @ f.conj().T


def phi_inverse(dual: DualGroup, operator: np.ndarray) -> np.ndarray:
    f = unitary_F(dual)
    return f.conj().T @ np.asarray(operator, dtype=complex) @ f


def psi(dual: DualGroup, symbol: np.ndarray) -> np.ndarray:
    """Psi(h)(x, y) = F2(h)(x, y^-1), the predual of Phi^-1."""
    f = unitary_F(dual)
    transformed = f @ np.asarray(symbol, dtype=complex) @ f.T
    return transformed[:, dual.group.inverses]


def flip(dual: DualGroup, u: np.ndarray) -> np.ndarray:
    """u -> (x -> u(x^-1)) on the dual group."""
    return np.asarray(u, dtype=complex)[dual.group.inverses]


def schur_multiply(group: FiniteGroup, u: np.ndarray, h: np.ndarray) -> np.ndarray:
    """(N(u) h)(s, t) = u(t s^-1) h(s, t)."""
    n = group.order
    u = np.asarray(u, dtype=complex)
    h = np.asarray(h, dtype=complex)
    if u.shape != (n,) or h.shape != (n, n):
        raise ValueError(f"Expected u of shape ({n},) and h of shape ({n}, {n}), got {u.shape} and {h.shape}.")
    index = group.table[np.arange(n)[None, :], group.inverses[:, None]]
    return u[index] * h


def map_subspace(space: OperatorSubspace, transform, numerics: Numerics = DEFAULT_NUMERICS) -> OperatorSubspace:
    """Image of a subspace of M_n under a linear map of matrices."""
    if space.dim == 0:
        return space
    return span([transform(m) for m in space.matrices()], shape=space.shape, numerics=numerics)


# ----------------------------------------------------------------------
# Ideals of A(Gamma) and their saturations
# ----------------------------------------------------------------------
def ideal_support(dual: DualGroup, ideal: OperatorSubspace | Iterable[int], numerics: Numerics = DEFAULT_NUMERICS) -> List[int]:
    """
    Normalize an ideal of A(Gamma) to the subset of the dual group it lives on.

    Args:
        ideal: A subset of dual-group indices, or a subspace of functions on Gamma.

    Raises:
        InvalidIdealException: The subspace is not a span of delta functions.
    """
    n = dual.order
    if not isinstance(ideal, OperatorSubspace):
        subset = sorted({int(x) for x in ideal})
        if any(not 0 <= x < n for x in subset):
            raise InvalidIdealException(f"Ideal subset {subset} has indices outside [0, {n}).")
        return subset
    if ideal.dim == 0:
        return []
    subset = [int(x) for x in np.nonzero(np.abs(ideal.basis).max(axis=0) > numerics.rank_tol)[0]]
    if len(subset) != ideal.dim:
        raise InvalidIdealException(
            f"Subspace of dim {ideal.dim} is supported on {len(subset)} points; "
            "ideals of A(Gamma) are spans of delta functions."
        )
    return subset


def coordinate_space(positions: np.ndarray) -> OperatorSubspace:
    """Span of the matrix units E_xy at the True entries of a boolean mask."""
    n = positions.shape[0]
    rows = np.eye(n * n)[np.flatnonzero(positions.ravel())]
    return OperatorSubspace(basis=rows.reshape(-1, n * n), shape=(n, n))


def sat(dual: DualGroup, ideal: OperatorSubspace | Iterable[int], numerics: Numerics = DEFAULT_NUMERICS) -> OperatorSubspace:
    """
    Sat I = span{N(u) E_xy : u in I}.

    For I = span{delta_z : z in S} this is span{E_xy : y x^-1 in S}.
    """
    gamma = dual.group
    subset = ideal_support(dual, ideal, numerics)
    n = gamma.order
    indicator = np.zeros(n)
    indicator[subset] = 1.0
    positions = schur_multiply(gamma, indicator, np.ones((n, n))).real > 0.5
    return coordinate_space(positions)


def ideal_perp_vn(dual: DualGroup, subset: Sequence[int]) -> OperatorSubspace:
    """I^perp inside VN(Gamma) = span{lambda_x : x not in S}, for <lambda_x, u> = u(x)."""
    gamma = dual.group
    n = gamma.order
    outside = [x for x in range(n) if x not in set(subset)]
    if not outside:
        return OperatorSubspace(basis=np.zeros((0, n * n)), shape=(n, n))
    return OperatorSubspace(basis=gamma.left_regular_all[outside].reshape(len(outside), n * n), shape=(n, n))


def masa_bimodule(space: OperatorSubspace, tol: float) -> OperatorSubspace:
    """span{M_u A M_v : A in space}: the matrix units where some basis element is nonzero."""
    n = space.shape[0]
    if space.dim == 0:
        return space
    support = np.abs(space.matrices()).max(axis=0) > tol
    return coordinate_space(support.reshape(n, n))


def vn_pairing(operator: np.ndarray, u: np.ndarray) -> complex:
    """<A, u> = sum_x A(x, e) u(x) for A in VN(Gamma)."""
    return complex(np.dot(np.asarray(operator)[:, 0], np.asarray(u)))


def transport_ideal(dual: DualGroup, subset: Sequence[int], numerics: Numerics = DEFAULT_NUMERICS) -> LeftIdeal:
    """
    The left ideal J of l^1(G) with Psi(Ran J) = Sat I: the characters x with x^-1 in S.
    """
    n = dual.order
    indices = sorted({int(dual.group.inverses[x]) for x in subset})
    subspace = span([dual.characters[x] for x in indices], shape=(n,), numerics=numerics)
    return LeftIdeal(subspace=subspace, provenance="explicit", spec={"type": "A_Gamma", "support": list(subset)})


# ----------------------------------------------------------------------
# Verifiers
# ----------------------------------------------------------------------
def verify_lemma_psi(dual: DualGroup, f: np.ndarray, symbol: np.ndarray) -> float:
    """Max-entry residual of Psi(theta(f) h) = N(flip(f^)) Psi(h)."""
    lhs = psi(dual, theta_predual(dual.source, f).apply(symbol))
    rhs = schur_multiply(dual.group, flip(dual, hat(dual, f)), psi(dual, symbol))
    return float(np.abs(lhs - rhs).max())


def lemma_psi_report(
    dual: DualGroup,
    rng: np.random.Generator,
    trials: int = 10,
    numerics: Numerics = DEFAULT_NUMERICS,
    seed: Optional[int] = None,
) -> Report:
    """
    Random-trial report for the Psi intertwining identity, together with the
    structural facts of Phi: Phi(M_x) = lambda_x, Phi(D_G) = VN(Gamma),
    Phi(VN(G)) = D_Gamma and <Phi(T), Psi(h)> = <T, h>.
    """
    n = dual.order
    builder = ReportBuilder("lemma-psi", dual.source.name, {"type": "random", "trials": trials}, numerics.angle_tol, seed)

    worst = 0.0
    pairing = 0.0
    for _ in range(trials):
        f = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        h = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        t = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        worst = max(worst, verify_lemma_psi(dual, f, h))
        pairing = max(pairing, abs(np.trace(phi(dual, t) @ psi(dual, h)) - np.trace(t @ h)))
    builder.residual("lemma_psi", worst, 1e-10)
    builder.residual("predual_pairing", pairing, 1e-10)

    chars_to_shifts = max(
        float(np.abs(phi(dual, multiplication_operator(dual.characters[x])) - dual.group.left_regular_all[x]).max())
        for x in range(n)
    )
    builder.residual("Phi(M_x)=lambda_x", chars_to_shifts, 1e-10)

    diag_g = OperatorSubspace(basis=np.eye(n * n)[np.arange(n) * (n + 1)], shape=(n, n))
    vn_g = OperatorSubspace(basis=dual.source.left_regular_all.reshape(n, n * n), shape=(n, n))
    vn_gamma = OperatorSubspace(basis=dual.group.left_regular_all.reshape(n, n * n), shape=(n, n))
    builder.certificate("Phi(D_G)=VN(Gamma)", equal(map_subspace(diag_g, lambda m: phi(dual, m), numerics), vn_gamma, numerics=numerics))
    builder.certificate("Phi(VN(G))=D_Gamma", equal(map_subspace(vn_g, lambda m: phi(dual, m), numerics), diag_g, numerics=numerics))
    return builder.build()


def verify_theorem21(
    dual: DualGroup,
    ideal: OperatorSubspace | Iterable[int],
    rng: Optional[np.random.Generator] = None,
    numerics: Numerics = DEFAULT_NUMERICS,
    seed: Optional[int] = None,
) -> Report:
    """
    (Sat I)^perp = Bim(I^perp) on the dual group, cross-checked against the
    group-side duality transported by Phi and Psi.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    n = dual.order
    subset = ideal_support(dual, ideal, numerics)
    builder = ReportBuilder("theorem21", dual.source.name, {"type": "A_Gamma", "support": subset}, numerics.angle_tol, seed)

    saturation = sat(dual, subset, numerics)
    sat_perp = annihilator(saturation, numerics=numerics)
    bimodule = masa_bimodule(ideal_perp_vn(dual, subset), numerics.rank_tol)
    builder.dim("I", len(subset)).dim("Sat_I", saturation.dim).dim("Sat_I_perp", sat_perp.dim).dim("Bim_I_perp", bimodule.dim)
    builder.certificate("Sat_perp=Bim(I_perp)", equal(sat_perp, bimodule, numerics=numerics))

    # group side
    transported = transport_ideal(dual, subset, numerics)
    ran_space = ran(dual.source, transported, numerics).subspace
    rp = ran_perp(dual.source, transported, numerics)
    group_bim = bim(dual.source, annihilator_ideal(transported, numerics), numerics).subspace
    builder.dim("J", transported.dim).dim("Ran_perp", rp.dim)
    builder.certificate("Psi(Ran J)=Sat I", equal(map_subspace(ran_space, lambda m: psi(dual, m), numerics), saturation, numerics=numerics))
    builder.certificate("Phi(Ran_perp)=Sat_perp", equal(map_subspace(rp, lambda m: phi(dual, m), numerics), sat_perp, numerics=numerics))
    builder.certificate("Phi(Bim(J_perp))=Bim(I_perp)", equal(map_subspace(group_bim, lambda m: phi(dual, m), numerics), bimodule, numerics=numerics))

    g = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    f = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    lhs = vn_pairing(phi(dual, multiplication_operator(g)), flip(dual, hat(dual, f)))
    builder.residual("pairing_identity", abs(lhs - np.dot(g, f)), 1e-12 * max(1.0, np.linalg.norm(g) * np.linalg.norm(f)))
    return builder.build()
