"""
Convolution, the representation Theta of l^1(G) on B(l^2(G)), its predual
action on trace-class symbols, left ideals of l^1(G) and the spaces of
jointly harmonic functions and operators.

Conventions:
    (f * g)(y) = sum_x f(x) g(x^-1 y)
    (P_mu phi)(s) = sum_t phi(st) mu(t)
    Theta(mu)(T) = sum_r mu(r) rho_r T rho_r^*
    theta(f)(h)(s, t) = sum_r f(r) h(s r^-1, t r^-1)
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Mapping, Sequence

import numpy as np

from .exceptions import InvalidSubspaceChoiceException, NotLeftIdealException
from .models.group import FiniteGroup
from .models.measure import LeftIdeal, Measure, SuperOperator
from .models.representation import Irrep
from .models.subspace import (
    DEFAULT_NUMERICS,
    TRACE_PAIRING,
    Numerics,
    OperatorSubspace,
    annihilator,
    decode_complex,
    kernel,
    span,
    zero_space,
)

logger = logging.getLogger(__name__)


def _weights(source: Measure | np.ndarray) -> np.ndarray:
    if isinstance(source, Measure):
        return source.weights
    return np.asarray(source, dtype=complex).ravel()


def multiplication_operator(a: np.ndarray) -> np.ndarray:
    """M_a, the diagonal operator of a function a."""
    return np.diag(np.asarray(a, dtype=complex))


def translate(group: FiniteGroup, x: int, f: np.ndarray) -> np.ndarray:
    """(lambda_x f)(t) = f(x^-1 t)."""
    return group.left_regular_all[x] @ np.asarray(f, dtype=complex)


# ----------------------------------------------------------------------
# Convolution and the two representations
# ----------------------------------------------------------------------
def convolve(group: FiniteGroup, f: Measure | np.ndarray, g: Measure | np.ndarray) -> np.ndarray:
    """(f * g)(y) = sum_x f(x) g(x^-1 y) = sum_x f(x) (lambda_x g)(y)."""
    return np.einsum("x,xij,j->i", _weights(f), group.left_regular_all, _weights(g))


def p_mu(group: FiniteGroup, mu: Measure | np.ndarray) -> SuperOperator:
    """Markov operator (P_mu phi)(s) = sum_t phi(st) mu(t) on functions."""
    weights = _weights(mu)
    matrix = np.einsum("t,tij->ij", weights, group.right_regular_all)
    label = mu.label if isinstance(mu, Measure) else "f"
    return SuperOperator(matrix, (group.order,), f"P[{label}]")


def _translation_superoperator(group: FiniteGroup, weights: np.ndarray, right: np.ndarray, label: str) -> SuperOperator:
    """S[(a, b), (right[a, r], right[b, r])] += weights[r]."""
    n = group.order
    matrix = np.zeros((n * n, n * n), dtype=complex)
    a, b = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    rows = (a * n + b).ravel()
    for r in np.nonzero(weights)[0]:
        cols = (right[a, r] * n + right[b, r]).ravel()
        matrix[rows, cols] += weights[r]
    return SuperOperator(matrix, (n, n), label)


def theta(group: FiniteGroup, mu: Measure | np.ndarray) -> SuperOperator:
    """
    Theta(mu)(T) = sum_r mu(r) rho_r T rho_r^*.

    (rho_r T rho_r^*)(a, b) = T(a r, b r), so the matrix has entries
    mu(r) at ((a, b), (a r, b r)). The modular function of a finite group is 1.
    """
    weights = _weights(mu)
    label = mu.label if isinstance(mu, Measure) else "f"
    return _translation_superoperator(group, weights, group.table, f"Theta[{label}]")


def theta_predual(group: FiniteGroup, f: Measure | np.ndarray) -> SuperOperator:
    """
    theta(f)(h) = sum_r f(r) h_{r^-1} with h_r(s, t) = h(s r, t r).

    Satisfies <Theta(f) T, h> = <T, theta(f) h> for the trace pairing.
    """
    weights = _weights(f)
    # right[a, r] = a r^-1
    right = group.table[:, group.inverses]
    return _translation_superoperator(group, weights, right, "theta[f]")


# ----------------------------------------------------------------------
# Left ideals
# ----------------------------------------------------------------------
def ideal_from_measures(
    group: FiniteGroup,
    measures: Sequence[Measure],
    numerics: Numerics = DEFAULT_NUMERICS,
) -> LeftIdeal:
    """
    J_Lambda = span{f * mu - f}; the delta basis suffices for f.

    delta_x * mu - delta_x = lambda_x mu - delta_x.
    """
    n = group.order
    generators = []
    for mu in measures:
        mu.check_group(group)
        shifted = np.einsum("xij,j->xi", group.left_regular_all, mu.weights)
        generators.extend(shifted - np.eye(n))
    subspace = span(generators, shape=(n,), numerics=numerics)
    spec = {"type": "J_Lambda", "measures": [mu.to_dict() for mu in measures]}
    return LeftIdeal(subspace=subspace, provenance="from_measures", spec=spec)


def normalize_splits(irreps: Sequence[Irrep], splits: Sequence[int] | Mapping[str, int]) -> List[int]:
    """Resolve s_pi choices given as a list (irrep order) or a label mapping."""
    if isinstance(splits, Mapping):
        values = [int(splits.get(pi.label, 0)) for pi in irreps]
    else:
        values = [int(x) for x in splits]
    if len(values) != len(irreps):
        raise InvalidSubspaceChoiceException(f"Expected {len(irreps)} values of s_pi, got {len(values)}.")
    for pi, s in zip(irreps, values):
        if not 0 <= s <= pi.dim:
            raise InvalidSubspaceChoiceException(f"s_pi = {s} outside [0, {pi.dim}] for {pi.label}.")
    return values


def ideal_from_subspaces(
    group: FiniteGroup,
    irreps: Sequence[Irrep],
    splits: Sequence[int] | Mapping[str, int],
    numerics: Numerics = DEFAULT_NUMERICS,
) -> LeftIdeal:
    """
    J(E) = span{pi_ij : 0 <= i < d_pi, 0 <= j < s_pi}.

    Left translation mixes only the row index of a coefficient, so the
    column restriction gives a left ideal of dimension sum d_pi s_pi.
    """
    values = normalize_splits(irreps, splits)
    generators = [
        pi.coefficient(i, j) for pi, s in zip(irreps, values) for i in range(pi.dim) for j in range(s)
    ]
    subspace = span(generators, shape=(group.order,), numerics=numerics)
    return LeftIdeal(subspace=subspace, provenance="from_subspaces", spec={"type": "J_E", "s": values})


def ideal_generated(
    group: FiniteGroup,
    vectors: Sequence[np.ndarray],
    numerics: Numerics = DEFAULT_NUMERICS,
) -> LeftIdeal:
    """Smallest left ideal containing `vectors`: the span of all their left translates."""
    vectors = [np.asarray(v, dtype=complex) for v in vectors]
    generators = [translate(group, x, v) for v in vectors for x in range(group.order)]
    subspace = span(generators, shape=(group.order,), numerics=numerics)
    return LeftIdeal(subspace=subspace, provenance="generated", spec={"type": "generated", "count": len(vectors)})


def ideal_from_basis(
    group: FiniteGroup,
    vectors: Sequence[np.ndarray],
    numerics: Numerics = DEFAULT_NUMERICS,
) -> LeftIdeal:
    """
    Explicit ideal given by spanning vectors.

    Raises:
        NotLeftIdealException: The span is not invariant under left translations.
    """
    subspace = span(list(vectors), shape=(group.order,), numerics=numerics)
    ideal = LeftIdeal(subspace=subspace, provenance="explicit", spec={"type": "explicit", "dim": subspace.dim})
    residual = ideal.invariance_residual(group)
    if residual > numerics.angle_tol:
        raise NotLeftIdealException(f"Span of the given vectors is not left invariant (residual {residual:.3e}).")
    return ideal


def ideal_from_dict(
    data: Dict,
    group: FiniteGroup,
    irreps: Sequence[Irrep],
    numerics: Numerics = DEFAULT_NUMERICS,
) -> LeftIdeal:
    """
    Build an ideal from its file representation.

    Accepted forms:
        {"type": "J_E", "s": [...]}
        {"type": "J_Lambda", "measures": [measure, ...]}
        {"type": "explicit", "basis": [vector, ...]}
    """
    kind = data.get("type", "explicit")
    match kind:
        case "J_E":
            return ideal_from_subspaces(group, irreps, data["s"], numerics)
        case "J_Lambda":
            measures = [Measure.from_dict(m) for m in data["measures"]]
            return ideal_from_measures(group, measures, numerics)
        case "explicit":
            vectors = [decode_complex(v, ndim=1) for v in data.get("basis", [])]
            if not vectors:
                return LeftIdeal(zero_space((group.order,)), "explicit", {"type": "explicit", "dim": 0})
            return ideal_from_basis(group, vectors, numerics)
        case _:
            raise ValueError(f"Unknown ideal type: {kind!r}")


def load_ideal(
    filepath: str | Path,
    group: FiniteGroup,
    irreps: Sequence[Irrep],
    numerics: Numerics = DEFAULT_NUMERICS,
) -> LeftIdeal:
    data = json.loads(Path(filepath).read_text(encoding="utf-8"))
    return ideal_from_dict(data, group, irreps, numerics)


def annihilator_ideal(ideal: LeftIdeal, numerics: Numerics = DEFAULT_NUMERICS) -> OperatorSubspace:
    """J^perp in l^inf(G) for the bilinear pairing <a, f> = sum a(x) f(x)."""
    return annihilator(ideal.subspace, TRACE_PAIRING, numerics)


# ----------------------------------------------------------------------
# Harmonic functions and operators
# ----------------------------------------------------------------------
def harmonic_functions(
    group: FiniteGroup,
    measures: Sequence[Measure],
    numerics: Numerics = DEFAULT_NUMERICS,
) -> OperatorSubspace:
    """H(Lambda) = joint kernel of P_mu - id."""
    eye = np.eye(group.order)
    return kernel([p_mu(group, mu).matrix - eye for mu in measures], (group.order,), numerics)


def harmonic_operators(
    group: FiniteGroup,
    measures: Sequence[Measure],
    numerics: Numerics = DEFAULT_NUMERICS,
) -> OperatorSubspace:
    """H~(Lambda) = joint fixed points of Theta(mu)."""
    n = group.order
    eye = np.eye(n * n)
    return kernel([theta(group, mu).matrix - eye for mu in measures], (n, n), numerics)


def non_markov_measures(measures: Sequence[Measure]) -> List[str]:
    """Labels of the measures with P_mu(1) != 1."""
    flagged = [mu.label for mu in measures if not mu.fixes_constants()]
    if flagged:
        logger.info("Measures without unit mass (P_mu(1) != 1): %s", flagged)
    return flagged


# ----------------------------------------------------------------------
# Identities used by the verifiers
# ----------------------------------------------------------------------
def remark_identity(
    group: FiniteGroup,
    f: np.ndarray,
    a: np.ndarray,
    s: int,
    t: int,
) -> float:
    """
    Residual of Theta(f)(lambda_s^* M_a lambda_t) = lambda_s^* M_g lambda_t
    with g(x) = <a, lambda_x f>.
    """
    lam = group.left_regular_all
    operator = lam[s].conj().T @ multiplication_operator(a) @ lam[t]
    lhs = theta(group, f).apply(operator)
    g = np.array([np.dot(a, translate(group, x, f)) for x in range(group.order)])
    rhs = lam[s].conj().T @ multiplication_operator(g) @ lam[t]
    return float(np.abs(lhs - rhs).max())


def theorem_identity(
    group: FiniteGroup,
    f: np.ndarray,
    mu: Measure | np.ndarray,
    operator: np.ndarray,
    symbol: np.ndarray,
) -> float:
    """|<T, theta(f * mu - f) h> - <Theta(f) Theta(mu - delta_e) T, h>|."""
    weights = _weights(mu)
    delta_e = np.zeros(group.order)
    delta_e[0] = 1.0
    g = convolve(group, f, weights) - np.asarray(f, dtype=complex)
    lhs = TRACE_PAIRING.pair(operator, theta_predual(group, g).apply(symbol))
    inner = theta(group, weights - delta_e).apply(operator)
    rhs = TRACE_PAIRING.pair(theta(group, f).apply(inner), symbol)
    return float(abs(lhs - rhs))
