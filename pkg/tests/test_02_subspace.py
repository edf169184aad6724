"""
Tests for operator subspaces and their lattice operations.

These tests ensure that:
1. Both orthonormalization backends produce orthonormal bases of the right rank.
2. Equality, intersection, sums and containment behave within tolerance.
3. Annihilators use the trace pairing and kernels/images have the expected dimension.
"""

import math

import numpy as np
import pytest
from harmonic_bimodules.exceptions import DimensionMismatchException, InvalidBackendTypeException
from harmonic_bimodules.models.subspace import (
    TRACE_PAIRING,
    Numerics,
    OperatorSubspace,
    annihilator,
    complement,
    contains,
    decode_complex,
    encode_complex,
    equal,
    full_space,
    image,
    intersect,
    is_subspace,
    kernel,
    span,
    subspace_sum,
    zero_space,
)
from harmonic_bimodules.services import ORTHONORMALIZER_CLASSES, get_orthonormalizer


def _unit(n, i, j):
    m = np.zeros((n, n), dtype=complex)
    m[i, j] = 1.0
    return m


def test_backends_registered() -> None:
    assert set(ORTHONORMALIZER_CLASSES) == {"svd", "gram-schmidt"}
    with pytest.raises(InvalidBackendTypeException):
        get_orthonormalizer("nonsense")


def test_span_orthonormal(numerics, rng) -> None:
    vectors = rng.normal(size=(5, 3, 3)) + 1j * rng.normal(size=(5, 3, 3))
    space = span(vectors, numerics=numerics)
    assert space.dim == 5
    assert space.shape == (3, 3)
    gram = space.basis @ space.basis.conj().T
    assert np.allclose(gram, np.eye(5), atol=1e-10)


def test_span_drops_dependent_vectors(numerics) -> None:
    a = _unit(2, 0, 0)
    b = _unit(2, 1, 1)
    space = span([a, b, a + b, 2 * a], numerics=numerics)
    assert space.dim == 2


def test_span_of_zero_vectors(numerics) -> None:
    space = span([np.zeros((2, 2))], numerics=numerics)
    assert space.dim == 0


def test_span_empty_needs_shape(numerics) -> None:
    with pytest.raises(DimensionMismatchException):
        span([], numerics=numerics)
    assert span([], shape=(2, 2), numerics=numerics).dim == 0


def test_span_mismatched_sizes(numerics) -> None:
    with pytest.raises(DimensionMismatchException):
        span([np.zeros(3), np.zeros(4)], numerics=numerics)


def test_span_rejects_nan(numerics) -> None:
    with pytest.raises(ValueError):
        span([np.array([1.0, np.nan])], numerics=numerics)


def test_equal_same_span_different_bases(numerics, rng) -> None:
    vectors = rng.normal(size=(3, 6))
    mix = rng.normal(size=(3, 3)) + np.eye(3) * 3
    a = span(vectors, numerics=numerics)
    b = span(mix @ vectors, numerics=numerics)
    cert = equal(a, b, numerics=numerics)
    assert cert.equal
    assert bool(cert)
    assert cert.max_angle < 1e-8


def test_equal_different_dims_reports_witness(numerics) -> None:
    a = span([np.array([1.0, 0, 0])], numerics=numerics)
    b = span([np.array([1.0, 0, 0]), np.array([0, 1.0, 0])], numerics=numerics)
    cert = equal(a, b, numerics=numerics)
    assert not cert.equal
    assert cert.max_angle == pytest.approx(math.pi / 2)
    assert cert.witness is not None
    assert a.residual(cert.witness) > 0.5


def test_equal_within_tolerance(numerics) -> None:
    a = span([np.array([1.0, 0.0])], numerics=numerics)
    b = span([np.array([1.0, 1e-3])], numerics=numerics)
    assert not equal(a, b, numerics=numerics).equal
    assert equal(a, b, tol=1e-2, numerics=numerics).equal


def test_equal_ambient_mismatch(numerics) -> None:
    with pytest.raises(DimensionMismatchException):
        equal(zero_space((2,)), zero_space((3,)), numerics=numerics)


def test_equal_zero_spaces() -> None:
    assert equal(zero_space((2, 2)), zero_space((2, 2))).equal


def test_intersect_and_sum(numerics) -> None:
    e = np.eye(4)
    a = span([e[0], e[1], e[2]], numerics=numerics)
    b = span([e[1], e[2], e[3]], numerics=numerics)
    meet = intersect(a, b, numerics=numerics)
    join = subspace_sum(a, b, numerics=numerics)
    assert meet.dim == 2
    assert equal(meet, span([e[1], e[2]], numerics=numerics), numerics=numerics).equal
    assert join.dim == 4
    assert equal(join, full_space((4,)), numerics=numerics).equal


def test_intersect_skew_lines(numerics) -> None:
    a = span([np.array([1.0, 0.0])], numerics=numerics)
    b = span([np.array([1.0, 1.0])], numerics=numerics)
    assert intersect(a, b, numerics=numerics).dim == 0
    assert intersect(a, zero_space((2,)), numerics=numerics).dim == 0


def test_contains_and_is_subspace(numerics) -> None:
    e = np.eye(3)
    plane = span([e[0], e[1]], numerics=numerics)
    assert contains(plane, 2 * e[0] - 3j * e[1], numerics=numerics)
    assert not contains(plane, e[2], numerics=numerics)
    assert contains(plane, np.zeros(3), numerics=numerics)

    ok, worst, witness = is_subspace(span([e[0]], numerics=numerics), plane, numerics=numerics)
    assert ok and worst < 1e-12 and witness is None

    ok, worst, witness = is_subspace(span([e[2]], numerics=numerics), plane, numerics=numerics)
    assert not ok
    assert worst == pytest.approx(1.0)
    assert witness is not None

    assert is_subspace(zero_space((3,)), plane, numerics=numerics)[0]


def test_complement_dimensions(numerics, rng) -> None:
    space = span(rng.normal(size=(2, 5)), numerics=numerics)
    comp = complement(space, numerics=numerics)
    assert comp.dim == 3
    assert np.abs(space.basis.conj() @ comp.basis.T).max() < 1e-10
    assert complement(zero_space((5,)), numerics=numerics).dim == 5


def test_trace_pairing() -> None:
    t = np.array([[1.0, 2.0], [3.0, 4.0]])
    h = np.array([[5.0, 6.0], [7.0, 8.0]])
    assert TRACE_PAIRING.pair(t, h) == pytest.approx(np.trace(t @ h))
    assert TRACE_PAIRING.pair(np.array([1.0, 2.0]), np.array([3.0, 4.0])) == pytest.approx(11.0)
    with pytest.raises(DimensionMismatchException):
        TRACE_PAIRING.pair(np.zeros(2), np.zeros(3))


def test_annihilator_uses_transpose(numerics) -> None:
    # <T, E_01> = T(1, 0), so the annihilator of span{E_01} is {T : T(1, 0) = 0}
    space = span([_unit(2, 0, 1)], numerics=numerics)
    ann = annihilator(space, numerics=numerics)
    assert ann.dim == 3
    assert contains(ann, _unit(2, 0, 1), numerics=numerics)
    assert not contains(ann, _unit(2, 1, 0), numerics=numerics)
    for m in ann.matrices():
        assert abs(TRACE_PAIRING.pair(m, _unit(2, 0, 1))) < 1e-12


def test_annihilator_bipolar(numerics, rng) -> None:
    space = span(rng.normal(size=(3, 3, 3)) + 1j * rng.normal(size=(3, 3, 3)), numerics=numerics)
    double = annihilator(annihilator(space, numerics=numerics), numerics=numerics)
    assert equal(space, double, numerics=numerics).equal


def test_kernel_and_image(numerics) -> None:
    op = np.diag([1.0, 0.0, 2.0, 0.0])
    ker = kernel([op], (4,), numerics=numerics)
    img = image([op], (4,), numerics=numerics)
    assert ker.dim == 2
    assert img.dim == 2
    assert np.abs(img.basis.conj() @ ker.basis.T).max() < 1e-12


def test_kernel_degenerate_families(numerics) -> None:
    assert kernel([], (3,), numerics=numerics).dim == 3
    assert kernel([np.zeros((3, 3))], (3,), numerics=numerics).dim == 3
    assert image([], (3,), numerics=numerics).dim == 0
    with pytest.raises(DimensionMismatchException):
        kernel([np.eye(2)], (3,), numerics=numerics)


def test_projection_and_residuals(numerics) -> None:
    e = np.eye(3)
    plane = span([e[0], e[1]], numerics=numerics)
    v = np.array([1.0, 2.0, 2.0])
    assert np.allclose(plane.project(v), [1.0, 2.0, 0.0])
    assert plane.residual(v) == pytest.approx(2.0 / 3.0)
    assert np.allclose(plane.residuals(np.array([e[0], e[2], np.zeros(3)])), [0.0, 1.0, 0.0])
    assert np.allclose(plane.projector() @ v, plane.project(v))
    with pytest.raises(DimensionMismatchException):
        plane.project(np.zeros(4))


def test_subspace_to_dict() -> None:
    space = OperatorSubspace(basis=np.eye(4)[:1], shape=(2, 2))
    data = space.to_dict()
    assert data["shape"] == [2, 2]
    assert data["dim"] == 1
    assert data["basis"][0][0][0] == [1.0, 0.0]
    assert np.allclose(decode_complex(data["basis"], 3), space.matrices())


def test_encode_complex_normalizes_negative_zero() -> None:
    assert encode_complex(np.array([-0.0 + 0.5j])) == [[0.0, 0.5]]
    assert np.allclose(decode_complex([1.0, 2.0], 1), [1.0, 2.0])
    with pytest.raises(ValueError):
        decode_complex([[[1.0]]], 1)


def test_numerics_with_tol() -> None:
    numerics = Numerics()
    assert numerics.with_tol(None) is numerics
    looser = numerics.with_tol(1e-4)
    assert looser.angle_tol == 1e-4
    assert looser.rank_tol == numerics.rank_tol
    assert looser.to_dict()["orthonormalizer"] == "svd"
