"""
Tests for the Poisson boundary projection, the Choi-Effros algebra and the
crossed-product picture.

These tests ensure that:
1. The projection onto harmonic operators is an idempotent unital bimodule map.
2. Cesaro and lazy iterates approach it for well-mixing measures.
3. The Choi-Effros product gives an associative unital algebra.
4. Gamma~ carries the harmonic operators onto the crossed product.
5. Gamma~ is an isometric *-homomorphism on all of M_n.
"""

from unittest.mock import patch

import numpy as np
import pytest
from harmonic_bimodules.exceptions import NotHarmonicException, ProbabilityMeasureException
from harmonic_bimodules.harmonic import multiplication_operator
from harmonic_bimodules.models.group import cyclic, make_builtin, symmetric
from harmonic_bimodules.models.measure import Measure
from harmonic_bimodules.poisson import (
    BoundaryAlgebra,
    CesaroValidation,
    alpha_tilde,
    boundary_algebra,
    boundary_report,
    cesaro_mean,
    choi_effros,
    crossed_product,
    fundamental_unitary,
    function_product,
    gamma_tilde,
    gamma_tilde_inverse,
    lambda_tilde,
    lazy_power,
    poisson_projection,
    validate_cesaro,
    verify_cross_iso,
)


@pytest.fixture(scope="module")
def s3():
    return symmetric(3)


@pytest.fixture(scope="module")
def z3_measure():
    group = cyclic(3)
    return group, Measure(np.array([0.5, 0.25, 0.25]), probability=True, label="z3")


@pytest.fixture(scope="module")
def z4_subgroup_measure():
    group = cyclic(4)
    return group, Measure.on_subset(group, [0, 2], label="subgroup")


def test_projection_uniform(s3, numerics) -> None:
    expectation = poisson_projection(s3, Measure.uniform(s3), numerics)
    e = expectation.superop.matrix
    assert expectation.fixed_space.dim == 6
    assert expectation.complement.dim == 30
    assert np.allclose(e @ e, e, atol=1e-10)
    assert np.allclose(expectation.apply(np.eye(6)), np.eye(6), atol=1e-10)
    for s in range(6):
        lam = s3.left_regular_all[s]
        assert np.allclose(expectation.apply(lam), lam, atol=1e-10)
    assert expectation.peripheral == ()
    assert expectation.order == 6


def test_projection_delta_is_identity(numerics) -> None:
    group = cyclic(3)
    expectation = poisson_projection(group, Measure.delta(group), numerics)
    assert expectation.fixed_space.dim == 9
    assert np.allclose(expectation.superop.matrix, np.eye(9), atol=1e-10)


def test_projection_peripheral_spectrum(numerics) -> None:
    group = cyclic(3)
    expectation = poisson_projection(group, Measure.delta(group, 1), numerics)
    assert expectation.fixed_space.dim == 3
    assert len(expectation.peripheral) == 6
    for z in expectation.peripheral:
        assert abs(z) == pytest.approx(1.0)


def test_projection_requires_probability(s3, numerics) -> None:
    with pytest.raises(ProbabilityMeasureException):
        poisson_projection(s3, Measure(np.full(6, 1.0 / 6.0)), numerics)


def test_projection_is_positive_bimodule_map(z3_measure, numerics, rng) -> None:
    group, mu = z3_measure
    expectation = poisson_projection(group, mu, numerics)
    assert expectation.superop.min_choi_eigenvalue() > -1e-9
    lam = group.left_regular_all
    x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert np.allclose(expectation.apply(lam[1] @ x @ lam[2]), lam[1] @ expectation.apply(x) @ lam[2], atol=1e-10)
    data = expectation.to_dict()
    assert data["fixed_dim"] == 3
    assert data["complement_dim"] == 6


def test_cesaro_mean_and_lazy_power() -> None:
    op = np.diag([1.0, 0.0])
    assert np.allclose(cesaro_mean(op, 4), np.diag([1.0, 0.25]))
    assert np.allclose(cesaro_mean(op, 1), np.eye(2))
    assert np.allclose(lazy_power(op, 2), np.diag([1.0, 0.25]))
    with pytest.raises(ValueError):
        cesaro_mean(op, 3)
    with pytest.raises(ValueError):
        lazy_power(op, 0)


def test_cesaro_mean_of_rotation() -> None:
    rotation = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert np.allclose(cesaro_mean(rotation, 8), np.full((2, 2), 0.5))


@pytest.mark.parametrize("label", ["delta", "uniform", "z3"])
def test_validate_cesaro(label, s3, z3_measure, numerics) -> None:
    group, mu = {
        "delta": (s3, Measure.delta(s3)),
        "uniform": (s3, Measure.uniform(s3)),
        "z3": z3_measure,
    }[label]
    result = validate_cesaro(group, poisson_projection(group, mu, numerics))
    assert isinstance(result, CesaroValidation)
    assert result.passed, result.to_dict()
    assert result.lazy_gap < 1e-6
    assert set(result.to_dict()["plain_gaps"]) == {"1024", "2048"}


def test_choi_effros_on_group_algebra(s3, numerics) -> None:
    expectation = poisson_projection(s3, Measure.uniform(s3), numerics)
    lam = s3.left_regular_all
    assert np.allclose(choi_effros(expectation, lam[1], lam[2], numerics), lam[s3.multiply(1, 2)], atol=1e-10)
    with pytest.raises(NotHarmonicException):
        choi_effros(expectation, np.diag(np.arange(6.0)), lam[0], numerics)


def test_boundary_algebra_uniform(s3, numerics) -> None:
    algebra = boundary_algebra(s3, Measure.uniform(s3), numerics)
    assert algebra.dim == 6
    assert algebra.unit_residual() < 1e-10
    assert not algebra.is_commutative()
    assert algebra.center_dim(numerics) == 3
    assert algebra.associativity_residual()[0] < 1e-10
    assert algebra.involution_residual() < 1e-10
    assert algebra.functions.dim == 1
    assert algebra.function_closure_residual() < 1e-10


def test_boundary_algebra_abelian(z3_measure, numerics, rng) -> None:
    group, mu = z3_measure
    algebra = boundary_algebra(group, mu, numerics, rng=rng)
    assert algebra.dim == 3
    assert algebra.is_commutative()
    assert algebra.center_dim(numerics) == 3
    x = algebra.element(np.array([1.0, 2.0, 3.0]))
    assert np.allclose(algebra.coords(x), [1.0, 2.0, 3.0])
    samples = [algebra.element(rng.normal(size=3) + 1j * rng.normal(size=3)) for _ in range(3)]
    assert algebra.positivity_residual(samples) < 1e-8


def test_boundary_algebra_sampled_associativity(numerics) -> None:
    group = cyclic(3)
    algebra = boundary_algebra(group, Measure.delta(group), numerics, max_triples=100)
    assert algebra.dim == 9
    gap, triple = algebra.associativity_residual(np.random.default_rng(0), max_triples=100)
    assert gap < 1e-10


def test_function_product_on_subgroup_measure(z4_subgroup_measure, numerics) -> None:
    group, mu = z4_subgroup_measure
    algebra = boundary_algebra(group, mu, numerics)
    assert algebra.functions.dim == 2
    coset = np.array([1.0, 0.0, 1.0, 0.0])
    assert np.allclose(function_product(algebra, coset, coset), coset, atol=1e-10)
    assert algebra.function_closure_residual() < 1e-10


def test_fundamental_unitary(s3, rng) -> None:
    v = fundamental_unitary(s3)
    assert np.allclose(v @ v.T, np.eye(36))
    phi = rng.normal(size=6)
    assert np.allclose(gamma_tilde(s3, multiplication_operator(phi), v), alpha_tilde(s3, phi))
    for r in range(6):
        assert np.allclose(gamma_tilde(s3, s3.left_regular_all[r], v), lambda_tilde(s3, r))


def test_gamma_tilde_inverse(s3, rng) -> None:
    t = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    assert np.allclose(gamma_tilde_inverse(s3, gamma_tilde(s3, t)), t)
    u = rng.normal(size=(6, 6))
    assert np.allclose(gamma_tilde(s3, t @ u), gamma_tilde(s3, t) @ gamma_tilde(s3, u))


def test_crossed_product_dimensions(z4_subgroup_measure, numerics) -> None:
    group, mu = z4_subgroup_measure
    crossed = crossed_product(group, mu, numerics)
    assert crossed.generator_log == {"harmonic_dim": 2, "generators": 8}
    assert crossed.dim == 8


@pytest.mark.parametrize("case", ["s3-uniform", "z3", "z4-subgroup"])
def test_verify_cross_iso(case, s3, z3_measure, z4_subgroup_measure, numerics) -> None:
    group, mu = {
        "s3-uniform": (s3, Measure.uniform(s3)),
        "z3": z3_measure,
        "z4-subgroup": z4_subgroup_measure,
    }[case]
    report = verify_cross_iso(group, mu, np.random.default_rng(4), numerics, seed=4)
    assert report.passed, report.failures
    assert report.dims["crossed_product"] == report.dims["H_tilde"]
    assert any("uniqueness" in note for note in report.notes)


def test_verify_cross_iso_notes_peripheral(numerics) -> None:
    group = cyclic(3)
    report = verify_cross_iso(group, Measure.delta(group, 1), np.random.default_rng(0), numerics)
    assert report.passed, report.failures
    assert any("peripheral" in note for note in report.notes)


@pytest.mark.parametrize("label", ["uniform", "z3"])
def test_boundary_report(label, s3, z3_measure, numerics) -> None:
    group, mu = (s3, Measure.uniform(s3)) if label == "uniform" else z3_measure
    report = boundary_report(group, mu, np.random.default_rng(1), numerics, seed=1)
    assert report.theorem_id == "boundary"
    assert report.passed, report.failures
    assert "lazy_gap" in report.residuals
    assert report.dims["center"] >= 1


@pytest.mark.parametrize("name", ["S3", "D4"])
def test_gamma_tilde_is_isometric_homomorphism(name, rng) -> None:
    group = make_builtin(name)
    n = group.order
    v = fundamental_unitary(group)
    for _ in range(5):
        t = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        u = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        image = gamma_tilde(group, t, v)
        assert np.allclose(gamma_tilde(group, t @ u, v), image @ gamma_tilde(group, u, v))
        assert np.allclose(gamma_tilde(group, t.conj().T, v), image.conj().T)
        assert np.linalg.norm(image, 2) == pytest.approx(np.linalg.norm(t, 2))


def test_reports_carry_involution(s3, z3_measure, numerics) -> None:
    group, mu = z3_measure
    boundary = boundary_report(group, mu, np.random.default_rng(2), numerics)
    cross = verify_cross_iso(s3, Measure.uniform(s3), np.random.default_rng(2), numerics)
    assert boundary.residuals["involution"] < 1e-8
    assert cross.residuals["involution"] < 1e-8


def test_boundary_report_flags_broken_involution(z3_measure, numerics) -> None:
    group, mu = z3_measure
    with patch.object(BoundaryAlgebra, "involution_residual", return_value=1.0):
        report = boundary_report(group, mu, np.random.default_rng(2), numerics)
    assert not report.passed
    assert "involution" in report.failures
