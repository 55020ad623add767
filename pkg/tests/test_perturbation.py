import numpy as np
import pytest

from conftest import random_symmetric, separated_spectrum, with_spectrum
from specproj.linalg import operator_norm
from specproj.perturbation import (
    ContourSpec,
    QuadratureError,
    contour_for_cluster,
    contour_for_interval,
    contour_linear_term,
    interval_bounds,
    interval_gap,
    linear_term,
    linear_term_interval,
    perturbation_bounds,
    perturbation_decomposition,
    remainder_term,
    riesz_projector,
)
from specproj.spectral import decompose, match_cluster

E_OFF = np.array([[0.0, 0.1], [0.1, 0.0]])


def test_linear_term_examples():
    dec = decompose(np.diag([3.0, 1.0]))
    np.testing.assert_allclose(linear_term(dec, 1, E_OFF), 0.05 * np.array([[0.0, 1.0], [1.0, 0.0]]))
    dec3 = decompose(np.diag([4.0, 2.0, 1.0]))
    np.testing.assert_array_equal(linear_term(dec3, 2, np.diag([0.3, -0.1, 0.2])), np.zeros((3, 3)))
    with pytest.raises(ValueError):
        linear_term(dec, 1, np.zeros((3, 3)))


def test_remainder_examples():
    dec = decompose(np.diag([3.0, 1.0]))
    np.testing.assert_array_equal(remainder_term(dec, 1, np.zeros((2, 2)), dec.projector(1)), np.zeros((2, 2)))
    # closed form: the top eigenvector of [[3, .1], [.1, 1]] is (cos a, sin a), tan 2a = 0.1
    a = 0.5 * np.arctan2(0.2, 2.0)
    v = np.array([np.cos(a), np.sin(a)])
    P_hat = np.outer(v, v)
    np.testing.assert_allclose(P_hat, match_cluster(dec, dec.operator + E_OFF, 1).projector, atol=1e-14)
    S = remainder_term(dec, 1, E_OFF, P_hat)
    assert operator_norm(S) <= 14 * (0.1 / 2) ** 2
    pd = perturbation_decomposition(dec, 1, E_OFF, P_hat)
    np.testing.assert_array_equal(pd.L + pd.S, pd.difference)
    np.testing.assert_allclose(pd.difference, P_hat - dec.projector(1), atol=1e-15)
    assert pd.bound_remainder == pytest.approx(0.035)


def test_bounds_examples():
    dec = decompose(np.diag([3.0, 1.0, 0.0]))
    E = np.diag([0.2, 0.0, 0.0])
    assert dec.gap(1) == 2.0
    b = perturbation_bounds(dec, 1, E)
    assert b.bound_projector == pytest.approx(0.4)
    assert b.bound_remainder == pytest.approx(0.14)
    assert b.separated
    assert not perturbation_bounds(dec, 1, np.diag([1.5, 0.0, 0.0])).separated


def test_lemma_bounds_on_random_instances(rng):
    for _ in range(300):
        p = int(rng.integers(2, 12))
        dec = decompose(with_spectrum(rng, separated_spectrum(rng, p)))
        E = random_symmetric(rng, p, scale=float(rng.uniform(0.001, 1.0)))
        r = int(rng.integers(1, p + 1))
        P_hat = match_cluster(dec, dec.operator + E, r).projector
        pd = perturbation_decomposition(dec, r, E, P_hat)
        assert operator_norm(P_hat - dec.projector(r)) <= min(1.0, pd.bound_projector) + 1e-12
        assert operator_norm(pd.S) <= pd.bound_remainder + 1e-12


def test_linear_term_structure(rng):
    for _ in range(50):
        p = int(rng.integers(3, 10))
        dec = decompose(with_spectrum(rng, separated_spectrum(rng, p)))
        r = int(rng.integers(1, p + 1))
        E1, E2 = random_symmetric(rng, p), random_symmetric(rng, p)
        a, b = rng.standard_normal(2)
        lhs = linear_term(dec, r, a * E1 + b * E2)
        rhs = a * linear_term(dec, r, E1) + b * linear_term(dec, r, E2)
        assert np.abs(lhs - rhs).max() <= 1e-12
        L = linear_term(dec, r, E1)
        P = dec.projector(r)
        Q = np.eye(p) - P
        assert abs(np.trace(L)) <= 1e-12
        assert np.abs(P @ L @ P).max() <= 1e-12
        assert np.abs(Q @ L @ Q).max() <= 1e-12
        np.testing.assert_array_equal(L, L.T)


def test_riesz_examples():
    sigma = np.diag([3.0, 1.0])
    np.testing.assert_allclose(riesz_projector(sigma, ContourSpec.circle(3.0, 1.0)), np.diag([1.0, 0.0]), atol=1e-10)
    np.testing.assert_allclose(riesz_projector(sigma, ContourSpec.circle(5.0, 0.5)), np.zeros((2, 2)), atol=1e-12)
    np.testing.assert_allclose(riesz_projector(sigma, ContourSpec.stadium(1.0, 3.0, 0.5)), np.eye(2), atol=1e-10)
    res = riesz_projector(sigma, ContourSpec.circle(3.0, 1.0), with_residual=True)
    assert res.imag_residual <= 1e-8


def test_riesz_rejects_contour_through_spectrum():
    with pytest.raises(QuadratureError):
        riesz_projector(np.diag([3.0, 1.0]), ContourSpec.circle(2.0, 1.0))


def test_contour_spec_validation():
    with pytest.raises(ValueError):
        ContourSpec.circle(0.0, 1.0, nodes=4)
    with pytest.raises(ValueError):
        ContourSpec.circle(0.0, -1.0)
    with pytest.raises(ValueError):
        ContourSpec.stadium(3.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        ContourSpec(kind="ellipse", radius=1.0)


def test_contour_linear_term_examples(rng):
    sigma = with_spectrum(rng, np.array([5.0, 3.0, 2.0, 1.0]))
    dec = decompose(sigma)
    E = random_symmetric(rng, 4, 0.1)
    np.testing.assert_allclose(contour_linear_term(sigma, np.zeros((4, 4)), contour_for_cluster(dec, 2)), 0.0, atol=1e-14)
    full = ContourSpec.stadium(1.0, 5.0, 2.0, nodes=128)
    np.testing.assert_allclose(contour_linear_term(sigma, E, full), 0.0, atol=1e-10)
    np.testing.assert_allclose(
        contour_linear_term(sigma, E, contour_for_cluster(dec, 2)), linear_term(dec, 2, E), atol=1e-8
    )


def test_riesz_spectral_accuracy_on_separated_spectra(rng):
    for _ in range(30):
        p = int(rng.integers(2, 8))
        vals = separated_spectrum(rng, p)
        vals = vals * min(1.0, 10.0 / vals[0])
        if np.min(-np.diff(vals), initial=np.inf) < 0.5 or vals[-1] < 0.5:
            continue
        dec = decompose(with_spectrum(rng, vals))
        r = int(rng.integers(1, p + 1))
        P = riesz_projector(dec.operator, contour_for_cluster(dec, r))
        assert np.abs(P - dec.projector(r)).max() <= 1e-10


def test_interval_contour_matches_sum_of_clusters(rng):
    sigma = with_spectrum(rng, np.array([6.0, 4.0, 3.5, 1.0]))
    dec = decompose(sigma)
    rs = [2, 3]
    assert interval_gap(dec, rs) == pytest.approx(2.0)
    contour = contour_for_interval(dec, rs)
    P = riesz_projector(sigma, contour)
    np.testing.assert_allclose(P, dec.projector(2) + dec.projector(3), atol=1e-10)
    E = random_symmetric(rng, 4, 0.05)
    np.testing.assert_allclose(contour_linear_term(sigma, E, contour), linear_term_interval(dec, rs, E), atol=1e-8)
    b = interval_bounds(dec, rs, E)
    factor = 1 + 2 * 0.5 / (np.pi * 2.0)
    assert b.bound_projector == pytest.approx(4 * factor * operator_norm(E) / 2.0)
    with pytest.raises(ValueError):
        interval_gap(dec, [1, 3])


def test_first_order_ratio_example():
    dec = decompose(np.diag([3.0, 1.0, 0.5]))
    E = np.array([[0.0, 1.0, 0.5], [1.0, 0.3, 0.0], [0.5, 0.0, -0.2]])

    def err(t):
        P_hat = match_cluster(dec, dec.operator + t * E, 1).projector
        return operator_norm(P_hat - dec.projector(1) - t * linear_term(dec, 1, E)) / t**2

    assert 3.2 <= err(0.01) / err(0.005) * 4 <= 4.8
