import numpy as np
import pytest

from conftest import random_symmetric, separated_spectrum, with_spectrum
from specproj.linalg import operator_norm
from specproj.spectral import (
    decompose,
    decomposition_from_eigenpairs,
    match_cluster,
    match_clusters,
    reduced_resolvent,
    resolvent,
    spectral_gap,
)


def test_clusters_of_repeated_eigenvalue():
    dec = decompose(np.diag([3.0, 3.0, 1.0]))
    assert [(c.value, c.multiplicity) for c in dec.clusters] == [(3.0, 2), (1.0, 1)]
    assert dec.cluster(1).members == (0, 1)
    np.testing.assert_allclose(dec.projector(1), np.diag([1.0, 1.0, 0.0]), atol=1e-14)


def test_near_tie_merges_within_tolerance():
    dec = decompose(np.diag([2.0, 2.0 + 1e-12]), cluster_tol=1e-9)
    assert len(dec) == 1
    assert dec.cluster(1).multiplicity == 2
    assert len(decompose(np.diag([2.0, 2.1]), cluster_tol=1e-9)) == 2


def test_random_decomposition_invariants(rng):
    for _ in range(50):
        p = int(rng.integers(2, 15))
        sigma = random_symmetric(rng, p)
        dec = decompose(sigma)
        assert operator_norm(sigma - dec.reconstruct()) <= 1e-10 * max(1.0, operator_norm(sigma))
        assert sum(c.multiplicity for c in dec.clusters) == p
        assert np.all(np.diff(dec.values) < 0)
        for c in dec.clusters:
            P = c.projector
            assert np.abs(P @ P - P).max() <= 1e-9
            assert np.trace(P) == pytest.approx(c.multiplicity, abs=1e-9)
            assert list(c.members) == list(range(c.members[0], c.members[0] + c.multiplicity))
        for a in dec.clusters:
            for b in dec.clusters:
                if a.index != b.index:
                    assert np.abs(a.projector @ b.projector).max() <= 1e-9


def test_decompose_of_reconstruction_is_idempotent(rng):
    sigma = with_spectrum(rng, np.array([4.0, 4.0, 2.5, 1.0, 1.0, 1.0]))
    dec = decompose(sigma)
    again = decompose(dec.reconstruct())
    assert [(c.multiplicity) for c in again.clusters] == [2, 1, 3]
    np.testing.assert_allclose(again.values, dec.values, atol=1e-12)
    for a, b in zip(dec.clusters, again.clusters):
        np.testing.assert_allclose(a.projector, b.projector, atol=1e-10)


def test_spectral_gaps():
    dec = decompose(np.diag([5.0, 3.0, 1.0]))
    assert spectral_gap(dec, 1) == 2.0
    assert spectral_gap(dec, 2) == 2.0
    assert spectral_gap(dec, 3) == 1.0
    assert spectral_gap(decompose(np.diag([3.0, 1.0])), 2) == 1.0
    assert spectral_gap(decompose(np.diag([3.0, 1.0, 0.0])), 3) == 1.0
    with pytest.raises(ValueError):
        spectral_gap(decompose(np.zeros((2, 2))), 1)
    with pytest.raises(IndexError):
        spectral_gap(dec, 4)


def test_reduced_resolvent_examples():
    np.testing.assert_allclose(reduced_resolvent(decompose(np.diag([3.0, 1.0])), 1), np.diag([0.0, 0.5]))
    np.testing.assert_allclose(
        reduced_resolvent(decompose(np.diag([5.0, 2.0, 1.0])), 2), np.diag([-1 / 3, 0.0, 1.0])
    )


def test_reduced_resolvent_identity(rng):
    for _ in range(30):
        p = int(rng.integers(3, 12))
        sigma = with_spectrum(rng, separated_spectrum(rng, p))
        dec = decompose(sigma)
        for r in (1, 2, p):
            C, P = reduced_resolvent(dec, r), dec.projector(r)
            mu = dec.cluster(r).value
            np.testing.assert_allclose(C @ (mu * np.eye(p) - sigma), np.eye(p) - P, atol=1e-10)
            assert np.abs(C @ P).max() <= 1e-10


def test_resolvent_examples(rng):
    np.testing.assert_allclose(resolvent(np.diag([3.0, 1.0]), 2.0), np.diag([1.0, -1.0]))
    eta = 2.0 + 1.0j
    np.testing.assert_allclose(
        resolvent(np.diag([3.0, 1.0]), eta), np.diag([1 / (3 - eta), 1 / (1 - eta)]), rtol=1e-14
    )
    sigma = random_symmetric(rng, 8)
    eta = 0.3 + 0.7j
    res = resolvent(sigma, eta)
    assert np.abs((sigma - eta * np.eye(8)) @ res - np.eye(8)).max() <= 1e-10
    with pytest.raises(ValueError):
        resolvent(np.diag([3.0, 1.0]), 1.0)


def test_match_examples():
    dec = decompose(np.diag([3.0, 1.0]))
    m = match_cluster(dec, np.diag([2.9, 1.05]), 1)
    np.testing.assert_allclose(m.projector, np.diag([1.0, 0.0]), atol=1e-14)
    assert m.separated
    same = match_clusters(dec, dec.operator)
    assert all(c.separated for c in same)
    for c in same:
        np.testing.assert_allclose(c.projector, dec.projector(c.index), atol=1e-14)
    bad = match_cluster(dec, np.diag([2.0, 1.9]), 1)
    assert bad.norm_E == pytest.approx(1.0)
    assert not bad.separated


def test_matching_is_positional_and_preserves_rank(rng):
    dec = decompose(np.diag([4.0, 4.0, 2.0, 1.0]))
    for _ in range(20):
        sigma_hat = dec.operator + random_symmetric(rng, 4, scale=3.0)
        for m in match_clusters(dec, sigma_hat):
            assert round(np.trace(m.projector)) == dec.cluster(m.index).multiplicity
            assert np.linalg.matrix_rank(m.projector, tol=1e-8) == dec.cluster(m.index).multiplicity
    # positions, not values: a crossing swaps which vector lands in cluster 1
    m = match_cluster(decompose(np.diag([3.0, 1.0])), np.diag([0.5, 2.0]), 1)
    np.testing.assert_allclose(m.projector, np.diag([0.0, 1.0]), atol=1e-14)


def test_separated_projector_bound(rng):
    for _ in range(200):
        p = int(rng.integers(2, 10))
        dec = decompose(with_spectrum(rng, separated_spectrum(rng, p)))
        E = random_symmetric(rng, p, scale=float(rng.uniform(0.001, 0.5)))
        for m in match_clusters(dec, dec.operator + E):
            diff = operator_norm(m.projector - dec.projector(m.index))
            assert diff <= min(1.0, 4 * m.norm_E / m.gap) + 1e-12


def test_lidskii(rng):
    for _ in range(1000):
        p = int(rng.integers(2, 12))
        a = random_symmetric(rng, p)
        E = random_symmetric(rng, p, scale=float(rng.uniform(0.01, 2)))
        wa = np.sort(np.linalg.eigvalsh(a))
        wb = np.sort(np.linalg.eigvalsh(a + E))
        assert np.abs(wa - wb).max() <= operator_norm(E) * (1 + 1e-12) + 1e-12


def test_decomposition_from_eigenpairs(rng):
    q = np.linalg.qr(rng.standard_normal((5, 5)))[0]
    vals = np.array([1.0, 3.0, 3.0, 0.5, 2.0])
    dec = decomposition_from_eigenpairs(vals, q)
    np.testing.assert_allclose(dec.values, [3.0, 2.0, 1.0, 0.5])
    assert dec.cluster(1).multiplicity == 2
    np.testing.assert_allclose(dec.eigenvector(2), q[:, 4])
    ref = decompose(dec.operator)
    for a, b in zip(dec.clusters, ref.clusters):
        np.testing.assert_allclose(a.projector, b.projector, atol=1e-10)
    with pytest.raises(ValueError):
        decomposition_from_eigenpairs(vals, q[:, :4])


def test_eigenvector_requires_simple_cluster():
    dec = decompose(np.diag([3.0, 3.0, 1.0]))
    with pytest.raises(ValueError, match="multiplicity"):
        dec.eigenvector(1)
