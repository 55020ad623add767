import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import random_symmetric
from specproj.linalg import (
    as_symmetric,
    effective_rank,
    hs_norm,
    operator_norm,
    read_csv_matrix,
    sup_norm,
    sym_eigh,
    tensor_product,
    trace,
    write_csv_matrix,
)
from specproj.sampling import spiked_model

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_operator_norm_examples(rng):
    assert operator_norm(np.diag([3.0, 1.0, 2.0])) == 3.0
    assert operator_norm(np.zeros((4, 4))) == 0.0
    a = random_symmetric(rng, 5)
    assert operator_norm(a) == pytest.approx(np.abs(np.linalg.eigvals(a)).max(), rel=1e-12)
    assert operator_norm(-np.diag([4.0, 1.0])) == 4.0


def test_trace_and_hs_norm(rng):
    d = np.diag([1.0, 2.0, 3.0])
    assert trace(d) == 6.0
    assert hs_norm(d) == pytest.approx(np.sqrt(14.0))
    u = rng.standard_normal(6)
    assert trace(tensor_product(u, u)) == pytest.approx(u @ u)
    a = random_symmetric(rng, 7)
    assert hs_norm(a) ** 2 == pytest.approx(np.sum(np.linalg.eigvalsh(a) ** 2))


def test_effective_rank_examples():
    assert effective_rank(np.eye(7)) == pytest.approx(7.0)
    assert effective_rank(np.diag([2.0, 1.0, 1.0])) == pytest.approx(2.0)
    model = spiked_model([1.0], 1.0, 10)
    assert effective_rank(model.sigma) == pytest.approx(5.5)
    with pytest.raises(ValueError):
        effective_rank(np.zeros((3, 3)))


def test_tensor_product():
    e1, e2 = np.eye(3)[0], np.eye(3)[1]
    np.testing.assert_array_equal(tensor_product(e1, e2) @ e2, e1)
    np.testing.assert_array_equal(tensor_product(e1, e2) @ e1, np.zeros(3))
    u, v = np.array([1.0, 2.0, -1.0]), np.array([0.5, 0.0, 3.0])
    assert trace(tensor_product(u, v)) == pytest.approx(u @ v)
    with pytest.raises(ValueError):
        tensor_product(np.ones(2), np.ones(3))


def test_sup_norm(rng):
    assert sup_norm([0.3, -0.7, 0.1]) == 0.7
    assert sup_norm(np.zeros(4)) == 0.0
    u = rng.standard_normal(50)
    assert sup_norm(u) == max(abs(x) for x in u)


def test_sym_eigh_examples():
    w, _ = sym_eigh(np.diag([1.0, 5.0, 3.0]))
    np.testing.assert_array_equal(w, [5.0, 3.0, 1.0])
    w, q = sym_eigh(np.eye(4))
    np.testing.assert_allclose(w, 1.0)
    np.testing.assert_allclose(q @ q.T, np.eye(4), atol=1e-14)


def test_sym_eigh_residual_on_random_instances(rng):
    worst = 0.0
    for _ in range(1000):
        a = random_symmetric(rng, 20)
        w, q = sym_eigh(a)
        assert np.all(np.diff(w) <= 0)
        assert np.abs(q @ q.T - np.eye(20)).max() <= 1e-12
        worst = max(worst, operator_norm(a - (q * w) @ q.T) / operator_norm(a))
    assert worst <= 1e-10


def test_as_symmetric_symmetrizes_and_rejects():
    a = np.array([[1.0, 2.0], [2.0 + 1e-13, 1.0]])
    s = as_symmetric(a)
    np.testing.assert_array_equal(s, s.T)
    with pytest.raises(ValueError):
        as_symmetric(np.ones((2, 3)))
    with pytest.raises(ValueError):
        as_symmetric([[np.nan, 0.0], [0.0, 1.0]])


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, (6, 6), elements=finite))
def test_norm_sandwich(a):
    a = (a + a.T) / 2.0
    op, hs = operator_norm(a), hs_norm(a)
    assert op <= hs * (1 + 1e-12) + 1e-12
    assert hs <= np.sqrt(6) * op * (1 + 1e-12) + 1e-12


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, (5, 3), elements=finite), st.floats(0.01, 100))
def test_effective_rank_scale_invariant_and_bounded(x, c):
    sigma = x @ x.T
    if operator_norm(sigma) < 1e-6:
        return
    r = effective_rank(sigma)
    assert effective_rank(c * sigma) == pytest.approx(r, rel=1e-9)
    rank = np.linalg.matrix_rank(sigma)
    assert 1 - 1e-9 <= r <= rank + 1e-9


def test_effective_rank_equals_rank_for_flat_spectrum():
    sigma = np.diag([2.0, 2.0, 2.0, 0.0, 0.0])
    assert effective_rank(sigma) == pytest.approx(3.0)
    assert effective_rank(np.diag([2.0, 1.9, 2.0, 0.0])) < 3.0


def test_csv_round_trip_and_ragged_rows(tmp_path, rng):
    a = rng.standard_normal((4, 3))
    path = tmp_path / "m.csv"
    write_csv_matrix(path, a)
    np.testing.assert_array_equal(read_csv_matrix(path), a)
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2,3\n4,5\n")
    with pytest.raises(ValueError, match="bad.csv:2"):
        read_csv_matrix(bad)
    word = tmp_path / "word.csv"
    word.write_text("1,2\nx,3\n")
    with pytest.raises(ValueError, match="non-numeric"):
        read_csv_matrix(word)
