import numpy as np
import pytest
from hypothesis import given, strategies as st

from gwitness.errors import ValidationError
from gwitness.linalg import (
    commutator,
    embed,
    expm_hermitian_generator,
    hermitian_eig,
    is_unitary,
    operator_norm,
    trace_norm,
)

from conftest import haar_unitary, random_density, random_hermitian

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def test_eig_diagonal():
    w, v = hermitian_eig(Z)
    np.testing.assert_allclose(w, [-1, 1], atol=1e-14)
    assert np.allclose(np.abs(v), np.eye(2)[:, ::-1])


def test_eig_sigma_x_vectors():
    w, v = hermitian_eig(X)
    np.testing.assert_allclose(w, [-1, 1], atol=1e-14)
    minus = np.array([1, -1]) / np.sqrt(2)
    plus = np.array([1, 1]) / np.sqrt(2)
    assert abs(abs(np.vdot(minus, v[:, 0])) - 1) < 1e-12
    assert abs(abs(np.vdot(plus, v[:, 1])) - 1) < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3, 7, 16, 33])
def test_eig_residual_and_numpy_oracle(rng, n):
    h = random_hermitian(rng, n)
    w, v = hermitian_eig(h)
    assert np.max(np.linalg.norm(h @ v - v * w, axis=0)) <= 1e-10
    np.testing.assert_allclose(w, np.linalg.eigvalsh(h), atol=1e-11)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(n), atol=1e-12)


def test_eig_batched(rng):
    hs = np.stack([random_hermitian(rng, 4) for _ in range(5)])
    w, _ = hermitian_eig(hs)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(hs), atol=1e-11)


def test_eig_degenerate_spectrum(rng):
    u = haar_unitary(rng, 6)
    h = u @ np.diag([1, 1, 1, -2, -2, 5]).astype(complex) @ u.conj().T
    w, _ = hermitian_eig(h)
    np.testing.assert_allclose(w, [-2, -2, 1, 1, 1, 5], atol=1e-11)


def test_eig_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))


@given(st.integers(0, 2**32 - 1), st.integers(2, 8))
def test_eig_trace_and_weyl(seed, n):
    rng = np.random.default_rng(seed)
    a, b = random_hermitian(rng, n), random_hermitian(rng, n)
    wa, wb, ws = hermitian_eig(a)[0], hermitian_eig(b)[0], hermitian_eig(a + b)[0]
    assert abs(ws.sum() - np.trace(a + b).real) <= 1e-10
    # Weyl: w_i(A) + w_min(B) <= w_i(A+B) <= w_i(A) + w_max(B)
    assert np.all(ws >= wa + wb[0] - 1e-10)
    assert np.all(ws <= wa + wb[-1] + 1e-10)


def test_expm_examples():
    np.testing.assert_allclose(expm_hermitian_generator(X, np.pi / 2), -1j * X, atol=1e-14)
    np.testing.assert_allclose(expm_hermitian_generator(X, 0.0), np.eye(2), atol=1e-15)
    zz = np.kron(Z, Z)
    u = expm_hermitian_generator(zz, np.pi / 4)
    phases = np.exp(-1j * np.pi / 4 * np.array([1, -1, -1, 1]))
    np.testing.assert_allclose(u, np.diag(phases), atol=1e-14)


@given(st.integers(0, 2**32 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_expm_group_law(seed, a, b):
    h = random_hermitian(np.random.default_rng(seed), 4)
    lhs = expm_hermitian_generator(h, a) @ expm_hermitian_generator(h, b)
    assert np.max(np.abs(lhs - expm_hermitian_generator(h, a + b))) <= 1e-9


def test_expm_matches_series(rng):
    h = random_hermitian(rng, 3) * 0.3
    # Taylor series oracle, converged for small norm
    term, total = np.eye(3, dtype=complex), np.eye(3, dtype=complex)
    for k in range(1, 40):
        term = term @ (-1j * h) / k
        total = total + term
    np.testing.assert_allclose(expm_hermitian_generator(h, 1.0), total, atol=1e-13)


def test_trace_norm_examples(rng):
    assert abs(trace_norm(np.diag([0.5, 0.5, 0.5, -0.5])) - 2.0) < 1e-14
    assert trace_norm(np.zeros((3, 3))) == 0.0
    assert abs(trace_norm(random_density(rng, 5)) - 1.0) < 1e-12


def test_operator_norm_and_commutator():
    assert abs(operator_norm(commutator(X, Z)) - 2.0) < 1e-12
    assert is_unitary(X) and not is_unitary(2 * X)


def test_embed_matches_kron(rng):
    u = haar_unitary(rng, 2)
    full = embed(u, [2], (2, 3, 2))
    np.testing.assert_allclose(full, np.kron(np.eye(6), u), atol=1e-15)
    v = haar_unitary(rng, 4)
    # sites given out of order: local factor order is (site 2, site 0)
    swapped = embed(v, [2, 0], (2, 2, 2))
    ref = np.zeros((8, 8), dtype=complex)
    for i0, i1, i2, j0, j2 in np.ndindex(2, 2, 2, 2, 2):
        ref[4 * i0 + 2 * i1 + i2, 4 * j0 + 2 * i1 + j2] = v[2 * i2 + i0, 2 * j2 + j0]
    np.testing.assert_allclose(swapped, ref, atol=1e-15)
