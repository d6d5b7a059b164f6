import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gwitness.errors import LayoutMismatchError, ValidationError
from gwitness.pauli import (
    PauliOp,
    SiteLayout,
    all_strings,
    commutator,
    pauli_coefficients,
    pauli_mul,
    to_dense,
)

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)
AMB = SiteLayout.qubits("A", "M", "B")


def single(layout, letters, c=1.0):
    return PauliOp.single(layout, letters, c)


def test_y_convention():
    one = SiteLayout.qubits("A")
    np.testing.assert_array_equal(single(one, {"A": "Y"}).to_dense(), Y)
    ixz = 1j * (single(one, {"A": "X"}) @ single(one, {"A": "Z"}))
    assert ixz == single(one, {"A": "Y"})


def test_mul_examples():
    one = SiteLayout.qubits("A")
    assert pauli_mul(single(one, {"A": "X"}), single(one, {"A": "Y"})) == single(one, {"A": "Z"}, 1j)
    two = SiteLayout.qubits("A", "B")
    xa, xb = single(two, {"A": "X"}), single(two, {"B": "X"})
    assert xa @ xb == single(two, {"A": "X", "B": "X"})
    s = single(one, {"A": "X"}) + single(one, {"A": "Z"})
    assert s @ s == PauliOp.identity(one) * 2


def test_commutator_examples(rng):
    xa, xb = single(AMB, {"A": "X"}), single(AMB, {"B": "X"})
    assert commutator(xa, xb).is_zero()
    one = SiteLayout.qubits("A")
    assert commutator(single(one, {"A": "X"}), single(one, {"A": "Z"})) == single(one, {"A": "Y"}, -2j)
    a = random_op(rng, AMB, 6)
    assert commutator(a, a).is_zero()


def test_to_dense_examples():
    one = SiteLayout.qubits("A")
    np.testing.assert_array_equal(single(one, {"A": "Z"}).to_dense(), np.diag([1, -1]))
    two = SiteLayout.qubits("A", "B")
    np.testing.assert_array_equal(PauliOp.identity(two).to_dense(), np.eye(4))
    m = single(two, {"A": "X", "B": "Z"}).to_dense()
    expected = np.zeros((4, 4))
    for (i, j), v in {(0, 2): 1, (1, 3): -1, (2, 0): 1, (3, 1): -1}.items():
        expected[i, j] = v
    np.testing.assert_array_equal(m, expected)


def test_exhaustive_two_site_closure():
    two = SiteLayout.qubits("A", "B")
    strings = list(all_strings(two))
    assert len(strings) == 16
    phases = {1, -1, 1j, -1j}
    for a, b in itertools.product(strings, repeat=2):
        prod = PauliOp(two, {a: 1.0}) @ PauliOp(two, {b: 1.0})
        assert len(prod) == 1
        (_, c), = prod.items()
        assert any(abs(c - p) < 1e-15 for p in phases)
        dense = PauliOp(two, {a: 1.0}).to_dense() @ PauliOp(two, {b: 1.0}).to_dense()
        np.testing.assert_allclose(prod.to_dense(), dense, atol=1e-15)


def random_op(rng, layout, n_terms):
    keys = list(all_strings(layout))
    pick = rng.choice(len(keys), size=n_terms, replace=False)
    return PauliOp(layout, {keys[k]: complex(*rng.normal(size=2)) for k in pick})


@given(st.integers(0, 2**32 - 1), st.integers(1, 10), st.integers(1, 10))
def test_sparse_commutator_matches_dense(seed, na, nb):
    rng = np.random.default_rng(seed)
    a, b = random_op(rng, AMB, na), random_op(rng, AMB, nb)
    da, db = to_dense(a), to_dense(b)
    assert np.max(np.abs(commutator(a, b).to_dense() - (da @ db - db @ da))) <= 1e-12


@given(st.integers(0, 2**32 - 1))
def test_dense_roundtrip(seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    op = PauliOp.from_dense(m, AMB)
    np.testing.assert_allclose(op.to_dense(), m, atol=1e-12)


def test_qudit_clock_letters():
    lay = SiteLayout((("A", 2), ("M", 3)))
    w = np.exp(2j * np.pi / 3)
    z1 = PauliOp.single(lay, {"M": "Z1"}).to_dense()
    np.testing.assert_allclose(z1, np.kron(I2, np.diag([1, w, w * w])), atol=1e-15)
    z2 = PauliOp.single(lay, {"M": "Z2"})
    assert PauliOp.single(lay, {"M": "Z1"}) @ z2 == PauliOp.identity(lay)
    diag = np.kron(np.diag([1.0, 2.0]), np.diag([3.0, -1.0, 0.5]))
    np.testing.assert_allclose(PauliOp.from_dense(diag, lay).to_dense(), diag, atol=1e-13)
    # off-diagonal qutrit content cannot be represented by clock letters alone
    with pytest.raises(ValidationError):
        PauliOp.from_dense(np.kron(I2, np.ones((3, 3))), lay)


def test_pruning_and_arithmetic():
    one = SiteLayout.qubits("A")
    x = single(one, {"A": "X"})
    assert (x - x).is_zero()
    assert (x + single(one, {"A": "X"}, 1e-16)) == x
    assert (x * 3).coeff((1,)) == 3
    assert x.dagger() == x and single(one, {"A": "X"}, 1j).dagger() == single(one, {"A": "X"}, -1j)


def test_layout_mismatch():
    with pytest.raises(LayoutMismatchError):
        single(SiteLayout.qubits("A"), {"A": "X"}) + single(SiteLayout.qubits("B"), {"B": "X"})


def test_coefficients_oracle(rng):
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    two = SiteLayout.qubits("A", "B")
    c = pauli_coefficients(m, two)
    paulis = [I2, X, Y, Z]
    for i, j in itertools.product(range(4), repeat=2):
        ref = np.trace(np.kron(paulis[i], paulis[j]).conj().T @ m) / 4
        assert abs(c[i, j] - ref) < 1e-13


def test_text_roundtrip():
    op = PauliOp.from_text(AMB, [("XIZ", [1.0, 0.0]), ("IYI", 0.5j)])
    again = PauliOp.from_text(AMB, op.to_pairs())
    assert again == op
    assert op.support() == {"A", "B", "M"}
    assert op.restrict(["A", "M", "B"]) == op
