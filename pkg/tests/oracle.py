"""Independent dense circuit oracle: plain numpy Kronecker products and
numpy's own eigensolvers, sharing no code with the package."""

import numpy as np

I2 = np.eye(2)
H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)
P0, P1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
SITES = {"A": 0, "M": 1, "B": 2}


def on(ops):
    """Kronecker product over (A, M, B) with identities elsewhere."""
    mats = [ops.get(s, I2) for s in "AMB"]
    return np.kron(np.kron(mats[0], mats[1]), mats[2])


def cnot(c, t):
    return on({c: P0}) + on({c: P1, t: X})


def cz(a, b):
    return np.eye(8) - 2 * on({a: P1, b: P1})


def ket(*names):
    table = {"0": [1, 0], "1": [0, 1], "+": [1, 1], "-": [1, -1]}
    v = np.array([1.0 + 0j])
    for n in names:
        k = np.array(table[n], dtype=complex)
        v = np.kron(v, k / np.linalg.norm(k))
    return v


def expm_h(h, angle):
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * angle * w)) @ v.conj().T


def reduce_ab(psi):
    t = np.outer(psi, psi.conj()).reshape(2, 2, 2, 2, 2, 2)
    return np.einsum("ambcmd->abcd", t).reshape(4, 4)


def negativity_ab(rho_ab):
    pt = rho_ab.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
    w = np.linalg.eigvalsh(pt)
    return float(np.sum(np.abs(w[w < 0])))
