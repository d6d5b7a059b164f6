"""Dense complex linear algebra: Hermitian eigensolver, exponentials, norms.

Dense operators are plain ``numpy`` arrays of dtype ``complex128``. The
eigensolver is a cyclic Jacobi method using the round-robin (tournament)
pair ordering, so each round rotates ``n // 2`` disjoint index pairs at
once. It accepts stacks of matrices with shape ``(..., n, n)``.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalError, ValidationError

HERMITIAN_TOL = 1e-12
OFFDIAG_TOL = 1e-13
MAX_SWEEPS = 100
MAX_DENSE_DIM = 2**12


def as_dense(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValidationError(f"expected square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.swapaxes(m, -1, -2).conj()


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(m - dagger(m)), initial=0.0) <= tol)


def is_unitary(m: np.ndarray, tol: float = 1e-10) -> bool:
    n = m.shape[-1]
    return bool(np.max(np.abs(dagger(m) @ m - np.eye(n)), initial=0.0) <= tol)


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pairings for one sweep: every (p, q), p < q, appears exactly once."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for k in range(m // 2):
            a, b = players[k], players[m - 1 - k]
            if a >= n or b >= n:
                continue
            ps.append(min(a, b))
            qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


_ROUNDS: dict[int, list] = {}


def _offdiag_norm(a: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    mask = ~np.eye(n, dtype=bool)
    return np.sqrt(np.sum(np.abs(a[..., mask]) ** 2, axis=-1))


def hermitian_eig(m, *, tol: float = OFFDIAG_TOL, max_sweeps: int = MAX_SWEEPS):
    """Eigen-decomposition of a Hermitian matrix (or stack of them).

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending along
    the last axis and eigenvectors as columns. Iterates until the
    off-diagonal Frobenius norm drops below ``tol * max(1, ||m||_F)``.

    Raises ValidationError for non-Hermitian input and NumericalError if the
    sweep cap is reached.
    """
    a = as_dense(m)
    if not is_hermitian(a):
        raise ValidationError("hermitian_eig: input is not Hermitian within 1e-12")
    n = a.shape[-1]
    a = 0.5 * (a + dagger(a))
    v = np.broadcast_to(np.eye(n, dtype=np.complex128), a.shape).copy()
    if n > 1:
        rounds = _ROUNDS.get(n)
        if rounds is None:
            rounds = _ROUNDS[n] = _round_robin(n)
        scale = np.maximum(1.0, np.sqrt(np.sum(np.abs(a) ** 2, axis=(-2, -1))))
        for _ in range(max_sweeps):
            if np.all(_offdiag_norm(a) <= tol * scale):
                break
            for p, q in rounds:
                _rotate(a, v, p, q)
        else:
            raise NumericalError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")
    w = np.real(np.diagonal(a, axis1=-2, axis2=-1))
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[..., None, :], axis=-1)
    return w, v


def _rotate(a: np.ndarray, v: np.ndarray, p: np.ndarray, q: np.ndarray) -> None:
    """Apply the Jacobi rotations for disjoint pairs (p[k], q[k]) in place."""
    apq = a[..., p, q]
    app = a[..., p, p].real
    aqq = a[..., q, q].real
    b = np.abs(apq)
    active = b > 1e-300
    bsafe = np.where(active, b, 1.0)
    phase = np.where(active, apq / bsafe, 1.0)
    theta = (aqq - app) / (2.0 * bsafe)
    sign = np.where(theta >= 0.0, 1.0, -1.0)
    t = sign / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
    t = np.where(active, t, 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    # G restricted to (p, q) is [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
    eph = phase.conj()
    g_qp = -s * eph
    g_qq = c * eph

    cp = a[..., :, p]
    cq = a[..., :, q]
    a[..., :, p] = cp * c[..., None, :] + cq * g_qp[..., None, :]
    a[..., :, q] = cp * s[..., None, :] + cq * g_qq[..., None, :]
    rp = a[..., p, :]
    rq = a[..., q, :]
    a[..., p, :] = rp * c[..., :, None] + rq * g_qp.conj()[..., :, None]
    a[..., q, :] = rp * s[..., :, None] + rq * g_qq.conj()[..., :, None]
    a[..., p, q] = 0.0
    a[..., q, p] = 0.0

    vp = v[..., :, p]
    vq = v[..., :, q]
    v[..., :, p] = vp * c[..., None, :] + vq * g_qp[..., None, :]
    v[..., :, q] = vp * s[..., None, :] + vq * g_qq[..., None, :]


def eigvalsh(m) -> np.ndarray:
    return hermitian_eig(m)[0]


def expm_hermitian_generator(h, angle: float) -> np.ndarray:
    """Return ``exp(-i * angle * h)`` for Hermitian ``h``; unitary to 1e-10."""
    w, v = hermitian_eig(h)
    u = (v * np.exp(-1j * angle * w)[..., None, :]) @ dagger(v)
    if not is_unitary(u):
        raise NumericalError("matrix exponential lost unitarity")
    return u


def trace_norm(m) -> float:
    """Sum of singular values; uses the eigensolver on Hermitian input."""
    a = as_dense(m)
    if is_hermitian(a):
        return float(np.sum(np.abs(eigvalsh(a))))
    # singular values are square roots of the eigenvalues of m^dagger m
    w = eigvalsh(dagger(a) @ a)
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))))


def operator_norm(m) -> float:
    a = as_dense(m)
    if a.shape[-1] == 0:
        return 0.0
    w = eigvalsh(dagger(a) @ a)
    return float(np.sqrt(max(w[-1], 0.0)))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def kron_all(mats) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for m in mats:
        out = np.kron(out, m)
    return out


def embed(local: np.ndarray, sites, dims) -> np.ndarray:
    """Lift an operator acting on ``sites`` (in that order) to the full space."""
    dims = tuple(int(d) for d in dims)
    sites = tuple(int(s) for s in sites)
    n = len(dims)
    rest = [k for k in range(n) if k not in sites]
    order = list(sites) + rest
    d_rest = int(np.prod([dims[k] for k in rest])) if rest else 1
    full = np.kron(local, np.eye(d_rest, dtype=np.complex128))
    shaped = full.reshape([dims[k] for k in order] * 2)
    inv = np.argsort(order)
    perm = list(inv) + [n + k for k in inv]
    total = int(np.prod(dims))
    return shaped.transpose(perm).reshape(total, total)
