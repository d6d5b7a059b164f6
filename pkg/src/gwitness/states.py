"""Density states, partial traces and the two-qubit probe/mediator
Bloch-style decomposition."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError
from .linalg import dagger, eigvalsh, kron_all
from .pauli import letter_matrix

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10

_KETS = {
    "0": [1, 0],
    "1": [0, 1],
    "+": [1 / np.sqrt(2), 1 / np.sqrt(2)],
    "-": [1 / np.sqrt(2), -1 / np.sqrt(2)],
    "+i": [1 / np.sqrt(2), 1j / np.sqrt(2)],
    "-i": [1 / np.sqrt(2), -1j / np.sqrt(2)],
}


@dataclass(frozen=True, eq=False)
class DensityState:
    """Validated density matrix with its subsystem dimensions.

    Construction fails (ValidationError) unless the matrix is Hermitian to
    1e-12, has unit trace to 1e-12 and minimum eigenvalue >= -1e-10.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]
    label: str = ""

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        total = int(np.prod(dims))
        if m.shape != (total, total):
            raise ValidationError(f"state matrix shape {m.shape} does not match dims {dims}")
        if not np.all(np.isfinite(m)):
            raise ValidationError("state has non-finite entries")
        if np.max(np.abs(m - dagger(m))) > HERMITIAN_TOL:
            raise ValidationError("state is not Hermitian within 1e-12")
        if abs(np.trace(m) - 1) > TRACE_TOL:
            raise ValidationError(f"state trace {np.trace(m).real:.3e} differs from 1")
        m = 0.5 * (m + dagger(m))
        # rho + eps*I admits a Cholesky factor iff lambda_min > -eps
        try:
            np.linalg.cholesky(m + PSD_TOL * np.eye(total))
        except np.linalg.LinAlgError:
            raise ValidationError("state has an eigenvalue below -1e-10") from None
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def min_eigenvalue(self) -> float:
        return float(eigvalsh(self.matrix)[0])

    def expectation(self, op: np.ndarray) -> float:
        return float(np.real(np.trace(self.matrix @ op)))

    def evolve(self, u: np.ndarray, label: str | None = None) -> "DensityState":
        return DensityState(u @ self.matrix @ dagger(u), self.dims, self.label if label is None else label)

    def to_dict(self) -> dict:
        return {"dims": list(self.dims), "matrix": matrix_to_pairs(self.matrix)}


def matrix_to_pairs(m: np.ndarray) -> list:
    """Row-major list of ``[re, im]`` pairs; negative zeros normalised."""
    flat = np.asarray(m).reshape(-1)
    return [[float(z.real) + 0.0, float(z.imag) + 0.0] for z in flat]


def matrix_from_pairs(pairs, dim: int) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    if arr.shape != (dim * dim, 2):
        raise ValidationError(f"expected {dim * dim} [re, im] pairs, got shape {arr.shape}")
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(dim, dim)


def ket(name_or_vector, dim: int = 2) -> np.ndarray:
    if isinstance(name_or_vector, str):
        if name_or_vector in _KETS and dim == 2:
            return np.array(_KETS[name_or_vector], dtype=np.complex128)
        if name_or_vector.isdigit() and int(name_or_vector) < dim:
            v = np.zeros(dim, dtype=np.complex128)
            v[int(name_or_vector)] = 1.0
            return v
        raise ValidationError(f"unknown basis state {name_or_vector!r} for dimension {dim}")
    v = np.asarray(name_or_vector, dtype=np.complex128).reshape(-1)
    norm = np.linalg.norm(v)
    if v.size != dim or norm == 0:
        raise ValidationError("ket has wrong size or zero norm")
    return v / norm


def pure(vector, dims: Sequence[int] | None = None, label: str = "") -> DensityState:
    v = np.asarray(vector, dtype=np.complex128).reshape(-1)
    v = v / np.linalg.norm(v)
    dims = tuple(dims) if dims is not None else (v.size,)
    return DensityState(np.outer(v, v.conj()), dims, label)


def basis_state(name: str, dim: int = 2) -> DensityState:
    return pure(ket(name, dim), (dim,), name)


def maximally_mixed(dim: int) -> DensityState:
    return DensityState(np.eye(dim) / dim, (dim,), "mixed")


def product_state(locals_: Iterable[DensityState], label: str = "") -> DensityState:
    locals_ = list(locals_)
    if not locals_:
        raise ValidationError("product_state needs at least one factor")
    for s in locals_:
        if not isinstance(s, DensityState):
            raise ValidationError("product_state factors must be DensityState")
    dims = tuple(d for s in locals_ for d in s.dims)
    return DensityState(kron_all(s.matrix for s in locals_), dims, label)


def partial_trace(s: DensityState, keep: Iterable[int]) -> DensityState:
    """Reduced state on the subsystems ``keep`` (returned in ascending order)."""
    keep = sorted(set(int(k) for k in keep))
    n = len(s.dims)
    if not keep:
        raise ValidationError("partial_trace: keep set is empty")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValidationError(f"partial_trace: indices {keep} out of range for {n} subsystems")
    t = s.matrix.reshape(s.dims + s.dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = list(letters[:n])
    cols = [rows[k] if k not in keep else letters[n + k] for k in range(n)]
    out = "".join(rows[k] for k in keep) + "".join(cols[k] for k in keep)
    red = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    d = int(np.prod([s.dims[k] for k in keep]))
    return DensityState(red.reshape(d, d), tuple(s.dims[k] for k in keep), s.label)


_SIG = {k: letter_matrix(2, i) for k, i in (("x", 1), ("y", 2), ("z", 3))}
_I2 = np.eye(2, dtype=np.complex128)


@dataclass(frozen=True)
class BlochAM:
    """Coefficients of the probe/classical-mediator form
    rho = (I + r.sigma x I + s_z I x Z + t.sigma x Z) / 4."""

    r_A: tuple[float, float, float]
    s_z: float
    t_A: tuple[float, float, float]
    residuals: dict = field(default_factory=dict, compare=False)

    def reconstruct(self) -> np.ndarray:
        m = np.eye(4, dtype=np.complex128)
        z = letter_matrix(2, 3)
        for k, key in enumerate("xyz"):
            m = m + self.r_A[k] * np.kron(_SIG[key], _I2) + self.t_A[k] * np.kron(_SIG[key], z)
        m = m + self.s_z * np.kron(_I2, z)
        return m / 4

    def max_residual(self) -> float:
        return max((abs(v) for v in self.residuals.values()), default=0.0)


def bloch_decompose_AM(s: DensityState) -> BlochAM:
    """Split a probe-qubit x mediator-qubit state into the components that
    involve the mediator only through Z, plus the remaining residuals
    (I x X, I x Y, sigma_k x X, sigma_k x Y)."""
    if s.dims != (2, 2):
        raise ValidationError(f"bloch_decompose_AM needs dims (2, 2), got {s.dims}")
    z = letter_matrix(2, 3)
    r = tuple(s.expectation(np.kron(_SIG[k], _I2)) for k in "xyz")
    t = tuple(s.expectation(np.kron(_SIG[k], z)) for k in "xyz")
    sz = s.expectation(np.kron(_I2, z))
    residuals = {}
    for mk in "xy":
        residuals[f"I{mk.upper()}"] = s.expectation(np.kron(_I2, _SIG[mk]))
        for k in "xyz":
            residuals[f"{k.upper()}{mk.upper()}"] = s.expectation(np.kron(_SIG[k], _SIG[mk]))
    return BlochAM(r, sz, t, residuals)
