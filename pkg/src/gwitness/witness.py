"""Entanglement and distinguishability predicates.

Negativity is computed from the spectrum of the partial transpose and is
the only entanglement monotone used; for two qubits it vanishes exactly on
separable states.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .linalg import embed, eigvalsh, is_unitary, trace_norm
from .pauli import letter_matrix
from .rng import stream
from .states import DensityState, partial_trace

ENTANGLEMENT_TOL = 1e-9
DISTINGUISHABLE_TOL = 1e-9
NO_SIGNALLING_TOL = 1e-12


@dataclass(frozen=True)
class EntanglementVerdict:
    negativity: float
    ppt: bool
    bipartition: tuple[tuple, tuple]

    def to_dict(self) -> dict:
        return {
            "negativity": self.negativity,
            "ppt": self.ppt,
            "bipartition": [list(self.bipartition[0]), list(self.bipartition[1])],
            "threshold": ENTANGLEMENT_TOL,
        }


def partial_transpose(matrix: np.ndarray, dims: Sequence[int], sites: Sequence[int]) -> np.ndarray:
    """Transpose the subsystems ``sites``; works on stacks ``(..., D, D)``."""
    dims = tuple(dims)
    n = len(dims)
    m = np.asarray(matrix)
    batch = m.shape[:-2]
    b = len(batch)
    t = m.reshape(batch + dims + dims)
    perm = list(range(b + 2 * n))
    for k in sites:
        perm[b + k], perm[b + n + k] = perm[b + n + k], perm[b + k]
    return t.transpose(perm).reshape(m.shape)


def _check_bipartition(dims, bipartition):
    left, right = (tuple(int(i) for i in side) for side in bipartition)
    n = len(dims)
    if not left or not right or set(left) & set(right) or sorted(left + right) != list(range(n)):
        raise ValidationError(f"bipartition {bipartition} does not split {n} subsystems into two groups")
    return left, right


def negativity(s: DensityState, bipartition) -> EntanglementVerdict:
    """(||rho^T_right||_1 - 1) / 2 across ``bipartition = (left, right)``,
    given as subsystem indices."""
    left, right = _check_bipartition(s.dims, bipartition)
    pt = partial_transpose(s.matrix, s.dims, right)
    neg = max(0.0, (trace_norm(pt) - 1.0) / 2.0)
    return EntanglementVerdict(neg, neg <= ENTANGLEMENT_TOL, (left, right))


def negativity_batch(mats: np.ndarray, dims: Sequence[int], right: Sequence[int]) -> np.ndarray:
    pt = partial_transpose(mats, dims, right)
    w = eigvalsh(pt)
    return np.maximum(0.0, (np.sum(np.abs(w), axis=-1) - 1.0) / 2.0)


def trace_distance(a: DensityState, b: DensityState) -> float:
    if a.dims != b.dims:
        raise ValidationError(f"trace_distance: dims {a.dims} vs {b.dims}")
    return min(1.0, 0.5 * trace_norm(a.matrix - b.matrix))


def distinguishable(a: DensityState, b: DensityState) -> bool:
    """Single-shot distinguishability: trace distance >= 1 - 1e-9."""
    return trace_distance(a, b) >= 1.0 - DISTINGUISHABLE_TOL


@dataclass(frozen=True)
class NoSignallingVerdict:
    ok: bool
    distances: dict

    @property
    def max_distance(self) -> float:
        return max(self.distances.values(), default=0.0)


def no_signalling_audit(s: DensityState, local_unitary: np.ndarray, acted: int) -> NoSignallingVerdict:
    """Apply ``local_unitary`` to subsystem ``acted`` and compare every other
    subsystem's reduced state before and after."""
    u = np.asarray(local_unitary, dtype=np.complex128)
    if not 0 <= acted < len(s.dims):
        raise ValidationError(f"subsystem index {acted} out of range")
    if u.shape != (s.dims[acted], s.dims[acted]):
        raise ValidationError(f"unitary shape {u.shape} does not match subsystem dimension {s.dims[acted]}")
    if not is_unitary(u):
        raise ValidationError("local operation is not unitary")
    full = embed(u, [acted], s.dims)
    after = s.evolve(full)
    dist = {}
    for k in range(len(s.dims)):
        if k == acted:
            continue
        dist[k] = trace_distance(partial_trace(s, [k]), partial_trace(after, [k]))
    return NoSignallingVerdict(all(d <= NO_SIGNALLING_TOL for d in dist.values()), dist)


def _blocks_psd(r: np.ndarray, sz: np.ndarray, t: np.ndarray) -> np.ndarray:
    # The form is block diagonal in the mediator Z basis: block m is
    # ((1 +- s_z) I + (r +- t).sigma) / 4, PSD iff 1 +- s_z >= |r +- t|.
    up = 1.0 + sz - np.linalg.norm(r + t, axis=-1)
    down = 1.0 - sz - np.linalg.norm(r - t, axis=-1)
    return (up >= 0.0) & (down >= 0.0)


def bloch_reconstruct_batch(r: np.ndarray, sz: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Vectorised :meth:`BlochAM.reconstruct` over rows of ``r``, ``sz``, ``t``."""
    i2 = np.eye(2)
    z = letter_matrix(2, 3)
    sig = [letter_matrix(2, k) for k in (1, 2, 3)]
    out = np.broadcast_to(np.eye(4, dtype=np.complex128), (len(sz), 4, 4)).copy()
    for k in range(3):
        out += r[:, k, None, None] * np.kron(sig[k], i2) + t[:, k, None, None] * np.kron(sig[k], z)
    out += sz[:, None, None] * np.kron(i2, z)
    return out / 4


def eq4_separability_sweep(samples: int, seed: int, chunk: int = 200_000) -> dict:
    """Draw (r_A, s_z, t_A) uniformly from [-1, 1]^7, keep the draws that
    reconstruct a valid state, and test every kept state for PPT.

    ``samples`` is the number of accepted states. The report carries the
    acceptance rate, the largest negativity and the count of PPT failures.
    """
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    accepted = drawn = violations = 0
    max_neg = 0.0
    min_eig = np.inf
    block = 0
    while accepted < samples:
        rng = stream(seed, block)
        block += 1
        x = rng.uniform(-1.0, 1.0, size=(chunk, 7))
        drawn += chunk
        r, sz, t = x[:, 0:3], x[:, 3], x[:, 4:7]
        keep = _blocks_psd(r, sz, t)
        idx = np.nonzero(keep)[0][: samples - accepted]
        if idx.size == 0:
            continue
        if accepted + idx.size >= samples:
            # count only the draws consumed up to the last kept sample
            drawn -= chunk - int(idx[-1] + 1)
        rho = bloch_reconstruct_batch(r[idx], sz[idx], t[idx])
        min_eig = min(min_eig, float(np.min(eigvalsh(rho)[:, 0])))
        neg = negativity_batch(rho, (2, 2), [1])
        accepted += idx.size
        violations += int(np.sum(neg > ENTANGLEMENT_TOL))
        max_neg = max(max_neg, float(np.max(neg)))
    return {
        "accepted": accepted,
        "drawn": drawn,
        "acceptance_rate": accepted / drawn,
        "max_negativity": max_neg,
        "min_eigenvalue": min_eig,
        "ppt_violations": violations,
        "all_ppt": violations == 0,
        "threshold": ENTANGLEMENT_TOL,
        "seed": seed,
    }
