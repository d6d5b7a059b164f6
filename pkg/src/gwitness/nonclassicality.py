"""Quantum instantiations of information variables, superinformation media
and the classical / non-classical classification of a system.

A variable is a list of labeled attributes, each an orthonormal set of
vectors spanning a subspace. A task counts as possible when some unitary
(with a blank ancilla for copying) performs it; existence is decided by
inner-product conditions rather than by search.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .linalg import as_dense, commutator, dagger, eigvalsh, is_hermitian, is_unitary

VECTOR_TOL = 1e-10
ORTHO_TOL = 1e-10
COMMUTE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class VariableSpec:
    dim: int
    attributes: tuple[tuple[str, np.ndarray], ...]

    def __post_init__(self):
        attrs = []
        for label, vecs in self.attributes:
            v = np.atleast_2d(np.asarray(vecs, dtype=np.complex128))
            if v.shape[1] != self.dim:
                raise ValidationError(f"attribute {label!r}: vectors must have length {self.dim}")
            gram = v.conj() @ v.T
            if np.max(np.abs(gram - np.eye(len(v)))) > VECTOR_TOL:
                raise ValidationError(f"attribute {label!r}: vectors are not orthonormal within 1e-10")
            v.setflags(write=False)
            attrs.append((str(label), v))
        labels = [a[0] for a in attrs]
        if len(set(labels)) != len(labels):
            raise ValidationError(f"attribute labels must be distinct, got {labels}")
        object.__setattr__(self, "attributes", tuple(attrs))

    @classmethod
    def from_basis(cls, columns: np.ndarray, labels: Sequence[str] | None = None) -> "VariableSpec":
        """One single-vector attribute per column of ``columns``."""
        b = np.asarray(columns, dtype=np.complex128)
        labels = labels or [str(k) for k in range(b.shape[1])]
        return cls(b.shape[0], tuple((lab, b[:, k]) for lab, k in zip(labels, range(b.shape[1]))))

    @property
    def labels(self) -> list[str]:
        return [a[0] for a in self.attributes]

    def projectors(self) -> list[np.ndarray]:
        return [v.T @ v.conj() for _, v in self.attributes]

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "attributes": [
                {"label": label, "vectors": [[[z.real + 0.0, z.imag + 0.0] for z in row] for row in v]}
                for label, v in self.attributes
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "VariableSpec":
        dim = int(data["dim"])
        attrs = []
        for a in data["attributes"]:
            vecs = [[complex(p[0], p[1]) for p in vec] for vec in a["vectors"]]
            attrs.append((a["label"], np.array(vecs, dtype=np.complex128)))
        return cls(dim, tuple(attrs))


def z_basis(dim: int = 2) -> VariableSpec:
    return VariableSpec.from_basis(np.eye(dim))


def x_basis() -> VariableSpec:
    return VariableSpec.from_basis(np.array([[1, 1], [1, -1]]) / np.sqrt(2), ["+", "-"])


def fourier_basis(dim: int) -> VariableSpec:
    j, k = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    return VariableSpec.from_basis(np.exp(2j * np.pi * j * k / dim) / np.sqrt(dim))


@dataclass(frozen=True, eq=False)
class AlgebraBasis:
    """Orthogonal (trace inner product) Hermitian basis of a matrix algebra;
    the first element is the identity."""

    elements: tuple[np.ndarray, ...]
    commutative: bool

    @property
    def dimension(self) -> int:
        return len(self.elements)


def _hermitian_parts(m: np.ndarray):
    return 0.5 * (m + dagger(m)), -0.5j * (m - dagger(m))


def _orth_add(basis: list, cand: np.ndarray, scale: float) -> bool:
    r = cand.copy()
    for b in basis:
        r = r - (np.real(np.trace(b @ r)) / np.real(np.trace(b @ b))) * b
    # second pass for numerical orthogonality
    for b in basis:
        r = r - (np.real(np.trace(b @ r)) / np.real(np.trace(b @ b))) * b
    norm = np.sqrt(np.real(np.trace(r @ r)))
    if norm <= 1e-9 * scale:
        return False
    basis.append(0.5 * (r + dagger(r)) / norm)
    return True


def algebra_closure(generators: Sequence[np.ndarray]) -> AlgebraBasis:
    """Basis of the associative algebra generated by Hermitian
    ``generators`` (products are iterated until the dimension stops
    growing)."""
    gens = [as_dense(g) for g in generators]
    if not gens:
        raise ValidationError("algebra_closure needs at least one generator")
    n = gens[0].shape[0]
    for g in gens:
        if g.shape != (n, n):
            raise ValidationError("generators have different dimensions")
        if not is_hermitian(g):
            raise ValidationError("generators must be Hermitian")
    basis = [np.eye(n, dtype=np.complex128)]
    for g in gens:
        _orth_add(basis, g, max(1.0, np.linalg.norm(g)))
    grew = True
    while grew and len(basis) < n * n:
        grew = False
        current = list(basis)
        for a in current:
            for b in current:
                for part in _hermitian_parts(a @ b):
                    if _orth_add(basis, part, 1.0):
                        grew = True
    commutative = all(
        np.max(np.abs(commutator(a, b))) <= COMMUTE_TOL for a, b in combinations(basis, 2)
    )
    return AlgebraBasis(tuple(basis), commutative)


@dataclass(frozen=True, eq=False)
class InformationVariableVerdict:
    ok: bool
    max_overlap: float
    copy_possible: bool
    permutation: tuple[int, ...]
    permutation_unitary_exists: bool
    permutation_unitary: np.ndarray | None = None


def _permutation_unitary(v: VariableSpec, perm: Sequence[int]) -> np.ndarray | None:
    attrs = [a for _, a in v.attributes]
    if any(len(attrs[i]) != len(attrs[perm[i]]) for i in range(len(attrs))):
        return None
    u = np.zeros((v.dim, v.dim), dtype=np.complex128)
    span = np.zeros((v.dim, v.dim), dtype=np.complex128)
    for i, src in enumerate(attrs):
        dst = attrs[perm[i]]
        u += dst.T @ src.conj()
        span += src.T @ src.conj()
    u += np.eye(v.dim) - span
    return u if is_unitary(u) else None


def information_variable_check(v: VariableSpec, permutation: Sequence[int] | None = None) -> InformationVariableVerdict:
    """Copy and permutation tasks on ``v``.

    Copying (x, blank) -> (x, x) by a unitary requires the overlap o of any
    two vectors from distinct attributes to satisfy o = o**2, so o = 0
    between disjoint attributes. ``permutation`` defaults to the cyclic
    shift of attribute labels.
    """
    if len(v.attributes) < 2:
        raise ValidationError("an information variable check needs at least two attributes")
    k = len(v.attributes)
    perm = tuple(permutation) if permutation is not None else tuple((i + 1) % k for i in range(k))
    if sorted(perm) != list(range(k)):
        raise ValidationError(f"{perm} is not a permutation of {k} attributes")
    raw = [np.asarray(a @ b.conj().T).ravel() for (_, a), (_, b) in combinations(v.attributes, 2)]
    overlaps = np.concatenate(raw)
    copy_ok = bool(np.all(np.abs(overlaps - overlaps**2) <= ORTHO_TOL))
    max_overlap = float(np.max(np.abs(overlaps)))
    orthogonal = max_overlap <= ORTHO_TOL
    u = _permutation_unitary(v, perm) if orthogonal else None
    return InformationVariableVerdict(orthogonal and copy_ok, max_overlap, copy_ok, perm, u is not None, u)


def _principal_cosines(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cosines of the principal angles between span(a) and span(b), descending."""
    m = a.conj() @ b.T
    w = eigvalsh(m @ dagger(m))
    return np.sqrt(np.clip(w[::-1], 0.0, None))


def _same_subspace(a: np.ndarray, b: np.ndarray, cos: np.ndarray) -> bool:
    return len(a) == len(b) and cos[-1] >= 1.0 - ORTHO_TOL


@dataclass(frozen=True)
class SuperinformationVerdict:
    ok: bool
    z_information: bool
    v_information: bool
    disjoint: bool
    union_information: bool
    max_cross_overlap: float


def superinformation_check(z: VariableSpec, v: VariableSpec) -> SuperinformationVerdict:
    """Two information variables, geometrically disjoint (no attribute
    subspace of one shares a vector with one of the other), whose union is
    not an information variable.

    The union's attributes are the distinct subspaces of both variables, so
    it is an information variable iff every cross pair is orthogonal or
    identical.
    """
    if z.dim != v.dim:
        raise ValidationError(f"variables live in dimensions {z.dim} and {v.dim}")
    if len(z.attributes) != len(v.attributes):
        raise ValidationError("variables must have the same number of attributes")
    zi = information_variable_check(z).ok
    vi = information_variable_check(v).ok
    shared = 0.0
    union = zi and vi
    for _, a in z.attributes:
        for _, b in v.attributes:
            cos = _principal_cosines(a, b)
            shared = max(shared, float(cos[0]))
            # the union merges identical subspaces; any partial overlap breaks it
            if cos[0] > ORTHO_TOL and not _same_subspace(a, b, cos):
                union = False
    disjoint = shared < 1.0 - ORTHO_TOL
    return SuperinformationVerdict(zi and vi and disjoint and not union, zi, vi, disjoint, union, shared)


@dataclass(frozen=True)
class Classification:
    kind: str
    witness: tuple[int, int] | None = None

    @property
    def nonclassical(self) -> bool:
        return self.kind == "non-classical"


def classify_system(declared_variables: Sequence[VariableSpec]) -> Classification:
    """Non-classical iff some pair of declared variables passes
    :func:`superinformation_check`; pairs of mismatched shape are skipped."""
    if not declared_variables:
        raise ValidationError("classify_system needs at least one variable")
    for i, j in combinations(range(len(declared_variables)), 2):
        a, b = declared_variables[i], declared_variables[j]
        if a.dim != b.dim or len(a.attributes) != len(b.attributes):
            continue
        if superinformation_check(a, b).ok:
            return Classification("non-classical", (i, j))
    return Classification("classical")
