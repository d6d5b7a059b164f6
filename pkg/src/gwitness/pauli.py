"""Sparse operator algebra over labeled site layouts.

Qubit sites carry the letters I, X, Y, Z (with Y = iXZ = [[0, -i], [i, 0]]).
Sites of dimension d > 2 carry only the diagonal clock letters Z^k,
Z = diag(1, w, w^2, ...) with w = exp(2 pi i / d); Z^0 is the identity.
Letters are stored as small ints: for qubits 0..3 = I, X, Y, Z, for
qudits the power k.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Mapping

import numpy as np

from .errors import LayoutMismatchError, ValidationError
from .linalg import MAX_DENSE_DIM

PRUNE_TOL = 1e-14

QUBIT_LETTERS = "IXYZ"

# (a, b) -> (phase, c) with sigma_a sigma_b = phase * sigma_c
_QUBIT_TABLE: dict[tuple[int, int], tuple[complex, int]] = {}
for _a in range(4):
    _QUBIT_TABLE[(0, _a)] = (1, _a)
    _QUBIT_TABLE[(_a, 0)] = (1, _a)
    _QUBIT_TABLE[(_a, _a)] = (1, 0)
for _a, _b, _c in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
    _QUBIT_TABLE[(_a, _b)] = (1j, _c)
    _QUBIT_TABLE[(_b, _a)] = (-1j, _c)


@dataclass(frozen=True)
class SiteLayout:
    """Ordered list of named sites with their Hilbert-space dimensions."""

    sites: tuple[tuple[str, int], ...]

    def __post_init__(self):
        sites = tuple((str(label), int(dim)) for label, dim in self.sites)
        object.__setattr__(self, "sites", sites)
        labels = [s[0] for s in sites]
        if not sites:
            raise ValidationError("layout needs at least one site")
        if len(set(labels)) != len(labels):
            raise ValidationError(f"duplicate site labels in {labels}")
        for label, dim in sites:
            if dim < 2:
                raise ValidationError(f"site {label!r} has dimension {dim} < 2")

    @classmethod
    def qubits(cls, *labels: str) -> "SiteLayout":
        return cls(tuple((label, 2) for label in labels))

    @cached_property
    def labels(self) -> tuple[str, ...]:
        return tuple(s[0] for s in self.sites)

    @cached_property
    def dims(self) -> tuple[int, ...]:
        return tuple(s[1] for s in self.sites)

    @cached_property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def __len__(self):
        return len(self.sites)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValidationError(f"unknown site label {label!r}") from None

    def dim(self, label: str) -> int:
        return self.dims[self.index(label)]

    def sub(self, labels: Iterable[str]) -> "SiteLayout":
        return SiteLayout(tuple((label, self.dim(label)) for label in labels))


def n_letters(dim: int) -> int:
    return 4 if dim == 2 else dim


@lru_cache(maxsize=None)
def letter_matrix(dim: int, letter: int) -> np.ndarray:
    if dim == 2:
        m = {
            0: [[1, 0], [0, 1]],
            1: [[0, 1], [1, 0]],
            2: [[0, -1j], [1j, 0]],
            3: [[1, 0], [0, -1]],
        }[letter]
        out = np.array(m, dtype=np.complex128)
    else:
        w = np.exp(2j * np.pi * letter * np.arange(dim) / dim)
        out = np.diag(w)
    out.setflags(write=False)
    return out


def letter_text(dim: int, letter: int) -> str:
    if dim == 2:
        return QUBIT_LETTERS[letter]
    if letter == 0:
        return "I"
    return "Z" if letter == 1 else f"Z{letter}"


_TOKEN = re.compile(r"[IXY]|Z\d*")


def parse_string(text: str, layout: SiteLayout) -> tuple[int, ...]:
    """Parse e.g. "XZI" or "IZ2X" into a letter tuple for ``layout``."""
    tokens = _TOKEN.findall(text)
    if "".join(tokens) != text or len(tokens) != len(layout):
        raise ValidationError(f"cannot parse Pauli string {text!r} for {len(layout)} sites")
    letters = []
    for tok, dim in zip(tokens, layout.dims):
        if dim == 2:
            if tok not in QUBIT_LETTERS:
                raise ValidationError(f"letter {tok!r} invalid on a qubit site")
            letters.append(QUBIT_LETTERS.index(tok))
        else:
            if tok == "I":
                letters.append(0)
            elif tok.startswith("Z"):
                k = int(tok[1:] or 1) % dim
                letters.append(k)
            else:
                raise ValidationError(f"letter {tok!r} invalid on a {dim}-level site")
    return tuple(letters)


def _mul_letters(dim: int, a: int, b: int) -> tuple[complex, int]:
    if dim == 2:
        return _QUBIT_TABLE[(a, b)]
    return 1, (a + b) % dim


def mul_strings(layout: SiteLayout, a: tuple[int, ...], b: tuple[int, ...]):
    """Product of two strings: returns (phase, string), phase in {+-1, +-i}
    for qubit layouts."""
    phase = 1
    out = []
    for dim, x, y in zip(layout.dims, a, b):
        ph, z = _mul_letters(dim, x, y)
        phase *= ph
        out.append(z)
    return phase, tuple(out)


def _prune(terms: Mapping, tol: float) -> dict:
    return {k: complex(v) for k, v in terms.items() if abs(v) >= tol}


class PauliOp:
    """Weighted sum of letter strings over a fixed layout.

    Immutable; arithmetic returns new objects and drops coefficients with
    magnitude below 1e-14. Terms are kept in canonical (lexicographic)
    order. Use ``@`` for the operator product and ``*`` for scalars.
    """

    __slots__ = ("layout", "_terms")

    def __init__(self, layout: SiteLayout, terms: Mapping | None = None, *, tol: float = PRUNE_TOL):
        self.layout = layout
        clean = {}
        for key, coeff in (terms or {}).items():
            key = tuple(int(x) for x in key)
            if len(key) != len(layout):
                raise ValidationError("string length does not match layout")
            for dim, letter in zip(layout.dims, key):
                if not 0 <= letter < n_letters(dim):
                    raise ValidationError(f"letter {letter} invalid for dimension {dim}")
            clean[key] = clean.get(key, 0) + complex(coeff)
        self._terms = dict(sorted(_prune(clean, tol).items()))

    # construction helpers
    @classmethod
    def identity(cls, layout: SiteLayout) -> "PauliOp":
        return cls(layout, {(0,) * len(layout): 1.0})

    @classmethod
    def zero(cls, layout: SiteLayout) -> "PauliOp":
        return cls(layout)

    @classmethod
    def single(cls, layout: SiteLayout, letters: Mapping[str, str | int], coeff: complex = 1.0) -> "PauliOp":
        """Operator with the given letters on named sites and I elsewhere,
        e.g. ``PauliOp.single(layout, {"A": "X", "M": "Z"})``."""
        key = [0] * len(layout)
        for label, letter in letters.items():
            i = layout.index(label)
            dim = layout.dims[i]
            if isinstance(letter, str):
                sub = SiteLayout(((label, dim),))
                letter = parse_string(letter, sub)[0]
            key[i] = int(letter)
        return cls(layout, {tuple(key): coeff})

    @classmethod
    def from_text(cls, layout: SiteLayout, pairs: Iterable) -> "PauliOp":
        """Build from ``[(text, coeff), ...]`` where coeff is complex or [re, im]."""
        terms: dict = {}
        for text, coeff in pairs:
            if isinstance(coeff, (list, tuple)):
                coeff = complex(coeff[0], coeff[1])
            key = parse_string(text, layout)
            terms[key] = terms.get(key, 0) + complex(coeff)
        return cls(layout, terms)

    @classmethod
    def from_dense(cls, matrix: np.ndarray, layout: SiteLayout, *, tol: float = PRUNE_TOL,
                   check: bool = True) -> "PauliOp":
        """Expand a dense matrix in the letter basis: c_P = Tr(P^dagger M) / D.

        Raises ValidationError when ``check`` is set and the matrix has weight
        outside the span of the available letters (off-diagonal parts on
        qudit sites).
        """
        coeffs = pauli_coefficients(matrix, layout)
        if check and any(d > 2 for d in layout.dims):
            m = np.asarray(matrix)
            # Parseval: sum |c|^2 * D == ||M||_F^2 iff M lies in the span
            captured = np.sum(np.abs(coeffs) ** 2) * layout.total_dim
            total = np.sum(np.abs(m) ** 2)
            if total - captured > 1e-10 * max(1.0, total):
                raise ValidationError("operator is not representable with diagonal qudit letters")
        idx = np.nonzero(np.abs(coeffs) >= tol)
        terms = {tuple(int(i) for i in key): coeffs[key] for key in zip(*idx)}
        return cls(layout, terms, tol=tol)

    # mapping-like access
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def coeff(self, key) -> complex:
        if isinstance(key, str):
            key = parse_string(key, self.layout)
        return self._terms.get(tuple(key), 0j)

    def is_zero(self) -> bool:
        return not self._terms

    # arithmetic
    def _check(self, other: "PauliOp"):
        if not isinstance(other, PauliOp):
            raise TypeError(f"expected PauliOp, got {type(other).__name__}")
        if other.layout != self.layout:
            raise LayoutMismatchError("operators live on different layouts")

    def __add__(self, other: "PauliOp") -> "PauliOp":
        self._check(other)
        terms = dict(self._terms)
        for k, v in other._terms.items():
            terms[k] = terms.get(k, 0) + v
        return PauliOp(self.layout, terms)

    def __sub__(self, other: "PauliOp") -> "PauliOp":
        return self + (-1) * other

    def __neg__(self) -> "PauliOp":
        return (-1) * self

    def __mul__(self, scalar) -> "PauliOp":
        if isinstance(scalar, PauliOp):
            raise TypeError("use @ (or pauli_mul) for operator products")
        scalar = complex(scalar)
        return PauliOp(self.layout, {k: scalar * v for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __matmul__(self, other: "PauliOp") -> "PauliOp":
        return pauli_mul(self, other)

    def __eq__(self, other):
        if not isinstance(other, PauliOp):
            return NotImplemented
        return self.layout == other.layout and self._terms == other._terms

    __hash__ = None

    def dagger(self) -> "PauliOp":
        terms = {}
        for key, v in self._terms.items():
            new = tuple(x if d == 2 else (-x) % d for d, x in zip(self.layout.dims, key))
            terms[new] = v.conjugate()
        return PauliOp(self.layout, terms)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        diff = self - self.dagger()
        return all(abs(v) <= tol for v in diff._terms.values())

    def allclose(self, other: "PauliOp", tol: float = 1e-12) -> bool:
        self._check(other)
        keys = set(self._terms) | set(other._terms)
        return all(abs(self.coeff(k) - other.coeff(k)) <= tol for k in keys)

    # structure
    def support(self) -> frozenset[str]:
        labels = self.layout.labels
        out = set()
        for key in self._terms:
            out.update(labels[i] for i, x in enumerate(key) if x != 0)
        return frozenset(out)

    def max_abs_coeff(self) -> float:
        return max((abs(v) for v in self._terms.values()), default=0.0)

    def text(self, key) -> str:
        return "".join(letter_text(d, x) for d, x in zip(self.layout.dims, key))

    def to_pairs(self) -> list:
        """Report form: ``[[text, [re, im]], ...]``."""
        return [[self.text(k), [v.real, v.imag]] for k, v in self._terms.items()]

    def restrict(self, labels) -> "PauliOp":
        """Re-express on the sub-layout ``labels``; the operator must act as
        identity elsewhere."""
        sub = self.layout.sub(labels)
        pos = [self.layout.index(label) for label in labels]
        terms = {}
        for key, v in self._terms.items():
            if any(x != 0 for i, x in enumerate(key) if i not in pos):
                raise ValidationError(f"operator support {sorted(self.support())} exceeds {list(labels)}")
            terms[tuple(key[i] for i in pos)] = v
        return PauliOp(sub, terms)

    def to_dense(self) -> np.ndarray:
        return to_dense(self)

    def __repr__(self):
        if not self._terms:
            return "PauliOp(0)"
        parts = [f"({v.real:+.6g}{v.imag:+.6g}j)*{self.text(k)}" for k, v in self._terms.items()]
        return "PauliOp(" + " + ".join(parts) + ")"


def pauli_mul(a: PauliOp, b: PauliOp) -> PauliOp:
    """Exact product ``a b`` with phases tracked per site."""
    a._check(b)
    terms: dict = {}
    for ka, va in a._terms.items():
        for kb, vb in b._terms.items():
            phase, kc = mul_strings(a.layout, ka, kb)
            terms[kc] = terms.get(kc, 0) + phase * va * vb
    return PauliOp(a.layout, terms)


def commutator(a: PauliOp, b: PauliOp) -> PauliOp:
    """``ab - ba``; the empty operator means exactly zero."""
    a._check(b)
    terms: dict = {}
    for ka, va in a._terms.items():
        for kb, vb in b._terms.items():
            p1, kc = mul_strings(a.layout, ka, kb)
            p2, _ = mul_strings(a.layout, kb, ka)
            if p1 == p2:
                continue
            terms[kc] = terms.get(kc, 0) + (p1 - p2) * va * vb
    return PauliOp(a.layout, terms)


@lru_cache(maxsize=65536)
def string_matrix(layout: SiteLayout, key: tuple[int, ...]) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for dim, letter in zip(layout.dims, key):
        out = np.kron(out, letter_matrix(dim, letter))
    out.setflags(write=False)
    return out


def to_dense(op: PauliOp) -> np.ndarray:
    """Exact dense matrix of ``op``; refuses layouts above 2**12."""
    layout = op.layout
    if layout.total_dim > MAX_DENSE_DIM:
        raise ValidationError(f"total dimension {layout.total_dim} exceeds cap {MAX_DENSE_DIM}")
    n_strings = int(np.prod([n_letters(d) for d in layout.dims]))
    if len(op) > 8 and n_strings <= 4096:
        coeffs = np.zeros([n_letters(d) for d in layout.dims], dtype=np.complex128)
        for key, v in op.items():
            coeffs[key] = v
        return from_coefficients(coeffs, layout)
    out = np.zeros((layout.total_dim, layout.total_dim), dtype=np.complex128)
    for key, v in op.items():
        out += v * string_matrix(layout, key)
    return out


def from_coefficients(coeffs: np.ndarray, layout: SiteLayout) -> np.ndarray:
    """Inverse of :func:`pauli_coefficients`: sum_P c_P P as a dense matrix."""
    dims = layout.dims
    n = len(dims)
    t = np.asarray(coeffs, dtype=np.complex128)
    for k in range(n):
        t = np.tensordot(t, _local_basis(dims[k]), axes=([0], [0]))
    # axes are now (r0, c0, r1, c1, ...)
    t = t.transpose([2 * k for k in range(n)] + [2 * k + 1 for k in range(n)])
    return t.reshape(layout.total_dim, layout.total_dim)


@lru_cache(maxsize=None)
def _local_basis(dim: int) -> np.ndarray:
    return np.stack([letter_matrix(dim, k) for k in range(n_letters(dim))])


def pauli_coefficients(matrix: np.ndarray, layout: SiteLayout) -> np.ndarray:
    """Tensor of c_P = Tr(P^dagger M) / D indexed by letters, one axis per site."""
    dims = layout.dims
    n = len(dims)
    m = np.asarray(matrix, dtype=np.complex128)
    if m.shape != (layout.total_dim, layout.total_dim):
        raise ValidationError(f"matrix shape {m.shape} does not match layout dimension {layout.total_dim}")
    t = m.reshape(dims + dims)
    # contract site k's (row, col) pair with conj(B_l)[row, col]; the new
    # letter axis is appended at the end so after n steps axes are letters
    for k in range(n):
        basis = _local_basis(dims[k]).conj()
        rows = n - k
        t = np.tensordot(t, basis, axes=([0, rows], [1, 2]))
    return t / layout.total_dim


def all_strings(layout: SiteLayout):
    return itertools.product(*(range(n_letters(d)) for d in layout.dims))
