"""Heisenberg-picture descriptors of the subsystems of a layout.

A quantum qubit site starts with the triple (X, Y, Z) on that site padded
by identities; a classical site starts with a single component: its one
observable, sigma_z for a qubit or diag(d-1, d-3, ..., 1-d) for a d-level
site. Descriptors evolve as q -> U^dagger q U and are stored as exact
Pauli expansions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import NumericalError, ValidationError
from .linalg import dagger, is_unitary
from .pauli import PauliOp, SiteLayout, commutator, to_dense

EVOLVE_PRUNE_TOL = 1e-12


@dataclass(frozen=True)
class DescriptorSet:
    subsystem_label: str
    components: tuple[tuple[str, PauliOp], ...]
    timestamp_tag: str = "t0"
    classical: bool = False

    @property
    def layout(self) -> SiteLayout:
        return self.components[0][1].layout

    def component(self, name: str) -> PauliOp:
        for label, op in self.components:
            if label == name:
                return op
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "subsystem": self.subsystem_label,
            "timestamp": self.timestamp_tag,
            "classical": self.classical,
            "components": {label: op.to_pairs() for label, op in self.components},
        }


def classical_observable(dim: int) -> np.ndarray:
    """diag(d-1, d-3, ..., 1-d); equals sigma_z for d = 2."""
    return np.diag(np.arange(dim - 1, -dim, -2).astype(np.complex128))


def init_descriptors(layout: SiteLayout, classical_sites: Iterable[str] = ()) -> list[DescriptorSet]:
    classical = set(classical_sites)
    unknown = classical - set(layout.labels)
    if unknown:
        raise ValidationError(f"classical sites {sorted(unknown)} not in layout")
    sets = []
    for label, dim in layout.sites:
        if label in classical:
            if dim == 2:
                z = PauliOp.single(layout, {label: "Z"})
            else:
                # local expansion in clock letters, then padded with identities
                local = PauliOp.from_dense(classical_observable(dim), layout.sub([label]))
                pos = layout.index(label)
                z = PauliOp(layout, {
                    tuple(k[0] if i == pos else 0 for i in range(len(layout))): v
                    for k, v in local.items()
                })
            comps = (("z", z),)
        else:
            if dim != 2:
                raise ValidationError(f"quantum site {label!r} must be a qubit (dimension {dim})")
            comps = tuple((c, PauliOp.single(layout, {label: c.upper()})) for c in "xyz")
        sets.append(DescriptorSet(label, comps, "t0", label in classical))
    return sets


def evolve_descriptors(sets: Sequence[DescriptorSet], u: np.ndarray, tag: str | None = None) -> list[DescriptorSet]:
    """Conjugate every component by ``u`` and re-expand in the letter basis.

    Coefficients below 1e-12 are dropped. Raises ValidationError for a
    non-unitary ``u`` and NumericalError if an evolved qubit-site component
    fails to square to the identity.
    """
    if not sets:
        return []
    layout = sets[0].layout
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (layout.total_dim, layout.total_dim) or not is_unitary(u):
        raise ValidationError("evolve_descriptors: u must be unitary on the full layout")
    ud = dagger(u)
    eye = np.eye(layout.total_dim)
    out = []
    for d in sets:
        comps = []
        for name, op in d.components:
            m = ud @ to_dense(op) @ u
            if layout.dim(d.subsystem_label) == 2 and np.max(np.abs(m @ m - eye)) > 1e-10:
                raise NumericalError(f"evolved descriptor {d.subsystem_label}.{name} is not an involution")
            comps.append((name, PauliOp.from_dense(m, layout, tol=EVOLVE_PRUNE_TOL)))
        out.append(DescriptorSet(d.subsystem_label, tuple(comps), tag or d.timestamp_tag, d.classical))
    return out


def support(d: DescriptorSet) -> frozenset[str]:
    out: set[str] = set()
    for _, op in d.components:
        out |= op.support()
    return frozenset(out)


@dataclass(frozen=True)
class MicrocausalityVerdict:
    ok: bool
    max_violation: float
    pairs_checked: int
    worst_pair: tuple[str, str] | None = None


def microcausality_check(sets: Sequence[DescriptorSet]) -> MicrocausalityVerdict:
    """Every component of one subsystem must commute exactly with every
    component of every other subsystem (sparse commutator is empty)."""
    tags = {d.timestamp_tag for d in sets}
    if len(tags) > 1:
        raise ValidationError(f"descriptor sets carry mixed timestamps {sorted(tags)}")
    worst = 0.0
    worst_pair = None
    n = 0
    for i, a in enumerate(sets):
        for b in sets[i + 1:]:
            for ca, qa in a.components:
                for cb, qb in b.components:
                    n += 1
                    v = commutator(qa, qb).max_abs_coeff()
                    if v > worst:
                        worst = v
                        worst_pair = (f"{a.subsystem_label}.{ca}", f"{b.subsystem_label}.{cb}")
    return MicrocausalityVerdict(worst == 0.0, worst, n, worst_pair)


@dataclass(frozen=True)
class LocalityVerdict:
    ok: bool
    subsystem: str
    step_sites: tuple[str, ...]
    max_change: float


def locality_audit(before: DescriptorSet, after: DescriptorSet, step_sites: Iterable[str]) -> LocalityVerdict:
    """A step on ``step_sites`` must leave this subsystem's descriptors
    exactly unchanged."""
    sites = tuple(sorted(step_sites))
    if before.subsystem_label != after.subsystem_label:
        raise ValidationError("locality_audit: before/after describe different subsystems")
    if before.subsystem_label in sites:
        raise ValidationError(f"subsystem {before.subsystem_label!r} is acted on by the audited step")
    change = 0.0
    for (na, qa), (nb, qb) in zip(before.components, after.components):
        if na != nb:
            raise ValidationError("component labels differ between before and after")
        change = max(change, (qb - qa).max_abs_coeff())
    return LocalityVerdict(change == 0.0, before.subsystem_label, sites, change)


def expectations(sets: Sequence[DescriptorSet], rho: np.ndarray) -> dict[str, float]:
    """Tr(rho q) for every component, keyed ``"<subsystem>.<component>"``."""
    out = {}
    for d in sets:
        for name, op in d.components:
            out[f"{d.subsystem_label}.{name}"] = float(np.real(np.trace(rho @ to_dense(op))))
    return out
