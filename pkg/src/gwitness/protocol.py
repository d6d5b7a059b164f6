"""Run a staged protocol in both pictures and decide what its outcome
witnesses.

States evolve as rho -> U rho U^dagger. Descriptors are always the t0 sets
conjugated by the accumulated unitary, q(t) = U(t)^dagger q(t0) U(t), which
keeps Tr(rho(t0) q(t)) == Tr(rho(t) q(t0)) at every boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .descriptors import (
    DescriptorSet,
    LocalityVerdict,
    MicrocausalityVerdict,
    evolve_descriptors,
    expectations,
    init_descriptors,
    locality_audit,
    microcausality_check,
)
from .errors import NumericalError
from .linalg import is_unitary
from .mediators import CompatibilityVerdict, classical_compatibility, step_unitary
from .specs import ProtocolSpec
from .states import DensityState, partial_trace
from .witness import DISTINGUISHABLE_TOL, ENTANGLEMENT_TOL, negativity, trace_distance

INITS = ("plus", "minus")
PICTURE_TOL = 1e-10

FIRES = "witness_fires_nonclassical"
CLASSICAL = "classical_consistent"
INVALID = "witness_invalid_nonlocal"


@dataclass(frozen=True, eq=False)
class Boundary:
    """Record at one stage boundary (index 0 is t0)."""

    tag: str
    stage: str | None
    sites: tuple[str, ...]
    states: dict
    descriptors: list
    microcausality: MicrocausalityVerdict | None
    picture_deviation: float


@dataclass(frozen=True, eq=False)
class StepRecord:
    stage: str
    index: int
    acts_on: tuple[str, ...]
    description: str
    compatibility: CompatibilityVerdict
    locality: tuple[LocalityVerdict, ...]


@dataclass(frozen=True, eq=False)
class ProtocolTrace:
    spec: ProtocolSpec
    boundaries: list[Boundary]
    steps: list[StepRecord]

    def final(self, which: str) -> DensityState:
        return self.boundaries[-1].states[which]

    @property
    def locality_ok(self) -> bool:
        return all(v.ok for s in self.steps for v in s.locality)

    @property
    def classical_ok(self) -> bool:
        return all(s.compatibility.ok for s in self.steps)


def _audit_subjects(spec: ProtocolSpec, acts_on) -> list[tuple[str, tuple[str, ...]]]:
    """(subsystem, step_sites) pairs the locality audit checks for one step.

    Subsystems off the step are audited against the step's sites. A step
    joining both probes is audited as if it acted on each probe alone: the
    other probe's descriptors must then stay fixed.
    """
    acts = set(acts_on)
    out = [(label, tuple(acts_on)) for label in spec.layout.labels if label not in acts]
    if set(spec.probes) <= acts:
        for probe in spec.probes:
            out.append((probe, tuple(s for s in acts_on if s != probe)))
    return out


def run(spec: ProtocolSpec, *, microcausality: bool = True) -> ProtocolTrace:
    """Evolve both initializations through every stage and record states,
    descriptors and per-step audits.

    ``microcausality`` toggles the sparse commutator check at each boundary
    (quadratic in descriptor size; sampling campaigns switch it off).
    """
    layout = spec.layout
    dim = layout.total_dim
    rho0 = {w: spec.initial_state(w) for w in INITS}
    d0 = init_descriptors(layout, spec.classical_sites)

    def boundary(tag, stage, sites, states, sets):
        mc = microcausality_check(sets) if microcausality else None
        dev = 0.0
        for w in INITS:
            heis = expectations(sets, rho0[w].matrix)
            schr = expectations(d0, states[w].matrix)
            dev = max(dev, max(abs(heis[k] - schr[k]) for k in heis))
        return Boundary(tag, stage, sites, dict(states), sets, mc, dev)

    states = dict(rho0)
    boundaries = [boundary("t0", None, (), states, d0)]
    records = []
    total = np.eye(dim, dtype=np.complex128)
    current = d0
    for n, stage in enumerate(spec.stages, start=1):
        tag = f"t{n}"
        for k, step in enumerate(stage.steps):
            u = step_unitary(step, layout)
            total = u @ total
            states = {w: states[w].evolve(u) for w in INITS}
            after = evolve_descriptors(d0, total, tag)
            before_by = {d.subsystem_label: d for d in current}
            after_by = {d.subsystem_label: d for d in after}
            audits = tuple(
                locality_audit(before_by[label], after_by[label], sites)
                for label, sites in _audit_subjects(spec, step.acts_on)
            )
            compat = classical_compatibility(step, spec.mediator, layout)
            records.append(StepRecord(stage.label, k, step.acts_on, step.describe(), compat, audits))
            current = after
        if not is_unitary(total):
            raise NumericalError(f"accumulated evolution lost unitarity at stage {stage.label!r}")
        if not stage.steps:
            current = [DescriptorSet(d.subsystem_label, d.components, tag, d.classical) for d in current]
        boundaries.append(boundary(tag, stage.label, stage.sites, states, current))
    return ProtocolTrace(spec, boundaries, records)


def _probe_indices(spec: ProtocolSpec) -> list[int]:
    return [spec.layout.index(p) for p in spec.probes]


@dataclass(frozen=True)
class TaskVerdict:
    ok: bool
    distance: float
    negativity: dict

    @property
    def distinguishable(self) -> bool:
        return self.distance >= 1.0 - DISTINGUISHABLE_TOL


def probe_negativities(trace: ProtocolTrace, boundary: int = -1) -> dict:
    probes = _probe_indices(trace.spec)
    out = {}
    for w in INITS:
        red = partial_trace(trace.boundaries[boundary].states[w], probes)
        out[w] = negativity(red, ([0], [1])).negativity
    return out


def task_te_check(trace: ProtocolTrace) -> TaskVerdict:
    """Final probe states must be entangled in both runs and single-shot
    distinguishable from each other."""
    probes = _probe_indices(trace.spec)
    e = {w: partial_trace(trace.final(w), probes) for w in INITS}
    dist = trace_distance(e["plus"], e["minus"])
    negs = probe_negativities(trace)
    ok = dist >= 1.0 - DISTINGUISHABLE_TOL and all(v > ENTANGLEMENT_TOL for v in negs.values())
    return TaskVerdict(ok, dist, negs)


@dataclass(frozen=True)
class FactorizationVerdict:
    ok: bool
    pattern: tuple[str, ...]
    reasons: tuple[str, ...] = ()


def factorization_audit(spec: ProtocolSpec) -> FactorizationVerdict:
    """Every stage must be confined to one probe plus the mediator; no stage
    may declare both probes."""
    a, b = spec.probes
    m = spec.mediator
    pattern, reasons = [], []
    for stage in spec.stages:
        sites = set(stage.sites)
        if {a, b} <= sites:
            pattern.append(f"{a}+{b}")
            reasons.append(f"stage {stage.label!r} declares both probes")
        elif sites <= {a, m}:
            pattern.append(f"{a}+{m}")
        elif sites <= {m, b}:
            pattern.append(f"{m}+{b}")
        else:
            pattern.append("+".join(sorted(sites)))
            reasons.append(f"stage {stage.label!r} has unmediated sites {sorted(sites)}")
    return FactorizationVerdict(not reasons, tuple(pattern), tuple(reasons))


@dataclass(frozen=True)
class BoundaryAnalysis:
    tag: str
    stage: str
    probe: str
    mediator_distance: float
    joint_distance: float

    @property
    def mediator_distinguishable(self) -> bool:
        return self.mediator_distance >= 1.0 - DISTINGUISHABLE_TOL

    @property
    def joint_distinguishable(self) -> bool:
        return self.joint_distance >= 1.0 - DISTINGUISHABLE_TOL

    def to_dict(self) -> dict:
        return {
            "tag": self.tag,
            "stage": self.stage,
            "probe": self.probe,
            "mediator_distance": self.mediator_distance,
            "mediator_distinguishable": self.mediator_distinguishable,
            "joint_distance": self.joint_distance,
            "joint_distinguishable": self.joint_distinguishable,
        }


@dataclass(frozen=True)
class MediatorAnalysis:
    """Proxies for the properties of the mediator's t1 descriptors: its
    reduced states are not single-shot distinguishable while the joint
    probe+mediator states are, and some step engages a second variable."""

    suppressed: bool
    note: str = ""
    first: BoundaryAnalysis | None = None
    boundaries: tuple[BoundaryAnalysis, ...] = ()
    non_classical_usage: bool = False

    def to_dict(self) -> dict:
        if self.suppressed:
            return {"suppressed": True, "note": self.note, "proxy": True}
        return {
            "suppressed": False,
            "proxy": True,
            "note": self.note,
            "t1": self.first.to_dict() if self.first else None,
            "boundaries": [b.to_dict() for b in self.boundaries],
            "non_classical_usage": self.non_classical_usage,
        }


def mediator_variable_analysis(trace: ProtocolTrace) -> MediatorAnalysis:
    spec = trace.spec
    fact = factorization_audit(spec)
    if not fact.ok:
        return MediatorAnalysis(True, "analysis suppressed: witness invalid (" + "; ".join(fact.reasons) + ")")
    m = spec.layout.index(spec.mediator)
    first_probe = spec.probes[0]
    rows = []
    for b in trace.boundaries[1:]:
        if spec.mediator not in b.sites:
            continue
        probes = [p for p in spec.probes if p in b.sites]
        if len(probes) != 1:
            continue
        p = spec.layout.index(probes[0])
        red_m = {w: partial_trace(b.states[w], [m]) for w in INITS}
        joint = {w: partial_trace(b.states[w], [p, m]) for w in INITS}
        rows.append(BoundaryAnalysis(
            b.tag, b.stage, probes[0],
            trace_distance(red_m["plus"], red_m["minus"]),
            trace_distance(joint["plus"], joint["minus"]),
        ))
    first = next((r for r in rows if r.probe == first_probe), rows[0] if rows else None)
    usage = not trace.classical_ok
    note = "" if rows else "no probe+mediator stage boundary"
    return MediatorAnalysis(False, note, first, tuple(rows), usage)


@dataclass(frozen=True, eq=False)
class WitnessReport:
    name: str
    negativity_AB: dict
    task: TaskVerdict
    factorization: FactorizationVerdict
    locality_ok: bool
    locality_failures: list
    classical_ok: bool
    incompatible_steps: list
    analysis: MediatorAnalysis
    final_verdict: str
    mediator_purity: dict = field(default_factory=dict)
    microcausality: list = field(default_factory=list)
    picture_deviation: float = 0.0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "final_verdict": self.final_verdict,
            "negativity_AB": dict(self.negativity_AB),
            "entangled": {w: v > ENTANGLEMENT_TOL for w, v in self.negativity_AB.items()},
            "e_distinguishability": {"trace_distance": self.task.distance,
                                     "distinguishable": self.task.distinguishable},
            "task_te": self.task.ok,
            "factorization": {"ok": self.factorization.ok, "pattern": list(self.factorization.pattern),
                              "reasons": list(self.factorization.reasons)},
            "locality": {"ok": self.locality_ok, "failures": self.locality_failures},
            "classical_compatibility": {"ok": self.classical_ok, "incompatible_steps": self.incompatible_steps},
            "mediator_analysis": self.analysis.to_dict(),
            "mediator_purity_final": dict(self.mediator_purity),
            "microcausality": self.microcausality,
            "picture_consistency": {"max_deviation": self.picture_deviation, "ok": self.picture_deviation <= PICTURE_TOL},
            "thresholds": {"entanglement": ENTANGLEMENT_TOL, "distinguishability": DISTINGUISHABLE_TOL,
                           "picture": PICTURE_TOL},
        }


def verdict(trace: ProtocolTrace, task: TaskVerdict, fact: FactorizationVerdict,
            analysis: MediatorAnalysis) -> WitnessReport:
    locality_failures = [
        {"stage": s.stage, "step": s.index, "subsystem": v.subsystem, "step_sites": list(v.step_sites),
         "max_change": v.max_change}
        for s in trace.steps for v in s.locality if not v.ok
    ]
    incompatible = [
        {"stage": s.stage, "step": s.index, "gate": s.description, "violation": s.compatibility.violation}
        for s in trace.steps if not s.compatibility.ok
    ]
    locality_ok = not locality_failures
    if not (fact.ok and locality_ok):
        final = INVALID
    elif task.ok:
        final = FIRES
    else:
        final = CLASSICAL
    m = trace.spec.layout.index(trace.spec.mediator)
    purity = {w: partial_trace(trace.final(w), [m]).purity() for w in INITS}
    micro = [
        {"tag": b.tag, "ok": b.microcausality.ok, "max_violation": b.microcausality.max_violation}
        for b in trace.boundaries if b.microcausality is not None
    ]
    return WitnessReport(
        name=trace.spec.name,
        negativity_AB=task.negativity,
        task=task,
        factorization=fact,
        locality_ok=locality_ok,
        locality_failures=locality_failures,
        classical_ok=not incompatible,
        incompatible_steps=incompatible,
        analysis=analysis,
        final_verdict=final,
        mediator_purity=purity,
        microcausality=micro,
        picture_deviation=max(b.picture_deviation for b in trace.boundaries),
    )


def evaluate(spec: ProtocolSpec, *, microcausality: bool = True) -> tuple[ProtocolTrace, WitnessReport]:
    """Run ``spec`` and compute every audit and the final verdict."""
    trace = run(spec, microcausality=microcausality)
    report = verdict(trace, task_te_check(trace), factorization_audit(spec), mediator_variable_analysis(trace))
    return trace, report
