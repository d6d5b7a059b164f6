"""Step unitaries, the classical-compatibility test and the protocol
families used by the demos and sampling campaigns."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .descriptors import classical_observable
from .errors import ValidationError
from .linalg import commutator, embed, expm_hermitian_generator, operator_norm
from .pauli import PauliOp, SiteLayout, letter_matrix
from .rng import stream
from .specs import ProtocolSpec, Stage, StepSpec
from .states import basis_state

COMPATIBILITY_TOL = 1e-12
FAMILIES = ("classical_local", "quantum_local", "nonlocal_direct")


def _rot(letter: int, angle: float) -> np.ndarray:
    return np.cos(angle / 2) * np.eye(2) - 1j * np.sin(angle / 2) * letter_matrix(2, letter)


@lru_cache(maxsize=None)
def _fixed_gate(name: str) -> np.ndarray:
    if name == "H":
        m = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    elif name == "CNOT":
        m = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    elif name == "CZ":
        m = np.diag([1, 1, 1, -1])
    else:
        raise ValidationError(f"unknown gate {name!r}")
    out = np.asarray(m, dtype=np.complex128)
    out.setflags(write=False)
    return out


def local_unitary(step: StepSpec, layout: SiteLayout) -> np.ndarray:
    """The step's unitary on its own sites, in ``acts_on`` order."""
    for site in step.acts_on:
        layout.index(site)
    if step.hamiltonian is not None:
        if step.hamiltonian.layout != layout:
            raise ValidationError("step hamiltonian is defined over a different layout")
        h = step.hamiltonian.restrict(step.acts_on).to_dense()
        return expm_hermitian_generator(h, step.angle)
    if any(layout.dim(s) != 2 for s in step.acts_on):
        raise ValidationError(f"named gate {step.gate} needs qubit sites")
    if step.gate in ("RX", "RY", "RZ"):
        return _rot("XYZ".index(step.gate[1]) + 1, step.angle)
    if step.gate == "CPHASE":
        return np.diag([1, 1, 1, np.exp(1j * step.angle)]).astype(np.complex128)
    return _fixed_gate(step.gate)


def step_unitary(step: StepSpec, layout: SiteLayout) -> np.ndarray:
    """Full-layout unitary of ``step``; identity off ``acts_on``."""
    sites = [layout.index(s) for s in step.acts_on]
    return embed(local_unitary(step, layout), sites, layout.dims)


@dataclass(frozen=True)
class CompatibilityVerdict:
    ok: bool
    violation: float


def classical_compatibility(step: StepSpec, mediator_site: str, layout: SiteLayout) -> CompatibilityVerdict:
    """Does the step engage the mediator only through its classical observable?

    True iff the step unitary commutes (entrywise to 1e-12) with every
    spectral projector of the mediator's observable, i.e. it is block
    diagonal in the mediator's Z basis. ``violation`` is the operator norm
    of the commutator with the observable itself.
    """
    if mediator_site not in step.acts_on:
        return CompatibilityVerdict(True, 0.0)
    u = local_unitary(step, layout)
    sub = layout.sub(step.acts_on)
    pos = step.acts_on.index(mediator_site)
    d = layout.dim(mediator_site)
    worst = 0.0
    for k in range(d):
        proj = np.zeros((d, d), dtype=np.complex128)
        proj[k, k] = 1.0
        worst = max(worst, float(np.max(np.abs(commutator(u, embed(proj, [pos], sub.dims))))))
    z = embed(classical_observable(d), [pos], sub.dims)
    violation = operator_norm(commutator(u, z))
    ok = worst <= COMPATIBILITY_TOL
    return CompatibilityVerdict(ok, 0.0 if ok and violation <= COMPATIBILITY_TOL else violation)


@dataclass(frozen=True)
class MediatorFamily:
    """Structural rules a protocol must satisfy to belong to a family."""

    kind: str
    mediator_site: str = "M"

    def __post_init__(self):
        if self.kind not in FAMILIES:
            raise ValidationError(f"unknown family {self.kind!r}; expected one of {FAMILIES}")

    def violations(self, spec: ProtocolSpec) -> list[str]:
        probes = set(spec.probes)
        out = []
        for stage, k, step in spec.steps():
            where = f"{stage.label}[{k}]"
            if self.kind != "nonlocal_direct" and probes <= set(step.acts_on):
                out.append(f"{where}: direct probe-probe step")
            if self.kind == "classical_local":
                if not classical_compatibility(step, self.mediator_site, spec.layout).ok:
                    out.append(f"{where}: step is not classical-compatible")
        return out

    def admits(self, spec: ProtocolSpec) -> bool:
        return not self.violations(spec)


def _qubit_layout() -> SiteLayout:
    return SiteLayout.qubits("A", "M", "B")


def _locals(*names: str):
    return tuple(basis_state(n) for n in names)


def build_cnot_relay() -> ProtocolSpec:
    """A -> M by CNOT, then M -> B by swapping the mediator's bit into B."""
    layout = _qubit_layout()
    stages = (
        Stage("T1", ("A", "M"), (StepSpec(("A", "M"), "CNOT"),)),
        Stage("T2", ("M", "B"), (StepSpec(("M", "B"), "CNOT"), StepSpec(("B", "M"), "CNOT"))),
    )
    return ProtocolSpec(layout, _locals("+", "0", "0"), _locals("-", "0", "0"), stages, name="cnot-relay")


def phase_hamiltonian(layout: SiteLayout, sites: tuple[str, str], phases) -> PauliOp:
    """Generator h with exp(-i h) = diag(e^{i phi_00}, e^{i phi_01},
    e^{i phi_10}, e^{i phi_11}) on ``sites``."""
    p00, p01, p10, p11 = (float(p) for p in phases)
    a, b = sites
    coeffs = {
        (): (p00 + p01 + p10 + p11) / 4,
        (b,): (p00 - p01 + p10 - p11) / 4,
        (a,): (p00 + p01 - p10 - p11) / 4,
        (a, b): (p00 - p01 - p10 + p11) / 4,
    }
    h = PauliOp.zero(layout)
    for support, c in coeffs.items():
        h = h + PauliOp.single(layout, {s: "Z" for s in support}, -c)
    return h


def build_bmv_phase(phases=(0.0, 0.0, 0.0, np.pi)) -> ProtocolSpec:
    """Three-qubit abstraction of the two-mass phase experiment: copy A's
    bit into M, apply the mediator-probe phases, then uncopy."""
    layout = _qubit_layout()
    h = phase_hamiltonian(layout, ("M", "B"), phases)
    stages = (
        Stage("T1", ("A", "M"), (StepSpec(("A", "M"), "CNOT"),)),
        Stage("T2", ("M", "B"), (StepSpec(("M", "B"), hamiltonian=h, angle=1.0),)),
        Stage("T3", ("A", "M"), (StepSpec(("A", "M"), "CNOT"),)),
    )
    return ProtocolSpec(layout, _locals("+", "0", "+"), _locals("-", "0", "+"), stages, name="bmv-phase")


def build_nonlocal_demo(direct: bool = True) -> ProtocolSpec:
    """Classical-compatible CZ couplings to M plus one direct A-B stage
    (H on A, then CNOT A -> B). ``direct=False`` drops the direct stage."""
    layout = _qubit_layout()
    stages = [Stage("T1", ("A", "M"), (StepSpec(("A", "M"), "CZ"),))]
    if direct:
        stages.append(Stage("direct", ("A", "B"), (StepSpec(("A",), "H"), StepSpec(("A", "B"), "CNOT"))))
    stages.append(Stage("T2", ("M", "B"), (StepSpec(("M", "B"), "CZ"),)))
    return ProtocolSpec(layout, _locals("0", "0", "0"), _locals("1", "0", "0"), tuple(stages), name="nonlocal-cz")


def _coupling(layout, probe, probe_letter, mediator, mediator_letter, theta) -> StepSpec:
    letters = {probe: probe_letter}
    if mediator_letter != "I":
        letters[mediator] = mediator_letter
    h = PauliOp.single(layout, letters)
    return StepSpec((probe, mediator), hamiltonian=h, angle=theta)


def _classical_step(rng, layout, probe, mediator) -> StepSpec:
    kind = rng.integers(3)
    theta = float(rng.uniform(0.0, 2 * np.pi))
    letter = "XYZ"[rng.integers(3)]
    if kind == 2:
        return StepSpec((probe,), "R" + letter, theta)
    return _coupling(layout, probe, letter, mediator, "Z" if kind == 0 else "I", theta)


def _quantum_step(rng, layout, probe, mediator) -> StepSpec:
    kind = rng.integers(5)
    theta = float(rng.uniform(0.0, 2 * np.pi))
    if kind == 0:
        return StepSpec((probe, mediator), "CNOT")
    if kind == 1:
        return StepSpec((mediator, probe), "CNOT")
    if kind == 2:
        return StepSpec((mediator,), "RY", theta)
    if kind == 3:
        return StepSpec((probe,), "R" + "XYZ"[rng.integers(3)], theta)
    return _coupling(layout, probe, "XYZ"[rng.integers(3)], mediator, "XYZ"[rng.integers(3)], theta)


def _sample(family: str, seed: int, n_steps: int, index: int) -> ProtocolSpec:
    if n_steps < 1:
        raise ValidationError("n_steps must be >= 1")
    rng = stream(seed, index)
    layout = _qubit_layout()
    stages = []
    for i in range(n_steps):
        if family == "nonlocal_direct" and rng.random() < 0.25:
            theta = float(rng.uniform(0.0, 2 * np.pi))
            h = PauliOp.single(layout, {"A": "XYZ"[rng.integers(3)], "B": "XYZ"[rng.integers(3)]})
            stages.append(Stage(f"S{i + 1}", ("A", "B"), (StepSpec(("A", "B"), hamiltonian=h, angle=theta),)))
            continue
        probe = "A" if i % 2 == 0 else "B"
        if family == "quantum_local":
            step = _quantum_step(rng, layout, probe, "M")
        else:
            step = _classical_step(rng, layout, probe, "M")
        sites = (probe, "M") if probe == "A" else ("M", "B")
        stages.append(Stage(f"S{i + 1}", sites, (step,)))
    name = f"{family}/seed={seed}/index={index}"
    return ProtocolSpec(layout, _locals("+", "0", "0"), _locals("-", "0", "0"), tuple(stages), name=name)


def sample_classical_local(seed: int, n_steps: int, index: int = 0) -> ProtocolSpec:
    """Random protocol whose every step is exp(-i theta P x f(Z_M)) with
    f in {I, Z_M}, or a single-probe rotation; steps alternate A+M / M+B."""
    return _sample("classical_local", seed, n_steps, index)


def sample_quantum_local(seed: int, n_steps: int, index: int = 0) -> ProtocolSpec:
    """Like :func:`sample_classical_local` but the mediator may be rotated
    and coupled through any Pauli (CNOTs included)."""
    return _sample("quantum_local", seed, n_steps, index)


def sample_nonlocal_direct(seed: int, n_steps: int, index: int = 0) -> ProtocolSpec:
    """Classical-compatible mediator steps interleaved with direct A-B
    couplings."""
    return _sample("nonlocal_direct", seed, n_steps, index)


SAMPLERS = {
    "classical_local": sample_classical_local,
    "quantum_local": sample_quantum_local,
    "nonlocal_direct": sample_nonlocal_direct,
}
