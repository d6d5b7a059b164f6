"""Declarative protocol description: steps grouped into stages, plus the two
initial product states."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import ValidationError
from .pauli import PauliOp, SiteLayout
from .states import DensityState, partial_trace, product_state

ONE_SITE_GATES = {"H": False, "RX": True, "RY": True, "RZ": True}
TWO_SITE_GATES = {"CNOT": False, "CZ": False, "CPHASE": True}
NAMED_GATES = {**ONE_SITE_GATES, **TWO_SITE_GATES}


@dataclass(frozen=True, eq=False)
class StepSpec:
    """One interaction step on one or two sites.

    Either a named gate (``CNOT`` takes ``acts_on = (control, target)``) or a
    Hermitian ``hamiltonian`` over the full layout, realised as
    ``exp(-i * angle * hamiltonian)``.
    """

    acts_on: tuple[str, ...]
    gate: str | None = None
    angle: float | None = None
    hamiltonian: PauliOp | None = None

    def __post_init__(self):
        acts_on = tuple(str(s) for s in self.acts_on)
        object.__setattr__(self, "acts_on", acts_on)
        if len(acts_on) not in (1, 2) or len(set(acts_on)) != len(acts_on):
            raise ValidationError(f"a step acts on one or two distinct sites, got {list(acts_on)}")
        if (self.gate is None) == (self.hamiltonian is None):
            raise ValidationError("a step needs exactly one of gate / hamiltonian")
        if self.gate is not None:
            gate = self.gate.upper()
            object.__setattr__(self, "gate", gate)
            if gate not in NAMED_GATES:
                raise ValidationError(f"unknown gate {self.gate!r}")
            arity = 1 if gate in ONE_SITE_GATES else 2
            if arity != len(acts_on):
                raise ValidationError(f"gate {gate} acts on {arity} site(s), got {len(acts_on)}")
            if NAMED_GATES[gate] and self.angle is None:
                raise ValidationError(f"gate {gate} needs an angle")
            if not NAMED_GATES[gate] and self.angle is not None:
                raise ValidationError(f"gate {gate} takes no angle")
        else:
            if self.angle is None:
                object.__setattr__(self, "angle", 1.0)
            extra = self.hamiltonian.support() - set(acts_on)
            if extra:
                raise ValidationError(f"hamiltonian acts on {sorted(extra)} outside acts_on {list(acts_on)}")
            if not self.hamiltonian.is_hermitian():
                raise ValidationError("step hamiltonian is not Hermitian")
        if self.angle is not None:
            object.__setattr__(self, "angle", float(self.angle))

    def describe(self) -> str:
        sites = ",".join(self.acts_on)
        if self.gate is not None:
            arg = f"({self.angle:.6g})" if self.angle is not None else ""
            return f"{self.gate}{arg}[{sites}]"
        return f"exp(-i*{self.angle:.6g}*H)[{sites}]"


@dataclass(frozen=True, eq=False)
class Stage:
    label: str
    sites: tuple[str, ...]
    steps: tuple[StepSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(self.sites))
        object.__setattr__(self, "steps", tuple(self.steps))
        for k, step in enumerate(self.steps):
            extra = set(step.acts_on) - set(self.sites)
            if extra:
                raise ValidationError(
                    f"stage {self.label!r} step {k} acts on {sorted(extra)} outside declared sites {list(self.sites)}"
                )


@dataclass(frozen=True, eq=False)
class ProtocolSpec:
    """A staged mediated-entanglement experiment.

    ``s_plus`` / ``s_minus`` are the local factors (one per site, layout
    order) of the two initial product states. The mediator is the site
    named ``mediator``; the other two sites are the probes, in layout order.
    """

    layout: SiteLayout
    s_plus: tuple[DensityState, ...]
    s_minus: tuple[DensityState, ...]
    stages: tuple[Stage, ...]
    mediator: str = "M"
    classical_sites: frozenset[str] = field(default_factory=lambda: frozenset({"M"}))
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "s_plus", tuple(self.s_plus))
        object.__setattr__(self, "s_minus", tuple(self.s_minus))
        object.__setattr__(self, "stages", tuple(self.stages))
        object.__setattr__(self, "classical_sites", frozenset(self.classical_sites))
        labels = self.layout.labels
        if self.mediator not in labels:
            raise ValidationError(f"mediator {self.mediator!r} not in layout")
        if len(labels) != 3:
            raise ValidationError("layout must hold exactly two probes and one mediator")
        if not self.classical_sites <= set(labels):
            raise ValidationError("classical_sites must be layout labels")
        for which, locals_ in (("s_plus", self.s_plus), ("s_minus", self.s_minus)):
            if len(locals_) != len(labels):
                raise ValidationError(f"{which} needs one local state per site")
            for (label, dim), s in zip(self.layout.sites, locals_):
                if s.dims != (dim,):
                    raise ValidationError(f"{which}: local state for {label!r} has dims {s.dims}, expected ({dim},)")
        for stage in self.stages:
            for site in stage.sites:
                self.layout.index(site)
        self._check_distinguishable()

    def _check_distinguishable(self):
        from .witness import distinguishable

        plus, minus = self.initial_state("plus"), self.initial_state("minus")
        probes = [self.layout.index(p) for p in self.probes]
        red = distinguishable(partial_trace(plus, probes), partial_trace(minus, probes))
        if not (red or distinguishable(plus, minus)):
            raise ValidationError("initializations s_plus and s_minus are not distinguishable")

    @property
    def probes(self) -> tuple[str, str]:
        a, b = (s for s in self.layout.labels if s != self.mediator)
        return a, b

    def initial_state(self, which: str) -> DensityState:
        locals_ = {"plus": self.s_plus, "minus": self.s_minus}[which]
        return product_state(locals_, label=f"s_{which}")

    def steps(self) -> list[tuple[Stage, int, StepSpec]]:
        return [(stage, k, step) for stage in self.stages for k, step in enumerate(stage.steps)]

    def replace_stages(self, stages: Sequence[Stage]) -> "ProtocolSpec":
        return ProtocolSpec(self.layout, self.s_plus, self.s_minus, tuple(stages),
                            self.mediator, self.classical_sites, self.name)
