"""Simulate staged probe-mediator-probe protocols and decide whether the
entanglement they produce witnesses a non-classical mediator."""

from .campaign import run_campaign
from .descriptors import DescriptorSet, evolve_descriptors, init_descriptors, locality_audit, microcausality_check
from .errors import GWitnessError, LayoutMismatchError, NumericalError, ValidationError
from .mediators import (
    MediatorFamily,
    build_bmv_phase,
    build_cnot_relay,
    build_nonlocal_demo,
    classical_compatibility,
    sample_classical_local,
    sample_nonlocal_direct,
    sample_quantum_local,
)
from .nonclassicality import (
    AlgebraBasis,
    VariableSpec,
    algebra_closure,
    classify_system,
    information_variable_check,
    superinformation_check,
)
from .pauli import PauliOp, SiteLayout
from .protocol import evaluate, factorization_audit, mediator_variable_analysis, run, task_te_check
from .specs import ProtocolSpec, Stage, StepSpec
from .states import DensityState, partial_trace, product_state
from .witness import eq4_separability_sweep, negativity, no_signalling_audit, trace_distance

__version__ = "0.1.0"
