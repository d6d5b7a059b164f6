import numpy as np
import pytest
from hypothesis import given, strategies as st

from gwitness.errors import ValidationError
from gwitness.mediators import (
    MediatorFamily,
    build_bmv_phase,
    build_cnot_relay,
    build_nonlocal_demo,
    classical_compatibility,
    local_unitary,
    phase_hamiltonian,
    sample_classical_local,
    sample_nonlocal_direct,
    sample_quantum_local,
    step_unitary,
)
from gwitness.pauli import PauliOp, SiteLayout
from gwitness.protocol import probe_negativities, run
from gwitness.specs import StepSpec

import oracle as o

AMB = SiteLayout.qubits("A", "M", "B")


def test_step_unitary_examples():
    u = step_unitary(StepSpec(("A", "M"), "CNOT"), AMB)
    np.testing.assert_allclose(u, o.cnot("A", "M"), atol=1e-15)
    h = PauliOp.from_text(AMB, [("ZZI", 1)])
    u = step_unitary(StepSpec(("A", "M"), hamiltonian=h, angle=np.pi / 4), AMB)
    np.testing.assert_allclose(u, np.diag(np.diag(u)), atol=1e-15)
    np.testing.assert_allclose(u, o.expm_h(o.on({"A": o.Z, "M": o.Z}), np.pi / 4), atol=1e-14)
    hh = step_unitary(StepSpec(("A",), "H"), AMB)
    np.testing.assert_allclose(hh @ hh, np.eye(8), atol=1e-15)


def test_cnot_control_order():
    u = step_unitary(StepSpec(("B", "M"), "CNOT"), AMB)
    np.testing.assert_allclose(u, o.cnot("B", "M"), atol=1e-15)


def test_step_validation():
    with pytest.raises(ValidationError):
        StepSpec(("A",), "CNOT")
    with pytest.raises(ValidationError):
        StepSpec(("A", "M"), "CPHASE")
    with pytest.raises(ValidationError):
        StepSpec(("A",), hamiltonian=PauliOp.from_text(AMB, [("ZZI", 1)]))
    with pytest.raises(ValidationError):
        StepSpec(("A", "A"), "CZ")


def test_compatibility_examples():
    assert classical_compatibility(StepSpec(("A", "M"), "CPHASE", 0.8), "M", AMB).ok
    h = PauliOp.from_text(AMB, [("XZI", 1)])
    assert classical_compatibility(StepSpec(("A", "M"), hamiltonian=h, angle=0.3), "M", AMB).ok
    v = classical_compatibility(StepSpec(("A", "M"), "CNOT"), "M", AMB)
    assert not v.ok and abs(v.violation - 2.0) < 1e-12
    # a step not touching the mediator is trivially compatible
    assert classical_compatibility(StepSpec(("A",), "RX", 1.0), "M", AMB).ok


def test_compatibility_qutrit_projectors():
    lay = SiteLayout((("A", 2), ("M", 3), ("B", 2)))
    # Z1 + Z2 = diag(2, -1, -1) is diagonal, hence block diagonal on M
    h = PauliOp.single(lay, {"A": "X", "M": "Z1"}) + PauliOp.single(lay, {"A": "X", "M": "Z2"})
    assert classical_compatibility(StepSpec(("A", "M"), hamiltonian=h, angle=0.4), "M", lay).ok


def test_relay_oracle():
    spec = build_cnot_relay()
    trace = run(spec)
    psi = o.cnot("B", "M") @ o.cnot("M", "B") @ o.cnot("A", "M") @ o.ket("+", "0", "0")
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    np.testing.assert_allclose(o.reduce_ab(psi), np.outer(bell, bell), atol=1e-14)
    assert abs(o.negativity_ab(o.reduce_ab(psi)) - 0.5) < 1e-12
    np.testing.assert_allclose(trace.final("plus").matrix, np.outer(psi, psi.conj()), atol=1e-14)
    negs = probe_negativities(trace)
    assert all(abs(v - 0.5) < 1e-9 for v in negs.values())
    assert not trace.steps[0].compatibility.ok


def bmv_oracle(phases):
    p00, p01, p10, p11 = phases
    diag = np.kron(np.eye(2), np.kron(np.diag([1, 0]), np.diag([np.exp(1j * p00), np.exp(1j * p01)]))
                   + np.kron(np.diag([0, 1]), np.diag([np.exp(1j * p10), np.exp(1j * p11)])))
    psi = o.cnot("A", "M") @ diag @ o.cnot("A", "M") @ o.ket("+", "0", "+")
    return o.negativity_ab(o.reduce_ab(psi))


@pytest.mark.parametrize("phases,expected", [
    ((0, 0, 0, np.pi), 0.5),
    ((0, 0, 0, 0), 0.0),
    ((np.pi / 3,) * 4, 0.0),
])
def test_bmv_examples(phases, expected):
    negs = probe_negativities(run(build_bmv_phase(phases), microcausality=False))
    assert abs(negs["plus"] - expected) < 1e-9
    assert abs(bmv_oracle(phases) - expected) < 1e-9


@given(st.lists(st.floats(-np.pi, np.pi), min_size=4, max_size=4))
def test_bmv_matches_oracle(phases):
    negs = probe_negativities(run(build_bmv_phase(phases), microcausality=False))
    assert abs(negs["plus"] - bmv_oracle(phases)) < 1e-9


def test_phase_hamiltonian_diag():
    h = phase_hamiltonian(AMB, ("M", "B"), (0.1, 0.2, 0.3, 0.4))
    u = local_unitary(StepSpec(("M", "B"), hamiltonian=h, angle=1.0), AMB)
    np.testing.assert_allclose(u, np.diag(np.exp(1j * np.array([0.1, 0.2, 0.3, 0.4]))), atol=1e-14)


def test_nonlocal_demo_oracle():
    spec = build_nonlocal_demo()
    psi = o.cz("M", "B") @ o.cnot("A", "B") @ o.on({"A": o.H}) @ o.cz("A", "M") @ o.ket("0", "0", "0")
    assert abs(o.negativity_ab(o.reduce_ab(psi)) - 0.5) < 1e-12
    trace = run(spec)
    assert all(abs(v - 0.5) < 1e-9 for v in probe_negativities(trace).values())
    assert all(s.compatibility.ok for s in trace.steps if "M" in s.acts_on)
    direct = [s for s in trace.steps if s.stage == "direct" and len(s.acts_on) == 2][0]
    assert not all(v.ok for v in direct.locality if v.subsystem == "B")
    plain = run(build_nonlocal_demo(direct=False))
    assert all(v <= 1e-12 for v in probe_negativities(plain).values())


def test_family_rules():
    assert MediatorFamily("quantum_local").admits(build_cnot_relay())
    assert not MediatorFamily("classical_local").admits(build_cnot_relay())
    assert not MediatorFamily("quantum_local").admits(build_nonlocal_demo())
    assert MediatorFamily("nonlocal_direct").admits(build_nonlocal_demo())
    with pytest.raises(ValidationError):
        MediatorFamily("other")


def test_samplers_deterministic():
    for sampler in (sample_classical_local, sample_quantum_local, sample_nonlocal_direct):
        a, b = sampler(5, 8, 3), sampler(5, 8, 3)
        assert [s.describe() for _, _, s in a.steps()] == [s.describe() for _, _, s in b.steps()]
        assert [s.describe() for _, _, s in a.steps()] != [s.describe() for _, _, s in sampler(5, 8, 4).steps()]
    with pytest.raises(ValidationError):
        sample_classical_local(1, 0)


@given(st.integers(0, 2**20), st.integers(0, 50))
def test_classical_family_admitted_and_block_diagonal(seed, index):
    spec = sample_classical_local(seed, 6, index)
    assert MediatorFamily("classical_local").admits(spec)
    total = np.eye(8, dtype=complex)
    for _, _, step in spec.steps():
        total = step_unitary(step, AMB) @ total
    # sectors of the mediator's Z basis never mix
    t = total.reshape(2, 2, 2, 2, 2, 2)
    assert np.max(np.abs(t[:, 0, :, :, 1, :])) <= 1e-12
    assert np.max(np.abs(t[:, 1, :, :, 0, :])) <= 1e-12


@given(st.integers(0, 2**20), st.integers(0, 50))
def test_classical_family_conserves_z_m(seed, index):
    trace = run(sample_classical_local(seed, 6, index), microcausality=False)
    zm = o.on({"M": o.Z})
    for w in ("plus", "minus"):
        ref = np.trace(trace.boundaries[0].states[w].matrix @ zm).real
        for b in trace.boundaries[1:]:
            assert abs(np.trace(b.states[w].matrix @ zm).real - ref) <= 1e-10
