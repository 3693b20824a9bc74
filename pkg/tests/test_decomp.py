import math

import numpy as np
import pytest

from nativeswap.circuit import Circuit, CircuitError, Gate, Kind, cr, rx, ry, rz, schedule_moments
from nativeswap.decomp import (
    TEMPLATES, SwapStrategy, expand_cr, h_lowering_phase, lower_circuit, lower_cnot, lower_gate, lower_notc,
    lower_notc_via_h, lower_swap, lowering_phase, swap_template, x_lowering_phase,
)
from nativeswap.device import DeviceError, circuit_metrics
from nativeswap.unitary import CNOT, NOTC, SWAP, circuit_unitary, cr_kernel, cr_matrix, equal_up_to_global_phase

# Phases (radians) of each 2-wire lowering against its composite, computed once
# with the 4x4 product oracle and pinned.
PINNED_PHASES = {
    "cnot": -math.pi / 4, "notc": math.pi / 4, "notc_h": -math.pi / 4,
    "slow": math.pi / 4, "fast": -math.pi / 4, "cgpc": -math.pi / 4,
    "commuted": 3 * math.pi / 4, "optimized": 3 * math.pi / 4, "optimized-x90": -math.pi / 4,
}


def test_cnot_lowering_exact_sequence():
    c = lower_cnot(0, 1)
    assert c.gates == (rz(-90, 0), ry(180, 0), rx(90, 1), cr(0, 1, "+-"))
    assert equal_up_to_global_phase(CNOT, circuit_unitary(c)).equal


def test_notc_lowering_exact_sequence():
    c = lower_notc(0, 1)
    assert c.gates == (rz(90, 0), rx(90, 0), rz(180, 1), ry(90, 1), cr(0, 1, "+-"), ry(-90, 0), rz(90, 1), rx(90, 1))
    assert equal_up_to_global_phase(NOTC, circuit_unitary(c)).equal
    assert c.external_rotation == 360


def test_notc_via_h():
    c = lower_notc_via_h(0, 1)
    assert equal_up_to_global_phase(NOTC, circuit_unitary(c)).equal
    assert c.external_rotation > lower_notc(0, 1).external_rotation


def test_h_and_x_lowering_phases():
    assert h_lowering_phase() == pytest.approx(-math.pi / 2)
    assert x_lowering_phase() == pytest.approx(-math.pi / 2)


@pytest.mark.parametrize("name, phase", sorted(PINNED_PHASES.items()))
def test_pinned_phases(name, phase):
    assert lowering_phase(name) == pytest.approx(phase, abs=1e-12)


@pytest.mark.parametrize("strategy", list(SwapStrategy))
def test_every_strategy_is_swap_with_three_crs(strategy):
    c = swap_template(strategy)
    assert equal_up_to_global_phase(SWAP, circuit_unitary(c)).equal
    assert c.cr_count == 3


def test_strategies_pairwise_equivalent():
    us = [circuit_unitary(swap_template(s)) for s in SwapStrategy]
    for a in us:
        for b in us:
            assert equal_up_to_global_phase(a, b).equal


def test_optimized_template_per_wire():
    c = swap_template(SwapStrategy.OPTIMIZED)
    ctrl = [str(g) for g in c.wire_gates(0)]
    tgt = [str(g) for g in c.wire_gates(1)]
    assert ctrl == ["rz 90 0", "cr-+ 0 1", "rz -90 0", "rx -90 0", "cr+- 0 1", "rz 90 0", "rx -90 0", "cr+- 0 1"]
    assert tgt == ["cr-+ 0 1", "rz -90 1", "rx 90 1", "cr+- 0 1", "rz -90 1", "cr+- 0 1"]


def test_x90_template_has_only_positive_rx_pulses():
    c = swap_template(SwapStrategy.OPTIMIZED_X90)
    pulses = [g for g in c.gates if g.is_pulse]
    assert pulses and all(g.kind is Kind.RX and g.angle == 90 for g in pulses)


def test_cnot_faster_than_notc():
    assert schedule_moments(lower_cnot(0, 1)).depth < schedule_moments(lower_notc(0, 1)).depth


@pytest.mark.parametrize("pol, expected", [("+-", "E K"), ("-+", "K E")])
def test_echo_expansion_is_exact(pol, expected):
    exp = expand_cr(cr(0, 1, pol))
    assert exp.echo_count == 1
    assert np.allclose(exp.local_unitary(), cr_matrix(pol), atol=1e-12)  # exact, not up to phase


def test_echo_is_essential():
    for pol in ("+-", "-+"):
        exp = expand_cr(cr(0, 1, pol))
        u = np.eye(4, dtype=complex)
        for s in exp.steps:
            if s.kind != "echo":
                u = s.matrix() @ u
        assert not equal_up_to_global_phase(cr_kernel(), u).equal


def test_expand_cr_on_wider_register():
    exp = expand_cr(cr(2, 0, "+-"))
    assert np.allclose(exp.unitary(3), circuit_unitary(Circuit(3, (cr(2, 0, "+-"),))), atol=1e-12)
    with pytest.raises(CircuitError):
        expand_cr(rx(90, 0))


def test_lower_swap_follows_device_direction(casablanca):
    c = lower_swap(6, 5, SwapStrategy.OPTIMIZED, casablanca)
    assert c.n_wires == casablanca.n_qubits
    assert {g.wires for g in c.gates if g.kind is Kind.CR} == {(5, 6)}
    m = circuit_metrics(c, casablanca)
    assert (m.depth, m.external_rotation_deg, m.internal_rotation_deg) == ((2, 3), 270, 540)
    slow = circuit_metrics(lower_swap(5, 6, "slow", casablanca), casablanca)
    assert (slow.depth, slow.external_rotation_deg) == ((5, 3), 990)
    with pytest.raises(DeviceError):
        lower_swap(0, 6, SwapStrategy.OPTIMIZED, casablanca)


def test_lower_gate_both_cnot_directions(line6):
    # edge 2 -> 1: CNOT(2,1) is aligned, CNOT(1,2) needs the NOTC form
    for ctrl, tgt in ((2, 1), (1, 2)):
        g = Gate(Kind.CNOT, (ctrl, tgt))
        c = Circuit(3, tuple(lower_gate(g, line6, 3)))
        assert {x.wires for x in c.gates if x.kind is Kind.CR} == {(2, 1)}
        assert equal_up_to_global_phase(circuit_unitary(Circuit(3, (g,))), circuit_unitary(c)).equal


def test_lower_circuit_mixed(line6):
    c = Circuit(3, (Gate(Kind.H, (0,)), Gate(Kind.NOTC, (0, 1)), Gate(Kind.X, (2,)), Gate(Kind.SWAP, (1, 2))))
    out = lower_circuit(c, line6)
    assert out.is_native
    assert equal_up_to_global_phase(circuit_unitary(c), circuit_unitary(out)).equal
    with pytest.raises(CircuitError):
        lower_gate(Gate(Kind.CNOT, (0, 1)), None, 2)


def test_strategy_parse():
    assert SwapStrategy.parse("standard") is SwapStrategy.SLOW_ORIENTATION
    assert SwapStrategy.parse("x90") is SwapStrategy.OPTIMIZED_X90
    assert SwapStrategy.parse("OPTIMIZED") is SwapStrategy.OPTIMIZED
    with pytest.raises(ValueError):
        SwapStrategy.parse("quantum")


def test_templates_cover_all_strategies():
    assert set(TEMPLATES) == set(SwapStrategy)
