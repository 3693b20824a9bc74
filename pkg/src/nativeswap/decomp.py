"""
Lowerings of CNOT, NOTC, H, X and SWAP into the directed cross-resonance gateset.

The SWAP variants are stored as golden templates written per CR role
(control wire "c", target wire "t"), one per optimization stage. The rewrite
passes must reproduce them independently.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .circuit import Circuit, CircuitError, Gate, Kind, Polarity, normal_order
from .device import DeviceModel
from .unitary import CNOT, NOTC, SWAP, H, X, circuit_unitary, equal_up_to_global_phase, rx_matrix, P0, P1, I2

PM = Polarity.PLUS_MINUS
MP = Polarity.MINUS_PLUS


class SwapStrategy(str, Enum):
    SLOW_ORIENTATION = "slow"
    FAST_ORIENTATION = "fast"
    CGPC = "cgpc"
    COMMUTED = "commuted"
    OPTIMIZED = "optimized"
    OPTIMIZED_X90 = "optimized-x90"

    @classmethod
    def parse(cls, name: str) -> "SwapStrategy":
        key = name.strip().lower().replace("_", "-")
        aliases = {"standard": "slow", "slow-orientation": "slow", "fast-orientation": "fast",
                   "x90": "optimized-x90"}
        key = aliases.get(key, key)
        for s in cls:
            if s.value == key or s.name.lower().replace("_", "-") == key:
                return s
        raise ValueError(f"unknown SWAP strategy '{name}'")


# (kind, angle or polarity, role)
_CNOT = (("rz", -90, "c"), ("ry", 180, "c"), ("rx", 90, "t"), ("cr", PM, "ct"))
_NOTC = (("rz", 90, "c"), ("rx", 90, "c"), ("rz", 180, "t"), ("ry", 90, "t"), ("cr", PM, "ct"),
         ("ry", -90, "c"), ("rz", 90, "t"), ("rx", 90, "t"))

TEMPLATES = {
    SwapStrategy.SLOW_ORIENTATION: _NOTC + _CNOT + _NOTC,
    SwapStrategy.FAST_ORIENTATION: _CNOT + _NOTC + _CNOT,
    SwapStrategy.CGPC: (
        ("rz", -90, "c"), ("ry", 180, "c"), ("rx", 90, "t"), ("cr", PM, "ct"),
        ("rz", 90, "c"), ("rx", 90, "c"), ("rz", 180, "t"), ("ry", 90, "t"), ("cr", PM, "ct"),
        ("rz", 90, "c"), ("rx", -90, "c"), ("rz", 90, "t"), ("rx", 180, "t"), ("cr", PM, "ct"),
    ),
    SwapStrategy.COMMUTED: (
        ("rz", -90, "c"), ("ry", 180, "c"), ("cr", PM, "ct"),
        ("rz", 90, "c"), ("rx", 90, "c"), ("rz", -90, "t"), ("rx", 90, "t"), ("cr", PM, "ct"),
        ("rz", 90, "c"), ("rx", -90, "c"), ("rz", -90, "t"), ("cr", PM, "ct"),
    ),
    SwapStrategy.OPTIMIZED: (
        ("rz", 90, "c"), ("cr", MP, "ct"),
        ("rz", -90, "c"), ("rx", -90, "c"), ("rz", -90, "t"), ("rx", 90, "t"), ("cr", PM, "ct"),
        ("rz", 90, "c"), ("rx", -90, "c"), ("rz", -90, "t"), ("cr", PM, "ct"),
    ),
    SwapStrategy.OPTIMIZED_X90: (
        ("rz", 90, "c"), ("cr", MP, "ct"),
        ("rz", 90, "c"), ("rx", 90, "c"), ("rz", 180, "c"), ("rz", -90, "t"), ("rx", 90, "t"), ("cr", PM, "ct"),
        ("rz", -90, "c"), ("rx", 90, "c"), ("rz", 180, "c"), ("rz", -90, "t"), ("cr", PM, "ct"),
    ),
}


def _instantiate(template, c: int, t: int, n_wires: int) -> Circuit:
    gates = []
    for kind, arg, role in template:
        if kind == "cr":
            gates.append(Gate(Kind.CR, (c, t), polarity=arg))
        else:
            gates.append(Gate(Kind(kind), (c if role == "c" else t,), arg))
    return Circuit(n_wires, tuple(gates))


def _n(n_wires, *wires) -> int:
    return n_wires if n_wires is not None else max(wires) + 1


@lru_cache(maxsize=None)
def _check(name: str) -> float:
    """Verify a 2-wire template against its composite once; returns the phase."""
    target = {"cnot": CNOT, "notc": NOTC, "notc_h": NOTC}.get(name, SWAP)
    if name == "cnot":
        circ = _instantiate(_CNOT, 0, 1, 2)
    elif name == "notc":
        circ = _instantiate(_NOTC, 0, 1, 2)
    elif name == "notc_h":
        circ = _notc_via_h(0, 1, 2)
    else:
        circ = _instantiate(TEMPLATES[SwapStrategy(name)], 0, 1, 2)
    eq = equal_up_to_global_phase(target, circuit_unitary(circ))
    if not eq.equal:
        raise AssertionError(f"lowering '{name}' is not equivalent to its target (deficit {eq.deficit:.3g})")
    return eq.phase


def lower_cnot(control: int, target: int, n_wires: int | None = None) -> Circuit:
    """CNOT aligned with the CR direction control -> target."""
    _check("cnot")
    return _instantiate(_CNOT, control, target, _n(n_wires, control, target))


def lower_notc(cr_control: int, cr_target: int, n_wires: int | None = None) -> Circuit:
    """NOT on cr_control, controlled by cr_target, using the CR cr_control -> cr_target."""
    _check("notc")
    return _instantiate(_NOTC, cr_control, cr_target, _n(n_wires, cr_control, cr_target))


def lower_h(w: int) -> list[Gate]:
    # X.Ry(90) = H exactly; Rx(180) = -iX
    return [Gate(Kind.RY, (w,), 90), Gate(Kind.RX, (w,), 180)]


def lower_x(w: int) -> list[Gate]:
    return [Gate(Kind.RX, (w,), 180)]


def _notc_via_h(c: int, t: int, n_wires: int) -> Circuit:
    gates = lower_h(c) + lower_h(t) + list(_instantiate(_CNOT, c, t, n_wires).gates) + lower_h(c) + lower_h(t)
    return Circuit(n_wires, tuple(gates))


def lower_notc_via_h(cr_control: int, cr_target: int, n_wires: int | None = None) -> Circuit:
    _check("notc_h")
    return _notc_via_h(cr_control, cr_target, _n(n_wires, cr_control, cr_target))


def lower_swap(a: int, b: int, strategy: SwapStrategy, device: DeviceModel, n_wires: int | None = None) -> Circuit:
    """SWAP(a, b) per strategy, oriented on the device's CR direction for the pair."""
    strategy = SwapStrategy(strategy)
    e = device.require_edge(a, b)
    _check(strategy.value)
    n = n_wires if n_wires is not None else device.n_qubits
    return normal_order(_instantiate(TEMPLATES[strategy], e.control, e.target, n))


def swap_template(strategy: SwapStrategy) -> Circuit:
    """The 2-wire template with CR direction 0 -> 1."""
    _check(SwapStrategy(strategy).value)
    return normal_order(_instantiate(TEMPLATES[SwapStrategy(strategy)], 0, 1, 2))


def lowering_phase(name: str) -> float:
    """Global phase (radians) of a 2-wire lowering relative to its composite."""
    return _check(name)


def lower_gate(g: Gate, device: DeviceModel | None, n_wires: int,
               swap_strategy: SwapStrategy = SwapStrategy.FAST_ORIENTATION) -> list[Gate]:
    """Lower one gate to native kinds; 2-wire composites follow the device CR direction."""
    if g.kind in (Kind.RX, Kind.RY, Kind.RZ, Kind.CR):
        return [g]
    if g.kind is Kind.H:
        return lower_h(g.wires[0])
    if g.kind is Kind.X:
        return lower_x(g.wires[0])
    if device is None:
        raise CircuitError(f"lowering '{g}' needs a device for the CR direction")
    if g.kind is Kind.SWAP:
        return list(lower_swap(*g.wires, swap_strategy, device, n_wires).gates)
    if g.kind is Kind.CNOT:
        ctrl, tgt = g.wires
    else:  # NOTC(a, b): NOT on a controlled by b
        tgt, ctrl = g.wires
    e = device.require_edge(ctrl, tgt)
    if e.control == ctrl:
        return list(lower_cnot(ctrl, tgt, n_wires).gates)
    return list(lower_notc(e.control, e.target, n_wires).gates)


def lower_circuit(c: Circuit, device: DeviceModel | None,
                  swap_strategy: SwapStrategy = SwapStrategy.FAST_ORIENTATION) -> Circuit:
    gates = []
    for g in c.gates:
        gates.extend(lower_gate(g, device, c.n_wires, swap_strategy))
    return c.with_gates(gates)


# ---------------------------------------------------------------------------
# Echoed CR expansion (conceptual controlled-RX primitives, not part of the IR)


@dataclass(frozen=True)
class EchoStep:
    """One step of the echo: 'open' / 'ctrl' controlled RX on the target, or 'echo' RX(180) on the control."""

    kind: str
    angle: float

    def matrix(self) -> np.ndarray:
        r = rx_matrix(self.angle)
        if self.kind == "open":
            return np.kron(P0, r) + np.kron(P1, I2)
        if self.kind == "ctrl":
            return np.kron(P0, I2) + np.kron(P1, r)
        if self.kind == "echo":
            return np.kron(r, I2)
        raise ValueError(self.kind)


@dataclass(frozen=True)
class CRExpansion:
    control: int
    target: int
    steps: tuple[EchoStep, ...]

    def local_unitary(self) -> np.ndarray:
        u = np.eye(4, dtype=complex)
        for s in self.steps:
            u = s.matrix() @ u
        return u

    def unitary(self, n_wires: int) -> np.ndarray:
        from .unitary import apply_local

        return apply_local(np.eye(2 ** n_wires, dtype=complex), self.local_unitary(),
                           (self.control, self.target), n_wires)

    @property
    def echo_count(self) -> int:
        return sum(1 for s in self.steps if s.kind == "echo")


_POSITIVE_HALF = (EchoStep("open", 45), EchoStep("ctrl", -45))
_NEGATIVE_HALF = (EchoStep("ctrl", 45), EchoStep("open", -45))


def expand_cr(g: Gate) -> CRExpansion:
    if g.kind is not Kind.CR:
        raise CircuitError(f"expand_cr needs a CR gate, got '{g}'")
    echo = (EchoStep("echo", 180),)
    if g.polarity is PM:
        steps = _POSITIVE_HALF + echo + _NEGATIVE_HALF
    else:
        steps = _NEGATIVE_HALF + echo + _POSITIVE_HALF
    return CRExpansion(g.wires[0], g.wires[1], steps)


def h_lowering_phase() -> float:
    u = circuit_unitary(Circuit(1, tuple(lower_h(0))))
    return equal_up_to_global_phase(H, u).phase


def x_lowering_phase() -> float:
    u = circuit_unitary(Circuit(1, tuple(lower_x(0))))
    return equal_up_to_global_phase(X, u).phase


__all__ = [
    "SwapStrategy", "TEMPLATES", "lower_cnot", "lower_notc", "lower_notc_via_h", "lower_h", "lower_x",
    "lower_swap", "swap_template", "lower_gate", "lower_circuit", "expand_cr", "CRExpansion", "EchoStep",
    "lowering_phase",
]
