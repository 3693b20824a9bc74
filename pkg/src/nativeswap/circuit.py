"""
Circuit intermediate representation.

Contains:
    - Kind, Polarity, Gate, Circuit: immutable IR values
    - normalize_angle(): degrees into (-180, 180]
    - parse_circuit() / format_circuit(): the line-oriented text format
    - schedule_moments(): ASAP moment schedule with class-homogeneous moments
    - canonicalize_1q_run(): Euler (ZXZ) canonical form of a single-wire run

Angles are degrees everywhere; the unitary engine converts to radians.
Gate order is circuit time (left to right); operators compose right to left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

ANGLE_ATOL = 1e-9


class Kind(str, Enum):
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    CR = "cr"
    CNOT = "cnot"
    NOTC = "notc"
    SWAP = "swap"
    H = "h"
    X = "x"


class Polarity(str, Enum):
    PLUS_MINUS = "+-"
    MINUS_PLUS = "-+"

    def flipped(self) -> "Polarity":
        return Polarity.MINUS_PLUS if self is Polarity.PLUS_MINUS else Polarity.PLUS_MINUS


ROTATIONS = frozenset({Kind.RX, Kind.RY, Kind.RZ})
NATIVE = frozenset({Kind.RX, Kind.RY, Kind.RZ, Kind.CR})
PULSES = frozenset({Kind.RX, Kind.RY})
TWO_WIRE = frozenset({Kind.CR, Kind.CNOT, Kind.NOTC, Kind.SWAP})


class CircuitError(ValueError):
    """Malformed circuit or circuit source text."""


def clean_angle(x: float) -> float:
    """Snap float noise: near-integers become integers, the rest 10 decimals."""
    r = round(x)
    if abs(x - r) < ANGLE_ATOL:
        x = float(r)
    else:
        x = round(x, 10)
    return x + 0.0  # drops -0.0


def normalize_angle(deg: float) -> float:
    """Map an angle in degrees into (-180, 180].

    The rotation operator is preserved up to a global phase of -1.
    """
    a = math.fmod(float(deg), 360.0)
    if a <= -180.0:
        a += 360.0
    elif a > 180.0:
        a -= 360.0
    a = clean_angle(a)
    if a == -180.0:
        a = 180.0
    return a


@dataclass(frozen=True)
class Gate:
    kind: Kind
    wires: tuple[int, ...]
    angle: float | None = None
    polarity: Polarity | None = None

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "wires", tuple(int(w) for w in self.wires))
        arity = 2 if kind in TWO_WIRE else 1
        if len(self.wires) != arity:
            raise CircuitError(f"{kind.value} takes {arity} wire(s), got {self.wires}")
        if arity == 2 and self.wires[0] == self.wires[1]:
            raise CircuitError(f"{kind.value} on repeated wire {self.wires[0]}")
        if kind in ROTATIONS:
            if self.angle is None:
                raise CircuitError(f"{kind.value} requires an angle")
            object.__setattr__(self, "angle", clean_angle(float(self.angle)))
        elif self.angle is not None:
            raise CircuitError(f"{kind.value} takes no angle")
        if kind is Kind.CR:
            if self.polarity is None:
                raise CircuitError("cr requires a polarity")
            object.__setattr__(self, "polarity", Polarity(self.polarity))
        elif self.polarity is not None:
            raise CircuitError(f"{kind.value} takes no polarity")

    @property
    def is_virtual(self) -> bool:
        return self.kind is Kind.RZ

    @property
    def is_pulse(self) -> bool:
        return self.kind in PULSES

    @property
    def rotation(self) -> float:
        """Active (physical) rotation in degrees; zero for virtual and 2-wire gates."""
        if self.kind in PULSES:
            return abs(normalize_angle(self.angle))
        return 0.0

    def on(self, *wires: int) -> "Gate":
        return Gate(self.kind, wires, self.angle, self.polarity)

    def __str__(self) -> str:
        if self.kind is Kind.CR:
            return f"cr{self.polarity.value} {self.wires[0]} {self.wires[1]}"
        if self.kind in ROTATIONS:
            return f"{self.kind.value} {format_angle(self.angle)} {self.wires[0]}"
        return " ".join([self.kind.value, *map(str, self.wires)])


def rx(theta: float, w: int) -> Gate:
    return Gate(Kind.RX, (w,), theta)


def ry(theta: float, w: int) -> Gate:
    return Gate(Kind.RY, (w,), theta)


def rz(theta: float, w: int) -> Gate:
    return Gate(Kind.RZ, (w,), theta)


def cr(control: int, target: int, polarity: Polarity | str = Polarity.PLUS_MINUS) -> Gate:
    return Gate(Kind.CR, (control, target), polarity=Polarity(polarity))


def format_angle(a: float) -> str:
    if float(a).is_integer():
        return str(int(a))
    return format(a, ".10g")


@dataclass(frozen=True)
class Circuit:
    n_wires: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.n_wires < 1:
            raise CircuitError("circuit needs at least one wire")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            for w in g.wires:
                if not 0 <= w < self.n_wires:
                    raise CircuitError(f"wire {w} out of range for {self.n_wires} wires in '{g}'")

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        return Circuit(max(self.n_wires, other.n_wires), self.gates + other.gates)

    def with_gates(self, gates) -> "Circuit":
        return Circuit(self.n_wires, tuple(gates))

    @property
    def is_native(self) -> bool:
        return all(g.kind in NATIVE for g in self.gates)

    @property
    def external_rotation(self) -> float:
        return clean_angle(sum(g.rotation for g in self.gates))

    @property
    def cr_count(self) -> int:
        return sum(1 for g in self.gates if g.kind is Kind.CR)

    def wire_gates(self, w: int) -> list[Gate]:
        """Gates touching wire w, in circuit order (the per-wire figure view)."""
        return [g for g in self.gates if w in g.wires]

    def to_text(self) -> str:
        return format_circuit(self)


def format_circuit(c: Circuit) -> str:
    lines = [f"qubits {c.n_wires}"]
    lines.extend(str(g) for g in c.gates)
    return "\n".join(lines) + "\n"


_ARITY = {"rx": 2, "ry": 2, "rz": 2, "cr+-": 2, "cr-+": 2, "cnot": 2, "notc": 2, "swap": 2, "h": 1, "x": 1}


def parse_circuit(text: str) -> Circuit:
    """Parse the circuit text format; raises CircuitError with a line number."""
    n_wires = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        op = tokens[0].lower()
        args = tokens[1:]
        try:
            if op == "qubits":
                if n_wires is not None:
                    raise CircuitError("duplicate 'qubits' header")
                if len(args) != 1:
                    raise CircuitError("'qubits' takes one integer")
                n_wires = int(args[0])
                if n_wires < 1:
                    raise CircuitError("qubit count must be positive")
                continue
            if n_wires is None:
                raise CircuitError("missing 'qubits <n>' header before first gate")
            if op == "cr":
                raise CircuitError("cr requires a polarity: use 'cr+-' or 'cr-+'")
            if op not in _ARITY:
                raise CircuitError(f"unknown gate '{tokens[0]}'")
            if op in ("rx", "ry", "rz"):
                if len(args) == 1:
                    raise CircuitError(f"{op} requires an angle and a wire")
                if len(args) != 2:
                    raise CircuitError(f"{op} takes '<deg> <wire>'")
                gate = Gate(Kind(op), (_wire(args[1]),), float(args[0]))
            elif op.startswith("cr"):
                if len(args) != 2:
                    raise CircuitError(f"{op} takes '<control> <target>'")
                gate = cr(_wire(args[0]), _wire(args[1]), op[2:])
            else:
                if len(args) != _ARITY[op]:
                    raise CircuitError(f"{op} takes {_ARITY[op]} wire(s)")
                gate = Gate(Kind(op), tuple(_wire(a) for a in args))
            for w in gate.wires:
                if w >= n_wires:
                    raise CircuitError(f"wire {w} out of range for {n_wires} wires")
            gates.append(gate)
        except CircuitError as exc:
            raise CircuitError(f"line {lineno}: {exc}") from None
        except ValueError as exc:
            raise CircuitError(f"line {lineno}: {exc}") from None
    if n_wires is None:
        raise CircuitError("missing 'qubits <n>' header")
    return Circuit(n_wires, tuple(gates))


def _wire(tok: str) -> int:
    w = int(tok)
    if w < 0:
        raise CircuitError(f"negative wire index {w}")
    return w


# ---------------------------------------------------------------------------
# Moment scheduling


class MomentClass(str, Enum):
    VIRTUAL = "virtual"
    ONE_QUBIT = "1q"
    CR = "cr"


@dataclass(frozen=True)
class Moment:
    cls: MomentClass
    gates: tuple[int, ...]  # indices into Circuit.gates, circuit order


@dataclass(frozen=True)
class MomentSchedule:
    moments: tuple[Moment, ...]

    @property
    def depth(self) -> tuple[int, int]:
        """Symbolic depth (a, b) meaning a*t1q + b*tCR."""
        a = sum(1 for m in self.moments if m.cls is MomentClass.ONE_QUBIT)
        b = sum(1 for m in self.moments if m.cls is MomentClass.CR)
        return a, b


def schedule_moments(c: Circuit) -> MomentSchedule:
    """ASAP schedule; RZ gates ride along with the next pulse on their wire."""
    bad = [g for g in c.gates if g.kind not in NATIVE]
    if bad:
        raise CircuitError(f"composite gate '{bad[0]}' must be lowered before scheduling")

    frontier = [0] * c.n_wires  # first moment index a gate on the wire may use
    moments: list[tuple[MomentClass, list[int]]] = []
    pending: dict[int, list[int]] = {w: [] for w in range(c.n_wires)}
    for i, g in enumerate(c.gates):
        if g.is_virtual:
            pending[g.wires[0]].append(i)
            continue
        cls = MomentClass.CR if g.kind is Kind.CR else MomentClass.ONE_QUBIT
        start = max(frontier[w] for w in g.wires)
        slot = next((j for j in range(start, len(moments)) if moments[j][0] is cls), None)
        if slot is None:
            moments.append((cls, []))
            slot = len(moments) - 1
        for w in g.wires:
            moments[slot][1].extend(pending[w])
            pending[w] = []
            frontier[w] = slot + 1
        moments[slot][1].append(i)
    trailing = sorted(i for idx in pending.values() for i in idx)
    if trailing:
        moments.append((MomentClass.VIRTUAL, trailing))
    return MomentSchedule(tuple(Moment(cls, tuple(sorted(ix))) for cls, ix in moments))


# ---------------------------------------------------------------------------
# Single-qubit canonical form


def _su2(gates) -> np.ndarray:
    from .unitary import rotation_matrix

    u = np.eye(2, dtype=complex)
    for g in gates:
        u = rotation_matrix(g.kind, g.angle) @ u
    return u


def zxz_angles(u: np.ndarray) -> tuple[float, float, float]:
    """(alpha, theta, beta) in degrees with u ~ Rz(beta) Rx(theta) Rz(alpha), theta in [0, 180]."""
    u = u / np.sqrt(np.linalg.det(u))
    a, b = u[0, 0], u[0, 1]
    theta = 2.0 * math.atan2(abs(b), abs(a))
    if abs(b) < 1e-12:
        s = -2.0 * np.angle(a)
        return clean_angle(math.degrees(s)), 0.0, 0.0
    if abs(a) < 1e-12:
        d = 2.0 * np.angle(1j * b)
        return clean_angle(math.degrees(d)), 180.0, 0.0
    s = -2.0 * np.angle(a)
    d = 2.0 * np.angle(1j * b)
    alpha = (s + d) / 2.0
    beta = (s - d) / 2.0
    return clean_angle(math.degrees(alpha)), clean_angle(math.degrees(theta)), clean_angle(math.degrees(beta))


def _build(wire: int, parts) -> list[Gate]:
    out = []
    for kind, ang in parts:
        ang = normalize_angle(ang)
        if ang != 0.0:
            out.append(Gate(kind, (wire,), ang))
    return out


def run_cost(gates) -> tuple[float, int, int]:
    """Ordering key for 1q runs: (active rotation, pulse count, gate count)."""
    return (clean_angle(sum(g.rotation for g in gates)), sum(1 for g in gates if g.is_pulse), len(gates))


def canonicalize_1q_run(gates) -> list[Gate]:
    """Rewrite a single-wire run of RX/RY/RZ into its cheapest Euler form.

    Candidates are [RZ a][RX t][RZ b] (both signs of t) and the two-pulse
    [RZ a][RX 90][RZ g][RX 90][RZ b]. The winner minimises total |RX|, then
    gate count, then prefers positive RX angles and leading RZ placement.
    """
    gates = list(gates)
    if not gates:
        return []
    wires = {g.wires[0] for g in gates}
    if len(wires) != 1 or any(g.kind not in ROTATIONS for g in gates):
        raise CircuitError("canonicalize_1q_run needs RX/RY/RZ gates on a single wire")
    w = wires.pop()
    u = _su2(gates)
    alpha, theta, beta = zxz_angles(u)

    candidates: list[list[Gate]] = []
    if theta == 0.0:
        candidates.append(_build(w, [(Kind.RZ, alpha + beta)]))
    elif theta == 180.0:
        # Rx(180) Rz(a) = Rz(-a) Rx(180): fold every RZ to one side
        candidates.append(_build(w, [(Kind.RZ, alpha - beta), (Kind.RX, 180.0)]))
        candidates.append(_build(w, [(Kind.RX, 180.0), (Kind.RZ, beta - alpha)]))
    else:
        candidates.append(_build(w, [(Kind.RZ, alpha), (Kind.RX, theta), (Kind.RZ, beta)]))
        candidates.append(_build(w, [(Kind.RZ, alpha + 180.0), (Kind.RX, -theta), (Kind.RZ, beta + 180.0)]))
    # Rx(t) = Rz(90) Rx(90) Rz(t + 180) Rx(90) Rz(90) up to phase
    candidates.append(_build(w, [(Kind.RZ, alpha + 90.0), (Kind.RX, 90.0), (Kind.RZ, theta + 180.0),
                                 (Kind.RX, 90.0), (Kind.RZ, beta + 90.0)]))

    def key(cand):
        rot, _, n = run_cost(cand)
        negative = any(g.kind is Kind.RX and g.angle < 0 for g in cand)
        return rot, n, negative

    return min(candidates, key=key)  # min is stable: earlier candidates win ties


def normal_order(c: Circuit) -> Circuit:
    """Canonical gate order: before each 2-wire gate, flush the pending 1q runs
    of its wires (ascending wire); leftover runs go last, ascending wire.

    Per-wire order is unchanged, so the operator is identical.
    """
    pending: dict[int, list[Gate]] = {w: [] for w in range(c.n_wires)}
    out: list[Gate] = []
    for g in c.gates:
        if len(g.wires) == 1:
            pending[g.wires[0]].append(g)
            continue
        for w in sorted(g.wires):
            out.extend(pending[w])
            pending[w] = []
        out.append(g)
    for w in range(c.n_wires):
        out.extend(pending[w])
    return c.with_gates(out)
