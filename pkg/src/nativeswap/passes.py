"""
Verified peephole passes over native circuits.

Contains:
    - choose_orientation(): SWAP -> CNOT-NOTC-CNOT aligned with the CR direction
    - pass_cross_gate_cancellation(): merge 1q runs into Euler canonical form
    - pass_commute_through_cr(): move RX gates across CR targets (plus the
      RX(180)/RZ reflection) where that lets a run compress
    - pass_polarity_switch(): flip CR echo polarity when the injected RX(180)
      pair cancels into neighbouring runs
    - pass_x90_form(): re-express physical pulses as positive RX
    - optimize_pipeline(): all of the above, in order

Every pass works on per-wire runs of 1q gates between 2-wire gates, rebuilds
the circuit in normal order, rejects rewrites that would deepen the schedule,
and checks the result against the input with the unitary oracle.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass

import numpy as np

from .circuit import (
    Circuit, Gate, Kind, Polarity, canonicalize_1q_run, normal_order, normalize_angle, run_cost, rx, rz,
    schedule_moments,
)
from .decomp import SwapStrategy, lower_circuit
from .device import DeviceModel, circuit_metrics
from .unitary import Equivalence, apply_circuit, circuit_unitary, equal_up_to_global_phase

FULL_CHECK_WIRES = 6
SAMPLED_STATES = 16
SAMPLED_ATOL = 1e-8


class PassError(RuntimeError):
    """A pass produced a circuit that failed equivalence checking."""


@dataclass(frozen=True)
class PassReport:
    name: str
    gates_before: int
    gates_after: int
    depth_before: tuple[int, int]
    depth_after: tuple[int, int]
    rotation_before: float
    rotation_after: float
    verified: bool
    phase: float

    def to_dict(self) -> dict:
        return {
            "pass": self.name,
            "gates_before": self.gates_before,
            "gates_after": self.gates_after,
            "depth_before": f"{self.depth_before[0]}t1q+{self.depth_before[1]}tCR",
            "depth_after": f"{self.depth_after[0]}t1q+{self.depth_after[1]}tCR",
            "rotation_before": self.rotation_before,
            "rotation_after": self.rotation_after,
            "verified": self.verified,
            "phase": self.phase,
        }


def verify_equivalent(a: Circuit, b: Circuit, tol: float = 1e-9, seed: int = 0) -> Equivalence:
    """Unitary check for small circuits, random product states beyond FULL_CHECK_WIRES."""
    n = max(a.n_wires, b.n_wires)
    a = Circuit(n, a.gates)
    b = Circuit(n, b.gates)
    if n <= FULL_CHECK_WIRES:
        return equal_up_to_global_phase(circuit_unitary(a), circuit_unitary(b), tol)
    rng = np.random.default_rng(seed)
    overlaps = []
    for _ in range(SAMPLED_STATES):
        psi = np.ones(1, dtype=complex)
        for _ in range(n):
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            psi = np.kron(psi, v / np.linalg.norm(v))
        overlaps.append(np.vdot(apply_circuit(psi, a), apply_circuit(psi, b)))
    deficit = max(1.0 - abs(o) for o in overlaps)
    ref = np.angle(overlaps[0])
    drift = max(abs(np.angle(o * np.exp(-1j * ref))) for o in overlaps)
    equal = deficit <= SAMPLED_ATOL and drift <= SAMPLED_ATOL
    return Equivalence(bool(equal), float(ref) if equal else float("nan"), float(deficit))


def _depth(c: Circuit) -> tuple[int, int]:
    return schedule_moments(c).depth


def _no_deeper(new: tuple[int, int], old: tuple[int, int]) -> bool:
    return new[0] <= old[0] and new[1] <= old[1]


def _rotation(run) -> float:
    return run_cost(run)[0]


def _best(run: list[Gate]) -> list[Gate]:
    """The cheaper of the run and its canonical form (the original wins ties)."""
    if not run:
        return []
    canon = canonicalize_1q_run(run)
    return canon if run_cost(canon) < run_cost(run) else list(run)


class _Layout:
    """Per-wire runs of 1q gates separated by the 2-wire gates on that wire."""

    def __init__(self, c: Circuit):
        self.n_wires = c.n_wires
        self.twoq: list[Gate] = []
        self.runs: list[list[list[Gate]]] = [[[]] for _ in range(c.n_wires)]
        self.on_wire: list[list[int]] = [[] for _ in range(c.n_wires)]  # 2q gate indices per wire
        for g in c.gates:
            if len(g.wires) == 1:
                self.runs[g.wires[0]][-1].append(g)
                continue
            j = len(self.twoq)
            self.twoq.append(g)
            for w in g.wires:
                self.on_wire[w].append(j)
                self.runs[w].append([])

    def run_before(self, j: int, w: int) -> int:
        return self.on_wire[w].index(j)

    def left_gate(self, w: int, i: int) -> Gate | None:
        return self.twoq[self.on_wire[w][i - 1]] if i > 0 else None

    def right_gate(self, w: int, i: int) -> Gate | None:
        return self.twoq[self.on_wire[w][i]] if i < len(self.on_wire[w]) else None

    def build(self) -> Circuit:
        out: list[Gate] = []
        seen = [0] * self.n_wires
        for g in self.twoq:
            for w in sorted(g.wires):
                out.extend(self.runs[w][seen[w]])
                seen[w] += 1
            out.append(g)
        for w in range(self.n_wires):
            out.extend(self.runs[w][seen[w]])
        return Circuit(self.n_wires, tuple(out))

    def snapshot(self):
        return copy.deepcopy(self.runs), list(self.twoq)

    def restore(self, snap):
        self.runs, self.twoq = copy.deepcopy(snap[0]), list(snap[1])


def _report(name: str, before: Circuit, after: Circuit, eq: Equivalence, depth_before=None,
            rotation_before=None, gates_before=None) -> PassReport:
    return PassReport(
        name=name,
        gates_before=len(before) if gates_before is None else gates_before,
        gates_after=len(after),
        depth_before=_depth(before) if depth_before is None else depth_before,
        depth_after=_depth(after),
        rotation_before=before.external_rotation if rotation_before is None else rotation_before,
        rotation_after=after.external_rotation,
        verified=eq.equal,
        phase=eq.phase,
    )


def _checked(name: str, before: Circuit, after: Circuit, tol: float) -> tuple[Circuit, PassReport]:
    eq = verify_equivalent(before, after, tol)
    if not eq.equal:
        raise PassError(f"{name} broke equivalence (deficit {eq.deficit:.3g})")
    return after, _report(name, before, after, eq)


# ---------------------------------------------------------------------------


def choose_orientation(c: Circuit, device: DeviceModel) -> Circuit:
    """Expand each SWAP as CNOT-NOTC-CNOT with the CNOTs along the CR direction."""
    gates: list[Gate] = []
    for g in c.gates:
        if g.kind is not Kind.SWAP:
            gates.append(g)
            continue
        e = device.require_edge(*g.wires)
        cnot = Gate(Kind.CNOT, e.pair)
        gates.extend([cnot, Gate(Kind.NOTC, e.pair), cnot])
    return c.with_gates(gates)


def pass_cross_gate_cancellation(c: Circuit, tol: float = 1e-9) -> tuple[Circuit, PassReport]:
    lay = _Layout(c)
    depth = _depth(c)
    # all runs at once first: the greedy schedule can transiently deepen when
    # only some of several parallel runs shrink
    snap = lay.snapshot()
    lay.runs = [[_best(run) for run in runs] for runs in lay.runs]
    if _no_deeper(_depth(lay.build()), depth):
        return _checked("cross_gate_cancellation", c, lay.build(), tol)
    lay.restore(snap)
    for w in range(c.n_wires):
        for i, run in enumerate(lay.runs[w]):
            new = _best(run)
            if new == run:
                continue
            lay.runs[w][i] = new
            d = _depth(lay.build())
            if _no_deeper(d, depth):
                depth = d
            else:
                lay.runs[w][i] = run
    return _checked("cross_gate_cancellation", c, lay.build(), tol)


def _is_target_cr(g: Gate | None, w: int) -> bool:
    return g is not None and g.kind is Kind.CR and g.wires[1] == w


def _split_trailing_rx(run: list[Gate]):
    """(residual, rx) with rx movable to the right end of the run, or None."""
    pulses = [k for k, g in enumerate(run) if g.is_pulse]
    if not pulses or run[pulses[-1]].kind is not Kind.RX:
        return None
    p = pulses[-1]
    g, after = run[p], run[p + 1:]
    if after and normalize_angle(g.angle) != 180.0:
        return None
    # Rx(180) Rz(t) = Rz(-t) Rx(180)
    return run[:p] + [rz(-z.angle, z.wires[0]) for z in after], g


def _split_leading_rx(run: list[Gate]):
    pulses = [k for k, g in enumerate(run) if g.is_pulse]
    if not pulses or run[pulses[0]].kind is not Kind.RX:
        return None
    p = pulses[0]
    g, before = run[p], run[:p]
    if before and normalize_angle(g.angle) != 180.0:
        return None
    return [rz(-z.angle, z.wires[0]) for z in before] + run[p + 1:], g


def pass_commute_through_cr(c: Circuit, tol: float = 1e-9) -> tuple[Circuit, PassReport]:
    """Pull RX gates across CRs on their target wire into a neighbouring run.

    For each run (the receiver) the trailing RX of the run to its left and/or
    the leading RX of the run to its right may cross the separating CR when
    this wire is that CR's target. The cheapest combination is taken when it
    strictly lowers the active rotation of the three runs; repeat to fixpoint.
    """
    lay = _Layout(c)
    depth = _depth(c)
    changed = True
    while changed:
        changed = False
        for w in range(c.n_wires):
            for i in range(len(lay.runs[w])):
                if _try_receive(lay, w, i, depth):
                    depth = _depth(lay.build())
                    changed = True
    return _checked("commute_through_cr", c, lay.build(), tol)


def _try_receive(lay: _Layout, w: int, i: int, depth) -> bool:
    runs = lay.runs[w]
    left = _split_trailing_rx(runs[i - 1]) if _is_target_cr(lay.left_gate(w, i), w) else None
    right = _split_leading_rx(runs[i + 1]) if _is_target_cr(lay.right_gate(w, i), w) else None
    if left is None and right is None:
        return False
    touched = [k for k in (i - 1, i, i + 1) if 0 <= k < len(runs)]
    current = sum(_rotation(runs[k]) for k in touched)
    options = []
    for order, (use_l, use_r) in enumerate(((True, False), (False, True), (True, True))):
        if (use_l and left is None) or (use_r and right is None):
            continue
        new = {k: runs[k] for k in touched}
        recv = list(runs[i])
        if use_l:
            new[i - 1] = _best(left[0])
            recv = [left[1]] + recv
        if use_r:
            new[i + 1] = _best(right[0])
            recv = recv + [right[1]]
        new[i] = _best(recv)
        cost = sum(_rotation(new[k]) for k in touched)
        options.append((cost, use_l + use_r, order, new))
    options.sort(key=lambda o: o[:3])
    for cost, _, _, new in options:
        if cost >= current - 1e-9:
            break
        saved = {k: runs[k] for k in touched}
        for k, run in new.items():
            runs[k] = run
        if _no_deeper(_depth(lay.build()), depth):
            return True
        for k, run in saved.items():
            runs[k] = run
    return False


def pass_polarity_switch(c: Circuit, tol: float = 1e-9) -> tuple[Circuit, PassReport]:
    """Flip CR polarity using CR+- = RX(-180)_c . CR-+ . RX(180)_c (circuit order).

    A flip is kept only if the two injected control-wire pulses absorb into
    the neighbouring runs with a strict drop in active rotation.
    """
    lay = _Layout(c)
    depth = _depth(c)
    changed = True
    while changed:
        changed = False
        for j, g in enumerate(lay.twoq):
            if g.kind is not Kind.CR:
                continue
            ctrl = g.wires[0]
            ib = lay.run_before(j, ctrl)
            before, after = lay.runs[ctrl][ib], lay.runs[ctrl][ib + 1]
            pre = -180.0 if g.polarity is Polarity.PLUS_MINUS else 180.0
            new_before = _best(before + [rx(pre, ctrl)])
            new_after = _best([rx(-pre, ctrl)] + after)
            if _rotation(new_before) + _rotation(new_after) >= _rotation(before) + _rotation(after) - 1e-9:
                continue
            lay.runs[ctrl][ib], lay.runs[ctrl][ib + 1] = new_before, new_after
            lay.twoq[j] = Gate(Kind.CR, g.wires, polarity=g.polarity.flipped())
            d = _depth(lay.build())
            if _no_deeper(d, depth):
                depth = d
                changed = True
            else:
                lay.runs[ctrl][ib], lay.runs[ctrl][ib + 1] = before, after
                lay.twoq[j] = g
    return _checked("polarity_switch", c, lay.build(), tol)


def _merge_rz(run: list[Gate]) -> list[Gate]:
    out: list[Gate] = []
    for g in run:
        if g.kind is Kind.RZ and out and out[-1].kind is Kind.RZ:
            out[-1] = rz(normalize_angle(out[-1].angle + g.angle), g.wires[0])
        else:
            out.append(g)
    return [g for g in out if not (g.kind is Kind.RZ and normalize_angle(g.angle) == 0.0)]


def to_positive_rx(run: list[Gate]) -> list[Gate]:
    """Rewrite RY and negative RX pulses as positive RX between virtual RZs."""
    out: list[Gate] = []
    for g in run:
        if g.kind is Kind.RY:
            # Ry(t) = Rz(90) Rx(t) Rz(-90)
            seq = [rz(-90, g.wires[0]), rx(g.angle, g.wires[0]), rz(90, g.wires[0])]
        else:
            seq = [g]
        for h in seq:
            a = normalize_angle(h.angle)
            if h.kind is Kind.RX and a < 0:
                # Rx(-t) = Rz(180) Rx(t) Rz(180) up to phase
                out.extend([rz(180, h.wires[0]), rx(-a, h.wires[0]), rz(180, h.wires[0])])
            elif h.kind is Kind.RX:
                out.append(rx(a, h.wires[0]))  # RX(-180) is RX(180) up to phase
            else:
                out.append(h)
    return _merge_rz(out)


def pass_x90_form(c: Circuit, tol: float = 1e-9) -> tuple[Circuit, PassReport]:
    lay = _Layout(c)
    for w in range(c.n_wires):
        lay.runs[w] = [to_positive_rx(run) if any(g.is_pulse for g in run) else run for run in lay.runs[w]]
    return _checked("x90_form", c, lay.build(), tol)


def optimize_pipeline(c: Circuit, device: DeviceModel, tol: float = 1e-9) -> tuple[Circuit, list[PassReport]]:
    """Orientation, lowering and the four rewrite stages, each oracle-checked.

    The first report's "before" columns describe the Standard lowering
    (NOTC-CNOT-NOTC SWAPs) of the input, so the reports read as a ledger from
    Standard to Optimized.
    """
    standard = normal_order(lower_circuit(c, device, SwapStrategy.SLOW_ORIENTATION))
    lowered = normal_order(lower_circuit(choose_orientation(c, device), device))
    eq = verify_equivalent(c, lowered, tol)
    if not eq.equal:
        raise PassError(f"orientation broke equivalence (deficit {eq.deficit:.3g})")
    reports = [_report("orientation", standard, lowered, eq)]
    current = lowered
    for p in (pass_cross_gate_cancellation, pass_commute_through_cr, pass_polarity_switch, pass_x90_form):
        current, rep = p(current, tol)
        reports.append(rep)
    return current, reports


def ledger(c: Circuit, device: DeviceModel, tol: float = 1e-9) -> list[dict]:
    """Per-stage metrics rows (Standard, then after each stage) for a circuit on a device."""
    standard = normal_order(lower_circuit(c, device, SwapStrategy.SLOW_ORIENTATION))
    rows = [("standard", standard, verify_equivalent(c, standard, tol).equal)]
    lowered = normal_order(lower_circuit(choose_orientation(c, device), device))
    rows.append(("orientation", lowered, verify_equivalent(c, lowered, tol).equal))
    current = lowered
    for p in (pass_cross_gate_cancellation, pass_commute_through_cr, pass_polarity_switch, pass_x90_form):
        current, rep = p(current, tol)
        rows.append((rep.name, current, rep.verified))
    out = []
    for stage, circ, ok in rows:
        m = circuit_metrics(circ, device)
        out.append({"stage": stage, **m.to_dict(), "verified": ok})
    return out
