"""
Device calibration model and analytic timing/error formulas.

Durations are integers in dt samples; nanoseconds are derived via dt_ns.
Circuit wire i is device qubit i, so qubit ids must be 0..n-1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .circuit import Circuit, Kind, MomentClass, schedule_moments


class DeviceError(ValueError):
    pass


@dataclass(frozen=True)
class Qubit:
    id: int
    t1q_dt: int
    T1_us: float
    T2_us: float


@dataclass(frozen=True)
class Edge:
    control: int
    target: int
    tcr_dt: int

    @property
    def pair(self) -> tuple[int, int]:
        return self.control, self.target


@dataclass(frozen=True)
class DeviceModel:
    name: str
    dt_ns: float
    qubits: tuple[Qubit, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "edges", tuple(self.edges))
        if not self.dt_ns > 0:
            raise DeviceError("dt_ns: must be positive")
        ids = [q.id for q in self.qubits]
        if sorted(ids) != list(range(len(ids))):
            raise DeviceError(f"qubits: ids must be exactly 0..{len(ids) - 1}, got {ids}")
        for q in self.qubits:
            if q.t1q_dt <= 0:
                raise DeviceError(f"qubit {q.id}: t1q_dt must be positive")
            if not (q.T1_us > 0 and q.T2_us > 0):
                raise DeviceError(f"qubit {q.id}: T1_us and T2_us must be positive")
            if q.T2_us > 2 * q.T1_us * (1 + 1e-12):
                raise DeviceError(f"qubit {q.id}: T2_us={q.T2_us} exceeds 2*T1_us={2 * q.T1_us}")
        seen = set()
        for e in self.edges:
            if e.control not in ids or e.target not in ids:
                raise DeviceError(f"edge {e.control}->{e.target}: unknown qubit")
            if e.control == e.target:
                raise DeviceError(f"edge {e.control}->{e.target}: endpoints must differ")
            key = frozenset(e.pair)
            if key in seen:
                raise DeviceError(f"edge {e.control}->{e.target}: duplicate pair")
            seen.add(key)
            if e.tcr_dt <= 0:
                raise DeviceError(f"edge {e.control}->{e.target}: tcr_dt must be positive")

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)

    def qubit(self, q: int) -> Qubit:
        return self.qubits[q]

    def edge(self, a: int, b: int) -> Edge | None:
        """The edge joining a and b, in whichever CR direction it has."""
        for e in self.edges:
            if {e.control, e.target} == {a, b}:
                return e
        return None

    def require_edge(self, a: int, b: int) -> Edge:
        e = self.edge(a, b)
        if e is None:
            raise DeviceError(f"qubits {a} and {b} are not connected on {self.name}")
        return e

    def edge_t1q(self, e: Edge) -> int:
        return max(self.qubits[e.control].t1q_dt, self.qubits[e.target].t1q_dt)

    def neighbors(self, q: int) -> list[int]:
        out = set()
        for e in self.edges:
            if e.control == q:
                out.add(e.target)
            elif e.target == q:
                out.add(e.control)
        return sorted(out)

    def subdevice(self, qubit_ids) -> "DeviceModel":
        """Restrict to qubit_ids, relabelled 0..k-1 in the given order."""
        qubit_ids = list(qubit_ids)
        index = {q: i for i, q in enumerate(qubit_ids)}
        qubits = [Qubit(index[q], self.qubits[q].t1q_dt, self.qubits[q].T1_us, self.qubits[q].T2_us)
                  for q in qubit_ids]
        edges = [Edge(index[e.control], index[e.target], e.tcr_dt)
                 for e in self.edges if e.control in index and e.target in index]
        return DeviceModel(f"{self.name}[{','.join(map(str, qubit_ids))}]", self.dt_ns, qubits, edges)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "dt_ns": self.dt_ns,
            "qubits": [{"id": q.id, "t1q_dt": q.t1q_dt, "T1_us": q.T1_us, "T2_us": q.T2_us} for q in self.qubits],
            "edges": [{"control": e.control, "target": e.target, "tcr_dt": e.tcr_dt} for e in self.edges],
        }


def _field(obj, key, typ, path):
    if not isinstance(obj, dict) or key not in obj:
        raise DeviceError(f"{path}: missing field '{key}'")
    val = obj[key]
    if typ is int:
        ok = isinstance(val, int) and not isinstance(val, bool)
    elif typ is float:
        ok = isinstance(val, (int, float)) and not isinstance(val, bool)
    else:
        ok = isinstance(val, typ)
    if not ok:
        raise DeviceError(f"{path}.{key}: expected {typ.__name__}, got {type(val).__name__}")
    return val


def device_from_dict(data: dict) -> DeviceModel:
    if not isinstance(data, dict):
        raise DeviceError("$: expected a JSON object")
    name = _field(data, "name", str, "$")
    dt_ns = float(_field(data, "dt_ns", float, "$"))
    qubits = []
    for i, q in enumerate(_field(data, "qubits", list, "$")):
        p = f"$.qubits[{i}]"
        qubits.append(Qubit(_field(q, "id", int, p), _field(q, "t1q_dt", int, p),
                            float(_field(q, "T1_us", float, p)), float(_field(q, "T2_us", float, p))))
    edges = []
    for i, e in enumerate(_field(data, "edges", list, "$")):
        p = f"$.edges[{i}]"
        edges.append(Edge(_field(e, "control", int, p), _field(e, "target", int, p), _field(e, "tcr_dt", int, p)))
    qubits.sort(key=lambda q: q.id)
    return DeviceModel(name, dt_ns, tuple(qubits), tuple(edges))


def load_device(path) -> DeviceModel:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DeviceError(f"{path}: invalid JSON ({exc})") from None
    return device_from_dict(data)


# ---------------------------------------------------------------------------
# Metrics


@dataclass(frozen=True)
class MetricsReport:
    depth: tuple[int, int]  # (a, b): a*t1q + b*tCR
    duration_dt: int
    duration_ns: float
    external_rotation_deg: float
    internal_rotation_deg: float

    @property
    def depth_str(self) -> str:
        return f"{self.depth[0]}t1q+{self.depth[1]}tCR"

    @property
    def rotation_str(self) -> str:
        return f"{self.external_rotation_deg:g} + {self.internal_rotation_deg:g}"

    def to_dict(self) -> dict:
        return {
            "depth": self.depth_str,
            "depth_t1q": self.depth[0],
            "depth_tcr": self.depth[1],
            "duration_dt": self.duration_dt,
            "duration_ns": self.duration_ns,
            "external_rotation_deg": self.external_rotation_deg,
            "internal_rotation_deg": self.internal_rotation_deg,
        }


def moment_durations(c: Circuit, device: DeviceModel, schedule=None) -> list[int]:
    """Duration in dt of each scheduled moment (virtual moments are 0)."""
    schedule = schedule or schedule_moments(c)
    if c.n_wires > device.n_qubits:
        raise DeviceError(f"circuit has {c.n_wires} wires but {device.name} has {device.n_qubits} qubits")
    out = []
    for m in schedule.moments:
        if m.cls is MomentClass.VIRTUAL:
            out.append(0)
            continue
        cost = 0
        for i in m.gates:
            g = c.gates[i]
            if g.kind is Kind.CR:
                e = device.edge(*g.wires)
                if e is None or e.pair != g.wires:
                    raise DeviceError(f"'{g}' does not match a CR direction on {device.name}")
                cost = max(cost, e.tcr_dt)
            elif g.is_pulse:
                cost = max(cost, device.qubits[g.wires[0]].t1q_dt)
        out.append(cost)
    return out


def circuit_metrics(c: Circuit, device: DeviceModel) -> MetricsReport:
    schedule = schedule_moments(c)
    dur = sum(moment_durations(c, device, schedule))
    return MetricsReport(
        depth=schedule.depth,
        duration_dt=dur,
        duration_ns=dur * device.dt_ns,
        external_rotation_deg=c.external_rotation,
        internal_rotation_deg=180.0 * c.cr_count,
    )


def orientation_speedup(edge, device: DeviceModel) -> float:
    """NOTC-CNOT-NOTC over CNOT-NOTC-CNOT runtime for one edge."""
    e = device.require_edge(*edge)
    a, b = device.edge_t1q(e), e.tcr_dt
    return (5 * a + 3 * b) / (4 * a + 3 * b)


def optimized_speedup(edge, device: DeviceModel) -> float:
    """Standard over Optimized SWAP runtime for one edge."""
    e = device.require_edge(*edge)
    a, b = device.edge_t1q(e), e.tcr_dt
    return (5 * a + 3 * b) / (2 * a + 3 * b)


def speedup_table(device: DeviceModel) -> tuple[list[dict], float]:
    """Per-edge speedup rows plus the mean optimized speedup."""
    rows = []
    for e in device.edges:
        rows.append({
            "control": e.control,
            "target": e.target,
            "t1q_dt": device.edge_t1q(e),
            "tcr_dt": e.tcr_dt,
            "orientation_speedup": orientation_speedup(e.pair, device),
            "optimized_speedup": optimized_speedup(e.pair, device),
        })
    mean = sum(r["optimized_speedup"] for r in rows) / len(rows) if rows else float("nan")
    return rows, mean


def infer_native_durations(d_std_dt: int, d_opt_dt: int) -> tuple[int, int]:
    """Solve 5a+3b = d_std, 2a+3b = d_opt for (t1q, tCR) in dt."""
    if not d_std_dt > d_opt_dt > 0:
        raise ValueError(f"need d_std > d_opt > 0, got ({d_std_dt}, {d_opt_dt})")
    t1q = round((d_std_dt - d_opt_dt) / 3)
    tcr = round((d_opt_dt - 2 * t1q) / 3)
    if t1q <= 0 or tcr <= 0:
        raise ValueError(f"inconsistent durations ({d_std_dt}, {d_opt_dt}): t1q={t1q}, tCR={tcr}")
    return t1q, tcr


def coherence_limited_error(duration_ns: float, qubits) -> float:
    """Average-gate-error floor from T1/T2 decay over the gate duration.

    1 - prod_q [1/2 + exp(-t/T2)/3 + exp(-t/T1)/6]
    """
    if duration_ns < 0:
        raise ValueError("duration must be non-negative")
    t_us = duration_ns / 1000.0
    # expm1/log1p keep short-gate errors accurate (no 1 - 0.99... cancellation)
    log_prod = sum(math.log1p(math.expm1(-t_us / q.T2_us) / 3.0 + math.expm1(-t_us / q.T1_us) / 6.0)
                   for q in qubits)
    return -math.expm1(log_prod)
