"""
Application benchmarks, greedy SWAP routing and the improvement model.

Contains:
    - Benchmark, gen_benchmark(): LONG_SWAP and Bernstein-Vazirani circuits
    - route_on_coupling(): BFS shortest-path SWAP insertion
    - run_benchmark(): route, lower, simulate, score the expected output
    - ImprovementParams, improvement_model(): fidelity-ratio x decoherence-avoidance factor
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from enum import Enum

from .circuit import Circuit, Gate, Kind
from .decomp import SwapStrategy, lower_circuit
from .device import DeviceModel, circuit_metrics
from .noise import MAX_DENSITY_WIRES, NoiseModel, simulate_density


class BenchmarkError(ValueError):
    pass


class RoutingError(RuntimeError):
    pass


class BenchmarkName(str, Enum):
    LONG_SWAP = "long-swap"
    BERNSTEIN_VAZIRANI = "bv"

    @classmethod
    def parse(cls, name: str) -> "BenchmarkName":
        key = name.strip().lower().replace("_", "-")
        aliases = {"bernstein-vazirani": "bv", "longswap": "long-swap"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise BenchmarkError(f"unknown benchmark '{name}'") from None


def gen_benchmark(name, n: int) -> Circuit:
    name = BenchmarkName.parse(name) if isinstance(name, str) else BenchmarkName(name)
    if n < 2:
        raise BenchmarkError(f"{name.value} needs n >= 2, got {n}")
    if name is BenchmarkName.LONG_SWAP:
        gates = [Gate(Kind.X, (0,))] + [Gate(Kind.SWAP, (i, i + 1)) for i in range(n - 1)]
        return Circuit(n, tuple(gates))
    anc = n - 1
    data = range(n - 1)
    gates = [Gate(Kind.X, (anc,)), Gate(Kind.H, (anc,))]
    gates += [Gate(Kind.H, (d,)) for d in data]
    gates += [Gate(Kind.CNOT, (d, anc)) for d in data]
    gates += [Gate(Kind.H, (d,)) for d in data]
    return Circuit(n, tuple(gates))


@dataclass(frozen=True)
class Benchmark:
    name: BenchmarkName
    n: int

    @property
    def expected_output(self) -> str:
        """Expected bitstring per logical wire; 'x' marks an unscored wire."""
        if self.name is BenchmarkName.LONG_SWAP:
            return "0" * (self.n - 1) + "1"
        return "1" * (self.n - 1) + "x"

    def circuit(self) -> Circuit:
        return gen_benchmark(self.name, self.n)


@dataclass(frozen=True)
class RoutingResult:
    circuit: Circuit  # on device qubits
    swaps: int  # inserted by the router
    final_placement: tuple[int, ...]  # logical wire -> device qubit


def _shortest_path(device: DeviceModel, a: int, b: int) -> list[int]:
    prev = {a: None}
    queue = deque([a])
    while queue:
        q = queue.popleft()
        if q == b:
            break
        for nb in device.neighbors(q):  # ascending: lowest-index tie-break
            if nb not in prev:
                prev[nb] = q
                queue.append(nb)
    if b not in prev:
        raise RoutingError(f"qubits {a} and {b} are disconnected on {device.name}")
    path = [b]
    while path[-1] != a:
        path.append(prev[path[-1]])
    return path[::-1]


def route_on_coupling(c: Circuit, device: DeviceModel, placement=None) -> RoutingResult:
    """Greedy routing: walk the first operand along a BFS path until adjacent."""
    placement = list(range(c.n_wires)) if placement is None else list(placement)
    if len(placement) != c.n_wires:
        raise RoutingError(f"placement has {len(placement)} entries for {c.n_wires} wires")
    if len(set(placement)) != len(placement) or any(not 0 <= q < device.n_qubits for q in placement):
        raise RoutingError(f"placement {placement} is not injective onto {device.name}")
    occupant = {q: w for w, q in enumerate(placement)}
    gates: list[Gate] = []
    inserted = 0
    for g in c.gates:
        if len(g.wires) == 2:
            pa, pb = placement[g.wires[0]], placement[g.wires[1]]
            path = _shortest_path(device, pa, pb)
            for u, v in zip(path, path[1:-1]):
                gates.append(Gate(Kind.SWAP, (u, v)))
                inserted += 1
                wu, wv = occupant.pop(u, None), occupant.pop(v, None)
                if wu is not None:
                    placement[wu] = v
                    occupant[v] = wu
                if wv is not None:
                    placement[wv] = u
                    occupant[u] = wv
        gates.append(Gate(g.kind, tuple(placement[w] for w in g.wires), g.angle, g.polarity))
    return RoutingResult(Circuit(device.n_qubits, tuple(gates)), inserted, tuple(placement))


def compact(c: Circuit, device: DeviceModel) -> tuple[Circuit, DeviceModel, list[int]]:
    """Drop idle qubits; returns the relabelled circuit, subdevice and kept qubit ids."""
    used = sorted({w for g in c.gates for w in g.wires})
    index = {q: i for i, q in enumerate(used)}
    gates = tuple(Gate(g.kind, tuple(index[w] for w in g.wires), g.angle, g.polarity) for g in c.gates)
    return Circuit(len(used), gates), device.subdevice(used), used


@dataclass(frozen=True)
class BenchmarkRun:
    name: str
    n: int
    strategy: str
    success: float
    swaps_total: int
    swaps_inserted: int
    duration_ns: float
    wires: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def run_benchmark(b: Benchmark, device: DeviceModel, noise: NoiseModel, strategy, placement=None) -> BenchmarkRun:
    """Route, lower (SWAPs per strategy, every other gate identically), simulate, score."""
    strategy = SwapStrategy.parse(strategy) if isinstance(strategy, str) else SwapStrategy(strategy)
    routed = route_on_coupling(b.circuit(), device, placement)
    small, sub, kept = compact(routed.circuit, device)
    if small.n_wires > MAX_DENSITY_WIRES:
        raise BenchmarkError(f"routed circuit needs {small.n_wires} qubits (limit {MAX_DENSITY_WIRES})")
    native = lower_circuit(small, sub, strategy)
    probs = simulate_density(native, noise, sub)
    pos = {q: i for i, q in enumerate(kept)}
    want = {pos[routed.final_placement[w]]: bit for w, bit in enumerate(b.expected_output) if bit != "x"}
    success = sum(p for bits, p in probs.items() if all(bits[i] == v for i, v in want.items()))
    return BenchmarkRun(
        name=b.name.value,
        n=b.n,
        strategy=strategy.value,
        success=float(success),
        swaps_total=sum(1 for g in routed.circuit.gates if g.kind is Kind.SWAP),
        swaps_inserted=routed.swaps,
        duration_ns=circuit_metrics(native, sub).duration_ns,
        wires=small.n_wires,
    )


@dataclass(frozen=True)
class ImprovementParams:
    error_opt: float
    error_std: float
    k: int  # SWAP count
    delta_T_us: float  # runtime saved
    T1_us: float
    T2_us: float
    N: int  # qubits

    def __post_init__(self):
        for name in ("error_opt", "error_std"):
            e = getattr(self, name)
            if not 0 <= e < 1:
                raise ValueError(f"{name}={e} must lie in [0, 1)")
        if self.k < 0 or self.N < 0:
            raise ValueError("k and N must be non-negative")
        if self.delta_T_us < 0:
            raise ValueError("delta_T_us must be non-negative")
        if not (self.T1_us > 0 and self.T2_us > 0):
            raise ValueError("T1_us and T2_us must be positive")


def improvement_model(p: ImprovementParams) -> float:
    """((1 - e_opt)/(1 - e_std))^k * exp(dT/T1 + dT/T2)^N."""
    swap_term = ((1 - p.error_opt) / (1 - p.error_std)) ** p.k
    idle_term = math.exp(p.N * (p.delta_T_us / p.T1_us + p.delta_T_us / p.T2_us))
    return swap_term * idle_term
