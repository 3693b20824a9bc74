"""
Single- and two-qubit Clifford groups with native realizations.

Contains:
    - single_qubit_cliffords(): the 24 elements as canonical native runs
    - CliffordClass, CliffordElement: the 11520-element two-qubit group, indexed
    - clifford_element(i), clifford_class(i), random_clifford2(rng), clifford_index(u)
    - is_clifford(): Pauli-conjugation test
    - closure_size(): brute-force group closure oracle

Index layout (class blocks, in circuit time C1 x C1 -> entangler -> S1 x S1):
    [0, 576)        C1 x C1
    [576, 5760)     C1 x C1, CNOT, S1 x S1
    [5760, 10944)   C1 x C1, CNOT then NOTC, S1 x S1
    [10944, 11520)  C1 x C1, SWAP
All entanglers use the CR direction 0 -> 1.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .circuit import Circuit, Gate, Kind, canonicalize_1q_run, normal_order, rx, rz, zxz_angles
from .decomp import SwapStrategy, lower_cnot, lower_notc, swap_template
from .unitary import CNOT, NOTC, SWAP, H, I2, X, Y, Z, circuit_unitary

GROUP_SIZE = 11520
N_C1 = 24

_S = np.diag([1, 1j]).astype(complex)
_PAULI_1Q = (I2, X, Y, Z)
PAULIS_2Q = tuple(np.kron(a, b) for a in _PAULI_1Q for b in _PAULI_1Q)


def phase_key(u: np.ndarray, decimals: int = 6) -> bytes:
    """Hashable key of u modulo global phase."""
    flat = np.asarray(u, dtype=complex).ravel()
    k = int(np.argmax(np.abs(flat) > 1e-6))
    v = flat * (abs(flat[k]) / flat[k])
    v = np.round(v, decimals) + (0.0 + 0.0j)  # drop negative zeros
    return v.tobytes()


def _closure(gens, dim: int) -> list[np.ndarray]:
    """BFS over products of generators, deterministic order, modulo phase."""
    start = np.eye(dim, dtype=complex)
    seen = {phase_key(start)}
    out = [start]
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for g in gens:
            v = g @ u
            key = phase_key(v)
            if key not in seen:
                seen.add(key)
                out.append(v)
                queue.append(v)
    return out


@lru_cache(maxsize=None)
def single_qubit_cliffords() -> tuple[tuple[tuple[str, float], ...], ...]:
    """The 24 single-qubit Cliffords as canonical (kind, angle) runs, BFS order from I over {H, S}."""
    runs = []
    for u in _closure((H, _S), 2):
        a, t, b = zxz_angles(u)
        run = canonicalize_1q_run([rz(a, 0), rx(t, 0), rz(b, 0)])
        runs.append(tuple((g.kind.value, g.angle) for g in run))
    if len(runs) != N_C1:
        raise AssertionError(f"single-qubit Clifford closure has {len(runs)} elements")
    return tuple(runs)


def _c1_gates(i: int, w: int) -> list[Gate]:
    return [Gate(Kind(k), (w,), a) for k, a in single_qubit_cliffords()[i]]


@lru_cache(maxsize=None)
def _c1_matrices() -> tuple[np.ndarray, ...]:
    return tuple(circuit_unitary(Circuit(1, tuple(_c1_gates(i, 0)))) for i in range(N_C1))


@lru_cache(maxsize=None)
def s1_indices() -> tuple[int, int, int]:
    """C1 indices of I, V, V^2 where V X V^dag = Y and V Y V^dag = Z."""
    mats = _c1_matrices()
    for i, v in enumerate(mats):
        if np.allclose(v @ X @ v.conj().T, Y) and np.allclose(v @ Y @ v.conj().T, Z):
            v2 = v @ v
            j = next(k for k, m in enumerate(mats) if abs(np.vdot(m, v2)) > 2 - 1e-9)
            return 0, i, j
    raise AssertionError("no order-3 Clifford permuting X -> Y -> Z")


class CliffordClass(str, Enum):
    SINGLE = "single"
    CNOT_LIKE = "cnot-like"
    ISWAP_LIKE = "iswap-like"
    SWAP_LIKE = "swap-like"

    @property
    def cr_count(self) -> int:
        return {"single": 0, "cnot-like": 1, "iswap-like": 2, "swap-like": 3}[self.value]


_BLOCKS = ((CliffordClass.SINGLE, 0, 576), (CliffordClass.CNOT_LIKE, 576, 5760),
           (CliffordClass.ISWAP_LIKE, 5760, 10944), (CliffordClass.SWAP_LIKE, 10944, 11520))


def _decode(index: int):
    """(class, c1_a, c1_b, s1_a, s1_b) for a group index."""
    if not 0 <= index < GROUP_SIZE:
        raise IndexError(f"Clifford index {index} outside [0, {GROUP_SIZE})")
    for cls, lo, hi in _BLOCKS:
        if index < hi:
            r = index - lo
            if cls in (CliffordClass.SINGLE, CliffordClass.SWAP_LIKE):
                return cls, r // N_C1, r % N_C1, 0, 0
            pair, s = divmod(r, 9)
            return cls, pair // N_C1, pair % N_C1, s // 3, s % 3
    raise AssertionError("unreachable")


def clifford_class(index: int) -> CliffordClass:
    return _decode(index)[0]


def _entangler(cls: CliffordClass) -> list[Gate]:
    if cls is CliffordClass.SINGLE:
        return []
    if cls is CliffordClass.CNOT_LIKE:
        return list(lower_cnot(0, 1, 2).gates)
    if cls is CliffordClass.ISWAP_LIKE:
        return list(lower_cnot(0, 1, 2).gates) + list(lower_notc(0, 1, 2).gates)
    return list(swap_template(SwapStrategy.OPTIMIZED).gates)


@dataclass(frozen=True)
class CliffordElement:
    index: int
    cls: CliffordClass
    circuit: Circuit
    unitary: np.ndarray

    @property
    def cr_count(self) -> int:
        return self.circuit.cr_count


def _merge_runs(c: Circuit) -> Circuit:
    """Merge adjacent 1q gates on each wire into canonical runs."""
    out: list[Gate] = []
    pending: dict[int, list[Gate]] = {0: [], 1: []}

    def flush(w):
        out.extend(canonicalize_1q_run(pending[w]) if pending[w] else [])
        pending[w] = []

    for g in c.gates:
        if len(g.wires) == 1:
            pending[g.wires[0]].append(g)
            continue
        for w in sorted(g.wires):
            flush(w)
        out.append(g)
    for w in (0, 1):
        flush(w)
    return normal_order(c.with_gates(out))


_ENTANGLER_U = {CliffordClass.SINGLE: np.eye(4, dtype=complex), CliffordClass.CNOT_LIKE: CNOT,
                CliffordClass.ISWAP_LIKE: NOTC @ CNOT, CliffordClass.SWAP_LIKE: SWAP}


def clifford_unitary(index: int) -> np.ndarray:
    cls, a, b, sa, sb = _decode(index)
    mats = _c1_matrices()
    u = _ENTANGLER_U[cls] @ np.kron(mats[a], mats[b])
    if cls in (CliffordClass.CNOT_LIKE, CliffordClass.ISWAP_LIKE):
        s1 = s1_indices()
        u = np.kron(mats[s1[sa]], mats[s1[sb]]) @ u
    return u


@lru_cache(maxsize=GROUP_SIZE)
def clifford_element(index: int) -> CliffordElement:
    cls, a, b, sa, sb = _decode(index)
    gates = _c1_gates(a, 0) + _c1_gates(b, 1) + _entangler(cls)
    if cls in (CliffordClass.CNOT_LIKE, CliffordClass.ISWAP_LIKE):
        s1 = s1_indices()
        gates += _c1_gates(s1[sa], 0) + _c1_gates(s1[sb], 1)
    circuit = _merge_runs(Circuit(2, tuple(gates)))
    return CliffordElement(index, cls, circuit, clifford_unitary(index))


@lru_cache(maxsize=1)
def _lookup() -> dict[bytes, int]:
    table = {}
    for i in range(GROUP_SIZE):
        key = phase_key(clifford_unitary(i))
        if key in table:
            raise AssertionError(f"Clifford indices {table[key]} and {i} coincide")
        table[key] = i
    return table


def clifford_index(u: np.ndarray) -> int:
    """Group index of a 4x4 Clifford unitary (any global phase)."""
    try:
        return _lookup()[phase_key(u)]
    except KeyError:
        raise ValueError("unitary is not a two-qubit Clifford") from None


def random_clifford2(rng: np.random.Generator) -> CliffordElement:
    """Uniform sample: every class block is indexed by its exact size."""
    return clifford_element(int(rng.integers(GROUP_SIZE)))


def is_clifford(u: np.ndarray, atol: float = 1e-8) -> bool:
    """True when u P u^dag is a Pauli times a phase in {+-1, +-i} for every non-identity Pauli P."""
    u = np.asarray(u, dtype=complex)
    n = int(round(np.log2(u.shape[0])))
    paulis = PAULIS_2Q if n == 2 else _PAULI_1Q if n == 1 else None
    if paulis is None:
        raise ValueError("is_clifford supports one or two qubits")
    d = u.shape[0]
    for p in paulis[1:]:
        m = u @ p @ u.conj().T
        coeffs = np.array([np.vdot(q, m) / d for q in paulis])
        k = int(np.argmax(np.abs(coeffs)))
        c = coeffs[k]
        if abs(abs(c) - 1) > atol or min(abs(c - z) for z in (1, -1, 1j, -1j)) > atol:
            return False
    return True


def closure_size() -> int:
    """Size of the group generated by H, S on each wire and CNOT, modulo phase."""
    gens = (np.kron(H, I2), np.kron(I2, H), np.kron(_S, I2), np.kron(I2, _S), CNOT)
    return len(_closure(gens, 4))


def class_sizes() -> dict[CliffordClass, int]:
    return {cls: hi - lo for cls, lo, hi in _BLOCKS}


__all__ = [
    "CliffordClass", "CliffordElement", "GROUP_SIZE", "clifford_class", "clifford_element", "clifford_unitary", "clifford_index", "random_clifford2",
    "is_clifford", "closure_size", "single_qubit_cliffords", "s1_indices", "phase_key", "class_sizes",
]
