"""
Dense unitary construction and global-phase-insensitive equivalence.

Basis ordering: wire 0 is the most significant bit of the basis index.

Cross-resonance closed forms (control c, target t):
    K     = |0><0|_c (x) Rx(90)_t + |1><1|_c (x) Rx(-90)_t
    E     = Rx(180)_c
    CR+-  = E @ K     (kernel first in circuit time, echo side effect after)
    CR-+  = K @ E     (echo side effect first)
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .circuit import Circuit, CircuitError, Gate, Kind, Polarity

MAX_DENSE_WIRES = 12

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
P0 = np.diag([1, 0]).astype(complex)
P1 = np.diag([0, 1]).astype(complex)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
NOTC = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def rx_matrix(deg: float) -> np.ndarray:
    h = math.radians(deg) / 2
    return np.array([[math.cos(h), -1j * math.sin(h)], [-1j * math.sin(h), math.cos(h)]], dtype=complex)


def ry_matrix(deg: float) -> np.ndarray:
    h = math.radians(deg) / 2
    return np.array([[math.cos(h), -math.sin(h)], [math.sin(h), math.cos(h)]], dtype=complex)


def rz_matrix(deg: float) -> np.ndarray:
    h = math.radians(deg) / 2
    return np.array([[complex(math.cos(h), -math.sin(h)), 0], [0, complex(math.cos(h), math.sin(h))]])


def rotation_matrix(kind: Kind, deg: float) -> np.ndarray:
    return {Kind.RX: rx_matrix, Kind.RY: ry_matrix, Kind.RZ: rz_matrix}[kind](deg)


def cr_kernel() -> np.ndarray:
    return np.kron(P0, rx_matrix(90)) + np.kron(P1, rx_matrix(-90))


def cr_matrix(polarity: Polarity) -> np.ndarray:
    """4x4 CR on (control, target) with control as the high bit."""
    k = cr_kernel()
    e = np.kron(rx_matrix(180), I2)
    return e @ k if Polarity(polarity) is Polarity.PLUS_MINUS else k @ e


def local_matrix(g: Gate) -> np.ndarray:
    """Operator of g on its own wires, in g.wires order."""
    if g.kind in (Kind.RX, Kind.RY, Kind.RZ):
        return rotation_matrix(g.kind, g.angle)
    return {
        Kind.H: H,
        Kind.X: X,
        Kind.CNOT: CNOT,
        Kind.NOTC: NOTC,
        Kind.SWAP: SWAP,
    }.get(g.kind) if g.kind is not Kind.CR else cr_matrix(g.polarity)


def apply_local(state: np.ndarray, op: np.ndarray, wires, n_wires: int) -> np.ndarray:
    """Apply a k-wire operator to the leading index of state (shape (2**n, ...))."""
    wires = list(wires)
    k = len(wires)
    rest = state.shape[1:]
    t = state.reshape((2,) * n_wires + rest)
    opt = op.reshape((2,) * (2 * k))
    t = np.tensordot(opt, t, axes=(list(range(k, 2 * k)), wires))
    # tensordot puts the op's output axes first; move them back into place
    t = np.moveaxis(t, list(range(k)), wires)
    return t.reshape((2 ** n_wires,) + rest)


def gate_unitary(g: Gate, n_wires: int) -> np.ndarray:
    if any(w >= n_wires for w in g.wires):
        raise CircuitError(f"gate '{g}' does not fit in {n_wires} wires")
    if len(set(g.wires)) != len(g.wires):
        raise CircuitError(f"wire collision in '{g}'")
    op = local_matrix(g)
    if op is None:
        raise CircuitError(f"unknown gate kind {g.kind}")
    return apply_local(np.eye(2 ** n_wires, dtype=complex), op, g.wires, n_wires)


def circuit_unitary(c: Circuit) -> np.ndarray:
    if c.n_wires > MAX_DENSE_WIRES:
        raise CircuitError(f"{c.n_wires} wires exceeds the dense bound of {MAX_DENSE_WIRES}")
    u = np.eye(2 ** c.n_wires, dtype=complex)
    for g in c.gates:
        u = apply_local(u, local_matrix(g), g.wires, c.n_wires)
    return u


def apply_circuit(state: np.ndarray, c: Circuit) -> np.ndarray:
    for g in c.gates:
        state = apply_local(state, local_matrix(g), g.wires, c.n_wires)
    return state


class Equivalence(NamedTuple):
    equal: bool
    phase: float  # radians, arg(tr(u^dagger v))
    deficit: float  # 1 - |tr(u^dagger v)| / dim


def equal_up_to_global_phase(u: np.ndarray, v: np.ndarray, tol: float = 1e-9) -> Equivalence:
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    dim = u.shape[0]
    tr = np.vdot(u, v)  # == trace(u^dagger v)
    deficit = 1.0 - abs(tr) / dim
    equal = deficit <= tol
    return Equivalence(bool(equal), float(np.angle(tr)) if equal else float("nan"), float(deficit))


def is_unitary(u: np.ndarray, atol: float = 1e-10) -> bool:
    return bool(np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=atol, rtol=0))


def dump_matrix_csv(u: np.ndarray) -> str:
    """Row-major complex pairs: each CSV line is re0,im0,re1,im1,... for one row."""
    lines = []
    for row in np.asarray(u):
        lines.append(",".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row.astype(complex)))
    return "\n".join(lines) + "\n"


def load_matrix_csv(text: str) -> np.ndarray:
    rows = []
    for line in text.strip().splitlines():
        vals = [float(x) for x in line.split(",")]
        if len(vals) % 2:
            raise ValueError("matrix CSV rows need (re, im) pairs")
        rows.append([complex(vals[i], vals[i + 1]) for i in range(0, len(vals), 2)])
    u = np.array(rows, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"matrix CSV is not square: {u.shape}")
    return u
