"""
Noise channels and density-matrix simulation.

Contains:
    - NoiseModel: per-pulse depolarizing, per-CR depolarizing, thermal relaxation
    - thermal_channel(), depolarizing_channel(): Kraus sets
    - simulate_density(): moment-by-moment evolution of |0...0>
    - circuit_superop(): the noisy channel of a circuit as a row-major superoperator
    - average_gate_fidelity(): process-fidelity oracle against a target unitary

Density matrices carry optional trailing batch axes, shape (d, d, *batch).
Superoperators act on row-major vec(rho): vec(A rho B) = (A kron B^T) vec(rho).
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .circuit import Circuit, Kind, MomentClass, schedule_moments
from .device import DeviceModel, moment_durations
from .unitary import I2, X, Y, Z, apply_local, local_matrix

MAX_DENSITY_WIRES = 9
KRAUS_ATOL = 1e-10


class NoiseError(ValueError):
    pass


@dataclass(frozen=True)
class NoiseModel:
    depol_1q: float = 0.0  # per physical RX/RY pulse
    depol_2q: float = 0.0  # per CR, on both wires
    thermal: bool = False  # T1/T2 decay on every wire for each moment's duration
    seed: int = 0
    shots: int | None = None  # None: exact probabilities

    def __post_init__(self):
        for name in ("depol_1q", "depol_2q"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise NoiseError(f"{name}={p} is not a probability")
        if self.shots is not None and self.shots <= 0:
            raise NoiseError(f"shots must be positive, got {self.shots}")

    @property
    def is_noiseless(self) -> bool:
        return self.depol_1q == 0 and self.depol_2q == 0 and not self.thermal

    def to_dict(self) -> dict:
        return {"depol_1q": self.depol_1q, "depol_2q": self.depol_2q, "thermal": self.thermal,
                "shots": self.shots}


def noise_from_dict(data: dict, seed: int = 0) -> NoiseModel:
    if not isinstance(data, dict):
        raise NoiseError("$: expected a JSON object")
    unknown = set(data) - {"depol_1q", "depol_2q", "thermal", "shots"}
    if unknown:
        raise NoiseError(f"$: unknown fields {sorted(unknown)}")
    try:
        return NoiseModel(float(data.get("depol_1q", 0.0)), float(data.get("depol_2q", 0.0)),
                          bool(data.get("thermal", False)), seed,
                          None if data.get("shots") is None else int(data["shots"]))
    except (TypeError, ValueError) as exc:
        raise NoiseError(f"$: {exc}") from None


def load_noise(path, seed: int = 0) -> NoiseModel:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise NoiseError(f"{path}: invalid JSON ({exc})") from None
    return noise_from_dict(data, seed)


# ---------------------------------------------------------------------------
# Channels


def kraus_closure_error(kraus) -> float:
    d = kraus[0].shape[0]
    s = sum(k.conj().T @ k for k in kraus)
    return float(np.max(np.abs(s - np.eye(d))))


def thermal_channel(t_ns: float, T1_us: float, T2_us: float) -> list[np.ndarray]:
    """Amplitude damping (gamma = 1 - exp(-t/T1)) followed by pure dephasing at 1/T_phi = 1/T2 - 1/(2 T1)."""
    if t_ns < 0:
        raise NoiseError("duration must be non-negative")
    if not (T1_us > 0 and T2_us > 0):
        raise NoiseError("T1 and T2 must be positive")
    if T2_us > 2 * T1_us * (1 + 1e-12):
        raise NoiseError(f"T2={T2_us} exceeds 2*T1={2 * T1_us}: unphysical")
    t_us = t_ns / 1000.0
    gamma = -math.expm1(-t_us / T1_us)
    rate_phi = max(1.0 / T2_us - 0.5 / T1_us, 0.0)
    # coherence factor sqrt(1 - lam) must equal exp(-t/T_phi)
    lam = -math.expm1(-2.0 * t_us * rate_phi)
    amp = [np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=complex),
           np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex)]
    phase = [np.array([[1, 0], [0, math.sqrt(1 - lam)]], dtype=complex),
             np.array([[0, 0], [0, math.sqrt(lam)]], dtype=complex)]
    out = [p @ a for p in phase for a in amp]
    return [k for k in out if np.any(np.abs(k) > 0)]


_PAULIS = (I2, X, Y, Z)


def depolarizing_channel(p: float, n_qubits: int = 1) -> list[np.ndarray]:
    """rho -> (1 - p) rho + p I/d as a Pauli mixture."""
    if not 0.0 <= p <= 1.0:
        raise NoiseError(f"depolarizing probability {p} out of range")
    d2 = 4 ** n_qubits
    ops = []
    for combo in itertools.product(_PAULIS, repeat=n_qubits):
        m = combo[0]
        for q in combo[1:]:
            m = np.kron(m, q)
        ops.append(m)
    w0 = 1.0 - p * (d2 - 1) / d2
    out = [math.sqrt(w0) * ops[0]]
    if p > 0:
        out += [math.sqrt(p / d2) * m for m in ops[1:]]
    return out


def kraus_superop(kraus) -> np.ndarray:
    return sum(np.kron(k, k.conj()) for k in kraus)


# ---------------------------------------------------------------------------
# Evolution


def _apply_unitary(rho: np.ndarray, u: np.ndarray, wires, n: int) -> np.ndarray:
    a = apply_local(rho, u, wires, n)
    a = apply_local(np.swapaxes(a, 0, 1), u.conj(), wires, n)
    return np.swapaxes(a, 0, 1)


def _apply_kraus(rho: np.ndarray, kraus, wires, n: int) -> np.ndarray:
    return sum(_apply_unitary(rho, k, wires, n) for k in kraus)


def evolve_density(c: Circuit, noise: NoiseModel, device: DeviceModel | None,
                   rho: np.ndarray | None = None) -> np.ndarray:
    """Evolve rho (default |0...0><0...0|) through c, moment by moment."""
    n = c.n_wires
    if n > MAX_DENSITY_WIRES:
        raise NoiseError(f"{n} wires exceeds the density-matrix bound of {MAX_DENSITY_WIRES}")
    if not c.is_native:
        raise NoiseError("density simulation needs a native circuit; lower it first")
    d = 2 ** n
    if rho is None:
        rho = np.zeros((d, d), dtype=complex)
        rho[0, 0] = 1.0
    if noise.is_noiseless:
        for g in c.gates:
            rho = _apply_unitary(rho, local_matrix(g), g.wires, n)
        return rho
    if device is None:
        raise NoiseError("noisy simulation needs a device")
    schedule = schedule_moments(c)
    durations = moment_durations(c, device, schedule)
    dep1 = depolarizing_channel(noise.depol_1q, 1) if noise.depol_1q > 0 else None
    dep2 = depolarizing_channel(noise.depol_2q, 2) if noise.depol_2q > 0 else None
    thermal_cache: dict[tuple[int, int], list[np.ndarray]] = {}
    for moment, dur in zip(schedule.moments, durations):
        for i in moment.gates:
            g = c.gates[i]
            rho = _apply_unitary(rho, local_matrix(g), g.wires, n)
        if noise.thermal and dur > 0:
            for w in range(n):
                key = (w, dur)
                if key not in thermal_cache:
                    q = device.qubit(w)
                    thermal_cache[key] = thermal_channel(dur * device.dt_ns, q.T1_us, q.T2_us)
                rho = _apply_kraus(rho, thermal_cache[key], (w,), n)
        if moment.cls is MomentClass.VIRTUAL:
            continue
        for i in moment.gates:
            g = c.gates[i]
            if g.kind is Kind.CR and dep2 is not None:
                rho = _apply_kraus(rho, dep2, g.wires, n)
            elif g.is_pulse and dep1 is not None:
                rho = _apply_kraus(rho, dep1, g.wires, n)
    return rho


def probabilities(rho: np.ndarray) -> np.ndarray:
    p = np.clip(np.real(np.diagonal(rho)), 0.0, None)
    return p / p.sum()


def simulate_density(c: Circuit, noise: NoiseModel, device: DeviceModel | None = None) -> dict[str, float]:
    """Computational-basis outcome probabilities (wire 0 is the leftmost bit).

    With noise.shots set, probabilities are replaced by sampled frequencies
    drawn from a generator seeded with noise.seed.
    """
    p = probabilities(evolve_density(c, noise, device))
    if noise.shots is not None:
        rng = np.random.default_rng(noise.seed)
        p = rng.multinomial(noise.shots, p) / noise.shots
    n = c.n_wires
    return {format(i, f"0{n}b"): float(v) for i, v in enumerate(p)}


def circuit_superop(c: Circuit, noise: NoiseModel, device: DeviceModel | None = None) -> np.ndarray:
    """d^2 x d^2 superoperator of the noisy circuit on row-major vec(rho)."""
    d = 2 ** c.n_wires
    basis = np.eye(d * d, dtype=complex).reshape(d, d, d * d)
    out = evolve_density(c, noise, device, basis)
    return out.reshape(d * d, d * d)


def process_fidelity(superop: np.ndarray, target: np.ndarray) -> float:
    d = target.shape[0]
    ideal = np.kron(target, target.conj())
    return float(np.real(np.trace(ideal.conj().T @ superop))) / d ** 2


def average_gate_fidelity(superop: np.ndarray, target: np.ndarray) -> float:
    """F_avg = (d F_pro + 1) / (d + 1)."""
    d = target.shape[0]
    return (d * process_fidelity(superop, target) + 1) / (d + 1)


def average_gate_error(c: Circuit, target: np.ndarray, noise: NoiseModel, device: DeviceModel) -> float:
    return 1.0 - average_gate_fidelity(circuit_superop(c, noise, device), target)
