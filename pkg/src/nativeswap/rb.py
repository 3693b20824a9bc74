"""
Two-qubit randomized benchmarking and interleaved RB.

Contains:
    - rb_sequences(): seeded Clifford sequences with exact inverses
    - fit_decay(): Levenberg-Marquardt fit of y = A alpha^m + B
    - irb_gate_error(): error and sigma from the two decay fits
    - run_irb_experiment(): generate, simulate, fit, extract

Each Clifford (and each interleaved gate) is a scheduling barrier: its noisy
channel is computed once as a superoperator and sequences are products of
these blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit
from .clifford import clifford_element, clifford_index, clifford_unitary, is_clifford, GROUP_SIZE
from .device import DeviceModel
from .noise import NoiseModel, circuit_superop
from .unitary import circuit_unitary

DEFAULT_LENGTHS = (1, 2, 3, 5, 8, 12, 17, 23, 30)
DEFAULT_SEQUENCES = 12
MAX_ITER = 200
STEP_RTOL = 1e-10


class FitError(RuntimeError):
    pass


class RBError(ValueError):
    pass


@dataclass(frozen=True)
class RBSequence:
    length: int
    index: int
    cliffords: tuple[int, ...]
    inverse: int
    interleave: Circuit | None = None

    def blocks(self) -> list[tuple[str, Circuit]]:
        """(cache key, circuit) per barrier block, in circuit time."""
        out = []
        for i in self.cliffords:
            out.append((f"c{i}", clifford_element(i).circuit))
            if self.interleave is not None:
                out.append(("interleave", self.interleave))
        out.append((f"c{self.inverse}", clifford_element(self.inverse).circuit))
        return out

    @property
    def circuit(self) -> Circuit:
        c = Circuit(2, ())
        for _, b in self.blocks():
            c = c + b
        return c


def _interleave_unitary(interleave: Circuit) -> np.ndarray:
    if interleave.n_wires != 2:
        raise RBError(f"interleaved gate must act on 2 wires, got {interleave.n_wires}")
    u = circuit_unitary(interleave)
    if not is_clifford(u):
        raise RBError("interleaved gate is not a Clifford (Pauli-conjugation test failed)")
    return u


def rb_sequences(lengths, k_per_length: int, interleave: Circuit | None = None,
                 seed: int = 0) -> list[RBSequence]:
    """k_per_length sequences for each m; the same seed yields the same Cliffords with or without interleave."""
    lengths = list(lengths)
    if not lengths or any(m < 1 for m in lengths):
        raise RBError("lengths must be >= 1")
    if k_per_length < 1:
        raise RBError("need at least one sequence per length")
    g = _interleave_unitary(interleave) if interleave is not None else None
    out = []
    for li, m in enumerate(lengths):
        for j in range(k_per_length):
            rng = np.random.default_rng([seed, li, j])  # independent stream per (length, sequence)
            ids = tuple(int(x) for x in rng.integers(GROUP_SIZE, size=m))
            u = np.eye(4, dtype=complex)
            for i in ids:
                u = clifford_unitary(i) @ u
                if g is not None:
                    u = g @ u
            out.append(RBSequence(m, j, ids, clifford_index(u.conj().T), interleave))
    return out


def survival(seq: RBSequence, noise: NoiseModel, device: DeviceModel | None, cache: dict | None = None) -> float:
    """P(00) after the sequence, exact."""
    cache = {} if cache is None else cache
    vec = np.zeros(16, dtype=complex)
    vec[0] = 1.0
    for key, block in seq.blocks():
        if key not in cache:
            cache[key] = circuit_superop(block, noise, device)
        vec = cache[key] @ vec
    return float(np.real(vec[0]))


# ---------------------------------------------------------------------------
# Fitting


@dataclass(frozen=True)
class DecayFit:
    A: float
    alpha: float
    B: float
    sigma_alpha: float
    residual: float  # RMS
    iterations: int = 0

    def predict(self, m) -> np.ndarray:
        return self.A * np.power(self.alpha, np.asarray(m, dtype=float)) + self.B

    def to_dict(self) -> dict:
        return {"A": self.A, "alpha": self.alpha, "B": self.B, "sigma_alpha": self.sigma_alpha,
                "residual": self.residual}


def _model(p, m):
    a, alpha, b = p
    am = np.power(alpha, m)
    f = a * am + b
    jac = np.column_stack([am, a * m * np.power(alpha, m - 1), np.ones_like(m)])
    return f, jac


def _physical_start(m: np.ndarray, y: np.ndarray) -> np.ndarray:
    """A0 = 3/4, B0 = 1/4 (two-qubit depolarized limit), alpha0 from a log-linear fit of y - B0."""
    a0, b0 = 0.75, 0.25
    pos = y - b0 > 1e-12
    if pos.sum() >= 2 and np.ptp(m[pos]) > 0:
        slope = np.polyfit(m[pos], np.log(y[pos] - b0), 1)[0]
        alpha0 = float(min(max(math.exp(slope), 1e-3), 1.0))
    else:
        alpha0 = 0.9
    return np.array([a0, alpha0, b0])


def _grid_start(m: np.ndarray, y: np.ndarray) -> np.ndarray:
    """alpha0 from a scan over (0, 1), with A, B solved linearly at each point."""
    best = None
    # dense near 1, where RB decays live and A, B become nearly collinear
    grid = np.concatenate([np.linspace(0.005, 0.99, 198), 1.0 - np.logspace(-2, -7, 100)[1:]])
    for alpha in grid:
        basis = np.column_stack([alpha ** m, np.ones_like(m)])
        (a, b), *_ = np.linalg.lstsq(basis, y, rcond=None)
        sse = float(np.sum((basis @ (a, b) - y) ** 2))
        if best is None or sse < best[0]:
            best = (sse, np.array([a, alpha, b]))
    return best[1]


def _levenberg_marquardt(p: np.ndarray, m: np.ndarray, y: np.ndarray) -> DecayFit:
    f, jac = _model(p, m)
    sse = float(np.sum((y - f) ** 2))
    lam = 1e-3
    for it in range(1, MAX_ITER + 1):
        jtj = jac.T @ jac
        grad = jac.T @ (y - f)
        step = np.linalg.solve(jtj + lam * np.diag(np.diag(jtj) + 1e-15), grad)
        trial = p + step
        if trial[1] <= 0:
            lam *= 10
            continue
        f_new, jac_new = _model(trial, m)
        sse_new = float(np.sum((y - f_new) ** 2))
        if sse_new <= sse:
            rel = np.linalg.norm(step) / (np.linalg.norm(p) + 1e-300)
            p, f, jac, sse = trial, f_new, jac_new, sse_new
            lam = max(lam / 10, 1e-12)
            if rel < STEP_RTOL:
                break
        else:
            lam *= 10
            if lam > 1e16:  # no descent direction left: at the minimum
                break
    else:
        raise FitError(f"decay fit did not converge in {MAX_ITER} iterations")
    if not 0 < p[1] <= 1 + 1e-9:
        raise FitError(f"fitted alpha={p[1]:.6g} outside (0, 1]")
    dof = len(m) - 3
    s2 = sse / dof if dof > 0 else 0.0
    try:
        cov = s2 * np.linalg.inv(jac.T @ jac)
        sigma = float(math.sqrt(max(cov[1, 1], 0.0)))
    except np.linalg.LinAlgError:
        sigma = float("nan")
    if not math.isfinite(sigma):
        raise FitError("degenerate fit: alpha is not identifiable from these lengths")
    return DecayFit(float(p[0]), float(p[1]), float(p[2]), sigma, float(math.sqrt(sse / len(m))), it)


def fit_decay(points) -> DecayFit:
    """Least-squares fit of A alpha^m + B from (m, mean survival) pairs.

    Levenberg-Marquardt from the physical start (A, B) = (3/4, 1/4); if that
    fails, once more from a grid-scan start. Stops on relative step < 1e-10.
    """
    pts = sorted((float(m), float(y)) for m, y in points)
    m = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if len(set(m.tolist())) < 4:
        raise FitError("need at least 4 distinct sequence lengths")
    if np.ptp(y) < 1e-12:
        raise FitError("survival is constant: no decay to fit")
    try:
        return _levenberg_marquardt(_physical_start(m, y), m, y)
    except FitError:
        return _levenberg_marquardt(_grid_start(m, y), m, y)


@dataclass(frozen=True)
class IRBResult:
    alpha_rb: DecayFit
    alpha_int: DecayFit
    gate_error: float
    gate_error_sigma: float
    table: tuple[tuple[int, float, float], ...] = field(default=())  # (m, survival_rb, survival_int)

    def to_dict(self) -> dict:
        return {
            "alpha_rb": self.alpha_rb.to_dict(),
            "alpha_int": self.alpha_int.to_dict(),
            "gate_error": self.gate_error,
            "gate_error_sigma": self.gate_error_sigma,
            "table": [{"m": m, "survival_rb": a, "survival_int": b} for m, a, b in self.table],
        }


def irb_gate_error(fit_rb: DecayFit, fit_int: DecayFit, table=()) -> IRBResult:
    """error = (3/4)(1 - alpha_int / alpha_rb), sigma by ratio-variance propagation."""
    if abs(fit_rb.alpha) < 1e-12:
        raise FitError("reference alpha is zero")
    r = fit_int.alpha / fit_rb.alpha
    err = 0.75 * (1.0 - r)
    rel2 = (fit_int.sigma_alpha / fit_int.alpha) ** 2 + (fit_rb.sigma_alpha / fit_rb.alpha) ** 2
    return IRBResult(fit_rb, fit_int, float(err), float(0.75 * abs(r) * math.sqrt(rel2)), tuple(table))


@dataclass(frozen=True)
class IRBConfig:
    lengths: tuple[int, ...] = DEFAULT_LENGTHS
    k_per_length: int = DEFAULT_SEQUENCES
    seed: int = 0


def _mean_survivals(seqs, noise: NoiseModel, device, cache) -> dict[int, float]:
    by_m: dict[int, list[float]] = {}
    for s in seqs:
        p = survival(s, noise, device, cache)
        if noise.shots is not None:
            rng = np.random.default_rng([noise.seed, s.length, s.index, int(s.interleave is not None)])
            p = rng.binomial(noise.shots, min(max(p, 0.0), 1.0)) / noise.shots
        by_m.setdefault(s.length, []).append(p)
    return {m: float(np.mean(v)) for m, v in sorted(by_m.items())}


def _fit_or_flat(means: dict[int, float]) -> DecayFit:
    ys = list(means.values())
    # noiseless sequences survive perfectly; there is no decay to fit
    if all(abs(y - 1.0) < 1e-12 for y in ys):
        return DecayFit(0.75, 1.0, 0.25, 0.0, 0.0)
    return fit_decay(means.items())


def run_irb_experiment(swap_impl: Circuit, device: DeviceModel, noise: NoiseModel,
                       config: IRBConfig | None = None) -> IRBResult:
    """Reference RB and SWAP-interleaved RB on a 2-qubit device with CR edge 0 -> 1."""
    config = config or IRBConfig()
    if device.n_qubits != 2 or device.edge(0, 1) is None or device.edge(0, 1).pair != (0, 1):
        raise RBError("IRB runs on a 2-qubit device with CR direction 0 -> 1 (use DeviceModel.subdevice)")
    ref = rb_sequences(config.lengths, config.k_per_length, None, config.seed)
    inter = rb_sequences(config.lengths, config.k_per_length, swap_impl, config.seed)
    cache: dict = {}
    s_ref = _mean_survivals(ref, noise, device, cache)
    s_int = _mean_survivals(inter, noise, device, cache)
    table = tuple((m, s_ref[m], s_int[m]) for m in s_ref)
    return irb_gate_error(_fit_or_flat(s_ref), _fit_or_flat(s_int), table)
