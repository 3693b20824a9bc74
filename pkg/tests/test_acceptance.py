"""
Acceptance criteria 1-10, one test each.

Every test records a PASS/FAIL line (printed in the pytest terminal summary,
or directly when this file is run as a script) before asserting.
"""

import hashlib
import time

import numpy as np
import pytest

from nativeswap.bench import Benchmark, BenchmarkName, ImprovementParams, improvement_model, run_benchmark
from nativeswap.circuit import Circuit, Gate, Kind, cr, normal_order
from nativeswap.clifford import GROUP_SIZE, closure_size, clifford_unitary, is_clifford
from nativeswap.decomp import (
    SwapStrategy, expand_cr, lower_circuit, lower_cnot, lower_h, lower_notc, lower_notc_via_h, lower_swap, swap_template,
)
from nativeswap.device import (
    DeviceModel, Edge, Qubit, circuit_metrics, infer_native_durations, optimized_speedup, orientation_speedup,
    speedup_table,
)
from nativeswap.noise import NoiseModel, average_gate_error
from nativeswap.passes import (
    choose_orientation, ledger, pass_commute_through_cr, pass_cross_gate_cancellation, pass_polarity_switch,
    pass_x90_form, verify_equivalent,
)
from nativeswap.rb import IRBConfig, rb_sequences, run_irb_experiment, survival
from nativeswap.report import Report, emit_report
from nativeswap.unitary import CNOT, NOTC, SWAP, H, circuit_unitary, cr_matrix, equal_up_to_global_phase

RESULTS: dict[int, str] = {}
TOL = 1e-9


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(RESULTS[n])
    assert ok, RESULTS[n]


@pytest.fixture(scope="module")
def irb_errors(pair_device, calibrated_noise):
    """Criterion-6 measurements, shared with criterion 9."""
    out = {}
    for name, strategy in (("standard", SwapStrategy.SLOW_ORIENTATION), ("optimized", SwapStrategy.OPTIMIZED)):
        c = lower_swap(0, 1, strategy, pair_device)
        t0 = time.perf_counter()
        res = run_irb_experiment(c, pair_device, calibrated_noise, IRBConfig())
        out[name] = {
            "irb": res.gate_error,
            "sigma": res.gate_error_sigma,
            "direct": average_gate_error(c, SWAP, calibrated_noise, pair_device),
            "seconds": time.perf_counter() - t0,
        }
    return out


def test_criterion_01_equivalence_suite(pair_device):
    t0 = time.perf_counter()
    checks = [
        (lower_cnot(0, 1), CNOT), (lower_notc(0, 1), NOTC), (lower_notc_via_h(0, 1), NOTC),
        (Circuit(1, tuple(lower_h(0))), H),
    ]
    checks += [(swap_template(s), SWAP) for s in SwapStrategy]
    ok = all(equal_up_to_global_phase(t, circuit_unitary(c), TOL).equal for c, t in checks)
    for pol in ("+-", "-+"):
        ok &= bool(np.allclose(expand_cr(cr(0, 1, pol)).local_unitary(), cr_matrix(pol), atol=TOL))
    c = Circuit(2, (Gate(Kind.SWAP, (0, 1)),))
    cur = normal_order(lower_circuit(choose_orientation(c, pair_device), pair_device))
    n_pass = 0
    for p in (pass_cross_gate_cancellation, pass_commute_through_cr, pass_polarity_switch, pass_x90_form):
        cur, rep = p(cur, TOL)
        ok &= rep.verified and verify_equivalent(c, cur, TOL).equal
        n_pass += 1
    dt = time.perf_counter() - t0
    ok &= dt < 1.0
    record(1, ok, f"{len(checks) + 2} lowerings and {n_pass} pass outputs equivalent at tol {TOL:g}; {dt:.3f} s")


def test_criterion_02_ledger(pair_device):
    want = [("5t1q+3tCR", 990, 540), ("4t1q+3tCR", 900, 540), ("3t1q+3tCR", 720, 540),
            ("3t1q+3tCR", 450, 540), ("2t1q+3tCR", 270, 540)]
    rows = ledger(Circuit(2, (Gate(Kind.SWAP, (0, 1)),)), pair_device)
    got = [(r["depth"], r["external_rotation_deg"], r["internal_rotation_deg"]) for r in rows[:5]]
    ok = got == want and all(r["verified"] for r in rows)
    record(2, ok, "; ".join(f"{d} {e:g}+{i:g}" for d, e, i in got))


def test_criterion_03_durations(pair_device):
    t1q, tcr = infer_native_durations(4448, 3968)
    std = circuit_metrics(lower_swap(0, 1, SwapStrategy.SLOW_ORIENTATION, pair_device), pair_device)
    opt = circuit_metrics(lower_swap(0, 1, SwapStrategy.OPTIMIZED, pair_device), pair_device)
    speedup = optimized_speedup((0, 1), pair_device)
    ok = ((t1q, tcr) == (160, 1216) and std.duration_dt == 4448 and opt.duration_dt == 3968
          and abs(std.duration_ns - 988) <= 1 and abs(opt.duration_ns - 882) <= 1 and abs(speedup - 1.121) <= 0.001)
    record(3, ok, f"Standard {std.duration_dt} dt = {std.duration_ns:.2f} ns, Optimized {opt.duration_dt} dt = "
                  f"{opt.duration_ns:.2f} ns, speedup {speedup:.4f}")


def test_criterion_04_orientation_speedup(pair_device):
    v = orientation_speedup((0, 1), pair_device)
    record(4, abs(v - 1.0373) <= 1e-4, f"orientation_speedup(160, 1216) = {v:.5f}")


def test_criterion_05_improvement_model():
    t0 = time.perf_counter()
    v = improvement_model(ImprovementParams(0.033, 0.037, 14, 0.63, 75.0, 75.0, 8))
    dt = time.perf_counter() - t0
    record(5, abs(v - 1.21) <= 0.01 and dt < 0.1, f"improvement_model = {v:.5f}")


def test_criterion_06_irb_self_consistency(irb_errors):
    std, opt = irb_errors["standard"], irb_errors["optimized"]
    rel = abs(std["irb"] - std["direct"]) / std["direct"]
    factor = std["irb"] / opt["irb"]
    seconds = std["seconds"] + opt["seconds"]
    ok = (abs(std["direct"] - 0.037) <= 0.002 and rel <= 0.15 and opt["irb"] < std["irb"]
          and 1.05 <= factor <= 1.25 and seconds < 300)
    record(6, ok, f"direct {std['direct']:.4f}, IRB Standard {std['irb']:.4f} +- {std['sigma']:.4f} "
                  f"(rel {rel:.3f}), Optimized {opt['irb']:.4f}, factor {factor:.3f}, {seconds:.1f} s")


def test_criterion_07_noiseless_irb(pair_device):
    t0 = time.perf_counter()
    noise = NoiseModel()
    swap = lower_swap(0, 1, SwapStrategy.OPTIMIZED, pair_device)
    res = run_irb_experiment(swap, pair_device, noise, IRBConfig())
    cache: dict = {}
    worst = 0.0
    for interleave in (None, swap):
        for seq in rb_sequences(IRBConfig().lengths, IRBConfig().k_per_length, interleave, 0):
            worst = max(worst, abs(survival(seq, noise, pair_device, cache) - 1.0))
    dt = time.perf_counter() - t0
    # "exactly 1.0" is floating-point exact up to 1e-12
    ok = res.gate_error < 1e-6 and worst <= 1e-12 and dt < 60
    record(7, ok, f"gate_error {res.gate_error:.2e}, max |survival - 1| {worst:.1e}, {dt:.1f} s")


def test_criterion_08_clifford_group():
    t0 = time.perf_counter()
    size = closure_size()
    rng = np.random.default_rng(0)
    sample = rng.choice(GROUP_SIZE, 500, replace=False)
    ok_sample = all(is_clifford(clifford_unitary(int(i))) for i in sample)
    dt = time.perf_counter() - t0
    record(8, size == 11520 and ok_sample and dt < 300,
           f"closure {size} elements, {len(sample)} sampled pass Pauli conjugation, {dt:.1f} s")


def test_criterion_09_benchmark_trend(line6, calibrated_noise, irb_errors):
    e_std, e_opt = irb_errors["standard"]["irb"], irb_errors["optimized"]["irb"]
    ratios, agreement = [], []
    for n in range(2, 7):
        b = Benchmark(BenchmarkName.LONG_SWAP, n)
        slow = run_benchmark(b, line6, calibrated_noise, SwapStrategy.SLOW_ORIENTATION)
        opt = run_benchmark(b, line6, calibrated_noise, SwapStrategy.OPTIMIZED)
        ratio = opt.success / slow.success
        model = improvement_model(ImprovementParams(
            e_opt, e_std, slow.swaps_total, (slow.duration_ns - opt.duration_ns) / 1000.0, 75.0, 75.0, slow.wires))
        ratios.append(ratio)
        agreement.append(abs(ratio - model) / model)
    ok = (all(r > 1 for r in ratios) and all(b >= a for a, b in zip(ratios, ratios[1:]))
          and max(agreement) <= 0.20)
    record(9, ok, "ratios " + ", ".join(f"{r:.4f}" for r in ratios) + f"; max model deviation {max(agreement):.3f}")


def _digest(paths):
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in paths}


def test_criterion_10_determinism(tmp_path):
    digests = []
    for run in ("a", "b"):
        dev = DeviceModel("pair", 2 / 9, [Qubit(0, 160, 75.0, 75.0), Qubit(1, 160, 75.0, 75.0)], [Edge(0, 1, 1216)])
        noise = NoiseModel(depol_1q=0.0006, depol_2q=0.0082, thermal=True, seed=7, shots=2000)
        cfg = IRBConfig(lengths=(1, 2, 4, 8, 16, 32), k_per_length=3, seed=7)
        res = run_irb_experiment(lower_swap(0, 1, "optimized", dev), dev, noise, cfg)
        irb = Report("irb", [{"swap": "optimized", "gate_error": res.gate_error}], {"seed": 7}, 7,
                     {"irb": {"optimized": res.to_dict()}})
        rows, _ = speedup_table(dev)
        paths = emit_report(irb, tmp_path / run, "irb") + emit_report(Report("speedups", rows), tmp_path / run, "sp")
        digests.append(_digest(paths))
    ok = digests[0] == digests[1] and len(digests[0]) >= 5
    record(10, ok, f"{len(digests[0])} report files byte-identical across two seeded runs")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
