import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nativeswap.bench import (
    Benchmark, BenchmarkError, BenchmarkName, ImprovementParams, RoutingError, gen_benchmark, improvement_model,
    route_on_coupling, run_benchmark,
)
from nativeswap.circuit import Circuit, Gate, Kind
from nativeswap.noise import NoiseModel
from nativeswap.unitary import circuit_unitary


def test_long_swap_circuit():
    c = gen_benchmark("long-swap", 4)
    assert [str(g) for g in c.gates] == ["x 0", "swap 0 1", "swap 1 2", "swap 2 3"]
    assert Benchmark(BenchmarkName.LONG_SWAP, 4).expected_output == "0001"


def test_bv_circuit_outputs_all_ones():
    c = gen_benchmark("bv", 4)
    u = circuit_unitary(c)
    probs = abs(u[:, 0]) ** 2
    # data wires read 111, the ancilla ends in |->: both ancilla values equally likely
    assert probs[0b1110] == pytest.approx(0.5) and probs[0b1111] == pytest.approx(0.5)
    assert Benchmark(BenchmarkName.BERNSTEIN_VAZIRANI, 4).expected_output == "111x"


def test_benchmark_name_errors():
    assert BenchmarkName.parse("Bernstein_Vazirani") is BenchmarkName.BERNSTEIN_VAZIRANI
    with pytest.raises(BenchmarkError):
        BenchmarkName.parse("qft")
    with pytest.raises(BenchmarkError):
        gen_benchmark("bv", 1)


def _min_swaps_on_line(n, a, b):
    """Brute force: fewest adjacent swaps that make a and b neighbours on a line."""
    start = tuple(range(n))
    for k in range(n):
        for seq in itertools.product(range(n - 1), repeat=k):
            pos = list(start)
            for i in seq:
                pos[i], pos[i + 1] = pos[i + 1], pos[i]
            if abs(pos.index(a) - pos.index(b)) == 1:
                return k
    raise AssertionError


@pytest.mark.parametrize("a, b", [(0, 3), (3, 0), (0, 2), (1, 3), (0, 1)])
def test_routing_is_minimal_for_one_gate(line6, a, b):
    sub = line6.subdevice([0, 1, 2, 3])
    r = route_on_coupling(Circuit(4, (Gate(Kind.CNOT, (a, b)),)), sub)
    assert r.swaps == _min_swaps_on_line(4, a, b)
    last = r.circuit.gates[-1]
    assert sub.edge(*last.wires) is not None


def test_routing_preserves_logical_action(line6):
    sub = line6.subdevice([0, 1, 2, 3])
    c = Circuit(4, (Gate(Kind.X, (0,)), Gate(Kind.CNOT, (0, 3))))
    r = route_on_coupling(c, sub)
    # logical wire w ends on qubit final_placement[w]: 1 on wires 0 and 3
    u = circuit_unitary(r.circuit)
    idx = max(range(16), key=lambda i: abs(u[i, 0]))
    bits = format(idx, "04b")
    assert bits[r.final_placement[0]] == "1" and bits[r.final_placement[3]] == "1"
    assert bits.count("1") == 2


def test_routing_errors(line6, tee4):
    with pytest.raises(RoutingError):
        route_on_coupling(Circuit(2, ()), line6, [0, 0])
    with pytest.raises(RoutingError):
        route_on_coupling(Circuit(2, ()), line6, [0])
    from nativeswap.device import DeviceModel, Qubit
    island = DeviceModel("i", 1.0, [Qubit(0, 1, 1.0, 1.0), Qubit(1, 1, 1.0, 1.0)], [])
    with pytest.raises(RoutingError, match="disconnected"):
        route_on_coupling(Circuit(2, (Gate(Kind.CNOT, (0, 1)),)), island)


def test_noiseless_success_is_one(line6):
    for name, n in (("long-swap", 4), ("bv", 4)):
        for s in ("slow", "optimized"):
            run = run_benchmark(Benchmark(BenchmarkName.parse(name), n), line6, NoiseModel(), s)
            assert run.success == pytest.approx(1.0, abs=1e-12)


def test_bv_on_tee_needs_no_swaps(tee4, calibrated_noise):
    b = Benchmark(BenchmarkName.BERNSTEIN_VAZIRANI, 4)
    runs = [run_benchmark(b, tee4, calibrated_noise, s, placement=[0, 2, 3, 1]) for s in ("slow", "optimized")]
    assert all(r.swaps_inserted == 0 and r.swaps_total == 0 for r in runs)
    assert runs[0].success == runs[1].success


def test_long_swap_optimized_wins(line6, calibrated_noise):
    b = Benchmark(BenchmarkName.LONG_SWAP, 3)
    slow = run_benchmark(b, line6, calibrated_noise, "slow")
    opt = run_benchmark(b, line6, calibrated_noise, "optimized")
    assert opt.success > slow.success
    assert opt.duration_ns < slow.duration_ns
    assert slow.swaps_total == 2 and slow.swaps_inserted == 0 and slow.wires == 3


def test_improvement_model_examples():
    p = ImprovementParams(0.01, 0.02, 10, 0.5, 100.0, 100.0, 5)
    assert improvement_model(p) == pytest.approx((0.99 / 0.98) ** 10 * math.exp(5 * 0.01))
    assert improvement_model(ImprovementParams(0.02, 0.02, 7, 0.0, 50.0, 50.0, 3)) == 1.0
    with pytest.raises(ValueError):
        ImprovementParams(1.0, 0.02, 1, 0.1, 1.0, 1.0, 1)
    with pytest.raises(ValueError):
        ImprovementParams(0.01, 0.02, 1, -0.1, 1.0, 1.0, 1)


@given(st.integers(0, 40), st.floats(0, 2), st.integers(1, 10))
def test_improvement_model_monotone(k, dt, n):
    base = ImprovementParams(0.03, 0.04, k, dt, 75.0, 75.0, n)
    more_swaps = ImprovementParams(0.03, 0.04, k + 1, dt, 75.0, 75.0, n)
    more_time = ImprovementParams(0.03, 0.04, k, dt + 0.1, 75.0, 75.0, n)
    assert improvement_model(base) >= 1
    assert improvement_model(more_swaps) > improvement_model(base)
    assert improvement_model(more_time) > improvement_model(base)
