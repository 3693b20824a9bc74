import numpy as np
import pytest

from nativeswap.circuit import Circuit, Gate, Kind
from nativeswap.clifford import (
    GROUP_SIZE, CliffordClass, class_sizes, clifford_class, clifford_element, clifford_index, clifford_unitary,
    is_clifford, random_clifford2, s1_indices, single_qubit_cliffords,
)
from nativeswap.unitary import SWAP, circuit_unitary, equal_up_to_global_phase


def schmidt_rank(u: np.ndarray) -> int:
    """Operator Schmidt rank of a 4x4 unitary across the two wires."""
    r = u.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    return int(np.sum(np.linalg.svd(r, compute_uv=False) > 1e-9))


def oracle_class(u: np.ndarray) -> CliffordClass:
    rank = schmidt_rank(u)
    if rank == 1:
        return CliffordClass.SINGLE
    if rank == 2:
        return CliffordClass.CNOT_LIKE
    return CliffordClass.SWAP_LIKE if schmidt_rank(SWAP @ u) == 1 else CliffordClass.ISWAP_LIKE


def test_single_qubit_group():
    runs = single_qubit_cliffords()
    assert len(runs) == 24
    mats = [circuit_unitary(Circuit(1, tuple(Gate(Kind(k), (0,), a) for k, a in r))) for r in runs]
    for i, a in enumerate(mats):
        assert is_clifford(a)
        for b in mats[:i]:
            assert not equal_up_to_global_phase(a, b).equal
    assert s1_indices()[0] == 0


def test_group_indexing_is_a_bijection():
    seen = set()
    for i in range(GROUP_SIZE):
        u = clifford_unitary(i)
        assert clifford_index(u) == i
        seen.add(i)
    assert len(seen) == GROUP_SIZE == 11520


def test_class_blocks_match_schmidt_oracle():
    counts = {cls: 0 for cls in CliffordClass}
    for i in range(GROUP_SIZE):
        cls = oracle_class(clifford_unitary(i))
        assert clifford_class(i) is cls
        counts[cls] += 1
    assert counts == class_sizes()
    assert counts == {CliffordClass.SINGLE: 576, CliffordClass.CNOT_LIKE: 5184,
                      CliffordClass.ISWAP_LIKE: 5184, CliffordClass.SWAP_LIKE: 576}


@pytest.mark.slow
def test_closure_oracle_size():
    from nativeswap.clifford import closure_size
    assert closure_size() == GROUP_SIZE


def test_sampled_circuits_realize_their_unitaries():
    rng = np.random.default_rng(11)
    for i in rng.choice(GROUP_SIZE, 300, replace=False):
        e = clifford_element(int(i))
        assert e.circuit.is_native
        assert equal_up_to_global_phase(circuit_unitary(e.circuit), e.unitary).equal
        assert e.cr_count == e.cls.cr_count


def test_class_frequencies_within_three_sigma():
    rng = np.random.default_rng(5)
    n = 20000
    draws = rng.integers(GROUP_SIZE, size=n)
    for cls, size in class_sizes().items():
        p = size / GROUP_SIZE
        k = sum(1 for i in draws if clifford_class(int(i)) is cls)
        assert abs(k - n * p) <= 3 * np.sqrt(n * p * (1 - p))


def test_random_clifford_draws_one_index():
    a = random_clifford2(np.random.default_rng(3))
    assert a.index == int(np.random.default_rng(3).integers(GROUP_SIZE))


def test_non_cliffords_rejected():
    t = np.diag([1, np.exp(1j * np.pi / 4)])
    assert not is_clifford(t)
    assert not is_clifford(np.kron(t, np.eye(2)))
    with pytest.raises(ValueError):
        clifford_index(np.kron(t, np.eye(2)))
    with pytest.raises(ValueError):
        is_clifford(np.eye(8))
    with pytest.raises(IndexError):
        clifford_unitary(GROUP_SIZE)


def test_inverse_lookup():
    u = clifford_unitary(4321)
    assert clifford_index(np.exp(0.3j) * u.conj().T) is not None
    inv = clifford_unitary(clifford_index(u.conj().T))
    assert equal_up_to_global_phase(inv @ u, np.eye(4)).equal
