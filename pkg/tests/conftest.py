from importlib.resources import files

import pytest

from nativeswap.device import DeviceModel, Edge, Qubit, load_device
from nativeswap.noise import load_noise

DATA = files("nativeswap") / "data"


def data_path(*parts):
    p = DATA
    for part in parts:
        p = p / part
    return p


@pytest.fixture(scope="session")
def pair_device():
    """Two qubits, CR 0 -> 1, the inferred Casablanca 5-6 parameters."""
    return DeviceModel("pair", 2 / 9, [Qubit(0, 160, 75.0, 75.0), Qubit(1, 160, 75.0, 75.0)], [Edge(0, 1, 1216)])


@pytest.fixture(scope="session")
def casablanca():
    return load_device(data_path("devices", "casablanca-sim.json"))


@pytest.fixture(scope="session")
def line6():
    return load_device(data_path("devices", "line6-sim.json"))


@pytest.fixture(scope="session")
def tee4():
    return load_device(data_path("devices", "tee4-sim.json"))


@pytest.fixture(scope="session")
def calibrated_noise():
    return load_noise(data_path("noise", "calibrated.json"))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance") or sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
