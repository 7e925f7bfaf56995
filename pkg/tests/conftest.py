import pytest

from staged_endurance.model import EnergySource, RocketParams, VehicleParams

# Empirical values for the test quadcopter: c_T in kg^1.5/W, e_b in Wh/kg.
QUAD_CT = 6.2e-3
HEAVY_PACK_WH_PER_KG = 130.0
MIXED_PACK_WH_PER_KG = 120.0
DRY_MASS_STAGED = 0.595
DRY_MASS_UNSTAGED = 0.550


@pytest.fixture
def vehicle():
    return VehicleParams.from_flight_coeff(DRY_MASS_STAGED, QUAD_CT)


@pytest.fixture
def heavy_source():
    return EnergySource.from_wh_per_kg(HEAVY_PACK_WH_PER_KG)


@pytest.fixture
def mixed_source():
    return EnergySource.from_wh_per_kg(MIXED_PACK_WH_PER_KG)


@pytest.fixture
def rocket():
    return RocketParams(250.0, 9.81)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
