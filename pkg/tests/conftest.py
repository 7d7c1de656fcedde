import math

import numpy as np
import pytest

import Geometry
import Substrate
from Geometry import Scenario

TABLE_WAVELENGTH = 0.1


def tableScenario(**overrides) -> Scenario:
    """Reference layout: 20 x 20 half-wavelength units at 3 GHz (lambda rounded to 0.1 m)."""
    fields = dict(source_position=[50.0, 0.0, 0.0],
                  receiver_position=[50.0, 100.0, 0.0],
                  ris_center=[0.0, 50.0, 0.0],
                  ris_normal=[1.0, 0.0, 0.0],
                  unit_side=TABLE_WAVELENGTH / 2,
                  num_units_rows=20,
                  num_units_cols=20,
                  carrier_wavelength=TABLE_WAVELENGTH,
                  tx_gain=10 ** 0.3,
                  rx_gain=10 ** 0.3,
                  tx_power=10 ** -2.2,
                  noise_power=10 ** -12.6,
                  rotation_angle=math.radians(30))
    fields.update(overrides)
    return Scenario(**fields)


def randomScenario(rng: np.random.Generator, units: int) -> Scenario:
    normal = rng.normal(size=3)
    normal /= np.linalg.norm(normal)
    center = rng.uniform(-20, 20, size=3)

    def inFront():
        offset = rng.normal(size=3) * 10
        offset -= np.dot(offset, normal) * normal
        return center + rng.uniform(5, 50) * normal + offset

    rows, cols = Geometry.nearSquareGrid(units)
    wavelength = rng.uniform(0.01, 0.3)
    return Scenario(source_position=inFront(), receiver_position=inFront(), ris_center=center, ris_normal=normal,
                    unit_side=wavelength / 2, num_units_rows=rows, num_units_cols=cols,
                    carrier_wavelength=wavelength, tx_gain=rng.uniform(1, 3), rx_gain=rng.uniform(1, 3),
                    tx_power=rng.uniform(1e-3, 1e-1), noise_power=1e-13,
                    rotation_angle=rng.uniform(0, 2 * math.pi))


@pytest.fixture
def scenario() -> Scenario:
    return tableScenario()


@pytest.fixture(autouse=True)
def closedDatabase():
    # Tests that open a database must not leak it into the next one
    yield
    Substrate.deinit()
