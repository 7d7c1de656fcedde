"""
Geometry.py: RIS layout, link angles and plane-wave path phases

This file is part of RIS Polarization Keying Simulator.

RIS Polarization Keying Simulator is free software: you can
redistribute it and/or modify it under the terms of version 3 of
the GNU General Public License as published by the Free Software
Foundation.

RIS Polarization Keying Simulator is distributed in the hope
that it will be useful, but WITHOUT ANY WARRANTY; without even the
implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR
PURPOSE.  See the GNU General Public License for more details.

You should have received a copy of the GNU General Public License
along with this program.  If not, see <https://www.gnu.org/licenses/>.
"""

import math

from dataclasses import dataclass, replace

import numpy as np


class InvalidScenario(ValueError):
    pass


class DegenerateGeometry(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Scenario:
    source_position: np.ndarray
    receiver_position: np.ndarray
    ris_center: np.ndarray
    ris_normal: np.ndarray
    unit_side: float
    num_units_rows: int
    num_units_cols: int
    carrier_wavelength: float
    tx_gain: float
    rx_gain: float
    tx_power: float
    noise_power: float
    rotation_angle: float = 0.0

    def __post_init__(self):
        # Frozen dataclass, so normalize the vector fields through object.__setattr__
        for name in ("source_position", "receiver_position", "ris_center", "ris_normal"):
            value = np.asarray(getattr(self, name), dtype=float)
            if value.shape != (3,) or not np.all(np.isfinite(value)):
                raise InvalidScenario(f"{name} must be a finite 3-vector")
            object.__setattr__(self, name, value)

        if int(self.num_units_rows) < 1 or int(self.num_units_cols) < 1:
            raise InvalidScenario("RIS grid needs at least one row and one column")
        object.__setattr__(self, "num_units_rows", int(self.num_units_rows))
        object.__setattr__(self, "num_units_cols", int(self.num_units_cols))

        for name in ("unit_side", "carrier_wavelength", "tx_gain", "rx_gain"):
            if not getattr(self, name) > 0:
                raise InvalidScenario(f"{name} must be positive")
        for name in ("tx_power", "noise_power"):
            if not getattr(self, name) >= 0:
                raise InvalidScenario(f"{name} must not be negative")

        if abs(np.linalg.norm(self.ris_normal) - 1.0) > 1e-12:
            raise InvalidScenario("ris_normal must have unit norm")

        for name in ("source_position", "receiver_position"):
            if np.array_equal(getattr(self, name), self.ris_center):
                raise DegenerateGeometry(f"{name} coincides with the RIS centre")
            if np.dot(getattr(self, name) - self.ris_center, self.ris_normal) <= 0:
                raise InvalidScenario(f"{name} must lie in front of the RIS plane")

    @property
    def num_units(self) -> int:
        return self.num_units_rows * self.num_units_cols

    @property
    def unit_area(self) -> float:
        return self.unit_side ** 2

    @property
    def ris_area(self) -> float:
        return self.num_units * self.unit_area


@dataclass(frozen=True)
class LinkGeometry:
    r1: float
    r2: float
    zeta1: float
    zeta2: float
    arrival_elevation: float
    arrival_azimuth: float
    departure_elevation: float
    departure_azimuth: float


def withUnitCount(scenario: Scenario, units: int) -> Scenario:
    """Return a copy of the scenario resized to exactly `units` RIS units."""
    rows, cols = nearSquareGrid(units)
    return replace(scenario, num_units_rows=rows, num_units_cols=cols)


def nearSquareGrid(units: int) -> tuple:
    """Factor `units` as rows x cols, rows being the largest divisor not above sqrt(units)."""
    if units < 1:
        raise InvalidScenario("RIS needs at least one unit")
    rows = math.isqrt(units)
    while units % rows:
        rows -= 1
    return rows, units // rows


def localFrame(scenario: Scenario) -> np.ndarray:
    """Rows are the RIS local axes in global coordinates: x = normal, y = columns, z = rows."""
    normal = scenario.ris_normal
    up = np.array([0.0, 0.0, 1.0])
    if abs(np.dot(up, normal)) > 1.0 - 1e-9:
        up = np.array([0.0, 1.0, 0.0])

    zAxis = up - np.dot(up, normal) * normal
    zAxis /= np.linalg.norm(zAxis)
    yAxis = np.cross(zAxis, normal)
    return np.vstack([normal, yAxis, zAxis])


def localCoordinates(scenario: Scenario, points) -> np.ndarray:
    """Express global points in the RIS local frame, origin at the RIS centre."""
    points = np.asarray(points, dtype=float)
    return (points - scenario.ris_center) @ localFrame(scenario).T


def unitPositions(scenario: Scenario) -> np.ndarray:
    """Global coordinates of every RIS unit, row-major, shape (M, 3)."""
    rows, cols = scenario.num_units_rows, scenario.num_units_cols
    side = scenario.unit_side

    # index * spacing - half extent, never a running sum
    colOffsets = np.arange(cols) * side - (cols - 1) * side / 2
    rowOffsets = np.arange(rows) * side - (rows - 1) * side / 2
    rowGrid, colGrid = np.meshgrid(rowOffsets, colOffsets, indexing="ij")

    frame = localFrame(scenario)
    offsets = np.outer(colGrid.ravel(), frame[1]) + np.outer(rowGrid.ravel(), frame[2])
    return scenario.ris_center + offsets


def _direction(scenario: Scenario, point: np.ndarray, name: str):
    offset = point - scenario.ris_center
    distance = float(np.linalg.norm(offset))
    if distance == 0.0:
        raise DegenerateGeometry(f"{name} coincides with the RIS centre")

    local = localFrame(scenario) @ offset
    zeta = math.atan2(float(np.linalg.norm(local[1:])), float(local[0]))
    elevation = math.atan2(float(local[2]), float(math.hypot(local[0], local[1])))
    azimuth = math.atan2(float(local[1]), float(local[0]))
    return distance, zeta, elevation, azimuth


def linkGeometry(scenario: Scenario) -> LinkGeometry:
    r1, zeta1, theta1, phi1 = _direction(scenario, scenario.source_position, "source")
    r2, zeta2, theta2, phi2 = _direction(scenario, scenario.receiver_position, "receiver")
    return LinkGeometry(r1=r1, r2=r2, zeta1=zeta1, zeta2=zeta2,
                        arrival_elevation=theta1, arrival_azimuth=phi1,
                        departure_elevation=theta2, departure_azimuth=phi2)


def waveVector(elevation: float, azimuth: float, wavelength: float) -> np.ndarray:
    k = 2 * math.pi / wavelength
    return k * np.array([math.cos(azimuth) * math.cos(elevation),
                         math.sin(azimuth) * math.cos(elevation),
                         math.sin(elevation)])


def pathPhase(position, q) -> float:
    """Plane-wave phase g^T q of a unit at local position g. Not wrapped."""
    return np.dot(np.asarray(position, dtype=float), np.asarray(q, dtype=float))
