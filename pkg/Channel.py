"""
Channel.py: Cascaded dual-polarized source -> RIS -> receiver channel

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

import Geometry
from Geometry import LinkGeometry, Scenario
from Modem import RisPhaseConfig
from Polarization import JonesVector, applyRotation, rotationMatrix

# Radiation pattern exponent of a square unit with half-wavelength side
UNIT_PATTERN_EXPONENT = 0.285


class ConfigSizeMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LinkBudget:
    eta: float
    psi: np.ndarray
    alpha: float
    gamma: float


def effectiveGain(scenario: Scenario, geom: LinkGeometry) -> float:
    if geom.r1 * geom.r2 == 0:
        raise Geometry.DegenerateGeometry("zero link distance")

    spreading = scenario.unit_area * math.sqrt(scenario.tx_gain * scenario.rx_gain) / (4 * math.pi * geom.r1 * geom.r2)
    pattern = (math.cos(geom.zeta1) * math.cos(geom.zeta2)) ** UNIT_PATTERN_EXPONENT
    return spreading * pattern


def _waveVectors(scenario: Scenario, geom: LinkGeometry):
    q1 = Geometry.waveVector(geom.arrival_elevation, geom.arrival_azimuth, scenario.carrier_wavelength)
    q2 = Geometry.waveVector(geom.departure_elevation, geom.departure_azimuth, scenario.carrier_wavelength)
    return q1, q2


def pathPhases(scenario: Scenario, positions, geom: LinkGeometry) -> np.ndarray:
    """psi_m = mu_1m + mu_2m for every unit, from global unit positions."""
    local = Geometry.localCoordinates(scenario, np.atleast_2d(positions))
    q1, q2 = _waveVectors(scenario, geom)
    return Geometry.pathPhase(local, q1) + Geometry.pathPhase(local, q2)


def linkBudget(scenario: Scenario) -> LinkBudget:
    geom = Geometry.linkGeometry(scenario)
    eta = effectiveGain(scenario, geom)
    psi = pathPhases(scenario, Geometry.unitPositions(scenario), geom)

    alpha = scenario.num_units * eta * math.sqrt(scenario.tx_power)
    if alpha == 0:
        gamma = 0.0
    elif scenario.noise_power == 0:
        gamma = math.inf
    else:
        gamma = alpha ** 2 / (2 * scenario.noise_power)
    return LinkBudget(eta=eta, psi=psi, alpha=alpha, gamma=gamma)


def scenarioForGamma(scenario: Scenario, gamma: float) -> Scenario:
    """Same geometry, noise power (or source power, for gamma = 0) picked to hit `gamma`."""
    if gamma < 0:
        raise ValueError("gamma must not be negative")
    if gamma == 0:
        return replace(scenario, tx_power=0.0)
    if math.isinf(gamma):
        return replace(scenario, noise_power=0.0)

    alpha = linkBudget(scenario).alpha
    if alpha == 0:
        raise ValueError("scenario has no transmit power to scale")
    return replace(scenario, noise_power=alpha ** 2 / (2 * gamma))


def noiseSample(noisePower: float, rng: np.random.Generator, size=None) -> JonesVector:
    """Circularly-symmetric complex Gaussian noise, variance noisePower per polarization."""
    shape = () if size is None else (size if isinstance(size, tuple) else (size,))
    draws = rng.standard_normal(shape + (4,))
    scale = math.sqrt(noisePower / 2)
    return JonesVector(v=scale * (draws[..., 0] + 1j * draws[..., 1]),
                       h=scale * (draws[..., 2] + 1j * draws[..., 3]))


def effectiveScatteredWave(config: RisPhaseConfig, budget: LinkBudget, scenario: Scenario) -> JonesVector:
    if len(config) != len(budget.psi):
        raise ConfigSizeMismatch(f"config has {len(config)} units, channel has {len(budget.psi)}")

    amplitude = math.sqrt(budget.eta ** 2 * scenario.tx_power / 2)
    common = np.exp(1j * (config.phi_h - budget.psi))
    return JonesVector(v=amplitude * np.sum(common * np.exp(1j * config.deltaPhi())),
                       h=amplitude * np.sum(common))


def receivedSignal(u: JonesVector, beta: float, noise: JonesVector) -> JonesVector:
    return applyRotation(rotationMatrix(beta), u) + noise


def assembleFullChannel(config: RisPhaseConfig, scenario: Scenario, geom: LinkGeometry, positions) -> np.ndarray:
    """Sum of per-unit H2 @ Phi @ H1 products, kept term by term."""
    positions = np.atleast_2d(positions)
    if len(config) != len(positions):
        raise ConfigSizeMismatch(f"config has {len(config)} units, layout has {len(positions)}")

    rho = math.sqrt(effectiveGain(scenario, geom))
    local = Geometry.localCoordinates(scenario, positions)
    q1, q2 = _waveVectors(scenario, geom)
    mu1 = Geometry.pathPhase(local, q1)
    mu2 = Geometry.pathPhase(local, q2)

    units = len(positions)
    h1 = rho * np.exp(-1j * mu1)[:, None, None] * np.eye(2)
    h2 = rho * np.exp(-1j * mu2)[:, None, None] * rotationMatrix(scenario.rotation_angle)
    phi = np.zeros((units, 2, 2), dtype=complex)
    phi[:, 0, 0] = np.exp(1j * config.phi_v)
    phi[:, 1, 1] = np.exp(1j * config.phi_h)

    return np.einsum("mij,mjk,mkl->il", h2, phi, h1)
