import math

import numpy as np
import pytest

import Channel
import Geometry
import Modem
from conftest import randomScenario, tableScenario
from Polarization import JonesVector, applyRotation, rotationMatrix


def test_effective_gain_table_values(scenario):
    geom = Geometry.linkGeometry(scenario)
    assert Channel.effectiveGain(scenario, geom) == pytest.approx(6.52e-8, rel=2e-3)


def test_effective_gain_at_boresight_and_distance_scaling(scenario):
    geom = Geometry.linkGeometry(scenario)
    boresight = Geometry.LinkGeometry(r1=geom.r1, r2=geom.r2, zeta1=0.0, zeta2=0.0, arrival_elevation=0.0,
                                      arrival_azimuth=0.0, departure_elevation=0.0, departure_azimuth=0.0)
    spreading = scenario.unit_area * math.sqrt(scenario.tx_gain * scenario.rx_gain) / (4 * math.pi * geom.r1 * geom.r2)
    assert Channel.effectiveGain(scenario, boresight) == pytest.approx(spreading)

    farther = Geometry.LinkGeometry(**{**geom.__dict__, "r2": 2 * geom.r2})
    assert Channel.effectiveGain(scenario, farther) == pytest.approx(Channel.effectiveGain(scenario, geom) / 2)


def test_effective_gain_is_reciprocal(scenario):
    swapped = tableScenario(source_position=scenario.receiver_position, receiver_position=scenario.source_position)
    assert Channel.linkBudget(swapped).eta == pytest.approx(Channel.linkBudget(scenario).eta, rel=1e-14)


def test_table_snr(scenario):
    assert Channel.linkBudget(scenario).gamma == pytest.approx(8.53, abs=0.01)


def test_snr_grows_with_square_of_unit_count(scenario):
    small = Channel.linkBudget(Geometry.withUnitCount(scenario, 100)).gamma
    large = Channel.linkBudget(Geometry.withUnitCount(scenario, 300)).gamma
    assert large / small == pytest.approx(9.0, rel=1e-12)


def test_path_phases(scenario):
    geom = Geometry.linkGeometry(scenario)
    assert np.allclose(Channel.pathPhases(scenario, scenario.ris_center, geom), 0.0, atol=1e-12)

    positions = Geometry.unitPositions(scenario)[:2]
    local = Geometry.localCoordinates(scenario, positions)
    q1 = Geometry.waveVector(geom.arrival_elevation, geom.arrival_azimuth, scenario.carrier_wavelength)
    q2 = Geometry.waveVector(geom.departure_elevation, geom.departure_azimuth, scenario.carrier_wavelength)
    expected = [local[m] @ q1 + local[m] @ q2 for m in range(2)]
    assert np.allclose(Channel.pathPhases(scenario, positions, geom), expected, rtol=0, atol=1e-12)


def test_path_phases_of_symmetric_layout_vanish_along_columns(scenario):
    # Arrival and departure azimuths cancel, so only the (zero-elevation) row axis is left
    psi = Channel.linkBudget(scenario).psi
    assert np.allclose(psi, 0.0, atol=1e-9)


def test_noise_sample_statistics():
    rng = np.random.default_rng(2024)
    assert Channel.noiseSample(0.0, rng).asArray().tolist() == [0j, 0j]

    noise = Channel.noiseSample(2.0, rng, 10 ** 6)
    assert np.mean(np.abs(noise.v) ** 2) == pytest.approx(2.0, rel=0.01)
    assert np.mean(np.abs(noise.h) ** 2) == pytest.approx(2.0, rel=0.01)
    assert np.var(noise.v.real) == pytest.approx(1.0, rel=0.01)
    assert abs(np.corrcoef(noise.v.real, noise.h.real)[0, 1]) < 0.01


def test_scattered_wave_matches_direct_sum():
    rng = np.random.default_rng(17)
    scenario = randomScenario(rng, 8)
    budget = Channel.linkBudget(scenario)
    config = Modem.RisPhaseConfig(phi_v=rng.uniform(0, 7, 8), phi_h=rng.uniform(0, 7, 8))

    amplitude = math.sqrt(budget.eta ** 2 * scenario.tx_power / 2)
    v = h = 0j
    for m in range(8):
        v += amplitude * np.exp(1j * (config.phi_v[m] - budget.psi[m]))
        h += amplitude * np.exp(1j * (config.phi_h[m] - budget.psi[m]))

    u = Channel.effectiveScatteredWave(config, budget, scenario)
    assert u.v == pytest.approx(v, abs=1e-12 * amplitude)
    assert u.h == pytest.approx(h, abs=1e-12 * amplitude)


def test_config_size_mismatch(scenario):
    budget = Channel.linkBudget(scenario)
    with pytest.raises(Channel.ConfigSizeMismatch):
        Channel.effectiveScatteredWave(Modem.beamformingConfig(np.zeros(3), 0.0), budget, scenario)
    with pytest.raises(Channel.ConfigSizeMismatch):
        Channel.assembleFullChannel(Modem.beamformingConfig(np.zeros(3), 0.0), scenario,
                                    Geometry.linkGeometry(scenario), Geometry.unitPositions(scenario))


def test_received_signal():
    u = JonesVector(v=1 + 1j, h=-0.5)
    zero = JonesVector(v=0j, h=0j)
    assert np.allclose(Channel.receivedSignal(u, 0.0, zero).asArray(), u.asArray())
    assert np.allclose(Channel.receivedSignal(zero, 1.1, u).asArray(), u.asArray())
    assert Channel.receivedSignal(u, 2.3, zero).norm() == pytest.approx(u.norm())


def test_single_unit_full_channel():
    scenario = tableScenario(num_units_rows=1, num_units_cols=1, rotation_angle=0.0)
    geom = Geometry.linkGeometry(scenario)
    H = Channel.assembleFullChannel(Modem.beamformingConfig([0.0], 0.0), scenario, geom, [scenario.ris_center])
    assert np.allclose(H, Channel.effectiveGain(scenario, geom) * np.eye(2), rtol=1e-12)


def test_full_channel_matches_simplified_path():
    rng = np.random.default_rng(99)
    for _ in range(100):
        units = int(rng.integers(1, 65))
        scenario = randomScenario(rng, units)
        geom = Geometry.linkGeometry(scenario)
        config = Modem.RisPhaseConfig(phi_v=rng.uniform(0, 2 * math.pi, units),
                                      phi_h=rng.uniform(0, 2 * math.pi, units))

        H = Channel.assembleFullChannel(config, scenario, geom, Geometry.unitPositions(scenario))
        full = math.sqrt(scenario.tx_power / 2) * H @ np.ones(2)

        u = Channel.effectiveScatteredWave(config, Channel.linkBudget(scenario), scenario)
        simplified = applyRotation(rotationMatrix(scenario.rotation_angle), u).asArray()

        scale = units * Channel.effectiveGain(scenario, geom) * math.sqrt(scenario.tx_power)
        assert np.linalg.norm(full - simplified) <= 1e-10 * scale


@pytest.mark.parametrize("gamma", [0.0, 0.5, 8.0, math.inf])
def test_scenario_for_gamma(scenario, gamma):
    assert Channel.linkBudget(Channel.scenarioForGamma(scenario, gamma)).gamma == pytest.approx(gamma, rel=1e-12)
