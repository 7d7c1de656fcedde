import math

import numpy as np
import pytest

import Channel
import Modem


def test_wrap_phase():
    wrapped = Modem.wrapPhase([-1e-18, 2 * math.pi, 7.0, -math.pi])
    assert np.all((wrapped >= 0) & (wrapped < 2 * math.pi))
    assert wrapped[1] == 0.0
    assert wrapped[2] == pytest.approx(7.0 - 2 * math.pi)
    assert wrapped[3] == pytest.approx(math.pi)


def test_phase_config_rejects_mismatched_lengths():
    with pytest.raises(ValueError):
        Modem.RisPhaseConfig(phi_v=np.zeros(3), phi_h=np.zeros(4))


def test_beamforming_config():
    config = Modem.beamformingConfig(np.zeros(5), 0.0)
    assert len(config) == 5
    assert not np.any(config.phi_v) and not np.any(config.phi_h)

    psi = np.array([0.5, 3.0, 9.0])
    config = Modem.beamformingConfig(psi, math.pi / 2)
    assert np.allclose(np.mod(config.deltaPhi(), 2 * math.pi), math.pi / 2)


def test_beamforming_beats_random_configs(scenario):
    budget = Channel.linkBudget(scenario)
    best = Channel.effectiveScatteredWave(Modem.beamformingConfig(budget.psi, 0.0), budget, scenario).norm()
    assert best == pytest.approx(budget.alpha, rel=1e-10)

    rng = np.random.default_rng(3)
    for _ in range(1000):
        config = Modem.RisPhaseConfig(phi_v=rng.uniform(0, 2 * math.pi, 400), phi_h=rng.uniform(0, 2 * math.pi, 400))
        assert Channel.effectiveScatteredWave(config, budget, scenario).norm() < best


def test_differential_encoding():
    assert Modem.differentialEncode([1, 0, 1], 1).tolist() == [0, 0, 1]
    assert Modem.differentialEncode(np.zeros(6, dtype=int), 1).tolist() == [1] * 6
    assert Modem.differentialEncode(np.zeros(6, dtype=int), 0).tolist() == [0] * 6
    assert Modem.differentialEncode([], 1).size == 0


@pytest.mark.parametrize("dInit", [0, 1])
def test_differential_round_trip(dInit):
    bits = np.random.default_rng(8).integers(0, 2, size=10000)
    encoded = Modem.differentialEncode(bits, dInit)
    assert np.array_equal(Modem.differentialDecode(encoded, dInit), bits)


def test_differential_state_matches_vector_encoder():
    bits = [1, 1, 0, 1, 0, 0, 1]
    state = Modem.DifferentialState()
    assert [state.push(b) for b in bits] == Modem.differentialEncode(bits, 1).tolist()
    with pytest.raises(ValueError):
        Modem.DifferentialState(d_prev=2)


@pytest.mark.parametrize("d, expected", [(1, (1, 1)), (0, (-1, 1))])
def test_slot_configs_switch_polarization(scenario, d, expected):
    budget = Channel.linkBudget(scenario)
    u = Channel.effectiveScatteredWave(Modem.dpolskSlotConfig(d, budget.psi), budget, scenario)
    scale = budget.alpha / math.sqrt(2)
    assert u.v / scale == pytest.approx(expected[0], abs=1e-10)
    assert u.h / scale == pytest.approx(expected[1], abs=1e-10)
    assert u.norm() == pytest.approx(budget.alpha, rel=1e-12)


def test_cpolsk_slot_config_is_dpolsk_rule():
    psi = np.array([0.1, 2.2, 5.0])
    for b in (0, 1):
        assert np.array_equal(Modem.cpolskSlotConfig(b, psi).phi_v, Modem.dpolskSlotConfig(b, psi).phi_v)
        assert np.array_equal(Modem.cpolskSlotConfig(b, psi).phi_h, Modem.dpolskSlotConfig(b, psi).phi_h)


def test_configs_are_two_pi_periodic(scenario):
    budget = Channel.linkBudget(scenario)
    shifted = budget.psi + 2 * math.pi
    u = Channel.effectiveScatteredWave(Modem.dpolskSlotConfig(1, budget.psi), budget, scenario)
    v = Channel.effectiveScatteredWave(Modem.dpolskSlotConfig(1, shifted), budget, scenario)
    assert np.allclose(u.asArray(), v.asArray(), rtol=0, atol=1e-12 * budget.alpha)
