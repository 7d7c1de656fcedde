"""
Simulation.py: Monte Carlo BER engine and parameter sweeps

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

Random draws are organised in fixed blocks of BITS_PER_BLOCK bits. Every
block owns its bit, noise and estimation-error streams, keyed by
(master seed, purpose, block index), so the way blocks are spread over
worker threads never changes a single draw. DPolSK pairs straddle block
edges: the slot shared by two blocks draws its noise from a stream of its own.
Burst-mode rotation-estimate errors are keyed by burst index, not by block.
"""

import math

from dataclasses import dataclass, replace

import numpy as np
from PyQt6.QtCore import QRunnable, QThreadPool, pyqtSlot
from scipy import stats

import Channel
import Geometry
import Modem
import Substrate
import Theory
from Geometry import Scenario
from Polarization import JonesVector, applyRotation, cpolskDetect, dpolskDetect, rotationMatrix, stokes

DPOLSK = "dpolsk"
CPOLSK = "cpolsk"
SCHEMES = (DPOLSK, CPOLSK)

BITS_PER_BLOCK = 16384

_STREAM_TAGS = {"bit": 0, "noise": 1, "edge": 2, "est-error": 3, "burst": 4}


class InvalidRunSpec(ValueError):
    pass


class AreaTooSmall(ValueError):
    pass


@dataclass(frozen=True)
class RunSpec:
    scheme: str
    scenario: Scenario
    num_bits: int
    master_seed: int
    sigma_e: float = 0.0
    d_init: int = 1
    workers: int = 1
    estimation_error_mode: str = "slot"
    burst_length: int = 1024
    noise_in_rotated_frame: bool = False

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise InvalidRunSpec(f"unknown scheme {self.scheme!r}")
        if int(self.num_bits) < 1:
            raise InvalidRunSpec("num_bits must be at least 1")
        if int(self.master_seed) < 0 or int(self.master_seed) >= 2 ** 64:
            raise InvalidRunSpec("master_seed must be an unsigned 64-bit integer")
        if not self.sigma_e >= 0:
            raise InvalidRunSpec("sigma_e must not be negative")
        if self.d_init not in (0, 1):
            raise InvalidRunSpec("d_init must be 0 or 1")
        if int(self.workers) < 1:
            raise InvalidRunSpec("workers must be at least 1")
        if self.estimation_error_mode not in ("slot", "burst"):
            raise InvalidRunSpec("estimation_error_mode must be 'slot' or 'burst'")
        if int(self.burst_length) < 1:
            raise InvalidRunSpec("burst_length must be at least 1")


@dataclass(frozen=True)
class BerRecord:
    scheme: str
    area_m2: float
    M: int
    gamma_linear: float
    gamma_db: float
    ber_simulated: float
    errors_count: int
    trials: int
    ci_low: float
    ci_high: float
    ber_theory: float
    sigma_e: float
    seed: int
    effective_trials: int = None

    @property
    def sigma_e_deg(self) -> float:
        return math.degrees(self.sigma_e)


@dataclass(frozen=True, eq=False)
class _Link:
    budget: Channel.LinkBudget
    waves: np.ndarray  # effective scattered wave per encoded bit, shape (2, 2)


def substream(masterSeed: int, tag: str, index: int) -> np.random.Generator:
    """Counter-based generator for one (purpose, block) pair."""
    sequence = np.random.SeedSequence(entropy=int(masterSeed), spawn_key=(_STREAM_TAGS[tag], int(index)))
    return np.random.Generator(np.random.Philox(sequence))


def wilsonInterval(errors: int, trials: int, confidence: float = 0.95) -> tuple:
    if trials < 1 or not 0 <= errors <= trials:
        raise ValueError("need 0 <= errors <= trials and trials >= 1")
    return wilsonFromRate(errors / trials, trials, confidence)


def wilsonFromRate(p: float, trials: int, confidence: float = 0.95) -> tuple:
    """Wilson interval for an observed rate p over `trials` independent trials."""
    if trials < 1 or not 0 <= p <= 1:
        raise ValueError("need 0 <= p <= 1 and trials >= 1")

    z = stats.norm.ppf(0.5 + confidence / 2)
    denominator = 1 + z ** 2 / trials
    center = (p + z ** 2 / (2 * trials)) / denominator
    halfWidth = z * math.sqrt(p * (1 - p) / trials + z ** 2 / (4 * trials ** 2)) / denominator
    low = 0.0 if p == 0 else max(0.0, center - halfWidth)
    high = 1.0 if p == 1 else min(1.0, center + halfWidth)
    return low, high


def toDb(linear: float) -> float:
    if linear == 0:
        return -math.inf
    return 10 * math.log10(linear)


class BlockWorker(QRunnable):
    """Counts bit errors over a fixed list of blocks on a pool thread."""

    def __init__(self, task, blocks):
        super().__init__()
        self.task = task
        self.blocks = list(blocks)
        self.errors = 0
        self.failure = None
        self.setAutoDelete(False)

    @pyqtSlot()
    def run(self):
        # Exceptions must not escape into Qt, hand them back instead
        try:
            for block in self.blocks:
                self.errors += self.task(block)
        except Exception as err:
            self.failure = err


def _countErrors(task, blocks: int, workers: int) -> int:
    pool = QThreadPool()
    pool.setMaxThreadCount(workers)

    jobs = [BlockWorker(task, range(first, blocks, workers)) for first in range(min(workers, blocks))]
    for job in jobs:
        pool.start(job)
    pool.waitForDone()

    for job in jobs:
        if job.failure is not None:
            raise job.failure
    return sum(job.errors for job in jobs)


def _blockCount(spec: RunSpec) -> int:
    return -(-spec.num_bits // BITS_PER_BLOCK)


def _blockBits(spec: RunSpec, block: int) -> np.ndarray:
    count = min(BITS_PER_BLOCK, spec.num_bits - block * BITS_PER_BLOCK)
    return substream(spec.master_seed, "bit", block).integers(0, 2, size=count)


def _prepareLink(scenario: Scenario) -> _Link:
    budget = Channel.linkBudget(scenario)
    waves = [Channel.effectiveScatteredWave(Modem.dpolskSlotConfig(d, budget.psi), budget, scenario).asArray()
             for d in (0, 1)]
    return _Link(budget=budget, waves=np.stack(waves))


def _receive(spec: RunSpec, u: JonesVector, noise: JonesVector) -> JonesVector:
    beta = spec.scenario.rotation_angle
    if spec.noise_in_rotated_frame:
        return applyRotation(rotationMatrix(beta), u + noise)
    return Channel.receivedSignal(u, beta, noise)


def _dpolskNoise(spec: RunSpec, block: int, count: int) -> JonesVector:
    """Noise for the block's reference slot plus its `count` data slots."""
    noisePower = spec.scenario.noise_power
    head = Channel.noiseSample(noisePower, substream(spec.master_seed, "edge", block))
    interior = min(count, BITS_PER_BLOCK - 1)
    body = Channel.noiseSample(noisePower, substream(spec.master_seed, "noise", block), interior)

    parts = [head.asArray()[None], body.asArray()]
    if count == BITS_PER_BLOCK:
        tail = Channel.noiseSample(noisePower, substream(spec.master_seed, "edge", block + 1))
        parts.append(tail.asArray()[None])
    return JonesVector.fromArray(np.concatenate(parts))


def _dpolskBlockErrors(spec: RunSpec, link: _Link, block: int, dStart: int) -> int:
    bits = _blockBits(spec, block)
    encoded = np.concatenate(([dStart], Modem.differentialEncode(bits, dStart)))

    u = JonesVector.fromArray(link.waves[encoded])
    y = _receive(spec, u, _dpolskNoise(spec, block, len(bits)))
    points = stokes(y).subVector()

    decided = dpolskDetect(points[1:], points[:-1])
    return int(np.count_nonzero(decided != bits))


def _burstErrors(spec: RunSpec, block: int, count: int) -> np.ndarray:
    """One rotation-estimate error per burst of slots, keyed by the burst index."""
    first = block * BITS_PER_BLOCK
    bursts, slots = np.unique(np.arange(first, first + count) // spec.burst_length, return_inverse=True)
    draws = np.array([substream(spec.master_seed, "burst", burst).normal(0.0, spec.sigma_e) for burst in bursts.tolist()])
    return draws[slots]


def independentTrials(spec: RunSpec) -> int:
    """Binomial sample size of a run: slots sharing a rotation-estimate error count once."""
    if spec.scheme == CPOLSK and spec.estimation_error_mode == "burst" and spec.sigma_e > 0:
        return -(-spec.num_bits // spec.burst_length)
    return spec.num_bits


def _cpolskBlockErrors(spec: RunSpec, link: _Link, block: int) -> int:
    bits = _blockBits(spec, block)
    count = len(bits)

    u = JonesVector.fromArray(link.waves[bits])
    noise = Channel.noiseSample(spec.scenario.noise_power, substream(spec.master_seed, "noise", block), count)
    y = _receive(spec, u, noise)

    if spec.estimation_error_mode == "slot":
        epsilon = substream(spec.master_seed, "est-error", block).normal(0.0, spec.sigma_e, size=count)
    else:
        epsilon = _burstErrors(spec, block, count)

    decided = cpolskDetect(y, spec.scenario.rotation_angle + epsilon)
    return int(np.count_nonzero(decided != bits))


def _record(spec: RunSpec, link: _Link, errors: int, theory: float) -> BerRecord:
    trials = independentTrials(spec)
    low, high = wilsonFromRate(errors / spec.num_bits, trials)
    gamma = float(link.budget.gamma)
    record = BerRecord(scheme=spec.scheme, area_m2=float(spec.scenario.ris_area), M=spec.scenario.num_units,
                       gamma_linear=gamma, gamma_db=toDb(gamma), ber_simulated=errors / spec.num_bits,
                       errors_count=errors, trials=spec.num_bits, ci_low=low, ci_high=high,
                       ber_theory=float(theory), sigma_e=float(spec.sigma_e), seed=int(spec.master_seed),
                       effective_trials=trials)

    auditEntry = {
        "scheme": record.scheme,
        "units": record.M,
        "gamma_db": record.gamma_db,
        "errors": errors,
        "trials": record.trials,
        "workers": spec.workers
    }
    Substrate.writeAuditEntry("run_complete", auditEntry)
    return record


def runDpolsk(spec: RunSpec) -> BerRecord:
    """Pilot slot carrying d_init, then one slot per bit, each detected against its predecessor."""
    if spec.scheme != DPOLSK:
        raise InvalidRunSpec("runDpolsk needs a DPolSK run spec")

    link = _prepareLink(spec.scenario)
    blocks = _blockCount(spec)

    # Encoded bit entering each block, from the running parity of the bit streams
    starts = []
    d = spec.d_init
    for block in range(blocks):
        starts.append(d)
        d ^= int(np.sum(_blockBits(spec, block)) % 2)

    errors = _countErrors(lambda block: _dpolskBlockErrors(spec, link, block, starts[block]), blocks, spec.workers)
    return _record(spec, link, errors, Theory.dpolskBer(link.budget.gamma))


def runCpolsk(spec: RunSpec) -> BerRecord:
    if spec.scheme != CPOLSK:
        raise InvalidRunSpec("runCpolsk needs a CPolSK run spec")

    link = _prepareLink(spec.scenario)
    errors = _countErrors(lambda block: _cpolskBlockErrors(spec, link, block), _blockCount(spec), spec.workers)
    theory = Theory.cpolskBerWithEstimationError(link.budget.gamma, spec.sigma_e)
    return _record(spec, link, errors, theory)


def runSpec(spec: RunSpec) -> BerRecord:
    if spec.scheme == DPOLSK:
        return runDpolsk(spec)
    return runCpolsk(spec)


def _sweep(scenarios, base: RunSpec, schemes, sigmaEs) -> list:
    schemes = tuple(schemes) if schemes else (base.scheme,)
    sigmaEs = tuple(sigmaEs) if sigmaEs else (base.sigma_e,)

    records = []
    for scenario in scenarios:
        for scheme in schemes:
            for sigmaE in sigmaEs:
                records.append(runSpec(replace(base, scheme=scheme, scenario=scenario, sigma_e=sigmaE)))
    return records


def scenarioForArea(scenario: Scenario, area: float) -> Scenario:
    """The scenario resized to M = round(area / unit area) units."""
    units = round(area / scenario.unit_area) if area > 0 else 0
    if units < 1:
        raise AreaTooSmall(f"area {area} m^2 holds no complete RIS unit")
    return Geometry.withUnitCount(scenario, units)


def sweepArea(areas, base: RunSpec, schemes=None, sigmaEs=None) -> list:
    """One record per (area, scheme, sigma_e)."""
    scenarios = [scenarioForArea(base.scenario, area) for area in areas]
    return _sweep(scenarios, base, schemes, sigmaEs)


def sweepGamma(gammas, base: RunSpec, schemes=None, sigmaEs=None) -> list:
    """One record per (SNR, scheme, sigma_e) at the base geometry, noise power scaled to hit each SNR."""
    scenarios = [Channel.scenarioForGamma(base.scenario, gamma) for gamma in gammas]
    return _sweep(scenarios, base, schemes, sigmaEs)


def theoryAgreement(record: BerRecord, minErrors: int = 100, sigmas: float = 3.0):
    """True/False for |simulated - theory| within `sigmas` binomial deviations, None when too few errors."""
    if record.errors_count < minErrors:
        Substrate.writeAuditEntry("point_skipped", {"scheme": record.scheme, "gamma_db": record.gamma_db,
                                                    "errors": record.errors_count})
        return None

    # Bursts sharing one estimation error are a single binomial trial
    trials = record.effective_trials or record.trials
    deviation = math.sqrt(record.ber_theory * (1 - record.ber_theory) / trials)
    return abs(record.ber_simulated - record.ber_theory) <= sigmas * deviation
