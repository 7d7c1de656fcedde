"""
Theory.py: Theoretical BER of CPolSK (closed form) and DPolSK (double integral)

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

Notation: `t` is the integration variable of the DPolSK law (not the channel
gain of Channel.effectiveGain), `theta` the angle between a noisy SoP and the
transmitted one on the Poincare sphere.
"""

import math

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, stats

import Substrate


class DomainError(ValueError):
    pass


class ConvergenceFailure(ArithmeticError):
    def __init__(self, what: str, value: float, error: float, message: str):
        super().__init__(f"{what}: estimate {value:.6e} +/- {error:.2e} ({message.strip()})")
        self.value = value
        self.error = error


@dataclass(frozen=True)
class QuadratureSpec:
    relative_tolerance: float = 1e-9
    absolute_tolerance: float = 1e-12
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.relative_tolerance > 0 and self.absolute_tolerance > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")


def _checkGamma(gamma):
    if not gamma >= 0:
        raise DomainError(f"SNR must be non-negative, got {gamma}")


def _integrate(func, a: float, b: float, spec: QuadratureSpec, what: str, points=None) -> float:
    """scipy quad that refuses to hand back an estimate outside the requested tolerance."""
    result = integrate.quad(func, a, b, epsabs=spec.absolute_tolerance, epsrel=spec.relative_tolerance,
                            limit=spec.max_subdivisions, points=points, full_output=1)
    value, error = result[0], result[1]

    # quad appends a message only when it gave up early
    if len(result) > 3 and error > max(spec.absolute_tolerance, spec.relative_tolerance * abs(value)):
        Substrate.writeLogEntry("convergence_failure", f"{what}: {result[3]}")
        raise ConvergenceFailure(what, value, error, result[3])
    return value


def acot(x):
    """Inverse cotangent with range (0, pi)."""
    return np.pi / 2 - np.arctan(x)


def cpolskBer(gamma: float) -> float:
    _checkGamma(gamma)
    return 0.5 * math.exp(-gamma)


def fEta(t, gamma: float):
    _checkGamma(gamma)
    t = np.asarray(t, dtype=float)
    root = np.hypot(1.0, t)
    cosine = t / root
    value = 0.5 * root ** -3 * np.exp(-gamma * (1 - cosine)) * (1 + gamma * (1 + cosine))
    return float(value) if value.ndim == 0 else value


def _thetaSurvival(theta, gamma: float):
    """1 - F_theta, computed directly so high-SNR tails keep their digits."""
    cosine = np.cos(theta)
    return 0.5 * np.exp(-gamma * (1 - cosine)) * (1 + cosine)


def FTheta(theta, gamma: float):
    _checkGamma(gamma)
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < 0) or np.any(theta > np.pi):
        raise DomainError("theta must lie in [0, pi]")
    value = 1 - _thetaSurvival(theta, gamma)
    return float(value) if value.ndim == 0 else value


def _etaWeight(xi: float, gamma: float) -> float:
    # f_eta(tan xi) * sec(xi)**2, simplified
    s = math.sin(xi)
    return 0.5 * math.cos(xi) * math.exp(-gamma * (1 - s)) * (1 + gamma * (1 + s))


@lru_cache(maxsize=512)
def dpolskBer(gamma: float, spec: QuadratureSpec = QuadratureSpec()) -> float:
    _checkGamma(gamma)
    if math.isinf(gamma):
        return 0.0

    def positiveBranch(xi, c):
        theta = float(acot(c / math.tan(xi)))
        return _etaWeight(xi, gamma) * float(_thetaSurvival(theta, gamma))

    def negativeBranch(xi, c):
        theta = float(acot(c / math.tan(xi)))
        return _etaWeight(xi, gamma) * (1 - float(_thetaSurvival(theta, gamma)))

    def overT(delta):
        c = math.cos(delta)
        upper = _integrate(lambda xi: positiveBranch(xi, c), 0.0, math.pi / 2, spec, "DPolSK BER, t > 0")
        lower = _integrate(lambda xi: negativeBranch(xi, c), -math.pi / 2, 0.0, spec, "DPolSK BER, t < 0")
        return upper + lower

    # The integrand depends on delta only through cos(delta): fold [0, 2pi] onto [0, pi]
    ber = _integrate(overT, 0.0, math.pi, spec, "DPolSK BER, delta") / math.pi
    return min(max(ber, 0.0), 0.5)


def cpolskConditionalBer(gamma: float, offset: float, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """CPolSK BER when the corrected SoP sits `offset` rad away from its reference point on the sphere."""
    _checkGamma(gamma)
    if not 0 <= offset <= math.pi:
        raise DomainError("offset must lie in [0, pi]")
    if offset == 0:
        return cpolskBer(gamma)
    if math.isinf(gamma):
        return 0.0 if offset < math.pi / 2 else (0.5 if offset == math.pi / 2 else 1.0)

    cosOffset = math.cos(offset)
    if abs(cosOffset) < 1e-15:
        return 0.5

    tanOffset = math.tan(offset)

    def overAzimuth(delta):
        theta = float(acot(-tanOffset * math.cos(delta)))
        survival = float(_thetaSurvival(theta, gamma))
        return survival if cosOffset > 0 else 1 - survival

    return _integrate(overAzimuth, 0.0, math.pi, spec, "CPolSK conditional BER") / math.pi


def _sphereOffset(epsilon: float) -> float:
    """Angular distance on the sphere left by a rotation estimate off by epsilon."""
    return abs(math.remainder(2 * epsilon, 2 * math.pi))


@lru_cache(maxsize=512)
def cpolskBerWithEstimationError(gamma: float, sigmaE: float, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """CPolSK BER averaged over a Gaussian rotation-estimate error of standard deviation sigmaE."""
    _checkGamma(gamma)
    if sigmaE < 0:
        raise DomainError("sigmaE must not be negative")
    if sigmaE == 0:
        return cpolskBer(gamma)

    density = stats.norm(scale=sigmaE)

    def weighted(epsilon):
        return density.pdf(epsilon) * cpolskConditionalBer(gamma, _sphereOffset(epsilon), spec)

    bound = 8 * sigmaE
    return _integrate(weighted, -bound, bound, spec, "CPolSK BER with estimation error", points=[0.0])
