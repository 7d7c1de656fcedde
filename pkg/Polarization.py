"""
Polarization.py: Jones and Stokes algebra, SoP rotation and both detectors

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

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class JonesVector:
    """Dual-polarized amplitudes, vertical first. Fields may be equally shaped arrays."""
    v: complex
    h: complex

    def asArray(self) -> np.ndarray:
        return np.stack([np.asarray(self.v, dtype=complex), np.asarray(self.h, dtype=complex)], axis=-1)

    @classmethod
    def fromArray(cls, values) -> "JonesVector":
        values = np.asarray(values, dtype=complex)
        return cls(v=values[..., 0], h=values[..., 1])

    def norm(self):
        return np.sqrt(np.abs(self.v) ** 2 + np.abs(self.h) ** 2)

    def __add__(self, other: "JonesVector") -> "JonesVector":
        return JonesVector(v=self.v + other.v, h=self.h + other.h)


@dataclass(frozen=True, eq=False)
class StokesVector:
    s0: float
    s1: float
    s2: float
    s3: float

    def subVector(self) -> np.ndarray:
        """Poincare-space point (s1, s2, s3), shape (..., 3)."""
        return np.stack([np.asarray(self.s1, dtype=float),
                         np.asarray(self.s2, dtype=float),
                         np.asarray(self.s3, dtype=float)], axis=-1)


def stokes(e: JonesVector) -> StokesVector:
    powerV = np.abs(e.v) ** 2
    powerH = np.abs(e.h) ** 2
    cross = e.h * np.conj(e.v)
    return StokesVector(s0=powerH + powerV,
                        s1=powerH - powerV,
                        s2=2 * np.real(cross),
                        s3=-2 * np.imag(cross))


def rotationMatrix(beta: float) -> np.ndarray:
    c, s = np.cos(beta), np.sin(beta)
    return np.array([[c, s],
                     [-s, c]])


def applyRotation(A: np.ndarray, e: JonesVector) -> JonesVector:
    return JonesVector(v=A[0, 0] * e.v + A[0, 1] * e.h,
                       h=A[1, 0] * e.v + A[1, 1] * e.h)


def poincareRotation(angle: float) -> np.ndarray:
    """Rotation of the sub-vector about the s3 axis; A(beta) acts as poincareRotation(2 * beta)."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0],
                     [s, c, 0.0],
                     [0.0, 0.0, 1.0]])


def dpolskDetect(current, previous):
    """Differential decision on two successive sub-vectors: 0 when they agree (dot >= 0), else 1."""
    dot = np.sum(np.asarray(current, dtype=float) * np.asarray(previous, dtype=float), axis=-1)
    bits = np.where(dot >= 0, 0, 1)
    return int(bits) if bits.ndim == 0 else bits


def cpolskDetect(y: JonesVector, betaHat):
    """Undo the estimated rotation, then pick the nearer of slant +45 (bit 1) and slant -45 (bit 0)."""
    betaHat = np.asarray(betaHat, dtype=float)
    c, s = np.cos(betaHat), np.sin(betaHat)

    # A(betaHat)^T y, written out so betaHat may vary per slot
    corrected = JonesVector(v=c * y.v - s * y.h, h=s * y.v + c * y.h)
    bits = np.where(stokes(corrected).s2 >= 0, 1, 0)
    return int(bits) if bits.ndim == 0 else bits
