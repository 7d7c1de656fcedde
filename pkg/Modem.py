"""
Modem.py: RIS phase programming, differential encoding and the slot rules

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

from dataclasses import dataclass

import numpy as np

TWO_PI = 2 * math.pi


def wrapPhase(phase):
    """Map phases onto [0, 2*pi)."""
    wrapped = np.mod(np.asarray(phase, dtype=float), TWO_PI)
    # np.mod of a tiny negative value rounds up to exactly 2*pi
    return np.where(wrapped >= TWO_PI, 0.0, wrapped)


@dataclass(frozen=True, eq=False)
class RisPhaseConfig:
    phi_v: np.ndarray
    phi_h: np.ndarray

    def __post_init__(self):
        phiV = wrapPhase(np.atleast_1d(self.phi_v))
        phiH = wrapPhase(np.atleast_1d(self.phi_h))
        if phiV.shape != phiH.shape or phiV.ndim != 1:
            raise ValueError("phi_v and phi_h must be equally long 1-D sequences")
        object.__setattr__(self, "phi_v", phiV)
        object.__setattr__(self, "phi_h", phiH)

    def __len__(self):
        return len(self.phi_v)

    def deltaPhi(self) -> np.ndarray:
        return self.phi_v - self.phi_h


@dataclass
class DifferentialState:
    d_prev: int = 1

    def __post_init__(self):
        if self.d_prev not in (0, 1):
            raise ValueError("d_prev must be 0 or 1")

    def push(self, bit: int) -> int:
        """Encode one data bit, returning d_k and remembering it."""
        self.d_prev = int(bit) ^ self.d_prev
        return self.d_prev


def beamformingConfig(psi, deltaPhi: float) -> RisPhaseConfig:
    """Cancel every path phase so all units add coherently, with a common V/H offset."""
    psi = np.atleast_1d(np.asarray(psi, dtype=float))
    return RisPhaseConfig(phi_v=psi + deltaPhi, phi_h=psi)


def differentialEncode(bits, dInit: int = 1) -> np.ndarray:
    """d_k = b_k xor d_(k-1), starting from d_0 = dInit."""
    bits = np.asarray(bits, dtype=np.int64)
    return (dInit + np.cumsum(bits)) % 2


def differentialDecode(encoded, dInit: int = 1) -> np.ndarray:
    encoded = np.asarray(encoded, dtype=np.int64)
    if encoded.size == 0:
        return encoded
    previous = np.concatenate(([dInit], encoded[:-1]))
    return encoded ^ previous


def dpolskSlotConfig(d: int, psi) -> RisPhaseConfig:
    """Slant +45 for d = 1, slant -45 for d = 0, beamforming kept in both."""
    return beamformingConfig(psi, (1 - int(d)) * math.pi)


def cpolskSlotConfig(b: int, psi) -> RisPhaseConfig:
    return dpolskSlotConfig(b, psi)
