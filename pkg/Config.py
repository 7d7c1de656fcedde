"""
Config.py: JSON configuration files, unit conversion and validation

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

import copy
import json
import math
import os
import re

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import constants

import Geometry
import Simulation
from Geometry import Scenario

DEFAULT_CONFIG_PATH = os.path.join(os.path.dirname(__file__), "res", "default.json")

_UNITS = {
    "power": {"W": 1.0, "mW": 1e-3},
    "gain": {"": 1.0},
    "angle": {"rad": 1.0, "deg": math.pi / 180},
    "frequency": {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9},
    "length": {"m": 1.0, "cm": 1e-2, "mm": 1e-3},
}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z]*)\s*$")


class ParseError(ValueError):
    pass


class ValidationError(ValueError):
    def __init__(self, field: str, reason: str):
        super().__init__(f"{field}: {reason}")
        self.field = field
        self.reason = reason


@dataclass(frozen=True)
class RunConfig:
    schemes: tuple
    num_bits: int
    seed: int
    sigma_e_deg: tuple
    beta_deg: float
    d_init: int
    workers: int
    estimation_error_mode: str
    burst_length: int
    noise_in_rotated_frame: bool


@dataclass(frozen=True)
class SweepConfig:
    areas: tuple = None
    gamma_db: tuple = None
    explicit: bool = False


@dataclass(frozen=True)
class OutputConfig:
    csv: str
    precision: int


@dataclass(frozen=True, eq=False)
class ConfigFile:
    scenario: Scenario
    run: RunConfig
    sweep: SweepConfig
    output: OutputConfig
    document: dict

    def baseRunSpec(self) -> Simulation.RunSpec:
        return Simulation.RunSpec(scheme=self.run.schemes[0], scenario=self.scenario, num_bits=self.run.num_bits,
                                  master_seed=self.run.seed, sigma_e=math.radians(self.run.sigma_e_deg[0]),
                                  d_init=self.run.d_init, workers=self.run.workers,
                                  estimation_error_mode=self.run.estimation_error_mode,
                                  burst_length=self.run.burst_length,
                                  noise_in_rotated_frame=self.run.noise_in_rotated_frame)


def parseQuantity(value, kind: str, field: str) -> float:
    """Convert a number or a '<number> <unit>' string to SI / linear units."""
    if isinstance(value, bool):
        raise ValidationError(field, "expected a number")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ValidationError(field, "expected a number or a string with a unit")

    match = _QUANTITY.match(value)
    if match is None:
        raise ValidationError(field, f"cannot read quantity {value!r}")
    number, unit = float(match.group(1)), match.group(2)

    if kind == "power" and unit in ("dBm", "dBW"):
        return 10 ** ((number - (30 if unit == "dBm" else 0)) / 10)
    if kind == "gain" and unit in ("dB", "dBi"):
        return 10 ** (number / 10)
    if unit in _UNITS[kind]:
        return number * _UNITS[kind][unit]
    raise ValidationError(field, f"unit {unit!r} is not a {kind} unit")


def _vector(value, field: str) -> np.ndarray:
    try:
        vector = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ValidationError(field, "expected three numbers")
    if vector.shape != (3,) or not np.all(np.isfinite(vector)):
        raise ValidationError(field, "expected three finite numbers")
    return vector


def _integer(value, field: str, low: int = None, high: int = None) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not float(value).is_integer():
        raise ValidationError(field, "expected an integer")
    value = int(value)
    if low is not None and value < low:
        raise ValidationError(field, f"must be at least {low}")
    if high is not None and value > high:
        raise ValidationError(field, f"must be at most {high}")
    return value


def _degrees(value, field: str) -> float:
    # Bare numbers are already degrees here
    if isinstance(value, str):
        return math.degrees(parseQuantity(value, "angle", field))
    return parseQuantity(value, "angle", field)


def _numberList(value, field: str) -> tuple:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        value = [value]
    if not isinstance(value, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        raise ValidationError(field, "expected a list of numbers")
    return tuple(float(v) for v in value)


@lru_cache(maxsize=4)
def _defaultsAt(path: str) -> dict:
    return loadDocument(path)


def defaults() -> dict:
    """Reference link at 3 GHz with a 20 x 20 half-wavelength surface, plus run, sweep and output defaults."""
    return copy.deepcopy(_defaultsAt(DEFAULT_CONFIG_PATH))


def _merged(document: dict) -> dict:
    if not isinstance(document, dict):
        raise ValidationError("config", "top level must be a JSON object")
    merged = defaults()
    for block, values in document.items():
        if block not in merged:
            raise ValidationError(block, "unknown configuration block")
        if not isinstance(values, dict):
            raise ValidationError(block, "block must be a JSON object")
        if block == "sweep" and values:
            # A sweep block replaces the default grid instead of adding to it
            merged[block] = {}
        merged[block].update(values)
    return merged


def _scenario(block: dict, betaDeg: float) -> Scenario:
    if "carrier_wavelength" in block:
        wavelength = parseQuantity(block["carrier_wavelength"], "length", "carrier_wavelength")
    else:
        frequency = parseQuantity(block["carrier_frequency"], "frequency", "carrier_frequency")
        if not frequency > 0:
            raise ValidationError("carrier_frequency", "must be positive")
        wavelength = constants.c / frequency

    side = block["unit_side"]
    unitSide = wavelength / 2 if side == "half_wavelength" else parseQuantity(side, "length", "unit_side")

    normal = _vector(block["ris_normal"], "ris_normal")
    if not np.linalg.norm(normal) > 0:
        raise ValidationError("ris_normal", "must not be the zero vector")

    try:
        return Scenario(source_position=_vector(block["source_position"], "source_position"),
                        receiver_position=_vector(block["receiver_position"], "receiver_position"),
                        ris_center=_vector(block["ris_center"], "ris_center"),
                        ris_normal=normal / np.linalg.norm(normal),
                        unit_side=unitSide,
                        num_units_rows=_integer(block["num_units_rows"], "num_units_rows", 1),
                        num_units_cols=_integer(block["num_units_cols"], "num_units_cols", 1),
                        carrier_wavelength=wavelength,
                        tx_gain=parseQuantity(block["tx_gain"], "gain", "tx_gain"),
                        rx_gain=parseQuantity(block["rx_gain"], "gain", "rx_gain"),
                        tx_power=parseQuantity(block["tx_power"], "power", "tx_power"),
                        noise_power=parseQuantity(block["noise_power"], "power", "noise_power"),
                        rotation_angle=math.radians(betaDeg))
    except (Geometry.InvalidScenario, Geometry.DegenerateGeometry) as err:
        raise ValidationError("scenario", str(err))


def _run(block: dict) -> RunConfig:
    schemes = block["schemes"]
    if isinstance(schemes, str):
        schemes = list(Simulation.SCHEMES) if schemes == "both" else [schemes]
    if not isinstance(schemes, list) or not schemes or any(s not in Simulation.SCHEMES for s in schemes):
        raise ValidationError("schemes", f"expected a non-empty list drawn from {Simulation.SCHEMES}")

    sigmaE = _numberList(block["sigma_e_deg"], "sigma_e_deg")
    if not sigmaE or any(not s >= 0 for s in sigmaE):
        raise ValidationError("sigma_e_deg", "expected one or more non-negative values")

    mode = block["estimation_error_mode"]
    if mode not in ("slot", "burst"):
        raise ValidationError("estimation_error_mode", "must be 'slot' or 'burst'")

    return RunConfig(schemes=tuple(schemes),
                     num_bits=_integer(block["num_bits"], "num_bits", 1),
                     seed=_integer(block["seed"], "seed", 0, 2 ** 64 - 1),
                     sigma_e_deg=sigmaE,
                     beta_deg=_degrees(block["beta_deg"], "beta_deg"),
                     d_init=_integer(block["d_init"], "d_init", 0, 1),
                     workers=_integer(block["workers"], "workers", 1),
                     estimation_error_mode=mode,
                     burst_length=_integer(block["burst_length"], "burst_length", 1),
                     noise_in_rotated_frame=bool(block["noise_in_rotated_frame"]))


def _sweep(block: dict, explicit: bool) -> SweepConfig:
    if "areas" in block and "gamma_db" in block:
        raise ValidationError("sweep", "give either areas or gamma_db, not both")
    if "gamma_db" in block:
        return SweepConfig(gamma_db=_numberList(block["gamma_db"], "gamma_db"), explicit=explicit)

    areas = _numberList(block.get("areas", []), "areas")
    if any(not a > 0 for a in areas):
        raise ValidationError("areas", "every area must be positive")
    return SweepConfig(areas=areas, explicit=explicit)


def _output(block: dict) -> OutputConfig:
    path = block["csv"]
    if path is not None and not isinstance(path, str):
        raise ValidationError("csv", "expected a path or null")
    return OutputConfig(csv=path, precision=_integer(block["precision"], "precision", 12, 17))


def configFromDict(document: dict) -> ConfigFile:
    merged = _merged(document)
    run = _run(merged["run"])
    return ConfigFile(scenario=_scenario(merged["scenario"], run.beta_deg), run=run,
                      sweep=_sweep(merged["sweep"], bool(document.get("sweep"))), output=_output(merged["output"]), document=merged)


def loadDocument(path: str) -> dict:
    try:
        with open(path, "r") as f:
            return json.load(f)
    except json.JSONDecodeError as err:
        raise ParseError(f"{path}: malformed JSON ({err})")
    except OSError as err:
        raise ParseError(f"{path}: {err.strerror}")


def parseConfig(path: str) -> ConfigFile:
    return configFromDict(loadDocument(path))
