"""
Main.py: Entry point to RIS Polarization Keying Simulator

Copyright (C) 2024 Interlocking Brick Software Collective

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

import argparse
import contextlib
import csv
import math
import sqlite3
import sys
import traceback

from dataclasses import replace

import Channel
import Config
import Simulation
import Substrate
import Theory

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERIC = 2

SWEEP_COLUMNS = ["area_m2", "M", "gamma_db", "scheme", "sigma_e_deg", "ber_sim", "ci_low", "ci_high",
                 "ber_theory", "trials", "seed"]
THEORY_COLUMNS = ["gamma_db", "ber_dpolsk_theory", "ber_cpolsk_theory"]


class ArgumentParser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors, which is reserved here for numerical failures."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _numberList(text: str) -> list:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _count(text: str) -> float:
    # Accept 1e5 as well as 100000
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")


def buildParser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--out", help="CSV output file (default: standard output)")
    common.add_argument("--scheme", choices=["dpolsk", "cpolsk", "both"])
    common.add_argument("--trials", type=_count, help="number of data bits per point")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--sigma-e-deg", type=_numberList, help="rotation estimate error std devs, degrees")
    common.add_argument("--beta-deg", type=float, help="polarization rotation angle, degrees")
    common.add_argument("--d-init", type=int, choices=[0, 1], help="encoded bit of the DPolSK pilot slot")
    common.add_argument("--workers", type=int, help="worker threads for the Monte-Carlo loop")
    common.add_argument("--db", help="results database (default: a dated file in the working directory)")
    grid = common.add_mutually_exclusive_group()
    grid.add_argument("--areas", type=_numberList, help="RIS areas in m^2")
    grid.add_argument("--gamma-db", type=_numberList, help="SNR values in dB")

    parser = ArgumentParser(prog="Main.py", description="RIS-encoded polarization keying BER simulator")
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("theory", parents=[common], help="tabulate theoretical BER")
    commands.add_parser("sweep", parents=[common], help="simulate a BER sweep")
    commands.add_parser("single", parents=[common], help="simulate one point and print a summary")
    return parser


def _configFromArgs(args) -> Config.ConfigFile:
    """Configuration file contents with command-line flags layered on top."""
    document = Config.loadDocument(args.config) if args.config else {}
    if not isinstance(document, dict):
        raise Config.ValidationError("config", "top level must be a JSON object")

    run = document.setdefault("run", {})
    if not isinstance(run, dict):
        raise Config.ValidationError("run", "block must be a JSON object")
    flags = {
        "schemes": args.scheme,
        "num_bits": args.trials,
        "seed": args.seed,
        "sigma_e_deg": args.sigma_e_deg,
        "beta_deg": args.beta_deg,
        "d_init": args.d_init,
        "workers": args.workers,
    }
    run.update({key: value for key, value in flags.items() if value is not None})

    if args.areas is not None:
        document["sweep"] = {"areas": args.areas}
    elif args.gamma_db is not None:
        document["sweep"] = {"gamma_db": args.gamma_db}
    if args.out is not None:
        document.setdefault("output", {})["csv"] = args.out

    return Config.configFromDict(document)


def _format(value, precision: int) -> str:
    if isinstance(value, float):
        return f"{value:.{precision - 1}e}"
    return str(value)


@contextlib.contextmanager
def _csvOutput(config: Config.ConfigFile):
    if config.output.csv is None:
        yield csv.writer(sys.stdout, lineterminator="\n")
        return
    with open(config.output.csv, "w", newline="") as f:
        yield csv.writer(f, lineterminator="\n")


def _summaryStream(config: Config.ConfigFile):
    # Keep standard output clean when the CSV goes there
    return sys.stderr if config.output.csv is None else sys.stdout


def _summary(record: Simulation.BerRecord) -> str:
    verdict = Simulation.theoryAgreement(record)
    agreement = {None: "too few errors to compare", True: "agrees with theory", False: "DISAGREES with theory"}
    return (f"{record.scheme:6s} M={record.M:<6d} gamma={record.gamma_db:7.3f} dB "
            f"sigma_e={record.sigma_e_deg:5.2f} deg  BER={record.ber_simulated:.4e} "
            f"[{record.ci_low:.4e}, {record.ci_high:.4e}]  theory={record.ber_theory:.4e}  "
            f"({record.errors_count}/{record.trials}, {agreement[verdict]})")


def _scenarios(config: Config.ConfigFile) -> list:
    """(area column or None, scenario) for every point of the configured grid."""
    base = config.scenario
    if config.sweep.gamma_db is not None:
        return [(None, Channel.scenarioForGamma(base, 10 ** (g / 10))) for g in config.sweep.gamma_db]
    return [(area, Simulation.scenarioForArea(base, area)) for area in config.sweep.areas]


def cmdTheory(config: Config.ConfigFile, runId: int):
    byArea = config.sweep.gamma_db is None
    sigmaE = math.radians(config.run.sigma_e_deg[0])
    precision = config.output.precision

    with _csvOutput(config) as writer:
        writer.writerow((["area_m2"] if byArea else []) + THEORY_COLUMNS)
        if byArea:
            gammas = [Channel.linkBudget(scenario).gamma for _, scenario in _scenarios(config)]
            points = [(area, Simulation.toDb(gamma), gamma) for area, gamma in zip(config.sweep.areas, gammas)]
        else:
            points = [(None, g, 10 ** (g / 10)) for g in config.sweep.gamma_db]

        for area, gammaDb, gamma in points:
            row = [gammaDb, Theory.dpolskBer(gamma), Theory.cpolskBerWithEstimationError(gamma, sigmaE)]
            if byArea:
                row.insert(0, area)
            writer.writerow([_format(float(value), precision) for value in row])


def _sweepRow(record: Simulation.BerRecord, precision: int) -> list:
    values = [record.area_m2, record.M, record.gamma_db, record.scheme, record.sigma_e_deg, record.ber_simulated,
              record.ci_low, record.ci_high, record.ber_theory, record.trials, record.seed]
    return [_format(value, precision) for value in values]


def cmdSweep(config: Config.ConfigFile, runId: int):
    base = config.baseRunSpec()
    sigmaEs = [math.radians(s) for s in config.run.sigma_e_deg]
    if config.sweep.gamma_db is not None:
        gammas = [10 ** (g / 10) for g in config.sweep.gamma_db]
        records = Simulation.sweepGamma(gammas, base, config.run.schemes, sigmaEs)
    else:
        records = Simulation.sweepArea(config.sweep.areas, base, config.run.schemes, sigmaEs)

    with _csvOutput(config) as writer:
        writer.writerow(SWEEP_COLUMNS)
        for record in records:
            writer.writerow(_sweepRow(record, config.output.precision))

    stream = _summaryStream(config)
    for record in records:
        Substrate.saveRecord(runId, record)
        print(_summary(record), file=stream)


def cmdSingle(config: Config.ConfigFile, runId: int):
    spec = config.baseRunSpec()
    # The configured geometry, unless a grid was asked for explicitly
    if config.sweep.explicit:
        grid = _scenarios(config)
        if grid:
            spec = replace(spec, scenario=grid[0][1])

    record = Simulation.runSpec(spec)
    Substrate.saveRecord(runId, record)

    if config.output.csv is not None:
        with _csvOutput(config) as writer:
            writer.writerow(SWEEP_COLUMNS)
            writer.writerow(_sweepRow(record, config.output.precision))
    print(_summary(record))


COMMANDS = {
    "theory": cmdTheory,
    "sweep": cmdSweep,
    "single": cmdSingle,
}


def main(argv=None) -> int:
    try:
        args = buildParser().parse_args(argv)
    except SystemExit as exit:
        return exit.code

    try:
        Substrate.init(args.db)
        config = _configFromArgs(args)
        runId = Substrate.startRun(args.command, config.document)
        COMMANDS[args.command](config, runId)
        return EXIT_OK
    except ArithmeticError as err:
        Substrate.writeLogEntry("convergence_failure", traceback.format_exc())
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except sqlite3.Error as err:
        print(f"error: results database {args.db or '(dated default)'}: {err}", file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, OSError) as err:
        Substrate.writeLogEntry("validation_error", traceback.format_exc())
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    except Exception:
        Substrate.writeLogEntry("error", traceback.format_exc())
        raise
    finally:
        Substrate.deinit()


if __name__ == "__main__":
    sys.exit(main())
