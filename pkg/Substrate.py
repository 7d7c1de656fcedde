"""
Substrate.py: Results database and audit log

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

import json
import sqlite3

from dataclasses import dataclass
from datetime import datetime


@dataclass
class RecordEntry:
    run_id: int
    scheme: str
    area_m2: float
    units: int
    gamma_db: float
    sigma_e_deg: float
    ber_simulated: float
    errors_count: int
    trials: int
    ci_low: float
    ci_high: float
    ber_theory: float
    seed: int


# In Python, the module import process happens once per program execution,
# no matter how many times a module is imported, so these variables end up
# being singletons shared across the entire program
_db = None
_cur = None


def init(path: str = None):
    """Initialize Substrate layer."""
    global _db, _cur

    # By default, open a database with today's date, so a day of sweeps ends up in one file
    if path is None:
        path = f"{datetime.now().strftime('%Y%m%d')}-runs.db"
    try:
        _db = sqlite3.connect(path)
        _cur = _db.cursor()

        # Check if database is empty (i.e., has no tables)
        _cur.execute("SELECT name FROM sqlite_master WHERE type='table';")
        tables = _cur.fetchall()
    except sqlite3.Error:
        if _db is not None:
            _db.close()
        _db = None
        _cur = None
        raise

    if len(tables) == 0:
        _createTables()
        writeAuditEntry("db_created", {})
    else:
        writeAuditEntry("db_opened", {})


def deinit():
    """Deinitialize Substrate layer."""
    global _db, _cur

    if _db is None:
        return
    writeAuditEntry("db_closed", {})
    _db.close()
    _db = None
    _cur = None


def isOpen() -> bool:
    return _db is not None


def startRun(command: str, config: dict) -> int:
    """Register a CLI invocation and return its run id (None when no database is open)."""
    if _db is None:
        return None

    timestamp = datetime.now().timestamp()
    _cur.execute("INSERT INTO runs (timestamp, command, config) VALUES (?, ?, ?)",
                 (timestamp, command, json.dumps(config, default=str)))
    _db.commit()
    runId = _cur.lastrowid
    writeAuditEntry("run_start", {"run_id": runId, "command": command})
    return runId


def saveRecord(runId: int, record):
    """Store one BER sweep point, writing an audit log entry to note it."""
    if _db is None:
        return

    _cur.execute("INSERT INTO records VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
                 (runId, record.scheme, record.area_m2, record.M, record.gamma_db, record.sigma_e_deg,
                  record.ber_simulated, record.errors_count, record.trials, record.ci_low, record.ci_high,
                  record.ber_theory, record.seed))

    auditEntry = {
        "run_id": runId,
        "scheme": record.scheme,
        "area_m2": record.area_m2,
        "errors": record.errors_count,
        "trials": record.trials
    }
    writeAuditEntry("record_saved", auditEntry)


def loadRecords(runId: int = None) -> list:
    """Return a list of RecordEntry objects, optionally limited to one run."""
    if _db is None:
        return []

    query = ("SELECT run_id, scheme, area_m2, units, gamma_db, sigma_e_deg, ber_simulated, errors_count, "
             "trials, ci_low, ci_high, ber_theory, seed FROM records")
    if runId is None:
        _cur.execute(query)
    else:
        _cur.execute(query + " WHERE run_id = ?", (runId,))
    return [RecordEntry(*row) for row in _cur.fetchall()]


def writeAuditEntry(tag: str, data: dict):
    """Write an audit log entry."""
    if _db is None:
        return

    timestamp = datetime.now().timestamp()

    # Add timestamp and tag to entry data to make processing offline easier
    data["timestamp"] = timestamp
    data["tag"] = tag
    entryData = json.dumps(data, default=str)

    _cur.execute("INSERT INTO audit VALUES (?, ?, ?)", (timestamp, tag, entryData))
    _db.commit()


def writeLogEntry(tag: str, message: str):
    """Write an internal program log entry, primarily intended for debugging and capturing stack traces."""
    if _db is None:
        return

    timestamp = datetime.now().timestamp()
    _cur.execute("INSERT INTO log VALUES (?, ?, ?)", (timestamp, tag, message))
    _db.commit()


def _createTables():
    """Internal method to create tables for a freshly-initialized database."""
    _cur.executescript("""
                       PRAGMA application_id = 0;
                       PRAGMA user_version = 1;
                       CREATE TABLE runs(run_id INTEGER PRIMARY KEY, timestamp, command, config);
                       CREATE TABLE records(run_id, scheme, area_m2, units, gamma_db, sigma_e_deg,
                                            ber_simulated, errors_count, trials, ci_low, ci_high,
                                            ber_theory, seed);
                       CREATE TABLE audit(timestamp, tag, data);
                       CREATE TABLE log(timestamp, tag, message);
                       """)
    _db.commit()
