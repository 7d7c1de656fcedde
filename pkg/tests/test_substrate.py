import Simulation
import Substrate
from conftest import tableScenario


def _record():
    spec = Simulation.RunSpec(scheme="dpolsk", scenario=tableScenario(noise_power=0.0), num_bits=500, master_seed=4)
    return Simulation.runDpolsk(spec)


def test_writes_are_skipped_without_a_database():
    assert not Substrate.isOpen()
    assert Substrate.startRun("sweep", {}) is None
    Substrate.saveRecord(None, _record())
    Substrate.writeLogEntry("error", "nothing to see")
    assert Substrate.loadRecords() == []


def test_records_round_trip(tmp_path):
    path = str(tmp_path / "runs.db")
    Substrate.init(path)
    runId = Substrate.startRun("sweep", {"run": {"seed": 4}})
    record = _record()
    Substrate.saveRecord(runId, record)
    Substrate.deinit()

    Substrate.init(path)
    entries = Substrate.loadRecords(runId)
    assert len(entries) == 1
    assert entries[0].scheme == "dpolsk"
    assert entries[0].units == record.M
    assert entries[0].errors_count == 0
    assert entries[0].seed == 4
    assert Substrate.loadRecords(runId + 1) == []

    Substrate._cur.execute("SELECT tag FROM audit")
    tags = [row[0] for row in Substrate._cur.fetchall()]
    assert tags[0] == "db_created"
    assert "run_start" in tags and "record_saved" in tags and "db_closed" in tags
    assert tags[-1] == "db_opened"


def test_log_entries(tmp_path):
    Substrate.init(str(tmp_path / "runs.db"))
    Substrate.writeLogEntry("validation_error", "num_bits: must be at least 1")
    Substrate._cur.execute("SELECT tag, message FROM log")
    assert Substrate._cur.fetchall() == [("validation_error", "num_bits: must be at least 1")]
