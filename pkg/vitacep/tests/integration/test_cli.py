"""
Integration tests for the command-line interface: the full ingest, define,
evaluate and report cycle on a store directory, exit codes and watch mode.
"""

import io
import json

import pytest

from vitacep.cli.main import EXIT_DATA, EXIT_OK, EXIT_USAGE, main, parse_watch_line, run_watch
from vitacep.core.errors import IngestError
from vitacep.core.utils import format_timestamp
from vitacep.dsl import parse
from vitacep.store import Store
from vitacep.tests.fixtures.synthetic import HOUR, T0, exercise_csv

RIDE_START = T0 + 10 * HOUR
DAY_RANGE = ["--from", "2019-06-01T00:00:00Z", "--to", "2019-06-02T00:00:00Z"]


@pytest.fixture
def workspace(tmp_path):
    """A store directory with one ten-minute ride at 150 bpm and one definition."""
    ride = tmp_path / "ride.csv"
    rows = [(RIDE_START + k, {"heartrate_bpm": 150}) for k in range(600)]
    ride.write_text(exercise_csv(("Cycling", "Commute", RIDE_START, RIDE_START + 600), rows))
    definitions = tmp_path / "hard.evt"
    definitions.write_text("# threshold\nHard := HR > 140\n")
    store = str(tmp_path / "store")

    ingest = ["ingest", "--adapter", "exercise-csv", "--input", str(ride), "--store", store]
    assert main(ingest) == 0
    assert main(["define", "--file", str(definitions), "--store", store]) == 0
    return tmp_path, store


def stdout_of(capsys):
    return capsys.readouterr().out


class TestCommands:
    def test_ingest_reports_written_counts(self, tmp_path, capsys):
        ride = tmp_path / "ride.csv"
        rows = [(T0 + k, {"heartrate_bpm": 90}) for k in range(10)]
        ride.write_text(exercise_csv(("Cycling", "Commute", T0, T0 + 10), rows))
        store = str(tmp_path / "store")
        args = ["ingest", "--adapter", "exercise-csv", "--input", str(ride), "--store", store]

        assert main(args) == EXIT_OK
        assert json.loads(stdout_of(capsys)) == {"events": 1, "samples": {"Heartrate": 10}}
        assert main(args) == EXIT_OK
        assert json.loads(stdout_of(capsys)) == {"events": 0, "samples": {"Heartrate": 0}}

    def test_define_prints_lookbacks(self, tmp_path, capsys):
        definitions = tmp_path / "defs.evt"
        definitions.write_text("A := HR > 140\nB := DELAY(A, 1h)\n")
        assert main(["define", "--file", str(definitions), "--store", str(tmp_path / "s")]) == 0
        assert stdout_of(capsys) == "A\t60\nB\t3660\n"

    def test_eval(self, workspace, capsys):
        _, store = workspace
        capsys.readouterr()
        assert main(["eval", "--name", "Hard", *DAY_RANGE, "--store", store]) == EXIT_OK
        (line,) = stdout_of(capsys).splitlines()
        event = json.loads(line)
        assert event["event_type"] == "Hard"
        assert event["start"] == format_timestamp(RIDE_START)
        assert event["stream_refs"] == ["Heartrate"]

    def test_eval_to_file(self, workspace):
        tmp_path, store = workspace
        out = tmp_path / "events.jsonl"
        args = ["eval", "--name", "Hard", *DAY_RANGE, "--store", store, "--output", str(out)]
        assert main(args) == EXIT_OK
        assert len(out.read_text().splitlines()) == 1

    def test_weekly_report(self, workspace, capsys):
        _, store = workspace
        capsys.readouterr()
        args = ["report", "weekly", "--event-type", "Cycling", "--year", "2019", "--store", store]
        assert main(args) == EXIT_OK
        lines = stdout_of(capsys).splitlines()
        assert lines[0] == "iso_week,event_count,total_minutes"
        assert len(lines) == 1 + 52
        assert lines[22] == "2019-W22,1,10"

    def test_polar_export(self, workspace, capsys):
        _, store = workspace
        capsys.readouterr()
        args = ["export", "polar", "--event-type", "Cycling", "--year", "2019", "--store", store]
        assert main(args) == EXIT_OK
        assert "152,0.4167,0.4236,Cycling" in stdout_of(capsys).splitlines()

    def test_derive_and_enrich(self, workspace, capsys):
        _, store = workspace
        capsys.readouterr()
        assert main(["derive", "--stream", "BreathingRate", *DAY_RANGE, "--store", store]) == 0
        assert json.loads(stdout_of(capsys)) == {"stream": "BreathingRate", "samples": 600}

        args = ["events", "--event-type", "Cycling", *DAY_RANGE, "--store", store, "--enrich"]
        assert main(args) == EXIT_OK
        (event,) = [json.loads(line) for line in stdout_of(capsys).splitlines()]
        assert event["parameters"]["Heartrate.mean"] == 150.0
        assert event["parameters"]["Heartrate.samples"] == 600

    def test_info(self, workspace, capsys):
        _, store = workspace
        capsys.readouterr()
        assert main(["info", "--store", store]) == EXIT_OK
        info = json.loads(stdout_of(capsys))
        assert info["streams"]["Heartrate"]["sources"] == ["ride"]
        assert info["definitions"]["Hard"]["text"] == "Hard := HR > 140"
        assert info["stations"] == 0


class TestExitCodes:
    def test_unreadable_config(self, tmp_path):
        args = ["--config", str(tmp_path / "missing.yaml"), "info", "--store", str(tmp_path)]
        assert main(args) == EXIT_USAGE

    def test_unknown_config_key(self, tmp_path):
        config = tmp_path / "config.yaml"
        config.write_text("colour: red\n")
        assert main(["--config", str(config), "info", "--store", str(tmp_path)]) == EXIT_USAGE

    def test_non_numeric_environment_setting(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("VITACEP_MAX_GAP", "sixty")
        assert main(["info", "--store", str(tmp_path)]) == EXIT_USAGE
        assert "max_gap" in capsys.readouterr().err

    def test_wrongly_typed_config_value(self, tmp_path, capsys):
        config = tmp_path / "config.yaml"
        config.write_text("body_mass: heavy\n")
        assert main(["--config", str(config), "info", "--store", str(tmp_path)]) == EXIT_USAGE
        assert "body_mass" in capsys.readouterr().err

    @pytest.mark.parametrize(
        "argv",
        [
            ["frobnicate"],
            ["eval", "--name", "Hard"],
            ["ingest", "--adapter", "fitbit", "--input", "x", "--store", "s"],
            ["report", "monthly"],
        ],
    )
    def test_argument_errors(self, argv):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == EXIT_USAGE

    def test_missing_input_file(self, tmp_path):
        args = ["ingest", "--adapter", "health-csv", "--input", str(tmp_path / "none.csv")]
        assert main([*args, "--store", str(tmp_path / "s")]) == EXIT_DATA

    def test_unregistered_definition(self, workspace):
        _, store = workspace
        assert main(["eval", "--name", "Nope", *DAY_RANGE, "--store", store]) == EXIT_DATA

    def test_syntax_error_in_definitions(self, workspace, capsys):
        tmp_path, store = workspace
        bad = tmp_path / "bad.evt"
        bad.write_text("E := AND Heartrate\n")
        assert main(["define", "--file", str(bad), "--store", store]) == EXIT_DATA
        assert "line 1, column 6" in capsys.readouterr().err

    def test_invalid_window(self, workspace):
        _, store = workspace
        args = ["--from", "yesterday", "--to", "2019-06-02T00:00:00Z"]
        assert main(["eval", "--name", "Hard", *args, "--store", store]) == EXIT_USAGE
        reversed_range = ["--from", DAY_RANGE[3], "--to", DAY_RANGE[1]]
        assert main(["eval", "--name", "Hard", *reversed_range, "--store", store]) == EXIT_USAGE


def heartrate_lines(minutes, high):
    lo, hi = high
    return [
        f"Heartrate,{format_timestamp(T0 + 60 * m)},{150 if lo <= m < hi else 100},bpm"
        for m in range(minutes)
    ]


class TestWatch:
    def test_finalized_events_are_written(self, tmp_path):
        store = Store(str(tmp_path))
        store.register_definition(parse("Hard := HR > 140")[0])
        lines = ["stream,timestamp,value,unit", *heartrate_lines(180, (30, 60))]
        ride = f"#event,Cycling,Ride,{format_timestamp(T0)},{format_timestamp(T0 + HOUR)}"
        out = io.StringIO()

        emitted = run_watch(io.StringIO("\n".join([ride, *lines]) + "\n"), store, 600, out)

        assert emitted == 1
        (event,) = [json.loads(line) for line in out.getvalue().splitlines()]
        assert event["start"] == format_timestamp(T0 + 30 * 60)
        assert event["end"] == format_timestamp(T0 + 60 * 60)
        assert len(store.events_of("Cycling")) == 1
        assert len(store.samples_of("Heartrate")) == 180

    def test_restart_neither_repeats_nor_skips(self, tmp_path):
        lines = heartrate_lines(300, (30, 60))[:200] + heartrate_lines(300, (200, 230))[200:]
        first, second = io.StringIO(), io.StringIO()

        store = Store(str(tmp_path))
        store.register_definition(parse("Hard := HR > 140")[0])
        run_watch(io.StringIO("\n".join(lines[:150])), store, 600, first)
        run_watch(io.StringIO("\n".join(lines[150:])), Store(str(tmp_path)), 600, second)

        output = first.getvalue() + second.getvalue()
        starts = [json.loads(line)["start"] for line in output.splitlines()]
        assert starts == [format_timestamp(T0 + 30 * 60), format_timestamp(T0 + 200 * 60)]

    def test_from_standard_input(self, tmp_path, monkeypatch, capsys):
        store = str(tmp_path / "store")
        definitions = tmp_path / "hard.evt"
        definitions.write_text("Hard := HR > 140\n")
        assert main(["define", "--file", str(definitions), "--store", store]) == 0
        capsys.readouterr()

        monkeypatch.setattr("sys.stdin", io.StringIO("\n".join(heartrate_lines(120, (10, 20)))))
        assert main(["watch", "--store", store]) == EXIT_OK
        (line,) = stdout_of(capsys).splitlines()
        assert json.loads(line)["start"] == format_timestamp(T0 + 600)

    def test_location_lines_follow_the_registry(self, tmp_path):
        store = Store(str(tmp_path))
        key, record = parse_watch_line("Location,2019-06-01T00:00:00Z,46.05,14.5", store, 1)
        assert key == "Location"
        assert (record.latitude, record.longitude, record.source) == (46.05, 14.5, "watch")

    @pytest.mark.parametrize(
        "line",
        ["Heartrate,2019-06-01T00:00:00Z,abc,bpm", "Heartrate,70", "#event,Cycling,Ride,x,y"],
    )
    def test_malformed_lines(self, tmp_path, line):
        with pytest.raises(IngestError) as exc:
            parse_watch_line(line, Store(str(tmp_path)), 7)
        assert exc.value.line == 7
