import json
import subprocess
import sys

import pytest

from optclean.cli import main
from optclean.ingest import read_quotes



@pytest.fixture
def fixture_csv(fixtures_dir):
    return fixtures_dir / "synth" / "fixture_04.csv"


def test_clean_writes_outputs(tmp_path, fixture_csv, capsys):
    out, rep = tmp_path / "clean.csv", tmp_path / "report.json"
    code = main(["clean", "--input", str(fixture_csv), "--spot", "100", "--rate", "0.01",
                 "--output", str(out), "--report", str(rep), "--plot-data", str(tmp_path / "plots")])
    assert code == 0
    assert out.exists() and json.loads(rep.read_text())["config"]["alpha"] == 0.01
    assert len(list((tmp_path / "plots").glob("*.csv"))) == 2
    assert "call:" in capsys.readouterr().out


def test_missing_spot_is_usage_error(tmp_path, fixture_csv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["clean", "--input", str(fixture_csv), "--rate", "0.01", "--output", str(tmp_path / "o.csv")])
    assert exc.value.code == 2
    assert "usage:" in capsys.readouterr().err


def test_unknown_flag_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["clean", "--bogus"])
    assert exc.value.code == 2


def test_validation_failure_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("type,strike,maturity_days,price,open_interest\ncall,100,0,5,1\n")
    assert main(["dedup", "--input", str(bad), "--output", str(tmp_path / "o.csv")]) == 1
    assert "maturity_days" in capsys.readouterr().err


def test_missing_input_exit_1(tmp_path):
    assert main(["dedup", "--input", str(tmp_path / "nope.csv"), "--output", str(tmp_path / "o.csv")]) == 1


def test_returns(tmp_path):
    px = tmp_path / "prices.csv"
    px.write_text("date,close\n2012-05-09,100\n2012-05-10,105\n2012-05-11,105\n")
    out = tmp_path / "r.csv"
    assert main(["returns", "--input", str(px), "--output", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "date,log_return"
    assert lines[1].startswith("2012-05-10,0.04879")
    assert lines[2] == "2012-05-11,0.0"


def test_context_file_and_flag_override(tmp_path, fixture_csv, fixtures_dir):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    ctx = fixtures_dir / "synth" / "context.json"
    assert main(["bounds", "--input", str(fixture_csv), "--context", str(ctx), "--output", str(a)]) == 0
    assert main(["bounds", "--input", str(fixture_csv), "--context", str(ctx), "--spot", "100",
                 "--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_byte_identical_reruns(tmp_path, fixture_csv):
    outs = []
    for i in range(2):
        o, r = tmp_path / f"o{i}.csv", tmp_path / f"r{i}.json"
        main(["clean", "--input", str(fixture_csv), "--spot", "100", "--rate", "0.01",
              "--output", str(o), "--report", str(r)])
        outs.append((o.read_bytes(), r.read_bytes()))
    assert outs[0] == outs[1]


def test_clean_equals_staged_runs(tmp_path, fixture_csv):
    full = tmp_path / "full.csv"
    main(["clean", "--input", str(fixture_csv), "--spot", "100", "--rate", "0.01", "--output", str(full)])
    s1, s2, s3 = (tmp_path / f"s{i}.csv" for i in (1, 2, 3))
    assert main(["bounds", "--input", str(fixture_csv), "--spot", "100", "--rate", "0.01",
                 "--output", str(s1)]) == 0
    assert main(["outliers", "--input", str(s1), "--output", str(s2)]) == 0
    assert main(["dedup", "--input", str(s2), "--output", str(s3)]) == 0
    assert full.read_bytes() == s3.read_bytes()
    assert len(read_quotes(s3)) < len(read_quotes(fixture_csv))


def test_module_entry_point(tmp_path, fixture_csv):
    out = tmp_path / "o.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "optclean", "dedup", "--input", str(fixture_csv), "--output", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
