"""CLI schemas, exit codes, and byte-level determinism."""

import json

import pytest

from mixedcollage.cli import main, parse_real


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_real_fraction():
    assert parse_real("1/15") == pytest.approx(1.0 / 15.0, abs=1e-17)
    assert parse_real("0.25") == 0.25
    with pytest.raises(ValueError):
        parse_real("abc")
    with pytest.raises(ValueError):
        parse_real("1/0")


def test_forward_csv_schema(capsys):
    code, out, _ = run_cli(capsys, "forward", "--m", "9,25", "--delta", "1/15")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("# {")
    config = json.loads(lines[0][2:])
    assert config["command"] == "forward"
    assert config["m"] == [9, 25]
    assert lines[1] == "m,psiL2,psiH10,wL2,wH10"
    assert len(lines) == 4
    first = lines[2].split(",")
    assert int(first[0]) == 9
    assert float(first[1]) == pytest.approx(1.33e-3, rel=0.05)


def test_forward_json_format(capsys):
    code, out, _ = run_cli(capsys, "forward", "--m", "9", "--delta", "0.25",
                           "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["config"]["delta"] == 0.25
    assert set(doc["rows"][0]) == {"m", "psiL2", "psiH10", "wL2", "wH10"}


def test_diagnose_schema(capsys):
    code, out, _ = run_cli(capsys, "diagnose", "--m", "9", "--c1", "1",
                           "--c2", "1", "--c3", "1/4")
    assert code == 0
    doc = json.loads(out)
    for key in ("alpha", "beta", "normA", "normC", "rho", "conditionOK",
                "collageFactor", "config"):
        assert key in doc
    assert doc["conditionOK"] is True
    assert doc["beta"] == pytest.approx(1.0, abs=1e-9)


def test_inverse_csv_mirrors_table(capsys):
    code, out, _ = run_cli(capsys, "inverse", "--noise", "0,0.005", "--trials",
                           "1", "--seed", "7", "--w-mode", "fd")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[1] == "noise,C1,C2,C3,collageDistance"
    assert len(lines) == 4
    row0 = [float(v) for v in lines[2].split(",")]
    assert row0[0] == 0.0
    assert row0[1] == pytest.approx(1.0, abs=1e-2)


def test_byte_identical_reruns(capsys):
    args = ("inverse", "--noise", "0,0.01", "--trials", "2", "--seed", "3",
            "--w-mode", "fd")
    _, first, _ = run_cli(capsys, *args)
    _, second, _ = run_cli(capsys, *args)
    assert first == second

    args = ("forward", "--m", "9", "--delta", "1/15")
    _, first, _ = run_cli(capsys, *args)
    _, second, _ = run_cli(capsys, *args)
    assert first == second


def test_output_file_written(tmp_path, capsys):
    path = tmp_path / "table.csv"
    code, out, _ = run_cli(capsys, "forward", "--m", "9", "--delta", "0.25",
                           "--output", str(path))
    assert code == 0
    assert out == ""
    assert path.read_text().splitlines()[1] == "m,psiL2,psiH10,wL2,wH10"


def test_config_errors_exit_2(capsys):
    for argv in (("forward", "--m", "0"),
                 ("forward", "--delta", "nope"),
                 ("inverse", "--trials", "0"),
                 ("inverse", "--noise", "-0.1"),
                 ("diagnose", "--m", "-3")):
        code, _, err = run_cli(capsys, *argv)
        assert code == 2, argv
        assert "error" in err


def test_unknown_command_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
