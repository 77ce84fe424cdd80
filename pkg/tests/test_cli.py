import json
from pathlib import Path

import pytest

from gravbounds import __version__, cli
from gravbounds.golden import GOLDEN_ARGV, golden_text

GOLDEN = Path(__file__).parent / "golden"

# cheap settings per command, used to check that real runs emit the golden header
SMALL = {
    "qfi-sweep": ["--steps", "2", "--n-points", "513"],
    "bouncer-compare": ["--steps", "2", "--n-modes", "60", "--h", "10", "--sigma", "0.8"],
    "fisher-ratios": ["--a-steps", "1", "--sigma", "0.3", "--n-points", "1025"],
    "stationary": ["--n-max", "1"],
    "multiparam": [],
}


@pytest.mark.parametrize("cmd", cli.COMMANDS)
def test_header_golden(cmd):
    assert cli.render_csv(cmd, []) == (GOLDEN / f"{cmd}.header").read_text()


@pytest.mark.parametrize("cmd", sorted(SMALL))
def test_run_emits_golden_header(cmd):
    text = cli.render(cli.parse_config([cmd] + SMALL[cmd]), threads=1)
    header = (GOLDEN / f"{cmd}.header").read_text()
    assert text.startswith(header)
    n_cols = len(cli.COLUMNS[cmd])
    for line in text.splitlines()[2:]:
        assert len(line.split(",")) == n_cols


def test_qfi_sweep_golden_and_threads():
    cfg = cli.parse_config(GOLDEN_ARGV)
    assert cli.render(cfg, threads=1) == golden_text()
    assert cli.render(cfg, threads=4) == golden_text()


def test_multiparam_golden():
    text = cli.render(cli.parse_config(["multiparam"]), threads=1)
    assert text == (GOLDEN / "multiparam_default.csv").read_text()


def test_round_trip_digits():
    line = golden_text().splitlines()[3]
    for cell in line.split(","):
        v = float(cell)
        assert float("%.16e" % v) == v


def test_json_layout():
    cfg = cli.parse_config(["stationary", "--n-max", "2", "--format", "json"])
    doc = json.loads(cli.render(cfg, threads=1))
    assert doc["meta"]["version"] == __version__
    assert doc["meta"]["command"] == "stationary"
    assert doc["meta"]["config"]["n_max"] == 2
    assert [r["n"] for r in doc["rows"]] == [1, 2]
    assert set(doc["rows"][0]) == set(cli.COLUMNS["stationary"])


def test_config_file_and_override(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("# defaults\ng = 1.0\nsigma = 0.3  # width\n\nt-max = 1.5\n")
    cfg = cli.parse_config(["qfi-sweep", "--config", str(cfg_file)])
    assert (cfg.g, cfg.sigma, cfg.t_max) == (1.0, (0.3,), 1.5)
    cfg = cli.parse_config(["qfi-sweep", "--config", str(cfg_file), "--g", "9.8e0"])
    assert cfg.g == 9.8


def test_empty_argv_defaults(tmp_path):
    cfg_file = tmp_path / "empty.cfg"
    cfg_file.write_text("")
    assert cli.parse_config(["stationary", "--config", str(cfg_file)]) == cli.parse_config(["stationary"])


def test_malformed_line_names_line(tmp_path, capsys):
    cfg_file = tmp_path / "bad.cfg"
    cfg_file.write_text("m = 0.5\ng 1.0\n")
    assert cli.main(["qfi-sweep", "--config", str(cfg_file)]) == 2
    assert ":2:" in capsys.readouterr().err


def test_unknown_key_lists_valid_keys(tmp_path, capsys):
    cfg_file = tmp_path / "bad.cfg"
    cfg_file.write_text("mass = 0.5\n")
    assert cli.main(["qfi-sweep", "--config", str(cfg_file)]) == 2
    err = capsys.readouterr().err
    assert "unknown key 'mass'" in err and "sigma" in err


@pytest.mark.parametrize("argv", [
    ["qfi-sweep", "--sigma", "-1"],
    ["qfi-sweep", "--sigma", "0.2,0.3"],
    ["qfi-sweep", "--t-min", "2", "--t-max", "1"],
    ["multiparam", "--t-values", "10,1"],
    ["bouncer-compare", "--h", "3"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert cli.main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        cli.main(["qfi-sweep", "--bogus", "1"])
    assert info.value.code == 2


def test_numeric_failure_exit_1(capsys):
    # far too few modes for the drop height
    assert cli.main(["bouncer-compare", "--n-modes", "5"]) == 1
    assert "TruncationError" in capsys.readouterr().err


def test_writes_output_file(tmp_path):
    out = tmp_path / "o.csv"
    assert cli.main(["stationary", "--n-max", "1", "--output", str(out)]) == 0
    assert out.read_text().startswith("# gravbounds")


def test_thread_env():
    assert cli.thread_count({"GRAVBOUNDS_THREADS": "3"}) == 3
    assert cli.thread_count({"GRAVBOUNDS_THREADS": "0"}) >= 1
    assert cli.thread_count({}) >= 1
    with pytest.raises(cli.UsageError):
        cli.thread_count({"GRAVBOUNDS_THREADS": "many"})
