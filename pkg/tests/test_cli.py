import csv
import io
import json

import pytest

from stlab.cli import main
from stlab.config import ENV_CACHE, load_config, parse_threads
from stlab.errors import DomainError, InvalidFigureError, UnknownNameError
from stlab.figures import figure_spec, reproduce


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_angles_csv(capsys):
    code, out, _ = run(capsys, "angles", "E1", "5")
    assert code == 0
    r = rows(out)
    assert len(r) == 5
    assert r[4]["flag"] == "bad" and float(r[4]["x"]) == 0.5
    assert r[0] == {"k": "1", "p": "2", "a": "-2", "flag": "good", "x": "0.75"}


def test_angles_json_and_file(capsys, tmp_path):
    code, out, _ = run(capsys, "angles", "E2", "1", "--format", "json")
    assert code == 0
    assert json.loads(out) == {"k": 1, "p": 2, "a": -2, "flag": "good", "x": 0.75}
    target = tmp_path / "e1.csv"
    assert main(["angles", "E1", "5", "-o", str(target)]) == 0
    csv_out = run(capsys, "angles", "E1", "5")[1]
    assert target.read_text() == csv_out


def test_csv_json_agree(capsys):
    csv_text = run(capsys, "angles", "E3", "40")[1]
    json_text = run(capsys, "--format", "json", "angles", "E3", "40")[1]
    for a, b in zip(rows(csv_text), map(json.loads, json_text.splitlines())):
        assert float(a["x"]) == b["x"]
        assert int(a["a"]) == b["a"]


def test_unknown_label(capsys):
    code, _, err = run(capsys, "angles", "EX", "1")
    assert code == 1
    assert "unknown curve" in err


def test_invalid_figure(capsys):
    code, _, err = run(capsys, "reproduce", "19")
    assert code == 1 and "1..18" in err
    with pytest.raises(InvalidFigureError):
        figure_spec(0)
    with pytest.raises(InvalidFigureError):
        figure_spec("x")


def test_budget_error(capsys):
    code, _, err = run(capsys, "discrepancy", "E1", "2", "1000000")
    assert code == 1
    assert "budget" in err and "lower K" in err


@pytest.mark.parametrize("argv,expected", [
    (("E2", "f10", "10", "10000"), 114.08),
    (("E1", "h", "500", "100000"), 8.81591),
    (("E4", "g", "2000", "50000"), 1.70186),
])
def test_average_examples(capsys, argv, expected):
    code, out, _ = run(capsys, "average", *argv)
    assert code == 0
    assert float(rows(out)[0]["empirical"]) == pytest.approx(expected, abs=5e-3)


def test_relerr_row(capsys):
    _, out, _ = run(capsys, "relerr", "E1", "f10", "10", "1000")
    row = rows(out)[0]
    assert float(row["reference"]) == 114.076
    _, out, _ = run(capsys, "relerr", "E1", "f10", "10", "1000", "--reference-digits", "0")
    assert float(rows(out)[0]["reference"]) == pytest.approx(114.0757322, abs=1e-7)


def test_discrepancy_rows(capsys):
    code, out, _ = run(capsys, "discrepancy", "E3", "2", "5000")
    row = rows(out)[0]
    assert code == 0 and row["convention"] == "niederreiter" and row["method"] == "exact"
    assert float(row["log_slope"]) == pytest.approx(0.484667, abs=1e-4)
    _, out, _ = run(capsys, "discrepancy", "E3", "2", "5000", "--convention", "supremum")
    assert float(rows(out)[0]["star_disc"]) >= float(row["star_disc"])
    _, out, _ = run(capsys, "discrepancy", "E3", "2", "5000", "--estimate", "--samples", "300")
    est = rows(out)[0]
    assert est["method"] == "estimate"
    assert float(est["star_disc"]) <= float(row["star_disc"])


def test_reproduce_first_column(capsys):
    code, out, err = run(capsys, "reproduce", "1", "--cols", "5000")
    cells = rows(out)
    assert code == 0 and len(cells) == 6
    assert all(c["within_tol"] == "True" for c in cells)
    assert "6/6" in err


def test_reproduce_skips_long_cells(capsys):
    code, out, err = run(capsys, "reproduce", "18", "--rows", "E1")
    cell = rows(out)[0]
    assert cell["skipped"] == "True" and cell["computed"] == ""
    assert "1 long cells skipped" in err


def test_reproduce_logslope_cell(cfg):
    (cell,) = reproduce(16, cfg, rows=["E1"], cols=[500000])
    assert cell.computed == pytest.approx(0.594196, abs=1e-3)


def test_reproduce_rejects_unknown_column(cfg):
    with pytest.raises(InvalidFigureError):
        reproduce(1, cfg, cols=[7])
    with pytest.raises(UnknownNameError):
        reproduce(1, cfg, rows=["E9"])


def test_config_file(tmp_path, monkeypatch):
    monkeypatch.delenv(ENV_CACHE, raising=False)
    path = tmp_path / "run.toml"
    path.write_text(
        'cache_dir = "/tmp/somewhere"\nformat = "json"\nthreads = 2\n'
        '[thresholds]\nnaive = 1000\ncharsum = 50000\n[budgets]\ns2 = 10\n'
        '[[curve]]\nlabel = "C11"\na = [0, -1, 1, -10, -20]\nconductor = 11\n')
    cfg = load_config(path)
    assert cfg.labels == ["C11"]
    assert cfg.output_format == "json" and cfg.threads == 2
    assert cfg.thresholds.naive == 1000 and cfg.budgets[2] == 10 and cfg.budgets[3] == 5000
    assert str(cfg.cache_dir) == "/tmp/somewhere"
    monkeypatch.setenv(ENV_CACHE, str(tmp_path))
    assert load_config(path).cache_dir == tmp_path


def test_config_validation(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("[budgets]\ns3 = 0\n")
    with pytest.raises(DomainError):
        load_config(bad)
    dup = tmp_path / "dup.toml"
    dup.write_text('[[curve]]\nlabel = "A"\na = [0,-1,1,0,0]\nconductor = 11\n' * 2)
    with pytest.raises(DomainError):
        load_config(dup)
    with pytest.raises(DomainError):
        parse_threads(0)
    assert parse_threads("auto") >= 1


def test_cli_config_and_cache_flags(capsys, tmp_path):
    path = tmp_path / "c.toml"
    path.write_text('[[curve]]\nlabel = "C11"\na = [0, -1, 1, -10, -20]\nconductor = 11\n')
    code, out, _ = run(capsys, "angles", "C11", "3", "--config", str(path),
                       "--cache-dir", str(tmp_path / "cache"))
    assert code == 0
    # 11a1 and 11a3 are isogenous to E1, so the traces agree
    e1 = run(capsys, "angles", "E1", "3")[1]
    assert [r["a"] for r in rows(out)] == [r["a"] for r in rows(e1)]
    assert (tmp_path / "cache" / "C11.trc").exists()
