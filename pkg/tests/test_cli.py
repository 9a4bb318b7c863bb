"""Exit codes, output text, and file side effects of the command line."""

import json

import pytest

from dephaselab import __version__, workbench
from dephaselab.cli import main
from dephaselab.errors import InvariantViolationError, NumericalError


def _write_config(tmp_path, mapping, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(mapping), encoding="utf-8")
    return str(path)


def test_version_flag(capsys):
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.strip() == f"dephaselab {__version__}"


def test_no_command_is_usage_error():
    assert main([]) == 2


def test_unknown_figure_name_is_usage_error(capsys):
    assert main(["figure", "fig9", "--out", "x.csv"]) == 2
    assert "invalid choice" in capsys.readouterr().err


def test_figure_requires_out():
    assert main(["figure", "fig4"]) == 2


def test_figure_writes_csv(tmp_path, capsys):
    out = tmp_path / "fig4.csv"
    code = main(["figure", "fig4", "--points", "21", "--out", str(out)])
    assert code == 0
    assert f"wrote {out} (21 rows)" in capsys.readouterr().out
    text = out.read_text(encoding="utf-8")
    assert "# figure=fig4" in text
    assert "t,D_global,D_env" in text


def test_figure_flag_passthrough(tmp_path):
    out = tmp_path / "fig6.csv"
    code = main(["figure", "fig6", "--r", "0.7", "--g", "2.0",
                 "--points", "11", "--out", str(out)])
    assert code == 0
    text = out.read_text(encoding="utf-8")
    assert "# r=0.69999999999999996" in text
    assert "# coupling_g=2" in text
    assert "# coupling_default_assumed=false" in text


def test_figure_rejects_out_of_range_r(tmp_path, capsys):
    out = tmp_path / "fig6.csv"
    code = main(["figure", "fig6", "--r", "1.5", "--out", str(out)])
    assert code == 2
    assert "config error" in capsys.readouterr().err
    assert not out.exists()


def test_repeat_invocations_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["figure", "fig3", "--points", "41", "--out"]
    assert main(argv + [str(a)]) == 0
    assert main(argv + [str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_run_uses_config_out(tmp_path, capsys):
    out = tmp_path / "run.csv"
    cfg = _write_config(tmp_path, {"figure": "fig4", "n_points": 9,
                                   "out": str(out)})
    assert main(["run", "--config", cfg]) == 0
    assert out.exists()
    assert "9 rows" in capsys.readouterr().out


def test_run_flag_overrides_config_out(tmp_path):
    cfg_out = tmp_path / "ignored.csv"
    flag_out = tmp_path / "used.csv"
    cfg = _write_config(tmp_path, {"figure": "fig4", "n_points": 9,
                                   "out": str(cfg_out)})
    assert main(["run", "--config", cfg, "--out", str(flag_out)]) == 0
    assert flag_out.exists()
    assert not cfg_out.exists()


def test_run_without_any_out(tmp_path, capsys):
    cfg = _write_config(tmp_path, {"figure": "fig4", "n_points": 9})
    assert main(["run", "--config", cfg]) == 2
    assert "no output path" in capsys.readouterr().err


def test_run_missing_config_file(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "absent.json")]) == 2
    assert "config error" in capsys.readouterr().err


def test_run_malformed_json(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"figure": fig3}', encoding="utf-8")
    assert main(["run", "--config", str(path)]) == 2
    assert "line 1" in capsys.readouterr().err


def test_check_equivalence_partner_pair(tmp_path, capsys):
    cfg = _write_config(tmp_path, {"figure": "equivalence", "c": 0.3, "d": 0.1})
    assert main(["check-equivalence", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert "time-domain: equivalent, max discrepancy" in out
    assert "moments: equivalent" in out
    assert "inner-product: equivalent" in out


def test_check_equivalence_reports_mismatch(tmp_path, capsys):
    cfg = _write_config(tmp_path, {
        "figure": "equivalence",
        "model_a": {"alpha": [0, 0, 0], "eta": [0, 0, 1]},
        "model_b": {"alpha": [0, 0, 1], "eta": [0, 0, 1]},
    })
    assert main(["check-equivalence", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert "time-domain: not equivalent" in out
    assert "moments: not equivalent" in out


def test_blp_prints_measure(tmp_path, capsys):
    out = tmp_path / "blp.csv"
    cfg = _write_config(tmp_path, {"figure": "blp", "out": str(out)})
    assert main(["blp", "--config", cfg]) == 0
    text = capsys.readouterr().out
    measure_line = next(ln for ln in text.splitlines() if ln.startswith("BLP measure:"))
    assert abs(float(measure_line.split(":")[1]) - 2.0) < 1e-6
    assert "best pair: psi_plus|psi_minus" in text
    assert out.exists()


def test_blp_rejects_other_figures(tmp_path, capsys):
    cfg = _write_config(tmp_path, {"figure": "fig4"})
    assert main(["blp", "--config", cfg]) == 2
    assert "expected 'blp'" in capsys.readouterr().err


def test_numerical_failure_maps_to_exit_3(tmp_path, capsys, monkeypatch):
    def boom(cfg):
        raise NumericalError("iteration budget exhausted")

    monkeypatch.setattr(workbench, "run_experiment", boom)
    out = tmp_path / "x.csv"
    assert main(["figure", "fig4", "--out", str(out)]) == 3
    assert "numerical failure" in capsys.readouterr().err


def test_invariant_violation_maps_to_exit_4(tmp_path, capsys, monkeypatch):
    def boom(cfg):
        raise InvariantViolationError("state lost positivity")

    monkeypatch.setattr(workbench, "run_experiment", boom)
    out = tmp_path / "x.csv"
    assert main(["figure", "fig4", "--out", str(out)]) == 4
    assert "invariant violation" in capsys.readouterr().err
