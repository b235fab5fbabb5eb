import json

import pytest
import yaml

from zwrlab import cli


def test_defaults_validate():
    cfg = cli.load_config()
    assert cfg["workers"] == 1 and cfg["scan"]["samples"] == 60


def test_unknown_key_names_its_path(tmp_path):
    f = tmp_path / "c.yaml"
    f.write_text("scan:\n  sampels: 30\n")
    with pytest.raises(cli.ConfigError, match=r"scan\.sampels"):
        cli.load_config(f)


def test_bad_type_names_its_path():
    with pytest.raises(cli.ConfigError, match=r"path\.lambda_step_nm"):
        cli.load_config(overrides=["path.lambda_step_nm=fast"])


def test_alternative_units_and_yaml_floats(tmp_path):
    f = tmp_path / "c.yaml"
    f.write_text("scan:\n  intensity_max_gwcm2: 1.5\n  intensity_min_wcm2: 1e7\n"
                 "pulse:\n  plateau_ps: 160\n")
    cfg = cli.load_config(f)
    assert cfg["scan"]["intensity_max_wcm2"] == 1.5e9
    assert cfg["scan"]["intensity_min_wcm2"] == 1e7
    assert cfg["pulse"]["plateau_fs"] == 160000.0


def test_semantic_checks():
    with pytest.raises(cli.ConfigError, match="empty intensity range"):
        cli.load_config(overrides=["scan.intensity_min_wcm2=3e9"])
    with pytest.raises(cli.ConfigError, match="seed_wavelength_nm"):
        cli.load_config(overrides=["path.seed_wavelength_nm=560"])
    with pytest.raises(cli.ConfigError, match="workers"):
        cli.load_config(workers=0)


def test_flags_override_file(tmp_path):
    f = tmp_path / "c.yaml"
    f.write_text("workers: 3\nout: somewhere\n")
    cfg = cli.load_config(f, workers=2, out=str(tmp_path / "o"))
    assert cfg["workers"] == 2 and cfg["out"] == str(tmp_path / "o")


def test_config_error_exit_code(tmp_path, capsys):
    rc = cli.main(["scan", "--out", str(tmp_path), "--set", "scan.bogus=1"])
    assert rc == cli.EXIT_CONFIG
    assert "scan.bogus" in capsys.readouterr().err


def test_missing_pulse_points_is_config_error(tmp_path):
    assert cli.main(["pulse", "--out", str(tmp_path)]) == cli.EXIT_CONFIG


def test_pulse_command_and_resolved_echo(tmp_path):
    f = tmp_path / "c.yaml"
    f.write_text("pulse:\n  points: [[549.0, 1.47e8], [549.1, 1.59e8]]\n"
                 "  ramp_fs: 100\n  plateau_fs: 200\n")
    out = tmp_path / "o"
    assert cli.main(["pulse", "--config", str(f), "--out", str(out)]) == cli.EXIT_OK
    meta = json.loads((out / "pulse.json").read_text())
    assert meta["schema"] == cli.SCHEMA
    assert meta["peak_intensity_wcm2"] == pytest.approx(1.59e8)
    echoed = yaml.safe_load((out / "config.resolved.yaml").read_text())
    assert echoed["pulse"]["points"] == [[549.0, 1.47e8], [549.1, 1.59e8]]
    # the echo is itself a valid config that reproduces the run
    again = tmp_path / "again"
    assert cli.main(["pulse", "--config", str(out / "config.resolved.yaml"),
                     "--out", str(again)]) == cli.EXIT_OK
    assert (again / "pulse.csv").read_bytes() == (out / "pulse.csv").read_bytes()


def test_no_seed_exit_code(tmp_path):
    rc = cli.main(["path", "--out", str(tmp_path), "--set", "path.v=0",
                   "--set", "path.seed_wavelength_nm=556", "--set", "path.samples=20"])
    assert rc == cli.EXIT_NOT_FOUND
    assert json.loads((tmp_path / "path.json").read_text())["status"] == "no seed"


def _scan_args(out, workers):
    return ["scan", "--out", str(out), "--workers", str(workers),
            "--set", "scan.v=0", "--set", "scan.wavelengths_nm=[549.0, 549.1]",
            "--set", "scan.intensity_min_wcm2=1.2e8", "--set", "scan.intensity_max_wcm2=1.8e8",
            "--set", "scan.samples=20", "--set", "scan.spacing=linear"]


def test_scan_deterministic_across_workers(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(_scan_args(a, 1)) == cli.EXIT_OK
    assert cli.main(_scan_args(b, 2)) == cli.EXIT_OK
    assert (a / "scan.csv").read_bytes() == (b / "scan.csv").read_bytes()
    assert (a / "scan.json").read_bytes() == (b / "scan.json").read_bytes()
    per = json.loads((a / "scan.json").read_text())["wavelengths"]
    assert len(per[0]["zwrs"]) == 1


def test_predict_outputs(tmp_path):
    assert cli.main(["predict", "--out", str(tmp_path), "--set", "predict.wavelengths_nm=[552.25, 552.5]"]) == 0
    meta = json.loads((tmp_path / "predict.json").read_text())
    assert len(meta["candidates"]) == 2
    assert all(c["valid"] and c["crossing"] == "c+" for c in meta["candidates"])
    assert meta["slopes_wcm2_per_nm"][0] < 0
