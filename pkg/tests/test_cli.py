import json

import numpy as np
import pytest

from dcemirror.cli import main
from dcemirror.params import GridSpec, PhysicalParams, dump_config


@pytest.fixture
def small_cfg(tmp_path):
    path = tmp_path / "small.cfg"
    path.write_text(dump_config(PhysicalParams(T=5.0), GridSpec(n_t=1001)))
    return path


def manifest(out):
    return json.loads((out / "manifest.json").read_text())


def test_optics_outputs(tmp_path):
    out = tmp_path / "o"
    assert main(["optics", "--ratio", "10", "--out", str(out)]) == 0
    m = manifest(out)
    assert m["status"] == "ok" and "optics.csv" in m["outputs"]
    summary = json.loads((out / "summary.json").read_text())
    assert summary["omega_star"] == pytest.approx(2.309, rel=1e-3)
    data = np.loadtxt(out / "optics.csv", delimiter=",", skiprows=1)
    assert np.allclose(data[:, 5] + data[:, 6], 1.0, atol=1e-12)


@pytest.mark.parametrize("cmd", ["kernels", "response", "mirror-kernels", "coefficients"])
def test_pipeline_commands(tmp_path, small_cfg, cmd):
    out = tmp_path / cmd
    code = main([cmd, "--config", str(small_cfg), "--out", str(out)])
    m = manifest(out)
    assert code == 0, m.get("error")
    for name in m["outputs"]:
        assert (out / name).exists()
    assert len(m["config_hash"]) == 64


def test_outputs_are_deterministic(tmp_path, small_cfg):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["coefficients", "--config", str(small_cfg), "--out", str(out), "--seedless"]) == 0
    assert (a / "coefficients.csv").read_bytes() == (b / "coefficients.csv").read_bytes()


def test_pair_dump(tmp_path, small_cfg):
    out = tmp_path / "pd"
    assert main(["mirror-kernels", "--config", str(small_cfg), "--out", str(out), "--pair-dump", "16"]) == 0
    rows = np.loadtxt(out / "pair_density.csv", delimiter=",", skiprows=1)
    assert rows.shape == (16 * 16, 4)


def test_usage_errors_exit_2(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("M = 1\n")
    out = tmp_path / "bad"
    assert main(["optics", "--config", str(bad), "--out", str(out)]) == 2
    assert manifest(out)["status"] == "usage-error"
    assert main(["no-such-command"]) == 2
    assert main(["optics", "--config", str(tmp_path / "missing.cfg"), "--out", str(out)]) == 2


def test_failed_check_exits_1_with_manifest(tmp_path):
    cfg = tmp_path / "coarse.cfg"
    cfg.write_text(dump_config(PhysicalParams(), GridSpec(n_omega=256)))
    out = tmp_path / "v"
    assert main(["verify", "--config", str(cfg), "--out", str(out)]) == 1
    m = manifest(out)
    assert m["status"] == "check-failed" and "verify.json" in m["outputs"]


def test_evolve_gaussian(tmp_path, small_cfg):
    out = tmp_path / "ev"
    code = main(["evolve", "--config", str(small_cfg), "--out", str(out), "--initial", "gaussian",
                 "--horizon", "0.1", "--every", "5"])
    assert code == 0, manifest(out).get("error")
    data = np.loadtxt(out / "evolution.csv", delimiter=",", skiprows=1)
    assert np.allclose(data[:, 1], 1.0, atol=1e-10)
