import io
import json
import math

import numpy as np
import pytest

from acmzi import cli
from acmzi.dataset import read_csv


def run(args, monkeypatch, tmp_path):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    monkeypatch.chdir(tmp_path)
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(args, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_sensitivity_fig2(monkeypatch, tmp_path):
    code, out, _ = run(["sensitivity", "--phi-points", "701"], monkeypatch, tmp_path)
    assert code == 0
    meta, cols = read_csv(out)
    assert meta["command"] == "sensitivity" and meta["config.n_c"] == "1000"
    k = np.nanargmin(cols["delta_phi_hd"])
    # the grid misses pi by at most half a step
    assert cols["delta_phi_hd"][k] == pytest.approx(1 / math.sqrt(5000), rel=1e-5)
    assert cols["phi"][k] == pytest.approx(math.pi, abs=1e-3)
    assert np.nanmin(cols["delta_phi_id"]) < cols["delta_phi_hd"][k]


def test_output_is_deterministic(monkeypatch, tmp_path):
    a = run(["gain-sweep", "--ratio-max", "1.5"], monkeypatch, tmp_path)[1]
    b = run(["gain-sweep", "--ratio-max", "1.5"], monkeypatch, tmp_path)[1]
    assert a == b


def test_seventeen_digits(monkeypatch, tmp_path):
    out = run(["sensitivity", "--phi-points", "3"], monkeypatch, tmp_path)[1]
    row = [l for l in out.splitlines() if not l.startswith("#")][1]
    assert row.split(",")[1] == format(float(row.split(",")[1]), ".17g")


@pytest.mark.parametrize("args", [
    ["sensitivity", "--phi-min", "3", "--phi-max", "3"],
    ["gain-sweep", "--ratio-min", "0.5"],
    ["loss-map", "--resolution", "1"],
    ["sensitivity", "--format", "xml"],
    ["sensitivity", "--n-c", "abc"],
    ["sensitivity", "--eta-c", "1.5"],
    ["nope"],
    [],
])
def test_usage_errors(args, monkeypatch, tmp_path):
    assert run(args, monkeypatch, tmp_path)[0] == cli.EXIT_USAGE


def test_config_file_and_precedence(monkeypatch, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# device\nn_c = 500\ng1_sq=3  # squeezing\nphi_points=5\n")
    code, out, _ = run(["sensitivity", "--config", str(cfg), "--n-c", "200"], monkeypatch, tmp_path)
    assert code == 0
    meta, _ = read_csv(out)
    assert meta["config.n_c"] == "200"              # flag beats file
    assert meta["config.g1_sq"] == "3" and meta["config.g2_sq"] == "3"
    assert meta["config.phi_points"] == "5"


def test_unknown_config_key(monkeypatch, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("n_c=10\ncolour=blue\n")
    code, _, err = run(["verify", "--config", str(cfg)], monkeypatch, tmp_path)
    assert code == cli.EXIT_USAGE and "colour" in err


def test_gain_sweep_json(monkeypatch, tmp_path):
    code, _, _ = run(["gain-sweep", "--ratio-max", "1.2", "--format", "json", "--output", "g.json"],
                     monkeypatch, tmp_path)
    assert code == 0
    doc = json.loads((tmp_path / "g.json").read_text())
    assert doc["columns"]["ratio"] == pytest.approx([1.0, 1.05, 1.1, 1.15, 1.2])
    assert doc["metadata"]["timestamp"] == "1970-01-01T00:00:00Z"
    assert abs(doc["columns"]["phi_opt_id"][0] - math.pi) < 1e-3


def test_all_divergent_exit(monkeypatch, tmp_path):
    # a beam splitter that transmits everything leaves no interference
    code, out, _ = run(["sensitivity", "--bs-t", "1", "--phi-points", "9"], monkeypatch, tmp_path)
    assert code == cli.EXIT_DIVERGENT
    _, cols = read_csv(out)
    assert np.all(cols["divergent"] == 1)


def test_missing_bounds_become_divergent(monkeypatch, tmp_path):
    code, out, _ = run(["sensitivity", "--n-c", "0", "--g1-sq", "1", "--phi-points", "3"],
                       monkeypatch, tmp_path)
    assert code == cli.EXIT_DIVERGENT
    assert "inf" not in out and "nan" not in out


def test_verify_passes_and_tight_tolerance_fails(monkeypatch, tmp_path):
    code, out, _ = run(["verify", "--n-points", "20"], monkeypatch, tmp_path)
    assert code == cli.EXIT_OK
    assert run(["verify", "--n-points", "20"], monkeypatch, tmp_path)[1] == out
    assert run(["verify", "--n-points", "20", "--tolerance-scale", "1e-30"],
               monkeypatch, tmp_path)[0] == cli.EXIT_VERIFY


def test_loss_map_outputs(monkeypatch, tmp_path):
    code, _, _ = run(["loss-map", "--resolution", "16", "--output", "m.csv", "--emit-plot"],
                     monkeypatch, tmp_path)
    assert code == 0
    for name in ("m.csv", "m_sql0.csv", "m_sql1.csv", "m_gain.csv", "m_plot.py"):
        assert (tmp_path / name).exists()
    _, grid = read_csv((tmp_path / "m.csv").read_text())
    assert grid["eta_c"].size == 256
    _, b0 = read_csv((tmp_path / "m_sql0.csv").read_text())
    _, b1 = read_csv((tmp_path / "m_sql1.csv").read_text())
    assert b0["eta_c"].size > 0 and b1["eta_c"].size > 0
    compile((tmp_path / "m_plot.py").read_text(), "m_plot.py", "exec")
