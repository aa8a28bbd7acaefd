import numpy as np
import pytest

from kernrom import io
from kernrom.cli import main
from kernrom.config import ExperimentConfig, parse_config
from kernrom.fom import build_advdiff
from kernrom.harness import (
    METRICS_HEADER,
    SWEEP_HEADER,
    ReductionPoint,
    best_over_rho,
    default_feature_map,
    fom_degree,
    opinf_candidates,
    reduction_points,
    run_sweep,
)
from kernrom.reduce import Reduction, pod

PIPELINE = ("snapshots", "reduce", "train", "simulate", "bound")


def run_pipeline(config, out):
    for cmd in PIPELINE:
        assert main([cmd, "--config", str(config), "--out", str(out), "--threads", "1"]) == 0


def artifact_bytes(out):
    return {
        str(p.relative_to(out)): p.read_bytes()
        for p in sorted(out.rglob("*"))
        if p.is_file()
    }


@pytest.fixture(scope="module")
def pipeline_out(tmp_path_factory):
    from conftest import SMOKE_CONFIG

    base = tmp_path_factory.mktemp("pipeline")
    config = base / "smoke.cfg"
    config.write_text(SMOKE_CONFIG)
    out = base / "out"
    run_pipeline(config, out)
    return config, out


def test_pipeline_writes_all_artifacts(pipeline_out):
    _, out = pipeline_out
    for stage in ("snapshots", "reductions", "roms"):
        assert (out / stage / "manifest.json").is_file()
    assert io.mxt_shape(out / "snapshots" / "test.mxt") == (32, 33)
    rows = io.read_csv(out / "results" / "metrics.csv")
    assert list(rows[0]) == METRICS_HEADER
    methods = {row["method"] for row in rows}
    assert methods == {"projection", "kernel-fm", "kernel-rbf", "kernel-hybrid", "opinf", "intrusive"}
    summary = io.read_csv(out / "bounds" / "summary.csv")
    assert {row["method"] for row in summary} >= {"kernel-fm", "intrusive"}


def test_pipeline_rom_errors_track_projection(pipeline_out):
    _, out = pipeline_out
    rows = io.read_csv(out / "results" / "metrics.csv")
    proj = {row["r"]: float(row["value"]) for row in rows if row["method"] == "projection"}
    for row in rows:
        if row["method"] == "kernel-fm":
            assert float(row["value"]) <= 2 * proj[row["r"]]
        if row["method"] == "intrusive":
            # POD with the mean shift is not an orthogonal projection of the raw state.
            assert np.isfinite(float(row["value"]))


def test_manifest_matches_files(pipeline_out):
    _, out = pipeline_out
    manifest = io.read_json(out / "snapshots" / "manifest.json")
    for entry in manifest["train"] + [manifest["test"], manifest["time"]]:
        assert list(io.mxt_shape(out / "snapshots" / entry["file"])) == list(entry["shape"])


def test_pipeline_is_deterministic(pipeline_out, tmp_path):
    config, out = pipeline_out
    again = tmp_path / "again"
    run_pipeline(config, again)
    assert artifact_bytes(out) == artifact_bytes(again)


def test_sweep_matches_file_pipeline(pipeline_out, tmp_path):
    config, out = pipeline_out
    assert main(["sweep", "--config", str(config), "--out", str(tmp_path)]) == 0
    sweep = io.read_csv(tmp_path / "sweep.csv")
    assert list(sweep[0]) == SWEEP_HEADER
    metrics = io.read_csv(out / "results" / "metrics.csv")
    by_key = {(row["method"], row["r"]): row["value"] for row in metrics}
    for row in sweep:
        assert row["value"] == by_key[(row["method"], row["r"])]


def test_missing_artifacts_fail_cleanly(tmp_path, smoke_config, capsys):
    for cmd in PIPELINE[1:]:
        assert main([cmd, "--config", str(smoke_config), "--out", str(tmp_path)]) == 1
        assert "run `kernrom" in capsys.readouterr().err


def test_bad_config_fails_cleanly(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("fom.n_q = 32\nfom.mystery = 1\n")
    assert main(["snapshots", "--config", str(bad), "--out", str(tmp_path / "o")]) == 1
    assert "unknown key" in capsys.readouterr().err
    assert main(["snapshots", "--config", str(tmp_path / "nope.cfg"), "--out", str(tmp_path)]) == 1


def test_cli_requires_out():
    with pytest.raises(SystemExit):
        main(["snapshots"])


def test_qm_sweep_smoke(tmp_path):
    cfg = parse_config(
        "fom.n_q = 24\nfom.n_t = 16\nsampling.M = 2\nreduction.method = qm\n"
        "reduction.r = 2\nreduction.rho = 1e-2, 1e2\nrom.methods = opinf\n"
        "kernel.gamma_grid = 1e-8, 1e-2\n"
    )
    rows = run_sweep(cfg)
    assert len(rows) == 4
    best = best_over_rho(rows)
    assert len(best) == 2
    assert {row[2] for row in best} == {"projection", "opinf"}


def test_reduction_points():
    cfg = ExperimentConfig(reduction_r=(3, 5))
    assert [p.ident for p in reduction_points(cfg)] == ["pod_r3", "pod_r5"]
    qm = cfg.replace(reduction_method="qm", reduction_rho=(1e-2,))
    assert [p.ident for p in reduction_points(qm)] == ["qm_r3_rho0.01", "qm_r5_rho0.01"]
    assert ReductionPoint("pod", 4, None).ident == "pod_r4"


def test_default_feature_map_rules(rng):
    Q = rng.standard_normal((12, 9))
    lin = default_feature_map(pod(Q, 3, "mean"), 1)
    assert (lin.max_degree, lin.include_constant) == (1, True)
    np.testing.assert_allclose(lin.block_weights, 1 / lin.n_features)
    zero = default_feature_map(pod(Q, 3), 2)
    assert (zero.max_degree, zero.include_constant) == (2, False)
    V, _ = np.linalg.qr(rng.standard_normal((12, 3)))
    W = 2.0 * np.eye(12)[:, 3:9]
    qm = default_feature_map(Reduction(np.zeros(12), V, W - V @ (V.T @ W), "fixed"), 1)
    wnorm = np.linalg.norm(W - V @ (V.T @ W))
    assert qm.max_degree == 2
    np.testing.assert_allclose(qm.block_weights, [1.0, wnorm])
    quartic = default_feature_map(pod(Q, 3, "mean"), 1, max_degree=4)
    np.testing.assert_allclose(quartic.block_weights, 1 / quartic.n_features)


def test_opinf_candidates_grid():
    cfg = ExperimentConfig(kernel_gamma_grid=(1e-2, 1.0))
    fm = default_feature_map(Reduction(np.zeros(4), np.eye(4)[:, :2], None, "fixed"), 2)
    assert len(opinf_candidates(cfg, fm)) == 4
    assert len(opinf_candidates(cfg.replace(opinf_grid="shared"), fm)) == 2


def test_fom_degree():
    assert fom_degree(build_advdiff(8)) == 1
