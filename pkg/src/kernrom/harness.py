"""Experiment pipeline: snapshots, reductions, ROM training, simulation, bounds, sweeps.

Every command reads its inputs from an output directory written by the
previous stage and writes plain-text artifacts (MXT matrices, CSV tables and
JSON manifests).  Missing upstream artifacts raise
:class:`~kernrom.errors.MissingArtifactError` naming the file.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io
from .bounds import CSV_COLUMNS, aposteriori_bound, galerkin_bound
from .config import ExperimentConfig
from .errors import (
    IntegrationError,
    InvalidArgumentError,
    KernromError,
    MissingArtifactError,
)
from .fom import FomModel, build_advdiff, build_burgers, gaussian_ic, latin_hypercube
from .interp import Interpolant
from .kernels import FeatureMapSpec, HybridSpec, KernelSpec, NormalizedSpec, RbfSpec
from .metrics import relative_linf_lp
from .odeint import Trajectory, integrate
from .reduce import Reduction, SnapshotSet, greedy_qm, pod, projection_error
from .rom import (
    KernelRom,
    PolyRom,
    RomModel,
    TrainingData,
    assemble_training,
    default_opinf_groups,
    fit_kernel_rom,
    fit_opinf_rom,
    grid_search_gamma,
    intrusive_rom,
    simulate_rom,
)

SNAPSHOT_DIR = "snapshots"
REDUCTION_DIR = "reductions"
ROM_DIR = "roms"
RESULT_DIR = "results"
BOUND_DIR = "bounds"
MANIFEST = "manifest.json"

METRICS_HEADER = ["config_id", "method", "reduction", "r", "rho", "metric", "value", "status"]
SWEEP_HEADER = [
    "problem", "reduction", "method", "r", "rho", "wtilde_norm",
    "metric", "value", "gamma", "status",
]
BOUND_SUMMARY_HEADER = [
    "config_id", "method", "r", "rho", "dominates", "max_bound", "max_true_error",
    "int_alpha_P", "int_alpha_K", "delta", "status",
]


# ---------------------------------------------------------------------------
# Problem setup


def build_fom(cfg: ExperimentConfig) -> FomModel:
    if cfg.problem == "advdiff":
        return build_advdiff(cfg.fom_n_q, cfg.fom_kappa, cfg.fom_beta)
    return build_burgers(cfg.fom_n_q, cfg.fom_nu)


def fom_degree(fom: FomModel) -> int:
    return 1 if fom.is_linear else 2


def time_grid(cfg: ExperimentConfig) -> np.ndarray:
    return np.linspace(0.0, cfg.fom_T, cfg.fom_n_t + 1)


def training_parameters(cfg: ExperimentConfig) -> list[tuple[float, ...]]:
    bounds = [cfg.sampling_mu1_bounds, cfg.sampling_mu2_bounds]
    return latin_hypercube(cfg.sampling_M, bounds, cfg.sampling_seed)


def _fom_solve(cfg: ExperimentConfig, fom: FomModel, mu, t: np.ndarray) -> np.ndarray:
    q0 = gaussian_ic(fom.grid, *mu)
    return integrate(fom.rhs, fom.jacobian, q0, t, **cfg.integrator_options).states


def fom_derivatives(fom: FomModel, Q: np.ndarray) -> np.ndarray:
    """Exact right-hand side ``f(q)`` at every snapshot column."""
    if fom.is_linear:
        return np.asarray(fom.A @ Q)
    return np.column_stack([fom.rhs(Q[:, k]) for k in range(Q.shape[1])])


def generate_snapshots(cfg: ExperimentConfig, fom: FomModel | None = None):
    """Integrate the full model at the training and test parameters.

    Returns
    -------
    (SnapshotSet, ndarray)
        Training snapshots and the test trajectory.
    """
    fom = build_fom(cfg) if fom is None else fom
    t = time_grid(cfg)
    params = training_parameters(cfg)
    trajectories = [_fom_solve(cfg, fom, mu, t) for mu in params]
    test = _fom_solve(cfg, fom, cfg.sampling_test_mu, t)
    return SnapshotSet(t, params, trajectories), test


def with_exact_derivatives(snapshots: SnapshotSet, fom: FomModel) -> SnapshotSet:
    derivs = [fom_derivatives(fom, Q) for Q in snapshots.trajectories]
    return SnapshotSet(snapshots.t, snapshots.params, snapshots.trajectories, derivs)


# ---------------------------------------------------------------------------
# Reductions and model choices


@dataclass(frozen=True)
class ReductionPoint:
    """One entry of the reduction sweep."""

    method: str
    r: int
    rho: float | None

    @property
    def ident(self) -> str:
        if self.rho is None:
            return f"{self.method}_r{self.r}"
        return f"{self.method}_r{self.r}_rho{self.rho:g}"


def reduction_points(cfg: ExperimentConfig) -> list[ReductionPoint]:
    if cfg.reduction_method == "pod":
        return [ReductionPoint("pod", r, None) for r in cfg.reduction_r]
    return [ReductionPoint("qm", r, rho) for r in cfg.reduction_r for rho in cfg.reduction_rho]


def make_reduction(cfg: ExperimentConfig, snapshots: SnapshotSet, point: ReductionPoint) -> Reduction:
    if point.method == "pod":
        return pod(snapshots, point.r, cfg.qbar_mode)
    n_candidates = cfg.reduction_n_candidates or None
    return greedy_qm(snapshots, point.r, point.rho, n_candidates, cfg.qbar_mode)


def default_feature_map(red: Reduction, degree_of_fom: int, max_degree: int = 0) -> FeatureMapSpec:
    """Feature map mirroring the structure of the intrusive ROM.

    The natural degree is the full model's polynomial degree, doubled for a
    quadratic manifold.  A constant block is included when the reference
    state is nonzero.  For the natural degree, POD maps weight every block by
    ``1 / n_features`` while quadratic-manifold maps weight block ``d`` by
    ``||Wtilde||_F ** max(0, d - degree_of_fom)``.  Any other degree uses
    ``1 / n_features`` throughout.
    """
    natural = degree_of_fom * (2 if red.is_quadratic else 1)
    degree = max_degree or natural
    include_constant = bool(np.any(red.qbar != 0))
    plain = FeatureMapSpec(red.r, degree, include_constant)
    if degree == natural and red.is_quadratic:
        # A vanishing Wtilde would make G singular; keep the weights positive.
        wnorm = max(float(np.linalg.norm(red.Wtilde)), 1e-12)
        weights = tuple(wnorm ** max(0, d - degree_of_fom) for d in plain.degrees)
    else:
        weights = (1.0 / plain.n_features,) * plain.n_blocks
    return FeatureMapSpec(red.r, degree, include_constant, weights)


def build_kernel(cfg: ExperimentConfig, method: str, fm: FeatureMapSpec) -> KernelSpec:
    rbf = RbfSpec(cfg.kernel_rbf, cfg.kernel_epsilon)
    if method == "kernel-fm":
        return fm
    if method == "kernel-rbf":
        return rbf
    if method == "kernel-hybrid":
        return HybridSpec(fm, rbf, cfg.kernel_c_phi, cfg.kernel_c_psi)
    raise InvalidArgumentError(f"{method!r} is not a kernel method")


def opinf_candidates(cfg: ExperimentConfig, fm: FeatureMapSpec) -> list[tuple[float, ...]]:
    n_groups = max(default_opinf_groups(fm)) + 1
    grid = cfg.kernel_gamma_grid
    if cfg.opinf_grid == "shared" or n_groups == 1:
        return [(g,) * n_groups for g in grid]
    return list(itertools.product(grid, repeat=n_groups))


@dataclass(frozen=True, eq=False)
class TrainedRom:
    """A ROM with its regularization selection record."""

    method: str
    rom: RomModel
    selected: object = None
    scores: tuple = ()


def train_rom(
    cfg: ExperimentConfig,
    method: str,
    fom: FomModel,
    red: Reduction,
    snapshots: SnapshotSet,
    td: TrainingData | None = None,
) -> TrainedRom:
    """Fit one ROM, selecting its regularization by grid search where applicable."""
    if method == "intrusive":
        return TrainedRom(method, intrusive_rom(fom, red))
    if td is None:
        td = assemble_training(snapshots, red, cfg.rom_deriv_mode, cfg.rom_drop_first)
    fm = default_feature_map(red, fom_degree(fom), cfg.kernel_max_degree)
    options = cfg.integrator_options
    if method == "opinf":
        result = grid_search_gamma(
            snapshots, red, lambda g: fit_opinf_rom(td, fm, g),
            opinf_candidates(cfg, fm), **options,
        )
    else:
        kernel = build_kernel(cfg, method, fm)
        result = grid_search_gamma(
            snapshots, red, lambda g: fit_kernel_rom(td, kernel, g, cfg.kernel_normalize),
            list(cfg.kernel_gamma_grid), **options,
        )
    return TrainedRom(method, result.rom, result.best, tuple(result.scores))


def format_gamma(value) -> str:
    if value is None:
        return ""
    return ";".join(io.FLOAT_FORMAT % g for g in np.atleast_1d(value))


# ---------------------------------------------------------------------------
# Serialization of reductions and ROMs


def _kernel_to_dict(spec: KernelSpec) -> dict:
    if isinstance(spec, FeatureMapSpec):
        return {
            "type": "feature_map", "r": spec.r, "max_degree": spec.max_degree,
            "include_constant": spec.include_constant,
            "block_weights": list(spec.block_weights),
        }
    if isinstance(spec, RbfSpec):
        return {"type": "rbf", "generator": spec.generator, "epsilon": spec.epsilon}
    if isinstance(spec, HybridSpec):
        return {
            "type": "hybrid", "fm": _kernel_to_dict(spec.fm), "rbf": _kernel_to_dict(spec.rbf),
            "c_phi": spec.c_phi, "c_psi": spec.c_psi,
        }
    return {
        "type": "normalized", "inner": _kernel_to_dict(spec.inner),
        "sigma": spec.sigma.tolist(), "xbar": spec.xbar.tolist(),
    }


def _kernel_from_dict(d: dict) -> KernelSpec:
    kind = d["type"]
    if kind == "feature_map":
        return FeatureMapSpec(d["r"], d["max_degree"], d["include_constant"], tuple(d["block_weights"]))
    if kind == "rbf":
        return RbfSpec(d["generator"], d["epsilon"])
    if kind == "hybrid":
        return HybridSpec(_kernel_from_dict(d["fm"]), _kernel_from_dict(d["rbf"]), d["c_phi"], d["c_psi"])
    if kind == "normalized":
        return NormalizedSpec(_kernel_from_dict(d["inner"]), np.array(d["sigma"]), np.array(d["xbar"]))
    raise InvalidArgumentError(f"unknown kernel type {kind!r}")


def save_reduction(directory: Path, red: Reduction) -> dict:
    directory.mkdir(parents=True, exist_ok=True)
    io.write_mxt(directory / "qbar.mxt", red.qbar)
    io.write_mxt(directory / "V.mxt", red.V)
    files = {"qbar": "qbar.mxt", "V": "V.mxt"}
    if red.is_quadratic:
        io.write_mxt(directory / "W.mxt", red.Wtilde)
        files["W"] = "W.mxt"
    return files


def load_reduction(directory: Path, entry: dict) -> Reduction:
    qbar = io.read_mxt(directory / entry["files"]["qbar"])[:, 0]
    V = io.read_mxt(directory / entry["files"]["V"])
    W = io.read_mxt(directory / entry["files"]["W"]) if "W" in entry["files"] else None
    return Reduction(qbar, V, W, entry["qbar_mode"], entry["rho"], tuple(entry.get("notes", ())))


def save_rom(directory: Path, rom: RomModel) -> dict:
    directory.mkdir(parents=True, exist_ok=True)
    if isinstance(rom, PolyRom):
        io.write_mxt(directory / "C.mxt", rom.C)
        return {"kind": "poly", "feature_map": _kernel_to_dict(rom.fm), "files": {"C": "C.mxt"}}
    interp = rom.interp
    files = {"centers": "centers.mxt", "coef": "coef.mxt"}
    io.write_mxt(directory / "centers.mxt", interp.centers)
    io.write_mxt(directory / "coef.mxt", interp.coef)
    if interp.C is not None:
        io.write_mxt(directory / "C.mxt", interp.C)
        files["C"] = "C.mxt"
    return {
        "kind": "kernel", "kernel": _kernel_to_dict(interp.kernel), "gamma": interp.gamma,
        "fit_residual": interp.fit_residual, "files": files,
    }


def load_rom(directory: Path, entry: dict) -> RomModel:
    files = entry["files"]
    if entry["kind"] == "poly":
        fm = _kernel_from_dict(entry["feature_map"])
        return PolyRom(io.read_mxt(directory / files["C"]), fm, {"kind": entry["method"]})
    C = io.read_mxt(directory / files["C"]) if "C" in files else None
    interp = Interpolant(
        _kernel_from_dict(entry["kernel"]),
        io.read_mxt(directory / files["centers"]),
        io.read_mxt(directory / files["coef"]),
        float(entry["gamma"]),
        C,
        float(entry["fit_residual"]),
    )
    return KernelRom(interp, {"gamma": float(entry["gamma"])})


# ---------------------------------------------------------------------------
# Artifact loading


def _manifest(out: Path, stage: str, hint: str) -> dict:
    path = out / stage / MANIFEST
    if not path.is_file():
        raise MissingArtifactError(f"missing artifact: {path} (run `kernrom {hint}` first)")
    return io.read_json(path)


def check_manifest(directory: Path, entries) -> None:
    """Verify that every listed file exists and has the recorded shape."""
    for entry in entries:
        path = directory / entry["file"]
        if tuple(io.mxt_shape(path)) != tuple(entry["shape"]):
            raise InvalidArgumentError(f"{path}: dimensions differ from the manifest")


def load_snapshots(out, with_derivatives_from: FomModel | None = None):
    """Read training snapshots and the test trajectory written by :func:`cmd_snapshots`."""
    out = Path(out)
    manifest = _manifest(out, SNAPSHOT_DIR, "snapshots")
    directory = out / SNAPSHOT_DIR
    check_manifest(directory, manifest["train"] + [manifest["test"], manifest["time"]])
    t = io.read_mxt(directory / manifest["time"]["file"])[:, 0]
    trajectories = [io.read_mxt(directory / e["file"]) for e in manifest["train"]]
    params = [tuple(e["mu"]) for e in manifest["train"]]
    snapshots = SnapshotSet(t, params, trajectories)
    if with_derivatives_from is not None:
        snapshots = with_exact_derivatives(snapshots, with_derivatives_from)
    test = io.read_mxt(directory / manifest["test"]["file"])
    return snapshots, test


def _training_snapshots(cfg: ExperimentConfig, out: Path, fom: FomModel):
    needs_exact = cfg.rom_deriv_mode == "exact"
    return load_snapshots(out, fom if needs_exact else None)


def _load_reductions(out: Path):
    manifest = _manifest(out, REDUCTION_DIR, "reduce")
    for entry in manifest["reductions"]:
        yield entry, load_reduction(out / REDUCTION_DIR / entry["id"], entry)


# ---------------------------------------------------------------------------
# Commands


def cmd_snapshots(cfg: ExperimentConfig, out) -> dict:
    """Integrate the full model at all training parameters and the test parameter."""
    out = Path(out)
    directory = out / SNAPSHOT_DIR
    fom = build_fom(cfg)
    snapshots, test = generate_snapshots(cfg, fom)
    io.write_mxt(directory / "t.mxt", snapshots.t)
    train = []
    for ell, (mu, Q) in enumerate(zip(snapshots.params, snapshots.trajectories)):
        name = f"train_{ell:03d}.mxt"
        io.write_mxt(directory / name, Q)
        train.append({"file": name, "mu": list(mu), "shape": list(Q.shape)})
    io.write_mxt(directory / "test.mxt", test)
    manifest = {
        "problem": cfg.problem,
        "time": {"file": "t.mxt", "shape": [snapshots.t.size, 1]},
        "train": train,
        "test": {"file": "test.mxt", "mu": list(cfg.sampling_test_mu), "shape": list(test.shape)},
        "config": cfg.to_dict(),
    }
    io.write_json(directory / MANIFEST, manifest)
    (out / "config.txt").write_text(cfg.to_text())
    return manifest


def cmd_reduce(cfg: ExperimentConfig, out) -> dict:
    """Build every configured reduction from stored snapshots."""
    out = Path(out)
    snapshots, test = load_snapshots(out)
    entries = []
    for point in reduction_points(cfg):
        red = make_reduction(cfg, snapshots, point)
        files = save_reduction(out / REDUCTION_DIR / point.ident, red)
        entries.append({
            "id": point.ident,
            "method": point.method,
            "r": point.r,
            "rho": point.rho,
            "qbar_mode": red.qbar_mode,
            "files": files,
            "wtilde_norm": float(np.linalg.norm(red.Wtilde)) if red.is_quadratic else 0.0,
            "projection_error_test": projection_error(test, red),
            "projection_error_train": projection_error(snapshots, red),
            "notes": list(red.notes),
        })
    manifest = {"reductions": entries}
    io.write_json(out / REDUCTION_DIR / MANIFEST, manifest)
    return manifest


def cmd_train(cfg: ExperimentConfig, out) -> dict:
    """Fit every configured ROM on every stored reduction."""
    out = Path(out)
    fom = build_fom(cfg)
    snapshots, _ = _training_snapshots(cfg, out, fom)
    entries = []
    for red_entry, red in _load_reductions(out):
        td = None
        if any(m != "intrusive" for m in cfg.rom_methods):
            td = assemble_training(snapshots, red, cfg.rom_deriv_mode, cfg.rom_drop_first)
        for method in cfg.rom_methods:
            ident = f"{method}_{red_entry['id']}"
            entry = {"id": ident, "method": method, "reduction": red_entry["id"],
                     "r": red_entry["r"], "rho": red_entry["rho"]}
            try:
                trained = train_rom(cfg, method, fom, red, snapshots, td)
            except KernromError as exc:
                entry.update({"status": f"failed: {exc}"})
                entries.append(entry)
                continue
            directory = out / ROM_DIR / ident
            entry.update(save_rom(directory, trained.rom))
            entry.update({"status": "ok", "selected": format_gamma(trained.selected)})
            if trained.scores:
                io.write_csv(directory / "scores.csv", ["candidate", "score"],
                             [(format_gamma(g), s) for g, s in trained.scores])
            entries.append(entry)
    manifest = {"roms": entries}
    io.write_json(out / ROM_DIR / MANIFEST, manifest)
    return manifest


def _simulate(cfg: ExperimentConfig, rom: RomModel, red: Reduction, test: np.ndarray, t: np.ndarray):
    try:
        traj, recon = simulate_rom(rom, red, test[:, 0], t, **cfg.integrator_options)
    except IntegrationError as exc:
        return None, None, np.inf, f"failed: {exc}"
    return traj, recon, relative_linf_lp(test, recon).value, "ok"


def cmd_simulate(cfg: ExperimentConfig, out) -> list:
    """Simulate every trained ROM at the test parameter and record its error."""
    out = Path(out)
    snapshots, test = load_snapshots(out)
    reductions = {e["id"]: (e, red) for e, red in _load_reductions(out)}
    roms = _manifest(out, ROM_DIR, "train")["roms"]
    rows = []
    for red_id, (entry, red) in reductions.items():
        rows.append([f"projection_{red_id}", "projection", red_id, entry["r"], entry["rho"],
                     "linf_l2", entry["projection_error_test"], "ok"])
    for entry in roms:
        if entry["status"] != "ok":
            rows.append([entry["id"], entry["method"], entry["reduction"], entry["r"],
                         entry["rho"], "linf_l2", np.inf, entry["status"]])
            continue
        red = reductions[entry["reduction"]][1]
        rom = load_rom(out / ROM_DIR / entry["id"], entry)
        traj, recon, value, status = _simulate(cfg, rom, red, test, snapshots.t)
        if traj is not None:
            directory = out / RESULT_DIR / entry["id"]
            io.write_mxt(directory / "reduced.mxt", traj.states)
            io.write_mxt(directory / "recon.mxt", recon)
        rows.append([entry["id"], entry["method"], entry["reduction"], entry["r"],
                     entry["rho"], "linf_l2", value, status])
    io.write_csv(out / RESULT_DIR / "metrics.csv", METRICS_HEADER, rows)
    return rows


def _delta_mode(cfg: ExperimentConfig):
    if cfg.bound_delta in ("estimate", "zero"):
        return cfg.bound_delta
    return float(cfg.bound_delta)


def cmd_bound(cfg: ExperimentConfig, out) -> list:
    """Evaluate error bounds for simulated kernel and intrusive ROMs."""
    out = Path(out)
    fom = build_fom(cfg)
    snapshots, test = _training_snapshots(cfg, out, fom)
    reductions = {e["id"]: red for e, red in _load_reductions(out)}
    roms = _manifest(out, ROM_DIR, "train")["roms"]
    sim_status = {
        row["config_id"]: row["status"] for row in io.read_csv(out / RESULT_DIR / "metrics.csv")
    }
    weight = cfg.bound_weight or None
    t = snapshots.t
    rows = []
    for entry in roms:
        base = [entry["id"], entry["method"], entry["r"], entry["rho"]]
        status = entry["status"] if entry["status"] != "ok" else sim_status.get(entry["id"], "ok")
        if status != "ok":
            rows.append(base + [False] + [np.nan] * 5 + [status])
            continue
        if entry["method"] == "opinf":
            rows.append(base + [False] + [np.nan] * 5 + ["skipped: not a kernel ROM"])
            continue
        reduced_path = out / RESULT_DIR / entry["id"] / "reduced.mxt"
        if not reduced_path.is_file():
            raise MissingArtifactError(
                f"missing artifact: {reduced_path} (run `kernrom simulate` first)"
            )
        red = reductions[entry["reduction"]]
        traj = Trajectory(t, io.read_mxt(reduced_path))
        if entry["method"] == "intrusive":
            trace = galerkin_bound(fom, red, traj, test, weight)
        else:
            rom = load_rom(out / ROM_DIR / entry["id"], entry)
            td = assemble_training(snapshots, red, cfg.rom_deriv_mode, cfg.rom_drop_first)
            trace = aposteriori_bound(fom, red, rom, traj, test, weight, _delta_mode(cfg), td)
        trace.to_csv(out / BOUND_DIR / f"{entry['id']}.csv")
        rows.append(base + [
            trace.dominates, float(np.max(trace.bound)), float(np.max(trace.true_error)),
            float(np.trapezoid(trace.alpha_P, t)), float(np.trapezoid(trace.alpha_K, t)),
            float(trace.delta[0]), "ok",
        ])
    io.write_csv(out / BOUND_DIR / "summary.csv", BOUND_SUMMARY_HEADER, rows)
    return rows


def run_sweep(cfg: ExperimentConfig, snapshots: SnapshotSet | None = None, test=None,
              fom: FomModel | None = None) -> list[list]:
    """Sweep reductions and ROM methods in memory; one row per (method, r, rho)."""
    fom = build_fom(cfg) if fom is None else fom
    if snapshots is None:
        snapshots, test = generate_snapshots(cfg, fom)
    if cfg.rom_deriv_mode == "exact" and snapshots.derivatives is None:
        snapshots = with_exact_derivatives(snapshots, fom)
    rows = []
    for point in reduction_points(cfg):
        red = make_reduction(cfg, snapshots, point)
        wnorm = float(np.linalg.norm(red.Wtilde)) if red.is_quadratic else 0.0
        common = [cfg.problem, point.method]
        rows.append(common + ["projection", point.r, point.rho, wnorm, "linf_l2",
                              projection_error(test, red), "", "ok"])
        td = None
        for method in cfg.rom_methods:
            try:
                if td is None and method != "intrusive":
                    td = assemble_training(snapshots, red, cfg.rom_deriv_mode, cfg.rom_drop_first)
                trained = train_rom(cfg, method, fom, red, snapshots, td)
            except KernromError as exc:
                rows.append(common + [method, point.r, point.rho, wnorm, "linf_l2",
                                      np.inf, "", f"failed: {exc}"])
                continue
            _, _, value, status = _simulate(cfg, trained.rom, red, test, snapshots.t)
            rows.append(common + [method, point.r, point.rho, wnorm, "linf_l2", value,
                                  format_gamma(trained.selected), status])
    return rows


def best_over_rho(rows: list[list]) -> list[list]:
    """Keep the smallest error over rho for each (reduction, method, r)."""
    best: dict[tuple, list] = {}
    for row in rows:
        key = (row[1], row[2], row[3])
        if key not in best or row[7] < best[key][7]:
            best[key] = row
    return list(best.values())


def cmd_sweep(cfg: ExperimentConfig, out) -> list[list]:
    """Run the reduction/ROM sweep and write ``sweep.csv`` (plus ``sweep_best.csv`` for QM)."""
    out = Path(out)
    rows = run_sweep(cfg)
    io.write_csv(out / "sweep.csv", SWEEP_HEADER, rows)
    if cfg.reduction_method == "qm":
        io.write_csv(out / "sweep_best.csv", SWEEP_HEADER, best_over_rho(rows))
    (out / "config.txt").parent.mkdir(parents=True, exist_ok=True)
    (out / "config.txt").write_text(cfg.to_text())
    return rows


COMMANDS = {
    "snapshots": cmd_snapshots,
    "reduce": cmd_reduce,
    "train": cmd_train,
    "simulate": cmd_simulate,
    "bound": cmd_bound,
    "sweep": cmd_sweep,
}

__all__ = [
    "BOUND_SUMMARY_HEADER", "COMMANDS", "CSV_COLUMNS", "METRICS_HEADER", "SWEEP_HEADER",
    "ReductionPoint", "TrainedRom", "best_over_rho", "build_fom", "build_kernel",
    "cmd_bound", "cmd_reduce", "cmd_simulate", "cmd_snapshots", "cmd_sweep", "cmd_train",
    "default_feature_map", "generate_snapshots", "load_rom", "load_snapshots",
    "make_reduction", "opinf_candidates", "reduction_points", "run_sweep", "save_rom",
    "train_rom",
]
