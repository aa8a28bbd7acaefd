"""Experiment configuration in flat ``key = value`` text.

Keys are dotted (``fom.kappa = 1e-2``), blank lines and ``#`` comments are
ignored, and list values are comma separated.  Unknown keys and malformed
values are rejected when the file is loaded.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidArgumentError, MissingArtifactError

PROBLEMS = ("advdiff", "burgers")
REDUCTIONS = ("pod", "qm")
ROM_METHODS = ("kernel-fm", "kernel-rbf", "kernel-hybrid", "opinf", "intrusive")
QBAR_MODES = ("auto", "mean", "zero")
DERIV_MODES = ("fd", "fd2", "exact")
OPINF_GRIDS = ("product", "shared")
INTEGRATORS = ("trapezoid", "rk4")


def _powers(lo: int, hi: int) -> tuple[float, ...]:
    return tuple(10.0**k for k in range(lo, hi + 1))


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment settings.

    Attribute ``section_name`` corresponds to the file key ``section.name``;
    ``problem`` has no section.
    """

    problem: str = "advdiff"
    fom_n_q: int = 256
    fom_kappa: float = 1e-2
    fom_beta: float = 1.0
    fom_nu: float = 1e-4
    fom_T: float = 1.0
    fom_n_t: int = 256
    sampling_M: int = 10
    sampling_mu1_bounds: tuple[float, ...] = (0.25, 0.35)
    sampling_mu2_bounds: tuple[float, ...] = (0.05, 0.15)
    sampling_seed: int = 0
    sampling_test_mu: tuple[float, ...] = (0.3, 0.1)
    reduction_method: str = "pod"
    reduction_r: tuple[int, ...] = (4, 8, 12)
    reduction_rho: tuple[float, ...] = field(default_factory=lambda: _powers(-3, 8))
    reduction_qbar_mode: str = "auto"
    reduction_n_candidates: int = 0
    rom_methods: tuple[str, ...] = ("kernel-fm", "opinf")
    rom_deriv_mode: str = "fd2"
    rom_drop_first: bool = False
    kernel_rbf: str = "gaussian"
    kernel_epsilon: float = 0.1
    kernel_c_phi: float = 1.0
    kernel_c_psi: float = 1e-3
    kernel_gamma_grid: tuple[float, ...] = field(default_factory=lambda: _powers(-14, 2))
    kernel_max_degree: int = 0
    kernel_normalize: bool = False
    opinf_grid: str = "product"
    integrator_method: str = "trapezoid"
    integrator_substeps: int = 4
    integrator_newton_tol: float = 1e-10
    integrator_max_newton: int = 25
    bound_weight: float = 0.0
    bound_delta: str = "estimate"

    def __post_init__(self):
        _validate(self)

    @property
    def qbar_mode(self) -> str:
        """Resolved reference-state mode: the mean for advdiff, zero for Burgers."""
        if self.reduction_qbar_mode != "auto":
            return self.reduction_qbar_mode
        return "mean" if self.problem == "advdiff" else "zero"

    @property
    def integrator_options(self) -> dict:
        return {
            "method": self.integrator_method,
            "substeps": self.integrator_substeps,
            "newton_tol": self.integrator_newton_tol,
            "max_newton": self.integrator_max_newton,
        }

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        """Plain mapping from dotted keys to values."""
        return {_key_of(f.name): getattr(self, f.name) for f in dataclasses.fields(self)}

    def to_text(self) -> str:
        lines = []
        for key, value in self.to_dict().items():
            if isinstance(value, tuple):
                value = ", ".join(_format_scalar(v) for v in value)
            else:
                value = _format_scalar(value)
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"


def _key_of(attr: str) -> str:
    if attr == "problem":
        return attr
    section, _, name = attr.partition("_")
    return f"{section}.{name}"


def _format_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


_FIELDS = {_key_of(f.name): f for f in dataclasses.fields(ExperimentConfig)}


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_value(key: str, text: str):
    annotation = str(_FIELDS[key].type)
    if annotation.startswith("tuple"):
        items = [s.strip() for s in text.split(",") if s.strip()]
        if "int" in annotation:
            return tuple(int(s) for s in items)
        if "float" in annotation:
            return tuple(float(s) for s in items)
        return tuple(items)
    if annotation == "int":
        return int(text)
    if annotation == "float":
        return float(text)
    if annotation == "bool":
        return _parse_bool(text)
    return text.strip()


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise InvalidArgumentError(f"invalid configuration: {message}")


def _validate(cfg: ExperimentConfig) -> None:
    _require(cfg.problem in PROBLEMS, f"problem must be one of {PROBLEMS}")
    _require(cfg.fom_n_q >= 3, "fom.n_q must be at least 3")
    _require(cfg.fom_kappa > 0, "fom.kappa must be positive")
    _require(cfg.fom_beta >= 0, "fom.beta must be nonnegative")
    _require(cfg.fom_nu > 0, "fom.nu must be positive")
    _require(cfg.fom_T > 0, "fom.T must be positive")
    _require(cfg.fom_n_t >= 2, "fom.n_t must be at least 2")
    _require(cfg.sampling_M >= 1, "sampling.M must be at least 1")
    for name in ("sampling_mu1_bounds", "sampling_mu2_bounds"):
        lo_hi = getattr(cfg, name)
        _require(len(lo_hi) == 2 and lo_hi[0] < lo_hi[1], f"{_key_of(name)} needs lo < hi")
    _require(cfg.sampling_mu2_bounds[0] > 0, "sampling.mu2_bounds must be positive")
    _require(len(cfg.sampling_test_mu) == 2, "sampling.test_mu needs two values")
    _require(cfg.sampling_test_mu[1] > 0, "sampling.test_mu width must be positive")
    _require(cfg.reduction_method in REDUCTIONS, f"reduction.method must be one of {REDUCTIONS}")
    _require(len(cfg.reduction_r) > 0 and min(cfg.reduction_r) >= 1, "reduction.r needs positive values")
    _require(len(set(cfg.reduction_r)) == len(cfg.reduction_r), "reduction.r has repeated values")
    _require(len(cfg.reduction_rho) > 0 and min(cfg.reduction_rho) >= 0, "reduction.rho needs nonnegative values")
    _require(cfg.reduction_qbar_mode in QBAR_MODES, f"reduction.qbar_mode must be one of {QBAR_MODES}")
    _require(cfg.reduction_n_candidates >= 0, "reduction.n_candidates must be nonnegative")
    _require(len(cfg.rom_methods) > 0, "rom.methods is empty")
    for method in cfg.rom_methods:
        _require(method in ROM_METHODS, f"unknown ROM method {method!r}; choose from {ROM_METHODS}")
    _require(cfg.rom_deriv_mode in DERIV_MODES, f"rom.deriv_mode must be one of {DERIV_MODES}")
    _require(cfg.kernel_epsilon > 0, "kernel.epsilon must be positive")
    _require(cfg.kernel_c_phi > 0 and cfg.kernel_c_psi > 0, "kernel weights must be positive")
    _require(len(cfg.kernel_gamma_grid) > 0, "kernel.gamma_grid is empty")
    _require(min(cfg.kernel_gamma_grid) >= 0, "kernel.gamma_grid needs nonnegative values")
    _require(cfg.kernel_max_degree in (0, 1, 2, 3, 4), "kernel.max_degree must be 0 (auto) to 4")
    _require(cfg.opinf_grid in OPINF_GRIDS, f"opinf.grid must be one of {OPINF_GRIDS}")
    _require(cfg.integrator_method in INTEGRATORS, f"integrator.method must be one of {INTEGRATORS}")
    _require(cfg.integrator_substeps >= 1, "integrator.substeps must be positive")
    _require(cfg.integrator_newton_tol > 0, "integrator.newton_tol must be positive")
    _require(cfg.integrator_max_newton >= 1, "integrator.max_newton must be positive")
    _require(cfg.bound_weight >= 0, "bound.weight must be nonnegative (0 selects 1/n_q)")
    if cfg.bound_delta not in ("estimate", "zero"):
        try:
            value = float(cfg.bound_delta)
        except ValueError:
            value = -1.0
        _require(value >= 0, "bound.delta must be 'estimate', 'zero', or a nonnegative number")


def parse_config(text: str) -> ExperimentConfig:
    """Parse configuration text; unspecified keys keep their defaults."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise InvalidArgumentError(f"line {lineno}: expected 'key = value'")
        if key not in _FIELDS:
            raise InvalidArgumentError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise InvalidArgumentError(f"line {lineno}: key {key!r} given twice")
        try:
            values[key] = _parse_value(key, value.strip())
        except ValueError as exc:
            raise InvalidArgumentError(f"line {lineno}: bad value for {key!r}: {exc}") from None
    return ExperimentConfig(**{_FIELDS[k].name: v for k, v in values.items()})


def load_config(path) -> ExperimentConfig:
    """Read and validate a configuration file."""
    path = Path(path)
    if not path.is_file():
        raise MissingArtifactError(f"configuration file not found: {path}")
    return parse_config(path.read_text())
