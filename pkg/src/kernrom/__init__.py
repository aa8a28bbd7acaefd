"""Non-intrusive reduced-order models from regularized kernel interpolation."""

from .errors import (
    DegenerateCentersError,
    DegenerateDataError,
    DegenerateTrajectoryError,
    IntegrationError,
    InvalidArgumentError,
    MissingArtifactError,
    NoViableRegularizationError,
    SingularGramError,
)
from .fom import build_advdiff, build_burgers, gaussian_ic, latin_hypercube
from .interp import Interpolant, fit
from .kernels import FeatureMapSpec, HybridSpec, NormalizedSpec, RbfSpec
from .odeint import Trajectory, integrate
from .reduce import Reduction, SnapshotSet, greedy_qm, pod
from .rom import (
    KernelRom,
    PolyRom,
    TrainingData,
    assemble_training,
    fit_kernel_rom,
    fit_opinf_rom,
    intrusive_rom,
    simulate_rom,
)

__version__ = "0.1.0"
