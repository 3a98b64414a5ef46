"""lyapflow: continuous-time neural training with finite settling-time guarantees.

A small numpy library for running sigmoid networks as controlled dynamical
systems: fractional-power weight-update laws drive the training loss to zero
in finite time, and the package computes the matching settling-time
certificates, verifies the promised decrease rates along trajectories, and
quantifies how much bounded input noise the guarantee survives.
"""

from .bounds import (
    DecreaseReport,
    GammaEstimate,
    SettlingBound,
    estimate_gamma,
    settling_bound,
    verify_decrease,
)
from .control import (
    GainSchedule,
    gradient_flow_update,
    lyapunov_rate_scale,
    mlp_update,
    signal_norm,
    single_neuron_update,
)
from .datasets import (
    CsvSchema,
    Dataset,
    gen_blobs,
    gen_linreg,
    load_csv,
    normalize,
    save_csv,
    split,
)
from .dynamics import (
    EpochFlow,
    Integrator,
    StoppingRule,
    TheoryFlow,
    Trajectory,
    dataset_loss,
    detect_settle,
    integrate,
)
from .errors import (
    AssumptionError,
    ConfigError,
    DataError,
    DivergenceError,
    GuaranteeError,
    HorizonError,
    LyapflowError,
    ModeError,
    ShapeError,
)
from .losses import L1Loss, L2Loss, Loss, LyapunovLoss, loss_from_name, sgnpow
from .net import Activation, ForwardTrace, Mlp, forward, loss_gradient, sensitivities
from .perturb import PerturbationSpec, perturb_input, robustness_run

__version__ = "0.1.0"

__all__ = [
    "Activation",
    "AssumptionError",
    "ConfigError",
    "CsvSchema",
    "DataError",
    "Dataset",
    "DecreaseReport",
    "DivergenceError",
    "EpochFlow",
    "ForwardTrace",
    "GainSchedule",
    "GammaEstimate",
    "GuaranteeError",
    "HorizonError",
    "Integrator",
    "L1Loss",
    "L2Loss",
    "Loss",
    "LyapflowError",
    "LyapunovLoss",
    "Mlp",
    "ModeError",
    "PerturbationSpec",
    "SettlingBound",
    "ShapeError",
    "StoppingRule",
    "TheoryFlow",
    "Trajectory",
    "dataset_loss",
    "detect_settle",
    "estimate_gamma",
    "forward",
    "gen_blobs",
    "gen_linreg",
    "gradient_flow_update",
    "integrate",
    "load_csv",
    "loss_from_name",
    "loss_gradient",
    "lyapunov_rate_scale",
    "mlp_update",
    "normalize",
    "perturb_input",
    "robustness_run",
    "save_csv",
    "sensitivities",
    "settling_bound",
    "sgnpow",
    "signal_norm",
    "single_neuron_update",
    "split",
    "verify_decrease",
    "__version__",
]
