"""Sinusoidal networks: architectures, analytic and empirical NNGP/NTK
kernels, spectral bandwidth tuning, and derivative-supervised training."""

from .autodiff import Jet2, ParamGradient, input_jet, param_gradient
from .config import InitFamily, InitScheme, NetworkConfig, Parametrization, make_config
from .empirical import (
    Estimate,
    EstimatorConfig,
    empirical_nngp,
    empirical_nngp_gram,
    empirical_ntk,
    empirical_ntk_gram,
)
from .kernels import (
    GaussianFit,
    KernelFamily,
    KernelSlice,
    KernelSpec,
    ReferenceKind,
    gaussian_fit,
    kernel_slice,
    nngp,
    nngp_shallow_closed,
    ntk,
    ntk_shallow_closed,
    reference_kernel,
    sinc,
)
from .burgers import (
    PdeDataset,
    QuadratureError,
    burgers_fields,
    burgers_solution,
    make_burgers_dataset,
)
from .network import LayerStats, SinusoidalNetwork, activation_stats, forward, init_network
from .signals import (
    Signal,
    SignalFormat,
    SignalFormatError,
    SplitMask,
    TruncatedPayloadError,
    UnsupportedDepthError,
    checkerboard_split,
    load_signal,
    sample_grid_points,
    synth_separable_cosines,
    synth_two_frequency,
    write_csv_curve,
    write_csv_grid,
    write_pgm,
)
from .spectral import (
    OmegaSuggestion,
    Spectrum,
    dft,
    idft,
    lowpass_filter,
    lowpass_loss_curve,
    parseval_check,
    spectrum_max_freq,
    suggest_omega,
)
from .trainer import (
    DivergenceError,
    EvalMetrics,
    LossResult,
    Task,
    TrainConfig,
    TrainReport,
    compute_loss,
    evaluate,
    spectral_norm,
    train,
)

__version__ = "0.1.0"
