"""Monte Carlo estimation of the OFDM frequency correlation matrix.

Doubly selective Rayleigh channel, pilot-based LS front end, ML correlation
estimator, exact CRLB plus pilot-free relaxations, and a deterministic
experiment harness with a CSV/CLI surface.
"""

__version__ = "0.1.0"

from .bounds import (
    FIT_COEFF,
    BoundReport,
    CrlbFactor,
    LsCovariance,
    avgmse_lb,
    avgmse_lb_insightful,
    avgmse_lb_pilot_free,
    bound_report,
    crlb_entry,
    crlb_factor,
    lambda_max_fit,
    lambda_max_numeric,
    ls_covariance,
    pilot_omega,
    tmse_lb,
)
from .channel import (
    CirMatrix,
    DopplerSpec,
    OfdmConfig,
    PathProfile,
    TimeCorrMatrix,
    TransferMatrix,
    build_tcm,
    build_transfer_matrix,
    build_true_fcm,
    builtin_profile,
    check_cp,
    delay_transform,
    load_profile,
    measure_sir,
    sample_cir,
)
from .config import ConfigError, ExperimentConfig, load_config, paper_preset, save_config
from .estimation import (
    FcmEstimate,
    Sfcm,
    SfcmAccumulator,
    accumulate,
    avg_mse,
    diag_bias,
    finalize,
    mle_fcm,
    sfcm,
    total_mse,
    wishart_central_moments,
    wishart_second_moment_check,
)
from .experiments import RunResult, run_experiment
from .link import (
    NoiseSpec,
    PilotSequence,
    draw_ls_chain,
    draw_ls_model,
    draw_ls_waveform,
    generate_qpsk_pilots,
    ls_estimate,
    simulate_pilot_rx,
)
from .numerics import NumericalError, RngStream, bessel_j0, psd_factor, sample_cn

__all__ = [
    "__version__",
    "FIT_COEFF",
    "BoundReport",
    "CrlbFactor",
    "LsCovariance",
    "avgmse_lb",
    "avgmse_lb_insightful",
    "avgmse_lb_pilot_free",
    "bound_report",
    "crlb_entry",
    "crlb_factor",
    "lambda_max_fit",
    "lambda_max_numeric",
    "ls_covariance",
    "pilot_omega",
    "tmse_lb",
    "CirMatrix",
    "DopplerSpec",
    "OfdmConfig",
    "PathProfile",
    "TimeCorrMatrix",
    "TransferMatrix",
    "build_tcm",
    "build_transfer_matrix",
    "build_true_fcm",
    "builtin_profile",
    "check_cp",
    "delay_transform",
    "load_profile",
    "measure_sir",
    "sample_cir",
    "ConfigError",
    "ExperimentConfig",
    "load_config",
    "paper_preset",
    "save_config",
    "FcmEstimate",
    "Sfcm",
    "SfcmAccumulator",
    "accumulate",
    "avg_mse",
    "diag_bias",
    "finalize",
    "mle_fcm",
    "sfcm",
    "total_mse",
    "wishart_central_moments",
    "wishart_second_moment_check",
    "RunResult",
    "run_experiment",
    "NoiseSpec",
    "PilotSequence",
    "draw_ls_chain",
    "draw_ls_model",
    "draw_ls_waveform",
    "generate_qpsk_pilots",
    "ls_estimate",
    "simulate_pilot_rx",
    "NumericalError",
    "RngStream",
    "bessel_j0",
    "psd_factor",
    "sample_cn",
]
