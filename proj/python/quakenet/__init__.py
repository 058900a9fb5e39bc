"""SDOF earthquake response, response spectra and a back-propagation surrogate."""

from ._core import (
    DampingKind,
    DampingSpec,
    DomainError,
    ExperimentMode,
    GroundMotionRecord,
    InputError,
    KernelFrequency,
    MlpNetwork,
    Normalization,
    QuakenetError,
    SdofSystem,
    SyntheticKind,
    TrainerConfig,
    UsageError,
    __version__,
    bipolar_sigmoid,
    forward,
    generate_synthetic,
    gradient_check,
    load_experiment_config,
    load_weights,
    pair_error,
    parse_record,
    period_sweep,
    respond_damped,
    respond_damped_incremental,
    respond_undamped,
    response_spectrum,
    run_experiment,
    save_weights,
    scale_record,
    train,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
