"""Paraxial fluid-of-light simulator and gradient echo memory model."""

from ._pfl import (
    ConfigError,
    InvalidArgument,
    IoError,
    NumericalError,
    __version__,
    detect_vortices,
    gem_efficiency_sweep,
    gem_efficiency_theory,
    propagate,
    run_scenario,
    scenario_names,
    sha256_file,
    validate_config,
)

__all__ = [
    "ConfigError",
    "InvalidArgument",
    "IoError",
    "NumericalError",
    "__version__",
    "detect_vortices",
    "gem_efficiency_sweep",
    "gem_efficiency_theory",
    "propagate",
    "run_scenario",
    "scenario_names",
    "sha256_file",
    "validate_config",
]
