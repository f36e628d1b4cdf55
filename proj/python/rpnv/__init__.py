"""Python bindings for the rpnv radical-pair / NV simulator."""

from ._rpnv import (  # noqa: F401
    ConfigError,
    NumericalError,
    PhysicsError,
    __version__,
    angle_sweep,
    canonical_config,
    config_hash,
    coupling_factors,
    dipolar_prefactor,
    g_eff,
    preset_config,
    preset_names,
    run,
)
