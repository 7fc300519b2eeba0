from ._core import (
    BasisError,
    ConfigError,
    FockSpace,
    LatticeError,
    LatticeSpec,
    ThetaError,
    __version__,
    basis_size,
    config_hash,
    deformed_commutator,
    fit_order,
    operator,
    parse_config,
    rieffel_product,
    run_suites,
    translate,
    warp,
)

__all__ = [
    "BasisError",
    "ConfigError",
    "FockSpace",
    "LatticeError",
    "LatticeSpec",
    "ThetaError",
    "__version__",
    "basis_size",
    "config_hash",
    "deformed_commutator",
    "fit_order",
    "operator",
    "parse_config",
    "rieffel_product",
    "run_suites",
    "translate",
    "warp",
]
