"""Quantum ratio Q = R_q/L_0 and desk-scale simulations of the mechanisms behind it."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    CONSTANTS,
    Catalog,
    Classification,
    Particle,
    QuantumRatio,
    Regime,
    Thresholds,
    classify,
    de_broglie_wavelength,
    default_catalog,
    load_catalog,
    nucleus_size,
    quantum_ratio,
)

__all__ = [
    "CONSTANTS",
    "Catalog",
    "Classification",
    "Particle",
    "QuantumRatio",
    "Regime",
    "Thresholds",
    "classify",
    "de_broglie_wavelength",
    "default_catalog",
    "load_catalog",
    "nucleus_size",
    "quantum_ratio",
]
