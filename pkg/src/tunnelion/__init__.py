"""Tunneling ionization toolkit: gauge-invariant barriers, WKB rates,
strong-field saddle-point amplitudes, Wigner time delays, and a brute-force
wave-packet oracle, in atomic units."""

from tunnelion.core import (
    C_DEFAULT,
    ConvergenceError,
    DerivedParams,
    IpMode,
    NoBarrierError,
    ParameterError,
    PhysParams,
    PhysicsTier,
    RangeError,
    TunnelionError,
    UnsupportedCombinationError,
    derive_params,
)

__all__ = [
    "C_DEFAULT",
    "ConvergenceError",
    "DerivedParams",
    "IpMode",
    "NoBarrierError",
    "ParameterError",
    "PhysParams",
    "PhysicsTier",
    "RangeError",
    "TunnelionError",
    "UnsupportedCombinationError",
    "derive_params",
]

__version__ = "0.1.0"
