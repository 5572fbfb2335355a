"""Parameter model, unit conventions, and physics-tier enumeration.

Atomic units are used throughout the package: hbar = m_e = |e| = 1 and the
speed of light c ~ 137.036 enters as an explicit parameter so that
nonrelativistic limits can be probed by scaling it.

Geometry convention: the quasistatic electric field points so that the
electron tunnels toward +x; the laser propagates along +z, so the magnetic
field adds the transverse vector potential A_z(x) = E0*x inside the field
region and the kinetic momentum q_z(x) = p_z + A_z(x)/c picks up a positive
kick E0*(x_e - x_0)/c across the barrier.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from pathlib import Path

C_DEFAULT = 137.035999
"""Speed of light in atomic units."""


class TunnelionError(Exception):
    """Base class for all package errors."""


class ParameterError(TunnelionError, ValueError):
    """Invalid physical parameters or configuration (CLI exit code 2)."""


class ConvergenceError(TunnelionError, RuntimeError):
    """A numerical procedure failed to converge (CLI exit code 3)."""


class RangeError(TunnelionError, ValueError):
    """Special-function argument outside the supported range (CLI exit 3)."""


class NoBarrierError(TunnelionError, ValueError):
    """Energy above the barrier top: no classically forbidden region
    (over-the-barrier regime; CLI exit code 4)."""


class UnsupportedCombinationError(TunnelionError, ValueError):
    """Barrier model / physics tier combination not supported (CLI exit 4)."""


class IpMode(str, enum.Enum):
    """How the ionization potential derives from the momentum scale kappa."""

    NONRELATIVISTIC = "nonrelativistic"  # I_p = kappa^2 / 2
    RELATIVISTIC = "relativistic"        # I_p = c^2 - sqrt(c^4 - kappa^2 c^2)


class PhysicsTier(str, enum.Enum):
    """Hierarchy of relativistic corrections, ordered by inclusion.

    NonRel: Schroedinger dynamics, no magnetic field.
    MagneticDipole: adds the transverse vector potential A_z(x) = E0*x
        (laser magnetic-field kick) to the nonrelativistic dynamics.
    MagneticDipolePlusKinetic: additionally applies the leading kinetic-
        energy correction -p^4/(8 c^2) perturbatively.
    FullyRelativistic: relativistic dispersion for the tunneling momentum.
    KleinGordon: spin-0 relativistic wave equation for steady states.
    """

    NONREL = "NonRel"
    MAGNETIC_DIPOLE = "MagneticDipole"
    MAGNETIC_DIPOLE_PLUS_KINETIC = "MagneticDipolePlusKinetic"
    FULLY_RELATIVISTIC = "FullyRelativistic"
    KLEIN_GORDON = "KleinGordon"


@dataclasses.dataclass(frozen=True)
class PhysParams:
    """Atomic and laser parameters in atomic units.

    kappa: atomic momentum scale; equals sqrt(2 I_p) in the nonrelativistic
        convention and the bound-state spatial decay constant in both.
    E0: peak electric field.
    omega: laser angular frequency.
    c: speed of light (parameter, so c-scaling limits are testable).
    ip_mode: how I_p derives from kappa (see IpMode).
    """

    kappa: float
    E0: float
    omega: float
    c: float = C_DEFAULT
    ip_mode: IpMode = IpMode.NONRELATIVISTIC

    def __post_init__(self) -> None:
        for name in ("kappa", "E0", "omega", "c"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be finite and > 0, got {value!r}")
        object.__setattr__(self, "ip_mode", IpMode(self.ip_mode))
        if self.ip_mode is IpMode.RELATIVISTIC and self.kappa >= self.c:
            raise ParameterError(
                f"kappa={self.kappa} >= c={self.c}: relativistic I_p undefined"
            )

    @property
    def ip(self) -> float:
        """Ionization potential I_p per ip_mode."""
        if self.ip_mode is IpMode.RELATIVISTIC:
            c2 = self.c * self.c
            return c2 - math.sqrt(c2 * c2 - self.kappa * self.kappa * c2)
        return 0.5 * self.kappa * self.kappa

    @property
    def ip_nonrel(self) -> float:
        """Nonrelativistic ionization potential kappa^2/2 (defines E_a)."""
        return 0.5 * self.kappa * self.kappa

    @property
    def ea(self) -> float:
        """Atomic field strength E_a = (2 I_p^nr)^(3/2) = kappa^3."""
        return self.kappa**3

    def with_c(self, c: float) -> "PhysParams":
        """Copy with a rescaled speed of light (for c-scaling limit tests)."""
        return dataclasses.replace(self, c=c)


@dataclasses.dataclass(frozen=True)
class DerivedParams:
    """Derived regime numbers for a PhysParams instance.

    ip: ionization potential per ip_mode.
    ea: atomic field strength kappa^3 (always from the nonrelativistic I_p).
    gamma: Keldysh parameter omega*sqrt(2 I_p)/E0.
    tau_k: Keldysh time gamma/omega = kappa/E0.
    xi: relativistic field-strength parameter E0/(c*omega).
    barrier_suppression: E0/E_a.
    tunneling_regime: True when gamma < 1 (quasistatic tunneling).
    """

    ip: float
    ea: float
    gamma: float
    tau_k: float
    xi: float
    barrier_suppression: float
    tunneling_regime: bool


def derive_params(p: PhysParams) -> DerivedParams:
    """Compute all derived regime numbers from validated parameters.

    The Keldysh parameter uses sqrt(2 I_p) with the nonrelativistic I_p
    (= kappa), so tau_k * E0 == kappa holds as an exact identity.
    """
    gamma = p.omega * p.kappa / p.E0
    derived = DerivedParams(
        ip=p.ip,
        ea=p.ea,
        gamma=gamma,
        tau_k=p.kappa / p.E0,
        xi=p.E0 / (p.c * p.omega),
        barrier_suppression=p.E0 / p.ea,
        tunneling_regime=gamma < 1.0,
    )
    for name in ("ip", "ea", "gamma", "tau_k", "xi", "barrier_suppression"):
        value = getattr(derived, name)
        if not (math.isfinite(value) and value > 0):
            raise ParameterError(f"derived {name} not finite/positive: {value!r}")
    return derived


# --- flat key=value configuration -----------------------------------------

#: Keys understood by params_from_config; the CLI rejects anything else that
#: is not a barrier key.
PARAM_KEYS = ("kappa", "c", "E0_over_Ea", "omega", "ip_mode", "tier")

_DEFAULT_CONFIG = {
    "kappa": "90.0",
    "c": repr(C_DEFAULT),
    "E0_over_Ea": str(1.0 / 30.0),
    "omega": "0.05",
    "ip_mode": "nonrelativistic",
    "tier": "NonRel",
}


def load_config(path: str | Path) -> dict[str, str]:
    """Parse a flat key=value config file.

    Blank lines and lines starting with '#' are ignored; values keep their
    raw string form (typing happens at the consumer). Duplicate keys are an
    error, as are lines without '='.
    """
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key in out:
            raise ParameterError(f"{path}:{lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def params_from_config(cfg: dict[str, str]) -> tuple[PhysParams, PhysicsTier]:
    """Build (PhysParams, PhysicsTier) from a flat config dict.

    The field strength enters as E0_over_Ea (relative to E_a = kappa^3);
    unspecified keys fall back to the documented defaults.
    """
    merged = dict(_DEFAULT_CONFIG)
    for key in PARAM_KEYS:
        if key in cfg:
            merged[key] = cfg[key]
    try:
        kappa = float(merged["kappa"])
        c = float(merged["c"])
        e0_over_ea = float(merged["E0_over_Ea"])
        omega = float(merged["omega"])
    except ValueError as exc:
        raise ParameterError(f"non-numeric config value: {exc}") from exc
    try:
        ip_mode = IpMode(merged["ip_mode"])
    except ValueError:
        raise ParameterError(
            f"ip_mode must be one of {[m.value for m in IpMode]}, "
            f"got {merged['ip_mode']!r}"
        ) from None
    try:
        tier = PhysicsTier(merged["tier"])
    except ValueError:
        raise ParameterError(
            f"tier must be one of {[t.value for t in PhysicsTier]}, "
            f"got {merged['tier']!r}"
        ) from None
    if e0_over_ea <= 0:
        raise ParameterError(f"E0_over_Ea must be > 0, got {e0_over_ea}")
    params = PhysParams(
        kappa=kappa, E0=e0_over_ea * kappa**3, omega=omega, c=c, ip_mode=ip_mode
    )
    return params, tier
