"""Strong-field ionization amplitudes for a zero-range binding potential.

Saddle-point (quasistatic) amplitudes for tunnel ionization in a
monochromatic, linearly polarized laser field.  The vector potential is

    A(eta) = (c E0 / omega) sin(eta) x_hat,      eta = phase variable,

propagating along z_hat, so the electric field is E(t) = -E0 cos(eta) x_hat
and the electron tunnels out along +x around the field crest at eta = 0.

Two tiers are provided.  The nonrelativistic tier works with the kinetic
momentum q = p + A/c and the contracted action

    S(p, t) = -kappa^2 t / 2 - Integral^t q^2/2 dt',

whose stationary point q(t_s)^2 = -kappa^2 defines the complex ionization
time.  The relativistic tier works in the phase variable with the
field-dressed momentum q_d = p + A/c - k_hat (eps - eps0)/c and

    S(p, eta) = (-kappa^2 eta - Integral^eta q_d^2 deta') / (2 Lambda),

where Lambda = omega (eps/c^2 - p_z/c) and eps0 = c^2 - I_p is the bound
energy.  In the relativistic tier kappa is the bound-state spatial decay
constant, so I_p = c^2 - sqrt(c^4 - kappa^2 c^2) regardless of the
PhysParams ip_mode: with that pairing the saddle condition
q_d^2(eta_s) = -kappa^2 is exactly energy conservation.

The constant matrix-element prefactor of the amplitude is set to 1; every
observable exposed here is a peak position, a ridge shape, or a density
normalized to its maximum.

All quantities are in atomic units.
"""

from __future__ import annotations

import cmath
import csv
import dataclasses
import enum
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from typing import IO, Callable, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.optimize import minimize_scalar

from tunnelion.core import (
    ConvergenceError,
    ParameterError,
    PhysParams,
    RangeError,
    UnsupportedCombinationError,
)
from tunnelion.specfun import ComplexSaddle, find_complex_root
from tunnelion.wkb import ScanEdgeWarning, resolve_workers

__all__ = [
    "SfaTier",
    "ContractedAction",
    "MomentumAmplitude",
    "MomentumMap",
    "saddle_time",
    "momentum_wavefunction",
    "complex_trajectory",
    "backpropagate_to_exit",
    "formation_amplitude",
    "ion_momentum_share",
    "most_probable_momentum",
    "ridge_prediction",
    "momentum_map",
    "dump_map_csv",
    "sfa_ip",
]


class SfaTier(str, enum.Enum):
    """Dynamics tier of the saddle-point amplitude."""

    NONREL = "NonRel"
    RELATIVISTIC = "Relativistic"


def sfa_ip(params: PhysParams, tier: SfaTier) -> float:
    """Ionization potential consistent with kappa for the given tier.

    NonRel: kappa^2/2.  Relativistic: c^2 - sqrt(c^4 - kappa^2 c^2), the
    binding energy whose bound state decays as exp(-kappa r).
    """
    if SfaTier(tier) is SfaTier.RELATIVISTIC:
        c2 = params.c * params.c
        return c2 - math.sqrt(c2 * (c2 - params.kappa * params.kappa))
    return 0.5 * params.kappa * params.kappa


def _as_p3(p: Sequence[float]) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.shape != (3,):
        raise ParameterError(f"p must be a 3-vector, got shape {arr.shape}")
    return arr


def _one_minus_cos(z):
    """1 - cos(z) without cancellation at small |z| (complex-capable)."""
    half_sin = np.sin(np.asarray(z, dtype=complex) / 2.0)
    return 2.0 * half_sin * half_sin


def _x_minus_sin(u):
    """u - sin(u) without cancellation at small |u| (complex-capable).

    The direct difference loses all significant digits for |u| << 1, where
    the value is ~ u^3/6; a nested Taylor series is used there instead.
    """
    u = np.asarray(u, dtype=complex)
    u2 = u * u
    series = np.ones_like(u)
    # term ratios -u^2/((2k+2)(2k+3)) folded from the tail inwards
    for denominator in (342.0, 272.0, 210.0, 156.0, 110.0, 72.0, 42.0, 20.0):
        series = 1.0 - u2 / denominator * series
    series = u * u2 / 6.0 * series
    return np.where(np.abs(u) < 0.9, series, u - np.sin(u))


@dataclasses.dataclass(frozen=True)
class ContractedAction:
    """Closed-form contracted action S for one canonical momentum.

    The evaluator `action` takes the time t (NonRel) or the phase eta
    (Relativistic) as a complex argument; `action_derivative` is the analytic
    derivative -(kappa^2 + q^2)/2 resp. -(kappa^2 + q_d^2)/(2 Lambda), whose
    zero is the ionization saddle.
    """

    p: np.ndarray
    params: PhysParams
    tier: SfaTier

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", _as_p3(self.p))
        object.__setattr__(self, "tier", SfaTier(self.tier))

    @property
    def _s(self) -> float:
        """Momentum amplitude A_max/c = E0/omega of the laser field."""
        return self.params.E0 / self.params.omega

    @property
    def ip(self) -> float:
        return sfa_ip(self.params, self.tier)

    @property
    def epsilon(self) -> float:
        """Free relativistic energy of the canonical momentum."""
        c = self.params.c
        return math.sqrt(c**4 + c * c * float(self.p @ self.p))

    @property
    def lam(self) -> float:
        """Lambda/omega = eps/c^2 - p_z/c (conserved in a plane wave)."""
        c = self.params.c
        return self.epsilon / (c * c) - self.p[2] / c

    @property
    def dressed_offset(self) -> float:
        """Longitudinal dressing shift (eps - eps0)/c of q_d (rel tier)."""
        c = self.params.c
        eps0 = c * c - sfa_ip(self.params, SfaTier.RELATIVISTIC)
        return (self.epsilon - eps0) / c

    def dressed_momentum(self, t: complex) -> np.ndarray:
        """q(t) (NonRel) or q_d(eta) (Relativistic), complex 3-vector.

        The component whose square enters the saddle condition
        q^2 + kappa^2 = 0.
        """
        px, py, pz = self.p
        drive = self._s * np.sin(np.asarray(t, dtype=complex) * self._tscale)
        qx = px + drive
        if self.tier is SfaTier.RELATIVISTIC:
            qz = pz - self.dressed_offset
        else:
            qz = pz
        return np.stack(np.broadcast_arrays(qx, py + 0j, qz + 0j))

    def kinetic_momentum(self, t: complex) -> np.ndarray:
        """Physical kinetic momentum q(t) resp. q(eta), complex 3-vector.

        Relativistically the z component carries the light-pressure term
        p_z + (p_x A + A^2/2c)/(c^2 lam) of the plane-wave (Volkov) motion.
        """
        px, py, pz = self.p
        c = self.params.c
        drive = self._s * np.sin(np.asarray(t, dtype=complex) * self._tscale)
        qx = px + drive
        if self.tier is SfaTier.RELATIVISTIC:
            a_field = c * drive
            qz = pz + (px * a_field + a_field * a_field / (2 * c)) / (
                c * c * self.lam
            )
        else:
            qz = pz + 0j * drive
        return np.stack(np.broadcast_arrays(qx, py + 0j, qz))

    @property
    def _tscale(self) -> float:
        """Factor turning the argument into the field phase (omega or 1)."""
        return self.params.omega if self.tier is SfaTier.NONREL else 1.0

    def action(self, t: complex) -> complex:
        """S(p, t) (NonRel) or S(p, eta) (Relativistic), lower limit at 0."""
        kappa2 = self.params.kappa**2
        px, py, pz = self.p
        s = self._s
        if self.tier is SfaTier.NONREL:
            omega = self.params.omega
            eta = complex(t) * omega
            p2 = px * px + py * py + pz * pz
            drift = (
                p2 * complex(t)
                + 2 * px * s * complex(_one_minus_cos(eta)) / omega
                + s * s * complex(_x_minus_sin(2 * eta)) / (4 * omega)
            )
            return -kappa2 * complex(t) / 2 - drift / 2
        eta = complex(t)
        b = pz - self.dressed_offset
        p2 = px * px + py * py + b * b
        drift = (
            p2 * eta
            + 2 * px * s * complex(_one_minus_cos(eta))
            + s * s * complex(_x_minus_sin(2 * eta)) / 4
        )
        lam_full = self.params.omega * self.lam
        return (-kappa2 * eta - drift) / (2 * lam_full)

    def action_derivative(self, t: complex) -> complex:
        """Analytic dS/dt resp. dS/deta; zero at the ionization saddle."""
        kappa2 = self.params.kappa**2
        q = self.dressed_momentum(t)
        q2 = complex(q[0] * q[0] + q[1] * q[1] + q[2] * q[2])
        if self.tier is SfaTier.NONREL:
            return -(kappa2 + q2) / 2
        return -(kappa2 + q2) / (2 * self.params.omega * self.lam)


@dataclasses.dataclass(frozen=True)
class MomentumAmplitude:
    """Ionization amplitude for one final canonical momentum."""

    p: np.ndarray
    amplitude: complex
    tier: SfaTier

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", _as_p3(self.p))
        object.__setattr__(self, "tier", SfaTier(self.tier))


def _transverse_square(act: ContractedAction) -> float:
    """q_perp^2 entering the saddle: p_y^2 + p_z^2 resp. p_y^2 + q_dz^2."""
    px, py, pz = act.p
    if act.tier is SfaTier.RELATIVISTIC:
        b = pz - act.dressed_offset
        return py * py + b * b
    return py * py + pz * pz


def saddle_time(
    p: Sequence[float], params: PhysParams, tier: SfaTier
) -> ComplexSaddle:
    """Complex ionization time t_s (NonRel) or phase eta_s (Relativistic).

    Solves q^2(t_s) = -kappa^2 on the branch q_x(t_s) = +i sqrt(...) with
    Im(t_s) > 0, seeding Newton iteration with the closed-form arcsine root
    of the sinusoidal drive.  The returned residual is |q^2 + kappa^2|.
    """
    act = ContractedAction(p, params, tier)
    kappa2 = params.kappa**2
    s = act._s
    root_transverse = math.sqrt(_transverse_square(act) + kappa2)
    guess = cmath.asin((1j * root_transverse - act.p[0]) / s) / act._tscale

    def residual(t: complex) -> complex:
        q = act.dressed_momentum(t)
        return complex(q[0] * q[0] + q[1] * q[1] + q[2] * q[2]) + kappa2

    saddle = find_complex_root(residual, guess, tol=1e-10)
    if saddle.root.imag <= 0:
        raise ConvergenceError(
            f"saddle_time: branch-selection failure, root {saddle.root:.6g} "
            "has non-positive imaginary part"
        )
    return saddle


def _field_at_saddle(params: PhysParams, p_x: float) -> float:
    """|E(t_s)| = E0 sqrt(1 - (p_x omega/E0)^2); RangeError outside."""
    ratio = p_x * params.omega / params.E0
    if abs(ratio) >= 1.0:
        raise RangeError(
            f"|p_x|={abs(p_x):.6g} >= E0/omega={params.E0 / params.omega:.6g}: "
            "field at the saddle vanishes"
        )
    return params.E0 * math.sqrt(1.0 - ratio * ratio)


def momentum_wavefunction(
    p: Sequence[float], params: PhysParams, tier: SfaTier
) -> MomentumAmplitude:
    """Saddle-point momentum-space amplitude of the ionized electron.

    NonRel:       -i sqrt(2 pi / (|E| sqrt(p_perp^2 + kappa^2)))
                     * exp(-(p_perp^2 + kappa^2)^(3/2) / (3 |E|))
    Relativistic: the same with p_perp -> q_d_perp, an extra factor
                  Lambda/omega inside the root, and 1/(Lambda/omega) in the
                  exponent, all evaluated at |E| = |E(t_s)|.

    The constant matrix-element prefactor is 1 by convention.
    """
    act = ContractedAction(p, params, tier)
    saddle_time(p, params, tier)  # validates branch selection
    field = _field_at_saddle(params, act.p[0])
    perp2 = _transverse_square(act)
    kappa2 = params.kappa**2
    root = math.sqrt(perp2 + kappa2)
    if act.tier is SfaTier.RELATIVISTIC:
        exponent = root**3 / (3.0 * act.lam * field)
        prefactor = math.sqrt(2.0 * math.pi * act.lam / (field * root))
    else:
        exponent = root**3 / (3.0 * field)
        prefactor = math.sqrt(2.0 * math.pi / (field * root))
    amplitude = -1j * prefactor * math.exp(-exponent)
    return MomentumAmplitude(p=act.p, amplitude=amplitude, tier=act.tier)


# --- trajectories -----------------------------------------------------------


def complex_trajectory(
    p: Sequence[float], params: PhysParams, tier: SfaTier
) -> tuple[Callable[[complex], np.ndarray], Callable[[complex], np.ndarray]]:
    """(t -> x(t), t -> q(t)) along the contour t_s -> Re(t_s) -> infinity.

    The position is the momentum gradient of the contracted action,
    x(t) = Integral_{t_s}^t q dt' (NonRel) resp.
    x(eta) = Integral_{eta_s}^eta q deta' / Lambda (Relativistic), so the
    trajectory enters the barrier at x(t_s) = 0.  Both callables accept
    complex scalars or arrays; the intended contour is the vertical segment
    from t_s to Re(t_s) followed by the real axis.
    """
    act = ContractedAction(p, params, tier)
    ts = saddle_time(p, params, tier).root
    px, py, pz = act.p
    s = act._s
    c = params.c

    if act.tier is SfaTier.NONREL:
        omega = params.omega

        def position(t: complex) -> np.ndarray:
            t = np.asarray(t, dtype=complex)
            # cos(a) - cos(b) = -2 sin((a+b)/2) sin((a-b)/2), stable near ts
            dcos = -2.0 * np.sin(omega * (ts + t) / 2) * np.sin(omega * (ts - t) / 2)
            xx = px * (t - ts) + s / omega * dcos
            return np.stack(
                np.broadcast_arrays(xx, py * (t - ts), pz * (t - ts))
            )

    else:
        lam = act.lam
        lam_full = params.omega * lam

        def position(eta: complex) -> np.ndarray:
            eta = np.asarray(eta, dtype=complex)
            u = eta - ts
            dcos = -2.0 * np.sin((ts + eta) / 2) * np.sin((ts - eta) / 2)
            # (u/2 - (sin 2eta - sin 2ts)/4) recast without cancellation
            half_area = _x_minus_sin(u) / 2 + np.sin(u) * np.sin((eta + ts) / 2) ** 2
            ix = px * u + s * dcos
            iy = py * u
            iz = pz * u + (px * s * dcos + s * s / 2 * half_area) / (c * lam)
            return np.stack(np.broadcast_arrays(ix, iy, iz)) / lam_full

    return position, act.kinetic_momentum


def backpropagate_to_exit(
    p_final: Sequence[float], params: PhysParams
) -> np.ndarray:
    """Map a final (detector) momentum to the tunnel-exit momentum label.

    Evaluating the final-state amplitude at the returned p' gives the
    momentum distribution at the tunnel exit time t_e = Re(t_s):

        p' = (-A_x(t_e)/c, p_y, p_z + A_x(t_e)^2 omega / (2 c^3 Lambda)).

    Relativistic tier only (the shift is a light-pressure effect).
    """
    act = ContractedAction(p_final, params, SfaTier.RELATIVISTIC)
    eta_exit = saddle_time(p_final, params, SfaTier.RELATIVISTIC).root.real
    a_over_c = act._s * math.sin(eta_exit)
    return np.array(
        [
            -a_over_c,
            act.p[1],
            act.p[2] + a_over_c * a_over_c / (2.0 * params.c * act.lam),
        ]
    )


# --- peak structure of the relativistic distribution ------------------------


def _exponent_only(params: PhysParams, p_x: float, p_z: float) -> float:
    """Relativistic tunneling exponent W(p_x, 0, p_z) without prefactor."""
    act = ContractedAction((p_x, 0.0, p_z), params, SfaTier.RELATIVISTIC)
    root = math.sqrt(_transverse_square(act) + params.kappa**2)
    return root**3 / (3.0 * act.lam * _field_at_saddle(params, p_x))


def most_probable_momentum(params: PhysParams, p_x: float = 0.0) -> float:
    """Exponent-level argmax over p_z of the relativistic distribution.

    The field strength cancels from the argmax at fixed p_x, so this is the
    laser-independent peak the closed-form `ridge_prediction` approximates.
    """
    kappa = params.kappa
    result = minimize_scalar(
        lambda pz: _exponent_only(params, p_x, pz),
        bounds=(-0.25 * kappa, 0.75 * kappa),
        method="bounded",
        options={"xatol": 1e-12 * kappa},
    )
    if not result.success:
        raise ConvergenceError(
            f"most_probable_momentum: minimizer failed at p_x={p_x:.6g}"
        )
    return float(result.x)


def ridge_prediction(params: PhysParams, p_x: float = 0.0) -> float:
    """Closed-form ridge p_z(p_x) of the relativistic distribution.

    I_p/(3c) (1 + I_p/(18 c^2)) + p_x^2/(2c) (1 + I_p/(3c^2)
    + 2 I_p^2/(27 c^4)), with the kappa-consistent relativistic I_p.
    """
    c = params.c
    ip = sfa_ip(params, SfaTier.RELATIVISTIC)
    delta = ip / (c * c)
    return ip / (3 * c) * (1 + delta / 18) + p_x * p_x / (2 * c) * (
        1 + delta / 3 + 2 * delta * delta / 27
    )


def ion_momentum_share(
    params: PhysParams, tier: SfaTier
) -> tuple[float, float]:
    """(electron, ion) momentum along the laser propagation direction.

    At the ionization threshold n*omega = I_p the absorbed photon momentum
    is I_p/c.  NonRel: the peak electron takes none, the ion all of it.
    Relativistic: the electron keeps I_p/(3c), the ion 2 I_p/(3c).  The sum
    is I_p/c in both tiers (with the tier-consistent I_p).
    """
    tier = SfaTier(tier)
    ip = sfa_ip(params, tier)
    if tier is SfaTier.RELATIVISTIC:
        electron = ip / (3.0 * params.c)
        return electron, 2.0 * electron
    return 0.0, ip / params.c


# --- formation of the ionized wave packet -----------------------------------


def formation_amplitude(
    p_x: float, params: PhysParams, t_grid: Sequence[float]
) -> np.ndarray:
    """Ionization amplitude of the momentum component p_x up to each time.

    Cumulative time integral of exp(-i S(t, t')) times the bound-continuum
    coupling E(t') q_x(t') / (q(t')^2 + kappa^2)^2 (zero-range potential,
    p_y = p_z = 0, constant factor dropped).  |amplitude| starts at 0,
    builds up on the Keldysh time scale around the field crest, and
    stabilizes at the ionization amplitude.

    The grid must be strictly increasing and dense enough to resolve the
    action phase (< 0.7 rad per step), else ConvergenceError.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 16:
        raise ParameterError("t_grid must be a 1-D array with >= 16 samples")
    dt = np.diff(t)
    if not np.all(dt > 0):
        raise ParameterError("t_grid must be strictly increasing")

    kappa2 = params.kappa**2
    omega = params.omega
    s = params.E0 / omega
    q_x = p_x + s * np.sin(omega * t)
    q2 = q_x * q_x
    rate = (kappa2 + q2) / 2.0
    step_phase = np.maximum(rate[:-1], rate[1:]) * dt
    if np.max(step_phase) > 0.7:
        raise ConvergenceError(
            f"formation_amplitude: t_grid too coarse, max phase step "
            f"{np.max(step_phase):.3g} rad > 0.7"
        )

    # S(t, t') = -kappa^2 t'/2 + G(t) - G(t'), G = Integral_0^t q^2/2 dt'
    g = 0.5 * (
        p_x * p_x * t
        + 2 * p_x * s * _one_minus_cos(omega * t).real / omega
        + s * s * _x_minus_sin(2 * omega * t).real / (4 * omega)
    )
    field = -params.E0 * np.cos(omega * t)
    coupling = field * q_x / (q2 + kappa2) ** 2
    integrand = coupling * np.exp(1j * (kappa2 * t / 2 + g))
    cumulative = cumulative_trapezoid(integrand, t, initial=0.0)
    return -1j * np.exp(-1j * g) * cumulative


# --- 2-D momentum maps -------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class MomentumMap:
    """Normalized density |psi|^2 / max over a (p_x, p_z) grid at p_y = 0."""

    p_x: np.ndarray
    p_z: np.ndarray
    density: np.ndarray
    where: str
    tier: SfaTier

    def peak_p_z(self) -> tuple[float, float]:
        """(p_z, density) of the map peak, quadratically interpolated in p_z.

        Warns ScanEdgeWarning and returns the raw cell when the maximum sits
        on the p_z boundary of the grid.
        """
        i, j = np.unravel_index(int(np.argmax(self.density)), self.density.shape)
        if j == 0 or j == self.p_z.size - 1:
            warnings.warn(
                "momentum-map maximum on the p_z grid edge; peak not "
                "interpolated",
                ScanEdgeWarning,
                stacklevel=2,
            )
            return float(self.p_z[j]), float(self.density[i, j])
        x0, x1, x2 = self.p_z[j - 1 : j + 2]
        y0, y1, y2 = self.density[i, j - 1 : j + 2]
        d01 = (y1 - y0) / (x1 - x0)
        d12 = (y2 - y1) / (x2 - x1)
        curvature = (d12 - d01) / (x2 - x0)
        if curvature >= 0:
            return float(x1), float(y1)
        vertex = 0.5 * (x0 + x1 - d01 / curvature)
        value = y0 + d01 * (vertex - x0) + curvature * (vertex - x0) * (vertex - x1)
        return float(vertex), float(value)


def _log_density_columns(
    params: PhysParams,
    tier: SfaTier,
    p_x: np.ndarray,
    p_z: np.ndarray,
    where: str,
) -> np.ndarray:
    """Unnormalized log |psi|^2 for the p_x columns, vectorized over p_z."""
    c = params.c
    kappa2 = params.kappa**2
    s = params.E0 / params.omega
    eps0 = c * c - sfa_ip(params, SfaTier.RELATIVISTIC)
    out = np.empty((p_x.size, p_z.size))
    for i, px in enumerate(p_x):
        pz = p_z
        if where == "exit":
            eps = np.sqrt(c**4 + c * c * (px * px + pz * pz))
            lam = eps / (c * c) - pz / c
            b = pz - (eps - eps0) / c
            eta_exit = np.arcsin(
                (1j * np.sqrt(kappa2 + b * b) - px) / s + 0j
            ).real
            a_over_c = s * np.sin(eta_exit)
            px_col = -a_over_c
            pz = pz + a_over_c * a_over_c / (2.0 * c * lam)
        else:
            px_col = np.full_like(pz, px)
        field = params.E0 * np.sqrt(1.0 - (px_col * params.omega / params.E0) ** 2)
        if tier is SfaTier.RELATIVISTIC:
            eps = np.sqrt(c**4 + c * c * (px_col * px_col + pz * pz))
            lam = eps / (c * c) - pz / c
            perp2 = (pz - (eps - eps0) / c) ** 2
            root = np.sqrt(perp2 + kappa2)
            out[i] = np.log(2 * np.pi * lam / (field * root)) - 2 * root**3 / (
                3.0 * lam * field
            )
        else:
            root = np.sqrt(pz * pz + kappa2)
            out[i] = np.log(2 * np.pi / (field * root)) - 2 * root**3 / (3.0 * field)
    return out


def momentum_map(
    params: PhysParams,
    p_x_values: Sequence[float],
    p_z_values: Sequence[float],
    tier: SfaTier = SfaTier.RELATIVISTIC,
    where: str = "detector",
    workers: int | None = None,
) -> MomentumMap:
    """Normalized ionization density on a (p_x, p_z) grid at p_y = 0.

    where="detector" evaluates the final momentum distribution;
    where="exit" back-propagates each final momentum to the tunnel exit and
    evaluates the distribution there (relativistic tier only).  Densities
    are computed in log space and normalized to a maximum of 1, so weak
    fields with huge tunneling exponents stay representable.
    """
    tier = SfaTier(tier)
    if where not in ("detector", "exit"):
        raise ParameterError(f"where must be 'detector' or 'exit', got {where!r}")
    if where == "exit" and tier is not SfaTier.RELATIVISTIC:
        raise UnsupportedCombinationError(
            "exit maps are defined for the relativistic tier only"
        )
    p_x = np.asarray(p_x_values, dtype=float)
    p_z = np.asarray(p_z_values, dtype=float)
    for name, axis in (("p_x_values", p_x), ("p_z_values", p_z)):
        if axis.ndim != 1 or axis.size < 3:
            raise ParameterError(f"{name} must be 1-D with >= 3 samples")
        if not np.all(np.diff(axis) > 0):
            raise ParameterError(f"{name} must be strictly increasing")
    s = params.E0 / params.omega
    if np.max(np.abs(p_x)) >= s:
        raise RangeError(
            f"p_x grid reaches |p_x| >= E0/omega = {s:.6g}; the quasistatic "
            "amplitude is undefined there"
        )

    n_workers = resolve_workers(workers)
    if n_workers == 1 or p_x.size < 2 * n_workers:
        log_density = _log_density_columns(params, tier, p_x, p_z, where)
    else:
        chunks = np.array_split(np.arange(p_x.size), n_workers)
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            parts = list(
                pool.map(
                    lambda idx: _log_density_columns(
                        params, tier, p_x[idx], p_z, where
                    ),
                    chunks,
                )
            )
        log_density = np.concatenate(parts, axis=0)

    log_density -= np.max(log_density)
    return MomentumMap(
        p_x=p_x, p_z=p_z, density=np.exp(log_density), where=where, tier=tier
    )


def dump_map_csv(momentum_map_: MomentumMap, fh: IO[str]) -> None:
    """Write a momentum map as CSV rows p_x, p_z, density (row-major)."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["p_x", "p_z", "density"])
    for i, px in enumerate(momentum_map_.p_x):
        for j, pz in enumerate(momentum_map_.p_z):
            writer.writerow(
                [repr(float(px)), repr(float(pz)), repr(float(momentum_map_.density[i, j]))]
            )
