"""Steady states, Wigner trajectories and time delays for model barriers
and tunnel-ionization.

The module turns stationary solutions of the one-dimensional barrier
problem into time-domain observables:

* ``solve_steady`` builds the steady state u(x) together with the
  unwrapped phase of its outgoing channel, through two independent
  backends: closed forms (Airy and parabolic-cylinder functions from
  ``specfun``) and direct backward integration of the stationary
  equation from an outgoing anchor at large x.  Both must agree.
* ``wigner_trajectory`` and ``wigner_drift`` differentiate that phase
  with respect to energy and transverse canonical momentum, yielding
  the arrival-time profile tau(x) and the transverse displacement z(x)
  of the transmitted peak.
* ``classical_trajectory`` provides the Newtonian reference that spends
  zero time inside the classically forbidden region.
* ``classify_regime``, ``barrier_approximant``, ``tunnelion_delay`` and
  ``delay_vs_ip_scan`` implement the tunnel-ionization pipeline: the
  tunneling-regime classifier, the local barrier approximant at the
  exit point, the matching of quantum and classical trajectories, and
  the far-field extrapolation of the time delay.

Conventions.  The electron escapes toward +x.  Energies are total
energies in atomic units, relative to the rest energy for the
relativistic tier (a bound state sits at -I_p for every tier).  The
phase convention follows exp(-i*eps*t): an outgoing wave has phase
increasing with x.  ``SteadyState.phi`` is the phase of the outgoing
channel in each region -- the incident plane wave before the barrier,
the full interior combination under it, the transmitted wave after --
because differentiating the total phase in front of a strongly
reflecting barrier produces standing-wave interference fringes that do
not belong to the transmitted peak.
"""

from __future__ import annotations

import cmath
import csv
import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from typing import IO, Callable, NamedTuple, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, minimize_scalar

from .barrier import (
    BarrierModel,
    Coulomb1D,
    Linear,
    Parabolic,
    ParabolicCoord,
    Square,
    ZeroRangeTriangular,
    p_x_squared,
    turning_points,
)
from .core import (
    C_DEFAULT,
    ConvergenceError,
    NoBarrierError,
    ParameterError,
    PhysicsTier,
    PhysParams,
    RangeError,
    UnsupportedCombinationError,
)
from .specfun import (
    AIRY_RADIUS,
    PCF_A_RADIUS,
    PCF_Z_RADIUS,
    airy_all,
    pcf_d,
    pcf_d_ray,
)
from .wkb import resolve_workers

__all__ = [
    "SteadyState",
    "Trajectory",
    "RegimeReport",
    "BarrierApproximant",
    "ModelDelay",
    "TunnelingDelay",
    "DELTA_EPSILON_FACTOR",
    "FAR_FACTOR_DEFAULT",
    "GRID_POINTS_DEFAULT",
    "PHASE_STEP_LIMIT",
    "default_grid",
    "solve_steady",
    "wigner_trajectory",
    "wigner_drift",
    "classical_trajectory",
    "model_delay",
    "barrier_approximant",
    "classify_regime",
    "tunnelion_delay",
    "delay_vs_ip_scan",
    "dump_delay_csv",
]


DELTA_EPSILON_FACTOR = 1e-4
"""Default finite-difference step, as a fraction of |eps0| (or of the
characteristic momentum for drift derivatives)."""

FAR_FACTOR_DEFAULT = 20.0
"""Default far-field extent in units of the exit coordinate; delays are
extrapolated from the window [far/2, far] * x_exit."""

GRID_POINTS_DEFAULT = 3000

PHASE_STEP_LIMIT = math.pi / 4.0
"""Maximum tolerated per-step jump of the unwrapped channel phase; the
evaluation grid is refined (up to 81x) until the steps fall below it."""

_REFINEMENTS = (1, 3, 9, 27, 81)
_CONVERGENCE_LIMIT = 5e-3      # halving the step must move tau by < 0.5%
_ODE_RTOL = 1e-11
_ODE_ATOL = 1e-250             # pure relative control over the barrier's huge dynamic range
_ANCHOR_MARGIN = 0.25          # outgoing anchor sits 25% beyond the grid end
_DEEP_LIMIT = 0.5              # classifier thresholds on the scaled field value
_OVER_LIMIT = 1.5
_UNIFORMITY_RTOL = 1e-9

_PROVENANCES = ("wigner", "classical", "packet-peak")

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)

_STEADY_TIERS = (
    PhysicsTier.NONREL,
    PhysicsTier.MAGNETIC_DIPOLE,
    PhysicsTier.KLEIN_GORDON,
)


# ---------------------------------------------------------------------------
# result types
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class SteadyState:
    """Stationary solution of the barrier problem on a grid.

    u is the full complex field (both interior components retained); du
    its spatial derivative; phi the unwrapped outgoing-channel phase.
    matching_coeffs holds {R, T, C1, C2} where the decomposition exists
    (None where it does not: outgoing-only solutions carry no incident
    or reflected component).  meta records backend, geometry, region
    boundaries and channel wave numbers.
    """

    x: np.ndarray
    u: np.ndarray
    du: np.ndarray
    phi: np.ndarray
    epsilon: float
    p_z: float
    tier: PhysicsTier
    matching_coeffs: dict
    meta: dict = dataclasses.field(default_factory=dict)


@dataclasses.dataclass(frozen=True)
class Trajectory:
    """Samples (x, tau) and optionally (x, z) of a trajectory.

    provenance is one of {"wigner", "classical", "packet-peak"}.  Either
    tau or z may be absent (None) but not both.
    """

    x: np.ndarray
    tau: np.ndarray | None
    z: np.ndarray | None = None
    provenance: str = "wigner"
    meta: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim != 1 or x.size < 2:
            raise ParameterError("trajectory needs a 1-D grid of >= 2 points")
        object.__setattr__(self, "x", x)
        if self.provenance not in _PROVENANCES:
            raise ParameterError(
                f"provenance must be one of {_PROVENANCES}, got {self.provenance!r}"
            )
        if self.tau is None and self.z is None:
            raise ParameterError("trajectory needs tau samples or z samples")
        for name in ("tau", "z"):
            arr = getattr(self, name)
            if arr is None:
                continue
            arr = np.asarray(arr, dtype=float)
            if arr.shape != x.shape:
                raise ParameterError(f"{name} must match the grid shape {x.shape}")
            object.__setattr__(self, name, arr)


@dataclasses.dataclass(frozen=True)
class RegimeReport:
    """Tunneling-regime classification at the barrier exit.

    criterion_value is the direct curvature-to-slope measure
    |V''(x_e)| / |V'(x_e)|^(4/3); scaled_field_value is its closed-form
    dimensionless equivalent for the shape at hand ((16 E0/E_a)^(5/3)
    for the Coulomb escape barrier, (9 E0/E_a)^(5/3) for the
    parabolic-coordinate potential -- whose over-the-barrier border
    therefore sits at the value 1 -- and (E0/E_a)^(2/3) for the
    zero-range triangular barrier, where it estimates delta-x/x_e; for
    other smooth shapes it falls back to criterion_value).
    classification applies deep < 0.5 <= near-threshold < 1.5 <=
    over-barrier to the scaled value; a barrier whose top has dropped
    to the state's energy is over-barrier regardless.
    """

    criterion_value: float
    scaled_field_value: float
    classification: str
    x_entry: float
    x_exit: float


@dataclasses.dataclass(frozen=True)
class BarrierApproximant:
    """Local model of the (effective) barrier used by the tunneling
    pipeline: the linear or quadratic expansion of the effective
    potential about the exit point, or the exact potential itself.

    v_eff maps x to the effective potential (binding potential plus the
    transverse kinetic term q_z^2/2 for the magnetic-dipole tier, with
    p_z frozen); v1 and v2 are its first and second derivatives at
    x_exit.  The expansion is built at epsilon_built and held fixed
    when a family of energies is solved around it, so that energy
    derivatives differentiate the wave's phase and not the potential.
    """

    kind: str                   # "linear" | "quadratic" | "exact"
    x_entry: float
    x_exit: float
    epsilon_built: float
    p_z: float
    tier: PhysicsTier
    v_eff: Callable
    v1: float
    v2: float

    def __post_init__(self):
        if self.kind not in ("linear", "quadratic", "exact"):
            raise ParameterError(f"unknown approximant kind {self.kind!r}")


class TunnelingDelay(NamedTuple):
    """Tunnel-ionization delay result: trajectory carries tau_TI(x)
    (with the classical reference and diagnostics in its meta), tau_w
    is the far-field Wigner time delay."""

    trajectory: Trajectory
    tau_w: float


@dataclasses.dataclass(frozen=True)
class ModelDelay:
    """Wigner-vs-classical comparison for a model barrier: the two
    trajectories on a common grid, the far-field time delay (intercept
    of tau_wigner - tau_classical against 1/x), and, when the drift was
    sampled, the far-field difference of the transverse displacements."""

    wigner: Trajectory
    classical: Trajectory
    far_delay: float
    far_drift_difference: float | None


# ---------------------------------------------------------------------------
# small utilities
# ---------------------------------------------------------------------------


def _map_parallel(fn, items, workers):
    workers = resolve_workers(workers)
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _subdivide(x: np.ndarray, m: int) -> np.ndarray:
    """Insert m-1 equidistant points per interval; fine[::m] == x."""
    if m == 1:
        return x
    offsets = np.arange(m) / m
    fine = (x[:-1, None] + np.diff(x)[:, None] * offsets).reshape(-1)
    return np.append(fine, x[-1])


def _validate_grid(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 16:
        raise ParameterError("grid must be a 1-D array of >= 16 points")
    if not np.all(np.isfinite(x)) or not np.all(np.diff(x) > 0):
        raise ParameterError("grid must be finite and strictly increasing")
    return x


def _far_intercept(x: np.ndarray, values: np.ndarray, lo: float, hi: float) -> float:
    """Intercept of a fit a + b/x over the window [lo, hi]."""
    mask = (x >= lo) & (x <= hi)
    if int(mask.sum()) < 8:
        raise ParameterError(
            f"far-field window [{lo:.6g}, {hi:.6g}] holds fewer than 8 grid points"
        )
    xs = x[mask]
    design = np.column_stack([np.ones(xs.size), 1.0 / xs])
    coeffs, *_ = np.linalg.lstsq(design, values[mask], rcond=None)
    return float(coeffs[0])


def _align_phases(phis: np.ndarray) -> np.ndarray:
    """Remove whole-2pi offsets between family members (anchored on the
    first member's first grid point, where the true spread is tiny)."""
    ref = phis[0, 0]
    shifts = 2.0 * math.pi * np.round((ref - phis[:, 0]) / (2.0 * math.pi))
    return phis + shifts[:, None]


def _uniform_field_slope(model: BarrierModel, x_lo: float, x_hi: float) -> float:
    """Slope E0 of the transverse vector potential over (x_lo, x_hi),
    validating uniformity (closed forms exist for uniform fields only)."""
    if model.a_z is None:
        return 0.0
    span = x_hi - x_lo
    xq = x_lo + span * np.array([0.25, 0.5, 0.75])
    aq = np.asarray(model.vector_potential_z(xq), dtype=float)
    slope = (aq[2] - aq[0]) / (0.5 * span)
    mid_err = abs(aq[1] - 0.5 * (aq[0] + aq[2]))
    scale = max(abs(aq).max(), abs(slope) * span, 1e-30)
    if mid_err > _UNIFORMITY_RTOL * scale:
        raise UnsupportedCombinationError(
            "closed-form steady states need a uniform transverse field; "
            f"A_z is not linear over ({x_lo:.6g}, {x_hi:.6g})"
        )
    return float(slope)


def _tier_of(tier) -> PhysicsTier:
    tier = PhysicsTier(tier)
    if tier not in _STEADY_TIERS:
        raise UnsupportedCombinationError(
            f"steady states are defined for tiers "
            f"{[t.value for t in _STEADY_TIERS]}, not {tier.value}"
        )
    return tier


# ---------------------------------------------------------------------------
# analytic shape derivatives
# ---------------------------------------------------------------------------


def _shape_derivatives(shape, x: float) -> tuple[float, float, float]:
    """(V, V', V'') of the binding/barrier potential at interior x."""
    if isinstance(shape, Square):
        if not 0.0 < x < shape.a:
            raise ParameterError("square-barrier derivatives need 0 < x < a")
        return shape.v0, 0.0, 0.0
    if isinstance(shape, Linear):
        if x <= 0.0:
            raise ParameterError("linear-barrier derivatives need x > 0")
        return shape.v0 - shape.e0 * x, -shape.e0, 0.0
    if isinstance(shape, Parabolic):
        return (
            shape.v0 - 0.5 * shape.curvature * x * x,
            -shape.curvature * x,
            -shape.curvature,
        )
    if isinstance(shape, Coulomb1D):
        if x <= 0.0:
            raise ParameterError("Coulomb barrier derivatives need x > 0")
        return (
            -shape.e0 * x - shape.kappa / x,
            -shape.e0 + shape.kappa / (x * x),
            -2.0 * shape.kappa / (x * x * x),
        )
    if isinstance(shape, ZeroRangeTriangular):
        if x <= 0.0:
            raise ParameterError("triangular-barrier derivatives need x > 0")
        return -shape.e0 * x, -shape.e0, 0.0
    if isinstance(shape, ParabolicCoord):
        if x <= 0.0:
            raise ParameterError("parabolic-coordinate derivatives need x > 0")
        inv = 1.0 / x
        return (
            -0.25 * inv - 0.125 * inv * inv - 0.125 * shape.e0 * x,
            0.25 * inv * inv + 0.25 * inv * inv * inv - 0.125 * shape.e0,
            -0.5 * inv**3 - 0.75 * inv**4,
        )
    raise ParameterError(f"unsupported barrier shape {shape!r}")


def _effective_derivatives(
    model: BarrierModel, p_z: float, tier: PhysicsTier, c: float, x: float
) -> tuple[float, float, float]:
    """(W, W', W'') of the effective 1-D potential at x: the binding
    potential plus the transverse kinetic term of the tier."""
    v, v1, v2 = _shape_derivatives(model.shape, x)
    if tier == PhysicsTier.MAGNETIC_DIPOLE:
        if model.a_z is None:
            raise ParameterError(
                "the magnetic-dipole tier needs a transverse vector potential"
            )
        h = 1e-6 * max(abs(x), 1.0)
        a_lo, a_hi = (
            float(model.vector_potential_z(x - h)),
            float(model.vector_potential_z(x + h)),
        )
        slope = (a_hi - a_lo) / (2.0 * h)
        q = p_z + float(model.vector_potential_z(x)) / c
        qp = slope / c
        return v + 0.5 * q * q, v1 + q * qp, v2 + qp * qp
    # NonRel (and the Klein-Gordon route, which uses the bare potential):
    # p_z only shifts the energy origin.
    return v + 0.5 * p_z * p_z, v1, v2


def _gated_potential(model: BarrierModel) -> Callable:
    """Potential seen by the scattering geometry: free half-line x <= 0,
    the shape's formula beyond (the full-axis parabola is gated here)."""
    shape = model.shape
    if isinstance(shape, Parabolic):
        def vfun(xs):
            xs = np.asarray(xs, dtype=float)
            return np.where(xs > 0.0, shape.v0 - 0.5 * shape.curvature * xs * xs, 0.0)

        return vfun
    return lambda xs: np.asarray(shape.potential(np.asarray(xs, dtype=float)), float)


def _k_squared_model(
    model: BarrierModel, epsilon: float, p_z: float, tier: PhysicsTier, c: float
) -> Callable:
    """Vectorized local wave number squared for the scattering geometry."""
    vfun = _gated_potential(model)
    if tier == PhysicsTier.MAGNETIC_DIPOLE and model.a_z is None:
        raise ParameterError(
            "the magnetic-dipole tier needs a transverse vector potential"
        )

    def k2(xs):
        xs = np.asarray(xs, dtype=float)
        v = vfun(xs)
        if tier == PhysicsTier.MAGNETIC_DIPOLE:
            q = p_z + np.asarray(model.vector_potential_z(xs), dtype=float) / c
            return 2.0 * (epsilon - 0.5 * q * q - v)
        if tier == PhysicsTier.KLEIN_GORDON:
            a = (epsilon - v) / c
            return a * a + 2.0 * a * c - p_z * p_z
        return 2.0 * (epsilon - 0.5 * p_z * p_z - v)

    return k2


def _k_squared_local(appr: BarrierApproximant, epsilon: float, c: float) -> Callable:
    """Vectorized wave number squared on a barrier approximant."""
    if appr.tier == PhysicsTier.KLEIN_GORDON:
        def k2(xs):
            w = epsilon - np.asarray(appr.v_eff(xs), dtype=float)
            a = w / c
            return a * a + 2.0 * a * c

        return k2

    def k2(xs):
        return 2.0 * (epsilon - np.asarray(appr.v_eff(xs), dtype=float))

    return k2


# ---------------------------------------------------------------------------
# regime classifier and barrier approximant
# ---------------------------------------------------------------------------


def _check_params_consistency(shape, params: PhysParams) -> None:
    def close(a, b):
        return abs(a - b) <= 1e-9 * max(abs(a), abs(b), 1e-30)

    if isinstance(shape, Coulomb1D):
        if not (close(shape.kappa, params.kappa) and close(shape.e0, params.E0)):
            raise ParameterError(
                f"Coulomb barrier (kappa={shape.kappa}, e0={shape.e0}) does not "
                f"match params (kappa={params.kappa}, E0={params.E0})"
            )
    elif isinstance(shape, ZeroRangeTriangular):
        if not close(shape.e0, params.E0):
            raise ParameterError(
                f"triangular barrier e0={shape.e0} does not match params E0={params.E0}"
            )
    elif isinstance(shape, ParabolicCoord):
        if not close(shape.e0, params.E0 / params.ea):
            raise ParameterError(
                f"parabolic-coordinate barrier is hydrogen-scaled: expected "
                f"e0=E0/E_a={params.E0 / params.ea:.6g}, got {shape.e0}"
            )


def _scaled_field_value(shape, ratio: float) -> float | None:
    """Closed-form dimensionless classifier value, or None when the shape
    has no such form (the direct criterion is reported instead)."""
    if isinstance(shape, Coulomb1D):
        return (16.0 * ratio) ** (5.0 / 3.0)
    if isinstance(shape, ParabolicCoord):
        return (9.0 * ratio) ** (5.0 / 3.0)
    if isinstance(shape, ZeroRangeTriangular):
        return ratio ** (2.0 / 3.0)
    return None


def _classification_of(scaled: float) -> str:
    if scaled < _DEEP_LIMIT:
        return "deep"
    if scaled < _OVER_LIMIT:
        return "near-threshold"
    return "over-barrier"


def classify_regime(b: BarrierModel, params: PhysParams) -> RegimeReport:
    """Classify the tunneling regime of a tunnel-ionization barrier.

    Evaluates the curvature-to-slope criterion |V''/V'^(4/3)| at the
    exit point of the field-free-tier barrier, the closed-form scaled
    field value for the shape (see RegimeReport), and the deep /
    near-threshold / over-barrier classification.  A barrier whose top
    has dropped below the state's energy reports "over-barrier" with
    NaN for the exit-point quantities.
    """
    shape = b.shape
    if isinstance(shape, Square):
        raise ParameterError("a square barrier has no smooth exit to classify")
    _check_params_consistency(shape, params)
    eps0 = (
        ParabolicCoord.CHANNEL_ENERGY
        if isinstance(shape, ParabolicCoord)
        else -params.ip_nonrel
    )
    ratio = params.E0 / params.ea
    scaled = _scaled_field_value(shape, ratio)
    try:
        x0, xe = turning_points(b, eps0, 0.0, 0.0, PhysicsTier.NONREL, params.c)
    except NoBarrierError:
        return RegimeReport(
            criterion_value=math.nan,
            scaled_field_value=math.nan if scaled is None else scaled,
            classification="over-barrier",
            x_entry=math.nan,
            x_exit=math.nan,
        )
    _, v1, v2 = _shape_derivatives(shape, xe)
    criterion = abs(v2) / abs(v1) ** (4.0 / 3.0)
    if scaled is None:
        scaled = criterion
    return RegimeReport(
        criterion_value=criterion,
        scaled_field_value=scaled,
        classification=_classification_of(scaled),
        x_entry=x0,
        x_exit=xe,
    )


def _default_kind(shape, tier: PhysicsTier) -> str:
    """Approximant kind implied by shape and tier."""
    if tier == PhysicsTier.MAGNETIC_DIPOLE:
        # the transverse kinetic term always curves the effective barrier;
        # its quadratic expansion keeps the far field open
        return "quadratic"
    if tier == PhysicsTier.KLEIN_GORDON:
        return "linear"
    if isinstance(shape, (ZeroRangeTriangular, Linear)):
        return "linear"
    if isinstance(shape, Parabolic):
        return "quadratic"
    ratio = None
    if isinstance(shape, Coulomb1D):
        ratio = shape.e0 / shape.kappa**3
    elif isinstance(shape, ParabolicCoord):
        ratio = shape.e0
    if ratio is not None:
        scaled = _scaled_field_value(shape, ratio)
        cls = _classification_of(scaled)
        if cls == "over-barrier":
            raise NoBarrierError(
                f"over-the-barrier regime (scaled field value {scaled:.3g}); "
                "no tunneling approximant exists"
            )
        return "linear" if cls == "deep" else "quadratic"
    raise ParameterError(f"no approximant rule for shape {shape!r}")


def barrier_approximant(
    b: BarrierModel,
    epsilon: float,
    p_z: float,
    tier,
    *,
    kind: str | None = None,
    c: float = C_DEFAULT,
) -> BarrierApproximant:
    """Local barrier model at the exit point for the tunneling pipeline.

    kind=None picks the regime default: linear where the linear
    expansion is valid (deep tunneling, and exactly for triangular
    barriers), quadratic near threshold and always for the
    magnetic-dipole tier, whose effective potential recloses far out --
    the quadratic expansion about the exit keeps the far field open.
    kind="exact" wraps the unexpanded effective potential (ODE backend
    only; unsupported for the magnetic-dipole tier because of the
    reclosure).
    """
    tier = _tier_of(tier)
    shape = b.shape
    if tier == PhysicsTier.KLEIN_GORDON and not isinstance(
        shape, (ZeroRangeTriangular, Linear)
    ):
        raise UnsupportedCombinationError(
            "Klein-Gordon steady states are supported for linear-ramp "
            f"barriers only, not {type(shape).__name__}"
        )
    if kind is None:
        kind = _default_kind(shape, tier)
    if kind not in ("linear", "quadratic", "exact"):
        raise ParameterError(f"unknown approximant kind {kind!r}")
    if tier == PhysicsTier.MAGNETIC_DIPOLE and kind != "quadratic":
        raise UnsupportedCombinationError(
            "the magnetic-dipole effective barrier recloses far beyond the "
            "exit; only its quadratic expansion keeps the far field open"
        )
    x0, xe = turning_points(b, epsilon, 0.0, p_z, tier, c)
    w, w1, w2 = _effective_derivatives(b, p_z, tier, c, xe)
    if not w1 < 0.0:
        raise UnsupportedCombinationError(
            f"effective barrier slope at the exit must be negative, got {w1:.6g}"
        )
    if kind == "quadratic" and not w2 < 0.0:
        raise UnsupportedCombinationError(
            f"quadratic approximant needs downward curvature at the exit, got {w2:.6g}"
        )

    if kind == "linear":
        def v_eff(xs):
            return epsilon + w1 * (np.asarray(xs, dtype=float) - xe)

        w2_out = 0.0
    elif kind == "quadratic":
        def v_eff(xs):
            d = np.asarray(xs, dtype=float) - xe
            return epsilon + w1 * d + 0.5 * w2 * d * d

        w2_out = w2
    else:  # exact
        if tier == PhysicsTier.MAGNETIC_DIPOLE:
            raise UnsupportedCombinationError(
                "exact treatment is undefined for the magnetic-dipole tier "
                "(the effective barrier recloses)"
            )

        def v_eff(xs):
            xs = np.asarray(xs, dtype=float)
            v = np.asarray(b.potential(xs), dtype=float)
            if tier == PhysicsTier.KLEIN_GORDON:
                return v
            return v + 0.5 * p_z * p_z

        w2_out = w2

    return BarrierApproximant(
        kind=kind,
        x_entry=x0,
        x_exit=xe,
        epsilon_built=epsilon,
        p_z=p_z,
        tier=tier,
        v_eff=v_eff,
        v1=w1,
        v2=w2_out,
    )


# ---------------------------------------------------------------------------
# closed-form building blocks
# ---------------------------------------------------------------------------

_OUTGOING_ROT = cmath.exp(2j * math.pi / 3.0)


def _airy_outgoing(zeta: complex) -> tuple[complex, complex]:
    """Outgoing Airy solution w(zeta) = Ai(rot*zeta) and dw/dzeta on the
    ramp variable zeta (positive under the barrier, negative in the
    allowed region).  rot = exp(2i*pi/3) selects Ai - i*Bi, whose phase
    grows along +x so its current Im(u* du) is positive -- outgoing
    under the exp(-i*eps*t) convention that makes the free-region
    Wigner time x/v positive.  Under the barrier it decays."""
    arg = _OUTGOING_ROT * zeta
    ai, aip, _, _ = airy_all(arg)
    return ai, _OUTGOING_ROT * aip


def _downward_pcf_map(
    a2_abs: float, x_top: float, u_top: float, epsilon: float
) -> tuple[complex, complex]:
    """PCF order nu and argument slope sigma for a downward parabola
    U(x) = U_top - |A2| (x - x_top)^2: the outgoing solution is
    D_nu(sigma*(x - x_top)) with principal-branch fractional powers."""
    nu = -0.5 - 1j * (u_top - epsilon) / math.sqrt(2.0 * a2_abs)
    sigma = (8.0 * a2_abs) ** 0.25 * cmath.exp(-1j * math.pi / 4.0)
    return nu, sigma


def _pcf_line(order: complex, zs: np.ndarray) -> np.ndarray:
    """D_order on arguments lying along one line through the origin,
    evaluated with at most two batched ray integrations (one per sign)."""
    zs = np.asarray(zs, dtype=complex)
    out = np.empty(zs.shape, dtype=complex)
    if zs.size == 0:
        return out
    mags = np.abs(zs)
    i_ref = int(np.argmax(mags))
    if mags[i_ref] == 0.0:
        out[:] = pcf_d(order, 0.0)
        return out
    u = zs[i_ref] / mags[i_ref]
    t = (zs * np.conj(u)).real  # signed coordinate along the line
    pos = t >= 0.0
    if np.any(pos):
        out[pos] = pcf_d_ray(order, u, t[pos])
    if not np.all(pos):
        out[~pos] = pcf_d_ray(order, -u, -t[~pos])
    return out


def _eval_pcf_grid(nu: complex, zs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """D_nu and its z-derivative on colinear arguments, batched per ray;
    the derivative comes from D'_nu = (z/2) D_nu - D_{nu+1}."""
    zs = np.asarray(zs, dtype=complex)
    d = _pcf_line(nu, zs)
    d1 = 0.5 * zs * d - _pcf_line(nu + 1.0, zs)
    return d, d1


# ---------------------------------------------------------------------------
# geometry
# ---------------------------------------------------------------------------


def _scattering_exit(
    model: BarrierModel, epsilon: float, p_z: float, tier: PhysicsTier, c: float
) -> tuple[float, float]:
    """(entry, exit) of the forbidden region for the scattering geometry
    (entry is the gate at x=0 for every model shape)."""
    shape = model.shape
    k2 = _k_squared_model(model, epsilon, p_z, tier, c)
    if isinstance(shape, Square):
        probe = np.linspace(0.0, shape.a, 201)[1:-1]
        if not np.all(k2(probe) < 0.0):
            raise NoBarrierError(
                f"energy {epsilon:.6g} is not below the square barrier everywhere"
            )
        return 0.0, shape.a
    if isinstance(shape, (Linear, Parabolic)):
        if not float(k2(1e-12)) < 0.0:
            raise NoBarrierError(f"energy {epsilon:.6g} is above the barrier edge")
        hi = 1.0
        while float(k2(hi)) <= 0.0:
            hi *= 2.0
            if hi > 1e12:
                raise NoBarrierError("barrier never reopens toward +x")
        return 0.0, float(brentq(lambda xx: float(k2(xx)), 1e-12, hi, xtol=1e-14))
    raise UnsupportedCombinationError(
        f"scattering geometry is defined for model barriers, not "
        f"{type(shape).__name__}"
    )


def default_grid(
    b: BarrierModel,
    epsilon: float,
    p_z: float,
    tier,
    *,
    far_factor: float = FAR_FACTOR_DEFAULT,
    n_grid: int = GRID_POINTS_DEFAULT,
    c: float = C_DEFAULT,
) -> np.ndarray:
    """Default analysis grid: for scattering geometries it spans a free
    stretch before the barrier through far_factor exit lengths beyond;
    for outgoing (tunnel-ionization) geometries it spans entry point to
    far_factor times the exit point."""
    tier = _tier_of(tier)
    if far_factor < 4.0:
        raise ParameterError(f"far_factor must be >= 4, got {far_factor}")
    if n_grid < 16:
        raise ParameterError(f"n_grid must be >= 16, got {n_grid}")
    k2 = _k_squared_model(b, epsilon, p_z, tier, c)
    if float(k2(-1.0)) > 0.0:
        _, x_exit = _scattering_exit(b, epsilon, p_z, tier, c)
        scale = x_exit if x_exit > 0.0 else 1.0
        return np.linspace(-0.25 * far_factor * scale, far_factor * scale, n_grid)
    x0, xe = turning_points(b, epsilon, 0.0, p_z, tier, c)
    return np.linspace(x0, far_factor * xe, n_grid)


# ---------------------------------------------------------------------------
# scattering solutions (model barriers)
# ---------------------------------------------------------------------------


def _square_coefficients(
    epsilon: float, p_z: float, tier: PhysicsTier, v0: float, a: float,
    e0f: float, c: float,
) -> tuple[dict, Callable, float, float]:
    """Matching coefficients and interior basis for the square barrier
    (with an optional uniform transverse field confined to it).

    The interior is spanned by a forward-evanescent solution f1
    (decaying toward +x) and its growing counterpart f2; the reported
    C1, C2 are their amplitudes.  The linear system is solved with each
    basis column normalized at the end where it peaks, so the e^(k a)
    dynamic range of a thick barrier never degrades the conditioning.
    """
    k1sq = 2.0 * epsilon - p_z * p_z
    k1 = math.sqrt(k1sq)
    if tier == PhysicsTier.NONREL or e0f == 0.0:
        k2 = math.sqrt(2.0 * (v0 - epsilon) + p_z * p_z)
        k3 = k1

        # scaled basis: g1 = exp(-k2 x), g2 = exp(k2 (x - a)); both <= 1
        def basis(xs):
            xs = np.asarray(xs, dtype=float)
            g1, g2 = np.exp(-k2 * xs), np.exp(k2 * (xs - a))
            return g1, g2, -k2 * g1, k2 * g2

        # amplitude of exp(-k2 x) is C~1 itself; of exp(+k2 x) is C~2 e^(-k2 a)
        scale1, scale2 = 1.0 + 0j, cmath.exp(-k2 * a)
    else:
        q_a = p_z + e0f * a / c
        k3sq = 2.0 * epsilon - q_a * q_a
        if k3sq <= 0.0:
            raise UnsupportedCombinationError(
                "transmitted channel is closed: the field kick exceeds the "
                f"available energy (k_out^2 = {k3sq:.6g})"
            )
        k3 = math.sqrt(k3sq)
        nu = -0.5 + (epsilon - v0) * c / e0f
        slope = math.sqrt(2.0 * e0f / c)

        def zf(xs):
            return slope * (np.asarray(xs, dtype=float) + c * p_z / e0f)

        def raw(xs):
            zs = zf(xs).astype(complex)
            f1, f1p = _eval_pcf_grid(nu, zs)
            izs = 1j * zs
            f2 = _pcf_line(-nu - 1.0, izs)
            f2p = 0.5 * izs * f2 - _pcf_line(-nu, izs)
            return f1, slope * f1p, f2, slope * 1j * f2p

        f1e, _, f2e, _ = raw(np.array([0.0, a]))
        scale1 = complex(f1e[0])  # f1 peaks at the entry
        scale2 = complex(f2e[1])  # f2 peaks at the exit

        def basis(xs):
            f1, d1, f2, d2 = raw(xs)
            return f1 / scale1, f2 / scale2, d1 / scale1, d2 / scale2

    ends = np.array([0.0, a])
    g1e, g2e, dg1e, dg2e = basis(ends)
    e3 = cmath.exp(1j * k3 * a)
    m = np.array(
        [
            [-1.0, g1e[0], g2e[0], 0.0],
            [1j * k1, dg1e[0], dg2e[0], 0.0],
            [0.0, g1e[1], g2e[1], -e3],
            [0.0, dg1e[1], dg2e[1], -1j * k3 * e3],
        ],
        dtype=complex,
    )
    rhs = np.array([1.0, 1j * k1, 0.0, 0.0], dtype=complex)
    r, c1s, c2s, t = np.linalg.solve(m, rhs)
    # map the scaled-basis solution back to f1/f2 amplitudes; for the
    # field-free case g2 = f2 * e^(-k2 a), so the f2 amplitude is
    # c2s * e^(-k2 a) (underflow-safe, unlike dividing by e^(+k2 a))
    if tier == PhysicsTier.NONREL or e0f == 0.0:
        c1_amp, c2_amp = c1s, c2s * scale2
    else:
        c1_amp, c2_amp = c1s / scale1, c2s / scale2
    coeffs = {
        "R": complex(r),
        "T": complex(t),
        "C1": complex(c1_amp),
        "C2": complex(c2_amp),
    }
    return coeffs, basis, k1, k3, (complex(c1s), complex(c2s))


def _closed_scattering(
    model: BarrierModel, epsilon: float, p_z: float, tier: PhysicsTier, c: float,
    x_exit: float, grid_hull: tuple[float, float],
) -> tuple[Callable, dict, float, float]:
    """Closed-form evaluator (u, du on arrays) for the model barriers,
    plus matching coefficients and the channel wave numbers."""
    shape = model.shape
    k1sq = 2.0 * epsilon - p_z * p_z
    k1 = math.sqrt(k1sq)

    if isinstance(shape, Square):
        e0f = (
            0.0
            if tier == PhysicsTier.NONREL
            else _uniform_field_slope(model, 0.0, shape.a)
        )
        coeffs, basis, k1, k3, (c1s, c2s) = _square_coefficients(
            epsilon, p_z, tier, shape.v0, shape.a, e0f, c
        )
        r, t = coeffs["R"], coeffs["T"]
        a = shape.a

        def evaluate(xs):
            xs = np.asarray(xs, dtype=float)
            u = np.empty(xs.shape, dtype=complex)
            du = np.empty(xs.shape, dtype=complex)
            left = xs < 0.0
            right = xs > a
            mid = ~(left | right)
            el = np.exp(1j * k1 * xs[left])
            rl = np.exp(-1j * k1 * xs[left])
            u[left] = el + r * rl
            du[left] = 1j * k1 * (el - r * rl)
            g1, g2, dg1, dg2 = basis(xs[mid])
            u[mid] = c1s * g1 + c2s * g2
            du[mid] = c1s * dg1 + c2s * dg2
            er = np.exp(1j * k3 * xs[right])
            u[right] = t * er
            du[right] = 1j * k3 * t * er
            return u, du

        return evaluate, coeffs, k1, k3

    if isinstance(shape, Linear):
        if tier != PhysicsTier.NONREL:
            raise UnsupportedCombinationError(
                "the linear model barrier supports the NonRel tier only"
            )
        b3 = (2.0 * shape.e0) ** (1.0 / 3.0)
        x_t = (shape.v0 - (epsilon - 0.5 * p_z * p_z)) / shape.e0

        # the Airy basis is only evaluated beyond the gate (x >= 0)
        hull_lo = max(grid_hull[0], 0.0)
        zeta_max = b3 * max(abs(x_t - hull_lo), abs(x_t - grid_hull[1]))
        if zeta_max > AIRY_RADIUS:
            raise RangeError(
                f"linear-barrier closed form needs |zeta| <= {AIRY_RADIUS}, "
                f"got {zeta_max:.4g} on this grid"
            )

        def g_pair(xs):
            xs = np.asarray(xs, dtype=float)
            g = np.empty(xs.shape, dtype=complex)
            dg = np.empty(xs.shape, dtype=complex)
            for i, xx in enumerate(xs):
                w, wp = _airy_outgoing(b3 * (x_t - xx))
                g[i] = w
                dg[i] = -b3 * wp
            return g, dg

    elif isinstance(shape, Parabolic):
        e0f = _uniform_field_slope(model, 0.0, x_exit)
        if tier == PhysicsTier.NONREL:
            e0f = 0.0
        a0 = shape.v0 + 0.5 * p_z * p_z
        a1 = p_z * e0f / c
        a2 = 0.5 * (e0f / c) ** 2 - 0.5 * shape.curvature
        if not a2 < 0.0:
            raise UnsupportedCombinationError(
                "the transverse field stiffens the parabolic barrier into an "
                f"upward well (quadratic coefficient {a2:.6g} >= 0)"
            )
        x_top = -a1 / (2.0 * a2)
        u_top = a0 - a1 * a1 / (4.0 * a2)
        nu, sigma = _downward_pcf_map(-a2, x_top, u_top, epsilon)
        if abs(nu) > PCF_A_RADIUS:
            raise RangeError(
                f"parabolic-barrier closed form needs |nu| <= {PCF_A_RADIUS}, "
                f"got {abs(nu):.4g}"
            )
        hull_lo = max(grid_hull[0], 0.0)
        zmax = abs(sigma) * max(abs(hull_lo - x_top), abs(grid_hull[1] - x_top))
        if zmax > PCF_Z_RADIUS:
            raise RangeError(
                f"parabolic-barrier closed form needs |z| <= {PCF_Z_RADIUS}, "
                f"got {zmax:.4g} on this grid"
            )

        def g_pair(xs):
            zs = sigma * (np.asarray(xs, dtype=float) - x_top)
            d, d1 = _eval_pcf_grid(nu, zs)
            return d, sigma * d1

    else:
        raise UnsupportedCombinationError(
            f"no closed scattering form for shape {type(shape).__name__}"
        )

    g0, dg0 = (arr[0] for arr in g_pair(np.array([0.0])))
    t = 2j * k1 / (dg0 + 1j * k1 * g0)
    r = t * g0 - 1.0
    coeffs = {"R": complex(r), "T": complex(t), "C1": complex(t), "C2": 0j}

    def evaluate(xs):
        xs = np.asarray(xs, dtype=float)
        u = np.empty(xs.shape, dtype=complex)
        du = np.empty(xs.shape, dtype=complex)
        left = xs < 0.0
        el = np.exp(1j * k1 * xs[left])
        rl = np.exp(-1j * k1 * xs[left])
        u[left] = el + r * rl
        du[left] = 1j * k1 * (el - r * rl)
        g, dg = g_pair(xs[~left])
        u[~left] = t * g
        du[~left] = t * dg
        return u, du

    return evaluate, coeffs, k1, None


# ---------------------------------------------------------------------------
# outgoing (tunnel-ionization) solutions
# ---------------------------------------------------------------------------


def _closed_outgoing(appr: BarrierApproximant, epsilon: float, c: float,
                     grid_hull: tuple[float, float]) -> Callable:
    """Closed-form evaluator for outgoing solutions on an approximant."""
    if appr.kind == "exact":
        raise UnsupportedCombinationError(
            "the exact potential has no closed-form steady state; use the "
            "ODE backend"
        )
    xe, w1 = appr.x_exit, appr.v1

    if appr.tier == PhysicsTier.KLEIN_GORDON:
        w1abs = abs(w1)
        nu = -0.5 - 1j * c**3 / (2.0 * w1abs)
        if abs(nu) > PCF_A_RADIUS:
            raise RangeError(
                f"Klein-Gordon closed form needs |nu| <= {PCF_A_RADIUS}, got "
                f"{abs(nu):.4g} (weak-field limit); use the ODE backend"
            )
        pref = math.sqrt(2.0) * cmath.exp(-1j * math.pi / 4.0) / math.sqrt(c * w1abs)
        dzdx = pref * w1abs  # dW/dx = -v1 = |v1| for the decreasing ramp

        def w_big(xs):
            return c * c + epsilon - (
                appr.epsilon_built + w1 * (np.asarray(xs, dtype=float) - xe)
            )

        zmax = max(abs(pref * w_big(np.array([h]))[0]) for h in grid_hull)
        if zmax > PCF_Z_RADIUS:
            raise RangeError(
                f"Klein-Gordon closed form needs |z| <= {PCF_Z_RADIUS}, got "
                f"{zmax:.4g} on this grid"
            )

        def evaluate(xs):
            zs = pref * w_big(xs)
            d, d1 = _eval_pcf_grid(nu, zs)
            return d, dzdx * d1

        return evaluate

    if appr.kind == "linear":
        b3 = (2.0 * abs(w1)) ** (1.0 / 3.0)
        x_t = xe + (epsilon - appr.epsilon_built) / w1
        zeta_max = b3 * max(abs(x_t - grid_hull[0]), abs(x_t - grid_hull[1]))
        if zeta_max > AIRY_RADIUS:
            raise RangeError(
                f"linear-approximant closed form needs |zeta| <= {AIRY_RADIUS}, "
                f"got {zeta_max:.4g}; shrink far_factor or use the ODE backend"
            )

        def evaluate(xs):
            xs = np.asarray(xs, dtype=float)
            u = np.empty(xs.shape, dtype=complex)
            du = np.empty(xs.shape, dtype=complex)
            for i, xx in enumerate(xs):
                w, wp = _airy_outgoing(b3 * (x_t - xx))
                u[i] = w
                du[i] = -b3 * wp
            return u, du

        return evaluate

    # quadratic
    w2abs = abs(appr.v2)
    x_top = xe - abs(w1) / w2abs
    u_top = appr.epsilon_built + w1 * w1 / (2.0 * w2abs)
    nu, sigma = _downward_pcf_map(0.5 * w2abs, x_top, u_top, epsilon)
    if abs(nu) > PCF_A_RADIUS:
        raise RangeError(
            f"quadratic-approximant closed form needs |nu| <= {PCF_A_RADIUS}, "
            f"got {abs(nu):.4g}"
        )
    zmax = abs(sigma) * max(abs(grid_hull[0] - x_top), abs(grid_hull[1] - x_top))
    if zmax > PCF_Z_RADIUS:
        raise RangeError(
            f"quadratic-approximant closed form needs |z| <= {PCF_Z_RADIUS}, "
            f"got {zmax:.4g}; shrink far_factor or use the ODE backend"
        )

    def evaluate(xs):
        zs = sigma * (np.asarray(xs, dtype=float) - x_top)
        d, d1 = _eval_pcf_grid(nu, zs)
        return d, sigma * d1

    return evaluate


# ---------------------------------------------------------------------------
# ODE backend
# ---------------------------------------------------------------------------


def _ode_evaluator(k2fun: Callable, x_anchor: float, x_low: float,
                   anchor_exact_k: float | None = None) -> Callable:
    """Backward-integrated steady state: anchored on an outgoing wave at
    x_anchor (exact plane wave when anchor_exact_k is given, a WKB start
    otherwise) and integrated down to x_low."""
    if anchor_exact_k is not None:
        k_a = anchor_exact_k
        u0 = cmath.exp(1j * k_a * x_anchor)
        du0 = 1j * k_a * u0
    else:
        k2a = float(k2fun(x_anchor))
        if k2a <= 0.0:
            raise ParameterError(
                f"outgoing anchor at x={x_anchor:.6g} is not in the allowed region"
            )
        k_a = math.sqrt(k2a)
        h = 1e-6 * max(abs(x_anchor), 1.0)
        kp = (
            math.sqrt(float(k2fun(x_anchor + h)))
            - math.sqrt(float(k2fun(x_anchor - h)))
        ) / (2.0 * h)
        u0 = 1.0 + 0j
        du0 = (1j * k_a - kp / (2.0 * k_a)) * u0

    def rhs(t, y):
        return [y[1], -float(k2fun(t)) * y[0]]

    sol = solve_ivp(
        rhs,
        (x_anchor, x_low),
        np.array([u0, du0], dtype=complex),
        method="DOP853",
        rtol=_ODE_RTOL,
        atol=_ODE_ATOL,
        dense_output=True,
    )
    if not sol.success:
        raise ConvergenceError(f"backward integration failed: {sol.message}")

    def evaluate(xs):
        vals = sol.sol(np.asarray(xs, dtype=float))
        return vals[0], vals[1]

    return evaluate


# ---------------------------------------------------------------------------
# phase assembly
# ---------------------------------------------------------------------------


def _phase_and_samples(
    x: np.ndarray, evaluate: Callable, k_in: float | None
) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """u, du and the unwrapped channel phase on the grid, refining the
    evaluation grid until the per-step phase jump is below the limit.
    k_in selects the incident-channel phase k_in*x before the gate at
    x=0; None means the whole solution is the outgoing channel.  The
    single step across the gate is exempt from the jump criterion: the
    channel switches there from the incident wave to the matched field,
    and the finite offset arg(1 + R) is physical (it carries the entry
    delay), not an unresolved oscillation."""
    for m in _REFINEMENTS:
        fine = _subdivide(x, m)
        u_f, du_f = evaluate(fine)
        if k_in is None:
            channel = u_f
        else:
            channel = np.where(fine < 0.0, np.exp(1j * k_in * fine), u_f)
        phi_f = np.unwrap(np.angle(channel))
        steps = np.abs(np.diff(phi_f))
        if k_in is not None:
            steps = steps[~((fine[:-1] < 0.0) & (fine[1:] >= 0.0))]
        if steps.size == 0 or float(steps.max()) < PHASE_STEP_LIMIT:
            return u_f[::m], du_f[::m], phi_f[::m], m
    raise ConvergenceError(
        f"channel phase still jumps by >= {PHASE_STEP_LIMIT:.3f} rad per step "
        f"at {_REFINEMENTS[-1]}x grid refinement; the grid is too coarse"
    )


# ---------------------------------------------------------------------------
# solve_steady
# ---------------------------------------------------------------------------


def solve_steady(
    b: BarrierModel,
    epsilon: float,
    p_z: float,
    tier,
    *,
    backend: str = "auto",
    x: np.ndarray | None = None,
    far_factor: float = FAR_FACTOR_DEFAULT,
    n_grid: int = GRID_POINTS_DEFAULT,
    c: float = C_DEFAULT,
    approximant: BarrierApproximant | None = None,
) -> SteadyState:
    """Steady state of the barrier problem at total energy epsilon and
    canonical transverse momentum p_z.

    Geometries.  When the region before the barrier is classically
    allowed (model barriers at positive energy) the solution is the
    scattering state: unit incident wave, reflected and transmitted
    coefficients, current-conserving.  When it is not (bound energies:
    tunnel-ionization barriers), the solution is the outgoing wave
    continued under the barrier, solved on the regime approximant of
    the effective potential (pass approximant= to hold one expansion
    fixed across an energy family).

    Backends.  "closed" evaluates Airy / parabolic-cylinder forms via
    specfun; "ode" integrates the stationary equation backward from an
    outgoing anchor beyond the grid; "auto" uses the closed form where
    one exists and is within specfun's supported radii, the ODE route
    otherwise.  Both agree in |u| and unwrapped phase to <= 1e-6 where
    both exist.
    """
    tier = _tier_of(tier)
    epsilon = float(epsilon)
    p_z = float(p_z)
    if backend not in ("auto", "closed", "ode"):
        raise ParameterError(f"unknown backend {backend!r}")
    if not (math.isfinite(epsilon) and math.isfinite(p_z)):
        raise ParameterError("epsilon and p_z must be finite")

    k2fun = _k_squared_model(b, epsilon, p_z, tier, c)
    scattering = float(k2fun(-1.0)) > 0.0

    if scattering:
        if not isinstance(b.shape, (Square, Linear, Parabolic)):
            raise UnsupportedCombinationError(
                "scattering steady states are defined for model barriers "
                f"(square, linear, parabolic); {type(b.shape).__name__} at "
                "positive energy is over-the-barrier"
            )
        if tier == PhysicsTier.KLEIN_GORDON:
            raise UnsupportedCombinationError(
                "Klein-Gordon steady states are supported for the "
                "tunnel-ionization geometry only"
            )
        x_entry, x_exit = _scattering_exit(b, epsilon, p_z, tier, c)
        if x is None:
            x = default_grid(
                b, epsilon, p_z, tier, far_factor=far_factor, n_grid=n_grid, c=c
            )
        x = _validate_grid(x)
        if x[-1] <= x_exit:
            raise ParameterError(
                f"grid must extend beyond the barrier exit {x_exit:.6g}"
            )
        k1 = math.sqrt(float(k2fun(-1.0)))

        evaluate = None
        coeffs: dict = {"R": None, "T": None, "C1": None, "C2": None}
        k_out = None
        used = backend
        if backend in ("auto", "closed"):
            try:
                evaluate, coeffs, k1, k_out = _closed_scattering(
                    b, epsilon, p_z, tier, c, x_exit, (float(x[0]), float(x[-1]))
                )
                used = "closed"
            except RangeError:
                if backend == "closed":
                    raise
                evaluate = None
        if evaluate is None:
            used = "ode"
            if isinstance(b.shape, Square):
                # the transmitted region is free: anchor on the exact plane wave
                if tier == PhysicsTier.MAGNETIC_DIPOLE:
                    e0f = _uniform_field_slope(b, 0.0, b.shape.a)
                    q_a = p_z + e0f * b.shape.a / c
                    k3sq = 2.0 * epsilon - q_a * q_a
                else:
                    k3sq = 2.0 * epsilon - p_z * p_z
                if k3sq <= 0.0:
                    raise UnsupportedCombinationError(
                        "transmitted channel is closed behind the barrier"
                    )
                k_out = math.sqrt(k3sq)
                x_anchor = float(x[-1])
                anchor_k = k_out
            else:
                x_anchor = float(x[-1]) + _ANCHOR_MARGIN * (float(x[-1]) - x_exit)
                anchor_k = None
            x_low = min(float(x[0]), -0.05 * max(x_exit, 1e-6))
            evaluate_raw = _ode_evaluator(k2fun, x_anchor, x_low, anchor_k)
            # normalize to a unit-amplitude incident wave
            u_n, du_n = evaluate_raw(np.array([x_low]))
            inc = (
                (k1 * u_n[0] - 1j * du_n[0])
                / (2.0 * k1)
                * cmath.exp(-1j * k1 * x_low)
            )
            refl = (
                (k1 * u_n[0] + 1j * du_n[0])
                / (2.0 * k1)
                * cmath.exp(1j * k1 * x_low)
            )

            def evaluate(xs, _raw=evaluate_raw, _inc=inc):
                uu, dd = _raw(xs)
                return uu / _inc, dd / _inc

            coeffs = {"R": complex(refl / inc), "T": None, "C1": None, "C2": None}
            if isinstance(b.shape, Square):
                u_r, _ = evaluate(np.array([x_anchor]))
                coeffs["T"] = complex(u_r[0] * cmath.exp(-1j * k_out * x_anchor))

        u, du, phi, refine = _phase_and_samples(x, evaluate, k1)
        meta = {
            "backend": used,
            "geometry": "scattering",
            "x_entry": x_entry,
            "x_exit": x_exit,
            "k_in": k1,
            "k_out": k_out,
            "refine": refine,
        }
        return SteadyState(
            x=x, u=u, du=du, phi=phi, epsilon=epsilon, p_z=p_z, tier=tier,
            matching_coeffs=coeffs, meta=meta,
        )

    # ---- outgoing / tunnel-ionization geometry ----
    appr = approximant
    if appr is None:
        appr = barrier_approximant(b, epsilon, p_z, tier, c=c)
    if x is None:
        x = np.linspace(appr.x_entry, far_factor * appr.x_exit, n_grid)
    x = _validate_grid(x)
    if x[-1] <= appr.x_exit:
        raise ParameterError(
            f"grid must extend beyond the exit point {appr.x_exit:.6g}"
        )

    k2loc = _k_squared_local(appr, epsilon, c)
    evaluate = None
    used = backend
    if backend in ("auto", "closed"):
        try:
            evaluate = _closed_outgoing(
                appr, epsilon, c, (float(x[0]), float(x[-1]))
            )
            used = "closed"
        except (RangeError, UnsupportedCombinationError):
            if backend == "closed":
                raise
            evaluate = None
    if evaluate is None:
        used = "ode"
        x_anchor = float(x[-1]) + _ANCHOR_MARGIN * (float(x[-1]) - appr.x_exit)
        evaluate = _ode_evaluator(k2loc, x_anchor, float(x[0]), None)

    u, du, phi, refine = _phase_and_samples(x, evaluate, None)
    coeffs = {"R": None, "T": None, "C1": None, "C2": None}
    if used == "closed":
        coeffs["C1"], coeffs["C2"] = 1.0 + 0j, 0j
    meta = {
        "backend": used,
        "geometry": "outgoing",
        "x_entry": appr.x_entry,
        "x_exit": appr.x_exit,
        "k_in": None,
        "k_out": None,
        "refine": refine,
        "approximant": appr,
    }
    return SteadyState(
        x=x, u=u, du=du, phi=phi, epsilon=epsilon, p_z=p_z, tier=tier,
        matching_coeffs=coeffs, meta=meta,
    )


# ---------------------------------------------------------------------------
# phase derivatives: Wigner trajectory and drift
# ---------------------------------------------------------------------------


def _family_derivative(
    solver: Callable, center: float, delta: float, workers
) -> tuple[np.ndarray, np.ndarray, float, list[SteadyState]]:
    """d(phi)/d(parameter) at center by central differences with one
    Richardson level (steps delta and delta/2); raises ConvergenceError
    when halving the step moves the raw estimate by >= 0.5%."""
    values = [center + delta, center - delta,
              center + 0.5 * delta, center - 0.5 * delta]
    states = _map_parallel(solver, values, workers)
    x0 = states[0].x
    for s in states[1:]:
        if s.x.shape != x0.shape or not np.array_equal(s.x, x0):
            raise ParameterError(
                "family members must share one grid; pass an explicit x to "
                "the solver closure"
            )
    phis = _align_phases(np.array([s.phi for s in states]))
    full = (phis[0] - phis[1]) / (2.0 * delta)
    half = (phis[2] - phis[3]) / delta
    scale = max(float(np.abs(half).max()), 1e-300)
    dev = np.abs(half - full)
    worst = int(np.argmax(dev))
    rel = float(dev[worst]) / scale
    if rel >= _CONVERGENCE_LIMIT:
        raise ConvergenceError(
            "derivative of the phase did not converge: step "
            f"{delta:.3e} gives {full[worst]:.9e}, step {0.5 * delta:.3e} "
            f"gives {half[worst]:.9e} at x={x0[worst]:.6g} "
            f"(relative change {rel:.2e} >= {_CONVERGENCE_LIMIT})"
        )
    richardson = (4.0 * half - full) / 3.0
    return richardson, x0, rel, states


def wigner_trajectory(
    solver: Callable[[float], SteadyState],
    epsilon0: float,
    delta_epsilon: float | None = None,
    *,
    workers: int | None = None,
) -> Trajectory:
    """Wigner trajectory tau(x) = d(phi)/d(epsilon) at epsilon0.

    solver maps an energy to a SteadyState; all states must share one
    grid (build the closure with an explicit x).  The derivative uses
    central differences at delta_epsilon (default 1e-4*|epsilon0|) with
    one Richardson extrapolation level; non-convergence under step
    halving raises ConvergenceError reporting both estimates.
    """
    epsilon0 = float(epsilon0)
    delta = (
        DELTA_EPSILON_FACTOR * abs(epsilon0)
        if delta_epsilon is None
        else float(delta_epsilon)
    )
    if not 0.0 < delta < 0.5 * abs(epsilon0):
        raise ParameterError(
            f"delta_epsilon must lie in (0, |epsilon0|/2), got {delta}"
        )
    tau, x, rel, states = _family_derivative(solver, epsilon0, delta, workers)
    meta = {
        "epsilon0": epsilon0,
        "delta_epsilon": delta,
        "convergence": rel,
        "tier": states[0].tier,
        "p_z": states[0].p_z,
    }
    return Trajectory(x=x, tau=tau, z=None, provenance="wigner", meta=meta)


def wigner_drift(
    solver: Callable[[float], SteadyState],
    p_z0: float,
    delta_p: float | None = None,
    *,
    workers: int | None = None,
) -> Trajectory:
    """Transverse displacement z(x) = -d(phi)/d(p_z) at p_z0.

    solver maps a canonical transverse momentum to a SteadyState on a
    fixed grid.  The default step is 1e-4 times the characteristic
    momentum max(|p_z0|, sqrt(2|epsilon|)).
    """
    p_z0 = float(p_z0)
    if delta_p is None:
        probe = solver(p_z0)
        delta = DELTA_EPSILON_FACTOR * max(
            abs(p_z0), math.sqrt(2.0 * abs(probe.epsilon))
        )
    else:
        delta = float(delta_p)
    if not delta > 0.0:
        raise ParameterError(f"delta_p must be > 0, got {delta}")
    deriv, x, rel, states = _family_derivative(solver, p_z0, delta, workers)
    meta = {
        "p_z0": p_z0,
        "delta_p": delta,
        "convergence": rel,
        "tier": states[0].tier,
        "epsilon": states[0].epsilon,
    }
    return Trajectory(x=x, tau=None, z=-deriv, provenance="wigner", meta=meta)


# ---------------------------------------------------------------------------
# classical reference
# ---------------------------------------------------------------------------


def _speed_factory(
    k2fun: Callable, tier: PhysicsTier, epsilon: float, vfun: Callable | None,
    c: float,
) -> Callable:
    """Longitudinal velocity in the allowed region from the tier's
    dispersion (relativistic group velocity for Klein-Gordon)."""
    if tier == PhysicsTier.KLEIN_GORDON:
        def speed(xs):
            xs = np.asarray(xs, dtype=float)
            p = np.sqrt(np.maximum(np.asarray(k2fun(xs), dtype=float), 0.0))
            e_tot = c * c + epsilon - np.asarray(vfun(xs), dtype=float)
            return c * c * p / e_tot

        return speed

    def speed(xs):
        return np.sqrt(
            np.maximum(np.asarray(k2fun(np.asarray(xs, dtype=float)), float), 0.0)
        )

    return speed


def _cumulative_motion(
    fn_over_v: Callable, x_from: float, xs: np.ndarray
) -> np.ndarray:
    """Cumulative integral of fn(x)/v(x) dx from x_from along xs (all
    >= x_from), through the substitution s = sqrt(x - x_from) that
    removes the inverse-square-root stop at a smooth turning point.
    fn_over_v maps x arrays to fn/v values; panels use 8-point
    Gauss-Legendre, whose nodes never touch s = 0."""
    prepended = xs[0] > x_from
    if prepended:
        xs = np.concatenate([[x_from], xs])
    s_edges = np.sqrt(np.maximum(xs - x_from, 0.0))
    mids = 0.5 * (s_edges[1:] + s_edges[:-1])
    halves = 0.5 * (s_edges[1:] - s_edges[:-1])
    nodes = mids[:, None] + halves[:, None] * _GL_NODES[None, :]
    vals = 2.0 * nodes * fn_over_v(x_from + nodes * nodes)
    panels = halves * (vals * _GL_WEIGHTS[None, :]).sum(axis=1)
    out = np.empty(xs.shape, dtype=float)
    out[0] = 0.0
    np.cumsum(panels, out=out[1:])
    return out[1:] if prepended else out


def classical_trajectory(
    b: BarrierModel,
    epsilon0: float,
    p_z: float,
    tier,
    *,
    x: np.ndarray | None = None,
    far_factor: float = FAR_FACTOR_DEFAULT,
    n_grid: int = GRID_POINTS_DEFAULT,
    c: float = C_DEFAULT,
) -> Trajectory:
    """Classical reference trajectory on the true potential: Newtonian
    (or relativistic, for the Klein-Gordon tier) motion in the allowed
    regions, zero traversal time across the classically forbidden one.

    For scattering geometries tau(0)=0 at the barrier gate, tau < 0 on
    the approach, tau resumes at the exit with the local velocity (from
    rest after a smooth exit).  For tunnel-ionization geometries the
    motion starts from rest at the exit point and tau = 0 before it.
    z(x) accumulates d(z)/d(x) = q_z/v over the allowed regions.
    """
    tier = _tier_of(tier)
    epsilon0 = float(epsilon0)
    p_z = float(p_z)
    k2fun = _k_squared_model(b, epsilon0, p_z, tier, c)
    scattering = float(k2fun(-1.0)) > 0.0
    vfun = _gated_potential(b)
    speed = _speed_factory(k2fun, tier, epsilon0, vfun, c)

    def qz_over_v(xs):
        xs = np.asarray(xs, dtype=float)
        q = p_z + np.asarray(b.vector_potential_z(xs), dtype=float) / c
        return q / speed(xs)

    def inv_v(xs):
        return 1.0 / speed(xs)

    if scattering:
        x_entry, x_exit = _scattering_exit(b, epsilon0, p_z, tier, c)
        if x is None:
            x = default_grid(
                b, epsilon0, p_z, tier, far_factor=far_factor, n_grid=n_grid, c=c
            )
        x = _validate_grid(x)
        tau = np.zeros(x.shape)
        z = np.zeros(x.shape)
        before = x < x_entry
        after = x > x_exit
        if np.any(before):
            # mirror to xi = x_entry - x so the edge sits at xi = 0
            xi = (x_entry - x[before])[::-1]

            def mirrored_inv_v(xs):
                return 1.0 / speed(x_entry - np.asarray(xs))

            def mirrored_qv(xs):
                return qz_over_v(x_entry - np.asarray(xs))

            tau[before] = -_cumulative_motion(mirrored_inv_v, 0.0, xi)[::-1]
            z[before] = -_cumulative_motion(mirrored_qv, 0.0, xi)[::-1]
        if np.any(after):
            tau[after] = _cumulative_motion(inv_v, x_exit, x[after])
            z[after] = _cumulative_motion(qz_over_v, x_exit, x[after])
        meta = {"x_entry": x_entry, "x_exit": x_exit, "geometry": "scattering"}
        return Trajectory(x=x, tau=tau, z=z, provenance="classical", meta=meta)

    # outgoing geometry: from rest at the exit of the true barrier
    x0, xe = turning_points(b, epsilon0, 0.0, p_z, tier, c)
    if x is None:
        x = np.linspace(x0, far_factor * xe, n_grid)
    x = _validate_grid(x)
    tau = np.zeros(x.shape)
    z = np.zeros(x.shape)
    after = x > xe
    if np.any(after):
        tau[after] = _cumulative_motion(inv_v, xe, x[after])
        z[after] = _cumulative_motion(qz_over_v, xe, x[after])
    meta = {"x_entry": x0, "x_exit": xe, "geometry": "outgoing"}
    return Trajectory(x=x, tau=tau, z=z, provenance="classical", meta=meta)


# ---------------------------------------------------------------------------
# model-barrier comparison
# ---------------------------------------------------------------------------


def model_delay(
    b: BarrierModel,
    epsilon0: float,
    p_z: float,
    tier,
    *,
    backend: str = "auto",
    x: np.ndarray | None = None,
    far_factor: float = FAR_FACTOR_DEFAULT,
    n_grid: int = GRID_POINTS_DEFAULT,
    delta_epsilon: float | None = None,
    delta_p: float | None = None,
    with_drift: bool | None = None,
    c: float = C_DEFAULT,
    workers: int | None = None,
) -> ModelDelay:
    """Wigner-vs-classical comparison for a model barrier.

    Solves the steady-state family around epsilon0 (and, when
    with_drift -- default: whenever the model carries a transverse
    vector potential -- around p_z) on one grid, builds the classical
    reference, and extrapolates the far-field delay and drift
    difference from the window [far_factor/2, far_factor] times the
    exit length.
    """
    tier = _tier_of(tier)
    epsilon0 = float(epsilon0)
    if x is None:
        x = default_grid(
            b, epsilon0, p_z, tier, far_factor=far_factor, n_grid=n_grid, c=c
        )
    x = _validate_grid(x)
    if with_drift is None:
        with_drift = b.a_z is not None

    def eps_solver(e):
        return solve_steady(b, e, p_z, tier, backend=backend, x=x, c=c)

    wig = wigner_trajectory(
        eps_solver, epsilon0, delta_epsilon, workers=workers
    )
    cla = classical_trajectory(b, epsilon0, p_z, tier, x=x, c=c)
    scale = cla.meta["x_exit"] if cla.meta["x_exit"] > 0 else float(x[-1]) / far_factor
    lo, hi = 0.5 * far_factor * scale, far_factor * scale
    hi = min(hi, float(x[-1]))
    far_delay = _far_intercept(x, wig.tau - cla.tau, lo, hi)

    z_w = None
    drift_diff = None
    drift_meta = None
    if with_drift:
        def p_solver(p):
            return solve_steady(b, epsilon0, p, tier, backend=backend, x=x, c=c)

        drift = wigner_drift(p_solver, p_z, delta_p, workers=workers)
        z_w = drift.z
        drift_diff = _far_intercept(x, z_w - cla.z, lo, hi)
        drift_meta = drift.meta

    meta = dict(wig.meta)
    meta.update(
        {"far_window": (lo, hi), "far_delay": far_delay, "drift": drift_meta}
    )
    wig_full = Trajectory(
        x=x, tau=wig.tau, z=z_w, provenance="wigner", meta=meta
    )
    return ModelDelay(
        wigner=wig_full,
        classical=cla,
        far_delay=far_delay,
        far_drift_difference=drift_diff,
    )


# ---------------------------------------------------------------------------
# tunnel-ionization delay
# ---------------------------------------------------------------------------


def _classical_on_approximant(
    appr: BarrierApproximant, epsilon0: float, x: np.ndarray, c: float
) -> np.ndarray:
    """Classical arrival time from rest at the approximant's exit, on
    the same approximant the quantum solve used (the two far fields
    must share one potential for the delay difference to converge)."""
    k2loc = _k_squared_local(appr, epsilon0, c)
    if appr.tier == PhysicsTier.KLEIN_GORDON:
        def inv_v(xs):
            p = np.sqrt(np.maximum(np.asarray(k2loc(xs), dtype=float), 0.0))
            e_tot = c * c + epsilon0 - np.asarray(appr.v_eff(xs), dtype=float)
            return e_tot / (c * c * p)
    else:
        def inv_v(xs):
            return 1.0 / np.sqrt(
                np.maximum(np.asarray(k2loc(xs), dtype=float), 1e-300)
            )

    # the family exit moves with epsilon; rest starts where the
    # approximant's own turning point sits at epsilon0
    xe = appr.x_exit
    if epsilon0 != appr.epsilon_built:
        if appr.kind == "linear":
            xe = appr.x_exit + (epsilon0 - appr.epsilon_built) / appr.v1
        else:
            grid_hi = float(x[-1])
            xe = float(
                brentq(
                    lambda xx: float(k2loc(np.array([xx]))[0]),
                    appr.x_entry,
                    grid_hi,
                    xtol=1e-14,
                )
            )
    tau = np.zeros(x.shape)
    after = x > xe
    if np.any(after):
        tau[after] = _cumulative_motion(inv_v, xe, x[after])
    return tau


def _tunneling_weight(
    b: BarrierModel, epsilon: float, p_z: float, tier: PhysicsTier, c: float
) -> float:
    """Under-barrier action integral of |p_x|; the most probable p_z
    minimizes it."""
    try:
        x0, xe = turning_points(b, epsilon, 0.0, p_z, tier, c)
    except NoBarrierError:
        return math.inf
    theta = np.linspace(0.0, 0.5 * math.pi, 257)
    s2 = np.sin(theta) ** 2
    xs = x0 + (xe - x0) * s2
    jac = (xe - x0) * 2.0 * np.sin(theta) * np.cos(theta)
    pxsq = np.asarray(p_x_squared(b, epsilon, 0.0, p_z, tier, xs, c), dtype=float)
    integrand = np.sqrt(np.maximum(-pxsq, 0.0)) * jac
    return float(np.trapezoid(integrand, theta))


def _most_probable_p_z(
    b: BarrierModel, epsilon: float, tier: PhysicsTier, c: float
) -> float:
    scale = abs(epsilon) / c
    res = minimize_scalar(
        lambda p: _tunneling_weight(b, epsilon, p, tier, c),
        bounds=(-4.0 * scale, 2.0 * scale),
        method="bounded",
        options={"xatol": 1e-5 * scale},
    )
    return float(res.x)


def _tier_bound_energy(params: PhysParams, tier: PhysicsTier, shape) -> float:
    if isinstance(shape, ParabolicCoord):
        if tier != PhysicsTier.NONREL:
            raise UnsupportedCombinationError(
                "the parabolic-coordinate potential is defined for the "
                "NonRel tier only (it is hydrogen-scaled)"
            )
        return ParabolicCoord.CHANNEL_ENERGY
    if tier == PhysicsTier.KLEIN_GORDON:
        c2 = params.c * params.c
        return -(c2 - math.sqrt(c2 * c2 - params.kappa * params.kappa * c2))
    return -params.ip_nonrel


def tunnelion_delay(
    b: BarrierModel,
    params: PhysParams,
    tier,
    *,
    p_z0: float | None = None,
    kind: str | None = None,
    barrier_treatment: str = "approximant",
    backend: str = "auto",
    far_factor: float = FAR_FACTOR_DEFAULT,
    n_grid: int = GRID_POINTS_DEFAULT,
    delta_epsilon: float | None = None,
    workers: int | None = None,
) -> TunnelingDelay:
    """Tunnel-ionization Wigner trajectory and far-field time delay.

    Pipeline: classify the regime (over-barrier raises NoBarrierError);
    pick the canonical p_z (0, or the tunneling-weight maximizer for
    the magnetic-dipole tier); build the regime approximant at the exit
    point and hold it fixed across the energy family; differentiate the
    outgoing phase for tau(x); subtract the entry-point value,
    tau_TI(x) = tau(x) - tau(x0); build the classical reference from
    rest at the exit on the same approximant; extrapolate
    tau_w = tau_classical - tau_TI to the far field from the window
    [far_factor/2, far_factor]*x_exit by an a + b/x fit.

    barrier_treatment="exact" replaces the approximant with the
    unexpanded potential (ODE backend; near-threshold comparison).
    Returns (trajectory, tau_w); the trajectory's meta carries the
    classical reference ("classical"), the regime report ("regime"),
    the approximant, p_z0 and the fit window.
    """
    tier = _tier_of(tier)
    if barrier_treatment not in ("approximant", "exact"):
        raise ParameterError(
            f"barrier_treatment must be 'approximant' or 'exact', got "
            f"{barrier_treatment!r}"
        )
    shape = b.shape
    if isinstance(shape, (Coulomb1D, ZeroRangeTriangular, ParabolicCoord)):
        _check_params_consistency(shape, params)
        report = classify_regime(b, params)
        if report.classification == "over-barrier":
            raise NoBarrierError(
                "over-the-barrier regime (scaled field value "
                f"{report.scaled_field_value:.3g}); no tunneling delay is defined"
            )
    else:
        report = None
    c = params.c
    eps0 = _tier_bound_energy(params, tier, shape)

    if p_z0 is None:
        p_z0 = (
            _most_probable_p_z(b, eps0, tier, c)
            if tier == PhysicsTier.MAGNETIC_DIPOLE
            else 0.0
        )
    p_z0 = float(p_z0)

    appr = barrier_approximant(
        b, eps0, p_z0, tier,
        kind=("exact" if barrier_treatment == "exact" else kind),
        c=c,
    )
    x = np.linspace(appr.x_entry, far_factor * appr.x_exit, n_grid)

    def solver(e):
        return solve_steady(
            b, e, p_z0, tier, backend=backend, x=x, c=c, approximant=appr
        )

    wig = wigner_trajectory(solver, eps0, delta_epsilon, workers=workers)
    tau_ti = wig.tau - wig.tau[0]
    tau_c = _classical_on_approximant(appr, eps0, x, c)
    lo, hi = 0.5 * far_factor * appr.x_exit, far_factor * appr.x_exit
    hi = min(hi, float(x[-1]))
    tau_w = _far_intercept(x, tau_c - tau_ti, lo, hi)

    classical = Trajectory(
        x=x, tau=tau_c, z=None, provenance="classical",
        meta={"x_entry": appr.x_entry, "x_exit": appr.x_exit,
              "geometry": "outgoing"},
    )
    meta = dict(wig.meta)
    meta.update(
        {
            "classical": classical,
            "tau_w": tau_w,
            "regime": report,
            "p_z0": p_z0,
            "approximant": appr,
            "far_window": (lo, hi),
            "barrier_treatment": barrier_treatment,
        }
    )
    trajectory = Trajectory(
        x=x, tau=tau_ti, z=None, provenance="wigner", meta=meta
    )
    return TunnelingDelay(trajectory=trajectory, tau_w=tau_w)


# ---------------------------------------------------------------------------
# binding-energy scan
# ---------------------------------------------------------------------------


def delay_vs_ip_scan(
    field_ratios: Sequence[float],
    kappas: Sequence[float],
    tiers: Sequence = (PhysicsTier.NONREL, PhysicsTier.KLEIN_GORDON),
    *,
    c: float = C_DEFAULT,
    far_factor: float = FAR_FACTOR_DEFAULT,
    n_grid: int = GRID_POINTS_DEFAULT,
    workers: int | None = None,
) -> list[dict]:
    """Scaled Wigner delay tau_w * I_p against binding energy for the
    zero-range (triangular-barrier) model, per field ratio and tier.

    Each row is {"tier", "field_ratio", "kappa", "ip", "tau_w",
    "tau_w_ip"}: I_p is the tier's own binding energy (kappa^2/2
    nonrelativistically, the relativistic defect for Klein-Gordon).
    The laser frequency never enters: the steady states are
    quasistatic.
    """
    tiers = [_tier_of(t) for t in tiers]
    ratios = [float(r) for r in field_ratios]
    kaps = [float(k) for k in kappas]
    if not ratios or not kaps:
        raise ParameterError("field_ratios and kappas must be non-empty")

    jobs = [
        (ratio, kappa, tier)
        for ratio in ratios
        for kappa in kaps
        for tier in tiers
    ]

    def run(job):
        ratio, kappa, tier = job
        e0 = ratio * kappa**3
        params = PhysParams(kappa=kappa, E0=e0, omega=1.0, c=c)
        if tier == PhysicsTier.KLEIN_GORDON:
            ip = PhysParams(
                kappa=kappa, E0=e0, omega=1.0, c=c, ip_mode="relativistic"
            ).ip
        else:
            ip = params.ip_nonrel
        model = BarrierModel(ZeroRangeTriangular(ip=ip, e0=e0))
        res = tunnelion_delay(
            model, params, tier,
            far_factor=far_factor, n_grid=n_grid, workers=1,
        )
        return {
            "tier": tier.value,
            "field_ratio": ratio,
            "kappa": kappa,
            "ip": ip,
            "tau_w": res.tau_w,
            "tau_w_ip": res.tau_w * ip,
        }

    return _map_parallel(run, jobs, workers)


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------


def dump_delay_csv(
    fh: IO[str], wigner: Trajectory, classical: Trajectory
) -> None:
    """Write the delay comparison as CSV with columns x, tau_wigner,
    tau_classical and, when both trajectories carry a transverse
    displacement, z_wigner, z_classical."""
    if wigner.tau is None or classical.tau is None:
        raise ParameterError("both trajectories must carry tau samples")
    if wigner.x.shape != classical.x.shape or not np.array_equal(
        wigner.x, classical.x
    ):
        raise ParameterError("trajectories must share one grid")
    with_z = wigner.z is not None and classical.z is not None
    writer = csv.writer(fh, lineterminator="\n")
    header = ["x", "tau_wigner", "tau_classical"]
    if with_z:
        header += ["z_wigner", "z_classical"]
    writer.writerow(header)
    for i in range(wigner.x.size):
        row = [wigner.x[i], wigner.tau[i], classical.tau[i]]
        if with_z:
            row += [wigner.z[i], classical.z[i]]
        writer.writerow([repr(float(v)) for v in row])
