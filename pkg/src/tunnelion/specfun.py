"""Complex special functions and complex root finding.

Provides the Airy pair, the parabolic cylinder function D_a(z) for complex
order and argument, and a Newton root finder for analytic functions, as
needed by the steady-state and saddle-point solvers.

Conventions
-----------
* D_a(z) is the standard Whittaker parabolic cylinder function, the solution
  of D'' + (a + 1/2 - z^2/4) D = 0 that is recessive as z -> +inf on the
  real axis (D_a(z) ~ exp(-z^2/4) z^a).
* Principal branch for every fractional power and logarithm.
* NaN is treated as an error state, never a value: non-finite results raise.

Backends for D_a(z)
-------------------
``series``      Maclaurin evaluation through the confluent hypergeometric
                combination; exact at z=0 but loses digits through
                cancellation when the recessive solution is requested deep
                in a growth region. The loss is *measured* (peak partial-sum
                magnitude vs. result magnitude) and reported, not guessed.
``asymptotic``  Single asymptotic series exp(-z^2/4) z^a sum c_n z^(-2n)
                with smallest-term truncation, valid for
                |z| >= 1.5 max(|a|, |a+1|) + 8 and |arg z| <= pi/2; between
                pi/2 and 3pi/4 the exact connection formula adds the
                subdominant companion, with both pieces evaluated inside
                their own validity sectors.
``ode``         Direct integration of the Weber equation along the ray
                through z, with segmentwise renormalization and log-scale
                bookkeeping so dichotomic solution pairs spanning hundreds
                of e-folds stay representable.  On rays where D_a is
                recessive the integration runs inward from an asymptotic
                anchor; where D_a grows outward it runs outward from the
                exact z = 0 values, so the tracked solution is always
                followed in its growing (stable) direction.
``auto``        series (when trusted) -> asymptotic (in range) -> ode.
``cross-check`` auto value plus an independent second route; a relative
                disagreement beyond tolerance raises AccuracyWarning.
"""

from __future__ import annotations

import cmath
import dataclasses
import math
import warnings
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import airy as _scipy_airy
from scipy.special import rgamma as _rgamma

from tunnelion.core import ConvergenceError, RangeError

__all__ = [
    "AccuracyWarning",
    "AIRY_RADIUS",
    "PCF_A_RADIUS",
    "PCF_Z_RADIUS",
    "ComplexSaddle",
    "airy_ai",
    "airy_bi",
    "airy_all",
    "pcf_d",
    "pcf_d_ray",
    "find_complex_root",
]


class AccuracyWarning(UserWarning):
    """Result returned, but its accuracy is degraded or unverified."""


_SQRT_PI = math.sqrt(math.pi)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_LN2 = math.log(2.0)

# --------------------------------------------------------------------------
# Airy functions
# --------------------------------------------------------------------------

AIRY_RADIUS = 100.0
"""Supported |z| for the Airy pair.  Beyond ~104 the dominant solution
exceeds the double-precision range (exp((2/3)|z|^(3/2)) > 1e308), so the
bound is where representability, not algorithm accuracy, ends."""

_AIRY_CROSSOVER_HALF_WIDTH = 0.05
_ANTI_STOKES = 2.0 * math.pi / 3.0


def airy_all(z: complex) -> tuple[complex, complex, complex, complex]:
    """Return (Ai, Ai', Bi, Bi') at complex z.

    Raises RangeError for |z| > AIRY_RADIUS or on overflow; warns with
    AccuracyWarning near the anti-Stokes rays arg z = +-2pi/3 at large |z|,
    where the asymptotic representations of Ai and Bi exchange dominance and
    relative accuracy of the subdominant part degrades.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise RangeError(f"airy: non-finite argument {z!r}")
    if abs(z) > AIRY_RADIUS:
        raise RangeError(
            f"airy: |z|={abs(z):.3g} exceeds the supported radius {AIRY_RADIUS}"
        )
    if abs(z) > 8.0:
        th = abs(cmath.phase(z))
        if abs(th - _ANTI_STOKES) < _AIRY_CROSSOVER_HALF_WIDTH:
            warnings.warn(
                f"airy: z={z:.6g} lies in the asymptotic crossover zone near "
                "arg z = +-2pi/3; subdominant-component accuracy is degraded",
                AccuracyWarning,
                stacklevel=2,
            )
    vals = _scipy_airy(z)
    out = tuple(complex(v) for v in vals)
    if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in out):
        raise RangeError(f"airy: overflow at z={z:.6g}")
    return out  # type: ignore[return-value]


def airy_ai(z: complex) -> complex:
    """Airy function Ai at complex z."""
    return airy_all(z)[0]


def airy_bi(z: complex) -> complex:
    """Airy function Bi at complex z."""
    return airy_all(z)[2]


# --------------------------------------------------------------------------
# Parabolic cylinder function D_a(z)
# --------------------------------------------------------------------------

PCF_A_RADIUS = 100.0
"""Supported |a| for pcf_d."""

PCF_Z_RADIUS = 150.0
"""Supported |z| for pcf_d."""

_SERIES_MAX_TERMS = 1200
_SERIES_TRUST = 1e-9       # auto accepts the series below this measured error
_SERIES_RADIUS = 6.0       # auto tries the series first inside this radius
_ASYMP_MARGIN = 8.0        # asymptotic validity: |z| >= 1.5 max(|a|,|a+1|) + 8
_ODE_ANCHOR_FACTOR = 1.8   # anchor radius factor (margin over the 1.5 minimum)
_RENORM_EFOLDS = 250.0     # renormalize the ODE mantissa every ~250 e-folds
_LOG_REPRESENTABLE = 700.0


def _check_pcf_range(a: complex, z: complex) -> tuple[complex, complex]:
    a, z = complex(a), complex(z)
    for name, v in (("a", a), ("z", z)):
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise RangeError(f"pcf_d: non-finite {name}={v!r}")
    if abs(a) > PCF_A_RADIUS:
        raise RangeError(f"pcf_d: |a|={abs(a):.3g} exceeds {PCF_A_RADIUS}")
    if abs(z) > PCF_Z_RADIUS:
        raise RangeError(f"pcf_d: |z|={abs(z):.3g} exceeds {PCF_Z_RADIUS}")
    return a, z


def _kummer_m(alpha: complex, beta: float, t: complex) -> tuple[complex, float, int]:
    """Confluent hypergeometric M(alpha, beta, t) by direct summation.

    Returns (sum, peak |partial term|, terms used); the peak magnitude feeds
    the a-posteriori cancellation estimate of the series backend.
    """
    s = 1.0 + 0.0j
    term = 1.0 + 0.0j
    peak = 1.0
    for n in range(_SERIES_MAX_TERMS):
        term *= (alpha + n) / (beta + n) * t / (n + 1)
        s += term
        mag = abs(term)
        if mag > peak:
            peak = mag
        if mag < 1e-18 * max(abs(s), 1e-300):
            return s, peak, n + 1
    raise ConvergenceError(
        f"pcf_d series: Kummer sum not converged after {_SERIES_MAX_TERMS} "
        f"terms (alpha={alpha:.3g}, t={t:.3g})"
    )


def _pcf_series(a: complex, z: complex) -> tuple[complex, float, int]:
    """Maclaurin-type evaluation of D_a(z).

    Returns (value, estimated relative error, terms used).  The error
    estimate is eps times the measured cancellation ratio: the largest
    intermediate magnitude over the magnitude of the result.
    """
    t = 0.5 * z * z
    m_even, peak_even, n_even = _kummer_m(-0.5 * a, 0.5, t)
    m_odd, peak_odd, n_odd = _kummer_m(0.5 * (1.0 - a), 1.5, t)
    # reciprocal gamma is entire, so integer orders (gamma poles) stay exact
    rg_even = complex(_rgamma(complex(0.5 * (1.0 - a))))
    rg_odd = complex(_rgamma(complex(-0.5 * a)))
    even = m_even * rg_even
    odd = math.sqrt(2.0) * z * m_odd * rg_odd
    prefactor = cmath.exp(0.5 * a * _LN2 - 0.25 * z * z) * _SQRT_PI
    value = prefactor * (even - odd)
    scale = max(
        peak_even * abs(rg_even),
        math.sqrt(2.0) * abs(z) * peak_odd * abs(rg_odd),
        1e-300,
    )
    combo = abs(even - odd)
    # roundoff injected near the peak term is amplified by the cancellation
    # ratio and accumulates over the summation length
    n_terms = n_even + n_odd
    est = n_terms * 1e-16 * scale / max(combo, 1e-300) + 1e-15
    return value, est, n_terms


def _asymp_sum(a: complex, z: complex) -> complex:
    """exp(-z^2/4) z^a sum_n c_n z^(-2n), truncated at the smallest term.

    The caller guarantees |z| >= 1.5 max(|a|, |a+1|) + 8 and |arg z| <= pi/2
    so the smallest term sits at or below 5e-14 of the sum.
    """
    s = 1.0 + 0.0j
    c = 1.0 + 0.0j
    prev = math.inf
    for n in range(80):
        c = -c * (a - 2 * n) * (a - 2 * n - 1) / (2.0 * (n + 1))
        term = c * z ** (-2 * (n + 1))
        mag = abs(term)
        if mag > prev:
            break
        s += term
        prev = mag
        if mag < 1e-17 * abs(s):
            break
    return cmath.exp(-0.25 * z * z + a * cmath.log(z)) * s


def _asymp_sum_log(a: complex, z: complex) -> tuple[complex, complex]:
    """As _asymp_sum but returning (mantissa sum, complex log of the rest),
    for anchors whose value itself is out of double range."""
    s = 1.0 + 0.0j
    c = 1.0 + 0.0j
    prev = math.inf
    for n in range(80):
        c = -c * (a - 2 * n) * (a - 2 * n - 1) / (2.0 * (n + 1))
        term = c * z ** (-2 * (n + 1))
        mag = abs(term)
        if mag > prev:
            break
        s += term
        prev = mag
        if mag < 1e-17 * abs(s):
            break
    return s, -0.25 * z * z + a * cmath.log(z)


def _asymp_radius(a: complex) -> float:
    return 1.5 * max(abs(a), abs(a + 1.0)) + _ASYMP_MARGIN


def _pcf_asymp(a: complex, z: complex) -> complex:
    """Asymptotic evaluation for |z| >= _asymp_radius(a), |arg z| <= 3pi/4."""
    r_min = _asymp_radius(a)
    if abs(z) < 0.98 * r_min:
        raise RangeError(
            f"pcf_d asymptotic: |z|={abs(z):.3g} below validity radius "
            f"{r_min:.3g} for |a|={abs(a):.3g}"
        )
    th = cmath.phase(z)
    if abs(th) <= 0.5 * math.pi + 1e-12:
        return _asymp_sum(a, z)
    if abs(th) <= 0.75 * math.pi + 1e-12:
        # Exact connection: D_a(z) = e^(+- i pi a) D_a(-z)
        #   + sqrt(2 pi)/Gamma(-a) e^(+- i pi (a+1)/2) D_(-a-1)(-+ i z),
        # upper signs for Im z > 0.  Both companion arguments then lie inside
        # |arg| <= pi/2, and the added term is subdominant here, so the
        # addition cannot cancel catastrophically.
        sign = 1.0 if th > 0 else -1.0
        rot = cmath.exp(sign * 1j * math.pi * a)
        corr = (
            _SQRT_2PI
            * complex(_rgamma(complex(-a)))
            * cmath.exp(sign * 1j * math.pi * (a + 1.0) / 2.0)
            * _asymp_sum(-a - 1.0, -sign * 1j * z)
        )
        return rot * _asymp_sum(a, -z) + corr
    raise RangeError(
        f"pcf_d asymptotic: |arg z|={abs(th):.3g} > 3pi/4 unsupported "
        "(use the ode backend)"
    )


def _weber_rate(a: complex, lam: complex, t: np.ndarray) -> np.ndarray:
    """Local e-fold rate |Re(lam * sqrt((lam t)^2/4 - a - 1/2))| along a ray."""
    zz = lam * t
    k = np.sqrt(zz * zz / 4.0 - a - 0.5)
    return np.abs(np.real(lam * k))


def pcf_d_ray(
    a: complex,
    direction: complex,
    radii: Sequence[float],
    rtol: float = 1e-12,
) -> np.ndarray:
    """Evaluate D_a(direction * r) for each r in `radii` along one ray.

    The asymptotic modulus of D_a along the ray decides the integration
    direction.  Within |arg direction| <= pi/4, D_a is recessive (or
    neutral) going outward, so the Weber equation is integrated inward
    from an asymptotic anchor at r = 1.8 max(|a|, |a+1|, 1) + 8 (points
    beyond the anchor are evaluated asymptotically in place).  On every
    other ray D_a grows outward -- through its own leading term inside the
    Stokes sector, through the switched-on companion beyond |arg| = 3pi/4
    -- so the integration starts from the exact z = 0 values instead.
    Either way the tracked solution is followed in its growing direction,
    which keeps the integration stable; the mantissa is renormalized every
    ~250 e-folds and the scale is carried as a real log, which keeps
    dichotomies spanning hundreds of e-folds exact.

    radii must be nonnegative; values whose magnitude is not representable
    in double precision raise RangeError.
    """
    a = complex(a)
    if abs(a) > PCF_A_RADIUS:
        raise RangeError(f"pcf_d_ray: |a|={abs(a):.3g} exceeds {PCF_A_RADIUS}")
    lam = complex(direction)
    if lam == 0:
        raise RangeError("pcf_d_ray: direction must be nonzero")
    lam /= abs(lam)
    rs = np.asarray(list(radii), dtype=float)
    if rs.size == 0:
        return np.empty(0, dtype=complex)
    if np.any(rs < 0) or not np.all(np.isfinite(rs)):
        raise RangeError("pcf_d_ray: radii must be finite and nonnegative")
    if abs(cmath.phase(lam)) > 0.25 * math.pi + 1e-12:
        return _ray_outward(a, lam, rs, rtol)
    return _ray_inward(a, lam, rs, rtol)


def _weber_rhs(a: complex, lam: complex) -> Callable:
    def rhs(t: float, yv: np.ndarray) -> list[complex]:
        zz = lam * t
        return [yv[1], (zz * zz / 4.0 - a - 0.5) * lam * lam * yv[0]]

    return rhs


def _renorm(y: np.ndarray, t_now: float, a: complex,
            log_scale: complex) -> tuple[np.ndarray, complex]:
    scale = max(abs(y[0]), abs(y[1]) / max(1.0, 0.5 * t_now + abs(a) ** 0.5))
    if scale > 0 and (scale > 1e100 or scale < 1e-100):
        y = y / scale
        log_scale += math.log(scale)
    return y, log_scale


def _ray_inward(a: complex, lam: complex, rs: np.ndarray,
                rtol: float) -> np.ndarray:
    out = np.empty(rs.size, dtype=complex)
    order = np.argsort(rs)[::-1]  # serve outermost first
    r_anchor = _ODE_ANCHOR_FACTOR * max(abs(a), abs(a + 1.0), 1.0) + _ASYMP_MARGIN

    inner_idx = [int(i) for i in order if rs[i] < r_anchor]
    for i in order:
        if rs[i] >= r_anchor:
            out[int(i)] = _pcf_asymp(a, lam * rs[i])
    if not inner_idx:
        return out

    # anchor in log form (the anchor value itself may be out of double range)
    za = lam * r_anchor
    s0, log0 = _asymp_sum_log(a, za)
    s1, log1 = _asymp_sum_log(a - 1.0, za)
    # d/dt D_a(lam t) = lam * (a D_(a-1)(z) - (z/2) D_a(z))
    ratio = (s1 / s0) * cmath.exp(log1 - log0)
    y = np.array([1.0 + 0.0j, lam * (a * ratio - 0.5 * za)], dtype=complex)
    log_scale = log0 + cmath.log(s0)
    rhs = _weber_rhs(a, lam)

    # renormalization breakpoints from the cumulative WKB e-fold budget
    t_lo = float(rs[np.array(inner_idx)].min())
    fine = np.linspace(t_lo, r_anchor, 4001)
    rate = _weber_rate(a, lam, fine)
    cum = np.concatenate(
        [[0.0], np.cumsum(0.5 * (rate[1:] + rate[:-1]) * np.diff(fine))]
    )
    cum = cum[-1] - cum  # e-folds accumulated integrating inward from anchor
    n_seg = max(1, int(math.ceil(cum[0] / _RENORM_EFOLDS)))
    marks = [
        float(np.interp(k * cum[0] / n_seg, cum[::-1], fine[::-1]))
        for k in range(1, n_seg)
    ]

    stops = sorted(set(float(rs[i]) for i in inner_idx) | set(marks), reverse=True)
    t_now = r_anchor
    targets = {float(rs[i]): [] for i in inner_idx}
    for i in inner_idx:
        targets[float(rs[i])].append(int(i))
    for t_next in stops:
        if t_next < t_now:
            sol = solve_ivp(
                rhs,
                (t_now, t_next),
                y,
                method="DOP853",
                rtol=rtol,
                atol=1e-250,
            )
            if not sol.success:
                raise ConvergenceError(
                    f"pcf_d_ray: Weber integration failed on "
                    f"[{t_next:.3g}, {t_now:.3g}]: {sol.message}"
                )
            y = sol.y[:, -1].astype(complex)
            t_now = t_next
        y, log_scale = _renorm(y, t_now, a, log_scale)
        if t_next in targets:
            value_log = log_scale + (cmath.log(y[0]) if y[0] != 0 else -math.inf)
            for i in targets[t_next]:
                out[i] = _from_log(value_log, f"pcf_d_ray at r={t_next:.6g}")
    return out


def _ray_outward(a: complex, lam: complex, rs: np.ndarray,
                 rtol: float) -> np.ndarray:
    """Outward Weber integration from the exact z = 0 values, for rays on
    which D_a is the growing solution (|arg direction| > pi/4).  Correct on
    every such ray -- the origin values need no asymptotic sector -- and
    stable because the contaminating companion decays relative to D_a."""
    out = np.empty(rs.size, dtype=complex)
    # D_a(0) and D_a'(0) from the reciprocal-gamma closed forms
    d0 = _SQRT_PI * cmath.exp(0.5 * a * _LN2) * complex(
        _rgamma(complex(0.5 * (1.0 - a)))
    )
    d0p = -_SQRT_PI * cmath.exp(0.5 * (a + 1.0) * _LN2) * complex(
        _rgamma(complex(-0.5 * a))
    )
    t_hi = float(rs.max())
    if t_hi == 0.0:
        out[:] = d0
        return out
    y = np.array([d0, lam * d0p], dtype=complex)
    log_scale = 0.0 + 0.0j
    rhs = _weber_rhs(a, lam)

    # renormalization breakpoints from the cumulative WKB e-fold budget
    fine = np.linspace(0.0, t_hi, 4001)
    rate = _weber_rate(a, lam, fine)
    cum = np.concatenate(
        [[0.0], np.cumsum(0.5 * (rate[1:] + rate[:-1]) * np.diff(fine))]
    )
    n_seg = max(1, int(math.ceil(cum[-1] / _RENORM_EFOLDS)))
    marks = [
        float(np.interp(k * cum[-1] / n_seg, cum, fine)) for k in range(1, n_seg)
    ]

    stops = sorted(set(float(r) for r in rs) | set(marks))
    t_now = 0.0
    targets: dict[float, list[int]] = {}
    for i, r in enumerate(rs):
        targets.setdefault(float(r), []).append(i)
    for t_next in stops:
        if t_next > t_now:
            sol = solve_ivp(
                rhs,
                (t_now, t_next),
                y,
                method="DOP853",
                rtol=rtol,
                atol=1e-250,
            )
            if not sol.success:
                raise ConvergenceError(
                    f"pcf_d_ray: Weber integration failed on "
                    f"[{t_now:.3g}, {t_next:.3g}]: {sol.message}"
                )
            y = sol.y[:, -1].astype(complex)
            t_now = t_next
        y, log_scale = _renorm(y, t_now, a, log_scale)
        if t_next in targets:
            value_log = log_scale + (cmath.log(y[0]) if y[0] != 0 else -math.inf)
            for i in targets[t_next]:
                out[i] = _from_log(value_log, f"pcf_d_ray at r={t_next:.6g}")
    return out


def _from_log(value_log: complex, where: str) -> complex:
    if value_log.real == -math.inf:
        return 0.0 + 0.0j
    if value_log.real > _LOG_REPRESENTABLE:
        raise RangeError(
            f"{where}: |D| = exp({value_log.real:.1f}) overflows double precision"
        )
    if value_log.real < -_LOG_REPRESENTABLE:
        raise RangeError(
            f"{where}: |D| = exp({value_log.real:.1f}) underflows double precision"
        )
    return cmath.exp(value_log)


def _pcf_ode(a: complex, z: complex, rtol: float = 1e-12) -> complex:
    if z == 0:
        return _pcf_series(a, z)[0]
    return complex(pcf_d_ray(a, z / abs(z), [abs(z)], rtol=rtol)[0])


def pcf_d(a: complex, z: complex, backend: str = "auto") -> complex:
    """Parabolic cylinder function D_a(z) for complex order and argument.

    Supported range: |a| <= 100, |z| <= 150.  See the module docstring for
    the backends; `backend="cross-check"` evaluates two independent routes
    and raises AccuracyWarning if they disagree beyond the trusted bound.
    """
    a, z = _check_pcf_range(a, z)
    if backend == "series":
        value, est, terms = _pcf_series(a, z)
        if est > 1e-6:
            raise ConvergenceError(
                f"pcf_d series: cancellation leaves estimated relative error "
                f"{est:.2e} at a={a:.4g}, z={z:.4g} ({terms} terms used)"
            )
        return value
    if backend == "asymptotic":
        return _pcf_asymp(a, z)
    if backend == "ode":
        return _pcf_ode(a, z)
    if backend == "auto":
        return _pcf_auto(a, z)[0]
    if backend == "cross-check":
        return _pcf_cross_check(a, z)
    raise ValueError(f"unknown pcf_d backend {backend!r}")


def _pcf_auto(a: complex, z: complex) -> tuple[complex, str]:
    if abs(z) <= _SERIES_RADIUS:
        value, est, _ = _pcf_series(a, z)
        if est <= _SERIES_TRUST:
            return value, "series"
    if abs(z) >= _asymp_radius(a) and abs(cmath.phase(z)) <= 0.75 * math.pi + 1e-12:
        return _pcf_asymp(a, z), "asymptotic"
    return _pcf_ode(a, z), "ode"


def _pcf_cross_check(a: complex, z: complex) -> complex:
    primary, route = _pcf_auto(a, z)
    tol = 1e-7
    if route == "ode":
        # independent second route: series where its measured error allows,
        # else the asymptotic form, else a re-anchored integration
        value2, est, _ = _pcf_series(a, z)
        if est > 0.3 * tol:
            if abs(z) >= _asymp_radius(a) and abs(cmath.phase(z)) <= 0.75 * math.pi:
                value2 = _pcf_asymp(a, z)
            elif abs(z) > 1e-12:
                # re-derive via the recurrence D_(a+1) = z D_a - a D_(a-1),
                # using independent integrations at the neighboring orders
                lam = z / abs(z)
                d_up = complex(pcf_d_ray(a + 1.0, lam, [abs(z)])[0])
                d_dn = complex(pcf_d_ray(a - 1.0, lam, [abs(z)])[0])
                value2 = (d_up + a * d_dn) / z
            else:
                value2 = primary
    else:
        value2 = _pcf_ode(a, z)
    scale = max(abs(primary), abs(value2), 1e-300)
    diff = abs(primary - value2) / scale
    if diff > tol:
        warnings.warn(
            f"pcf_d cross-check: backends disagree by {diff:.2e} at "
            f"a={a:.4g}, z={z:.4g} (primary route {route})",
            AccuracyWarning,
            stacklevel=2,
        )
    return primary


# --------------------------------------------------------------------------
# complex root finding
# --------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class ComplexSaddle:
    """A complex root/saddle with its residual and branch record.

    path holds every Newton iterate from the initial guess to the root (the
    record of how the branch was reached); residual is |f(root)|.
    """

    root: complex
    residual: float
    path: tuple[complex, ...]
    iterations: int


def find_complex_root(
    f: Callable[[complex], complex],
    guess: complex,
    tol: float = 1e-12,
    max_iter: int = 60,
    step_limit: float | None = None,
) -> ComplexSaddle:
    """Newton iteration for a root of an analytic function.

    The derivative is taken by complex central differences, so `f` only has
    to be evaluable (analyticity near the root is assumed, as for saddle
    points of an action).  Raises ConvergenceError when the iteration
    exhausts max_iter or the derivative vanishes (Jacobian-singular), with
    the wandering path in the message.

    Idempotent: calling again from a returned root returns the same root.
    """
    if not (tol > 0):
        raise ValueError(f"tol must be > 0, got {tol}")
    z = complex(guess)
    path = [z]
    fz = complex(f(z))
    if abs(fz) <= tol:
        return ComplexSaddle(root=z, residual=abs(fz), path=tuple(path), iterations=0)
    for iteration in range(1, max_iter + 1):
        h = 1e-7 * max(1.0, abs(z))
        df = (complex(f(z + h)) - complex(f(z - h))) / (2.0 * h)
        if abs(df) < 1e-14 * max(abs(fz), 1.0) / max(1.0, abs(z)) or df == 0:
            raise ConvergenceError(
                f"find_complex_root: derivative ~ 0 at z={z:.6g} "
                f"(Jacobian singular; |f|={abs(fz):.3g})"
            )
        step = -fz / df
        if step_limit is not None and abs(step) > step_limit:
            step *= step_limit / abs(step)
        z = z + step
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise ConvergenceError(
                f"find_complex_root: iterate diverged to {z!r} after "
                f"{iteration} steps from guess {guess:.6g}"
            )
        path.append(z)
        fz = complex(f(z))
        if abs(fz) <= tol:
            return ComplexSaddle(
                root=z, residual=abs(fz), path=tuple(path), iterations=iteration
            )
    raise ConvergenceError(
        f"find_complex_root: no convergence after {max_iter} iterations from "
        f"guess {guess:.6g}; last iterate {z:.6g} with |f|={abs(fz):.3g}"
    )
