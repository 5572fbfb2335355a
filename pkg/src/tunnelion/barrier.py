"""Gauge-invariant effective potentials and 1-D barrier models.

Geometry convention (used across the package): the electron escapes toward
+x, so a uniform ionizing field of strength E0 > 0 contributes -E0*x to the
potential energy along the escape path, and the transverse vector potential
in the field region is A_z(x) = E0*x (zero before the region, constant
after it).  The kinetic transverse momentum is q_z(x) = p_z + A_z(x)/c with
the canonical p_z conserved.

The effective potential is built only from the electric field and the
binding potential - never from a (phi, A) gauge pair - so gauge invariance
is structural: any two gauge stories describing the same E produce the same
input and therefore the same V_eff.
"""

from __future__ import annotations

import csv
import dataclasses
import math
from typing import Callable, IO, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq, minimize_scalar

from tunnelion.core import (
    C_DEFAULT,
    NoBarrierError,
    ParameterError,
    PhysicsTier,
)

__all__ = [
    "Square",
    "Linear",
    "Parabolic",
    "Coulomb1D",
    "ZeroRangeTriangular",
    "ParabolicCoord",
    "BarrierModel",
    "EffectivePotential",
    "uniform_field_a_z",
    "effective_potential",
    "position_energy",
    "kinetic_q_z",
    "p_x_squared",
    "turning_points",
    "barrier_grid_rows",
    "dump_grid_csv",
]


def _as_float_or_array(x, values):
    if np.isscalar(x):
        return float(values)
    return values


# ---------------------------------------------------------------------------
# barrier shapes
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class Square:
    """Rectangular barrier: V(x) = v0 on (0, a), zero outside."""

    v0: float
    a: float

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.v0)):
            raise ParameterError(f"Square barrier needs a > 0, finite v0; got {self}")

    def potential(self, x):
        xx = np.asarray(x, dtype=float)
        vals = np.where((xx > 0.0) & (xx < self.a), self.v0, 0.0)
        return _as_float_or_array(x, vals)


@dataclasses.dataclass(frozen=True)
class Linear:
    """Linear ramp behind an edge: V(x) = v0 - e0*x for x > 0, zero before."""

    v0: float
    e0: float

    def __post_init__(self):
        if not (self.e0 > 0 and math.isfinite(self.v0)):
            raise ParameterError(f"Linear barrier needs e0 > 0, finite v0; got {self}")

    def potential(self, x):
        xx = np.asarray(x, dtype=float)
        vals = np.where(xx > 0.0, self.v0 - self.e0 * xx, 0.0)
        return _as_float_or_array(x, vals)


@dataclasses.dataclass(frozen=True)
class Parabolic:
    """Inverted parabola: V(x) = v0 - curvature*x^2/2 on the whole axis.

    curvature plays the role of a squared barrier frequency; for atomic
    problems it scales like kappa^4 times a dimensionless steepness.
    """

    v0: float
    curvature: float

    def __post_init__(self):
        if not (self.curvature > 0 and math.isfinite(self.v0)):
            raise ParameterError(
                f"Parabolic barrier needs curvature > 0, finite v0; got {self}"
            )

    def potential(self, x):
        xx = np.asarray(x, dtype=float)
        vals = self.v0 - 0.5 * self.curvature * xx * xx
        return _as_float_or_array(x, vals)


@dataclasses.dataclass(frozen=True)
class Coulomb1D:
    """Tunnel-ionization barrier on the escape axis: V(x) = -e0*x - kappa/x
    for x > 0 (Coulomb binding plus uniform field)."""

    kappa: float
    e0: float

    def __post_init__(self):
        if not (self.kappa > 0 and self.e0 > 0):
            raise ParameterError(f"Coulomb1D needs kappa > 0, e0 > 0; got {self}")

    def potential(self, x):
        xx = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.where(
                xx > 0.0, -self.e0 * xx - self.kappa / xx, math.inf
            )
        return _as_float_or_array(x, vals)


@dataclasses.dataclass(frozen=True)
class ZeroRangeTriangular:
    """Triangular barrier of a zero-range binding in a uniform field:
    V(x) = -e0*x for x > 0, zero before the edge.  ip records the binding
    energy of the zero-range state for bookkeeping."""

    ip: float
    e0: float

    def __post_init__(self):
        if not (self.ip > 0 and self.e0 > 0):
            raise ParameterError(
                f"ZeroRangeTriangular needs ip > 0, e0 > 0; got {self}"
            )

    def potential(self, x):
        xx = np.asarray(x, dtype=float)
        vals = np.where(xx > 0.0, -self.e0 * xx, 0.0)
        return _as_float_or_array(x, vals)


@dataclasses.dataclass(frozen=True)
class ParabolicCoord:
    """Hydrogen-scaled one-dimensional potential in the parabolic
    coordinate along the escape direction:

        V(zeta) = -1/(4 zeta) - 1/(8 zeta^2) - e0*zeta/8,   zeta > 0,

    whose channel energy for the ground state is -1/8.  General kappa
    enters through the field scaling e0 -> e0/kappa^3."""

    e0: float

    CHANNEL_ENERGY = -0.125

    def __post_init__(self):
        if not (self.e0 > 0):
            raise ParameterError(f"ParabolicCoord needs e0 > 0; got {self}")

    def potential(self, x):
        xx = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.where(
                xx > 0.0,
                -0.25 / xx - 0.125 / (xx * xx) - 0.125 * self.e0 * xx,
                math.inf,
            )
        return _as_float_or_array(x, vals)


Shape = Square | Linear | Parabolic | Coulomb1D | ZeroRangeTriangular | ParabolicCoord


def _potential_ld(shape: "Shape", x) -> np.longdouble:
    """Scalar potential in extended precision.  Keeps turning-point
    residuals limited by the x-grid spacing instead of the cancellation
    between O(I_p) terms in double arithmetic."""
    ld = np.longdouble
    x = ld(float(x))
    if isinstance(shape, Square):
        return ld(shape.v0) if 0.0 < x < shape.a else ld(0.0)
    if isinstance(shape, Linear):
        return ld(shape.v0) - ld(shape.e0) * x if x > 0.0 else ld(0.0)
    if isinstance(shape, Parabolic):
        return ld(shape.v0) - ld(0.5) * ld(shape.curvature) * x * x
    if isinstance(shape, Coulomb1D):
        if x <= 0.0:
            return ld(math.inf)
        return -ld(shape.e0) * x - ld(shape.kappa) / x
    if isinstance(shape, ZeroRangeTriangular):
        return -ld(shape.e0) * x if x > 0.0 else ld(0.0)
    if isinstance(shape, ParabolicCoord):
        if x <= 0.0:
            return ld(math.inf)
        return -ld(0.25) / x - ld(0.125) / (x * x) - ld(0.125) * ld(shape.e0) * x
    raise ParameterError(f"unsupported barrier shape {shape!r}")

# shapes whose barrier starts at a potential edge rather than a smooth
# classical turning point
_EDGE_ENTRY = (Square, Linear, ZeroRangeTriangular)


def uniform_field_a_z(
    e0: float, x_lo: float = 0.0, x_hi: float | None = None
) -> Callable:
    """Transverse vector potential of a uniform field occupying
    [x_lo, x_hi] (or [x_lo, inf)): A_z = e0*(x - x_lo) inside the region,
    continuous and constant outside it."""

    if not (e0 > 0):
        raise ParameterError(f"uniform_field_a_z needs e0 > 0, got {e0}")
    if x_hi is not None and not (x_hi > x_lo):
        raise ParameterError(f"field region empty: [{x_lo}, {x_hi}]")

    def a_z(x):
        xx = np.asarray(x, dtype=float)
        hi = np.inf if x_hi is None else x_hi
        vals = e0 * (np.clip(xx, x_lo, hi) - x_lo)
        return _as_float_or_array(x, vals)

    return a_z


@dataclasses.dataclass(frozen=True)
class BarrierModel:
    """A barrier shape plus the optional transverse vector potential that a
    magnetic-field-aware tier needs, and the entry coordinate x0 at which
    the barrier region begins."""

    shape: Shape
    a_z: Callable | None = None
    x0: float = 0.0

    def potential(self, x):
        return self.shape.potential(x)

    def vector_potential_z(self, x):
        if self.a_z is None:
            return _as_float_or_array(x, np.zeros_like(np.asarray(x, dtype=float)))
        return self.a_z(x)


def with_uniform_a_z(model: BarrierModel) -> BarrierModel:
    """Attach the natural uniform-field A_z of the model's own shape: the
    field occupies (0, a) for a square barrier and (0, inf) for the
    field-bearing shapes."""
    shape = model.shape
    if isinstance(shape, Square):
        raise ParameterError(
            "a square barrier carries no field of its own; build the vector "
            "potential explicitly with uniform_field_a_z(e0, 0.0, shape.a)"
        )
    e0 = getattr(shape, "e0", None)
    if e0 is None:
        raise ParameterError(f"shape {shape!r} has no field strength e0")
    return dataclasses.replace(model, a_z=uniform_field_a_z(e0, 0.0, None))


# ---------------------------------------------------------------------------
# gauge-invariant effective potential
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class EffectivePotential:
    """V_eff(x) = (line integral of E along the path up to x) + V_binding,
    with the two components kept separately."""

    v_eff: Callable[[float], float]
    field_term: Callable[[float], float]
    binding_term: Callable[[float], float]

    def grid_values(self, xs: Sequence[float]) -> np.ndarray:
        return np.array([self.v_eff(float(x)) for x in xs])


def effective_potential(
    e_field: Callable[[np.ndarray], np.ndarray],
    binding: Callable[[np.ndarray], float],
    path: Callable[[float], np.ndarray],
) -> EffectivePotential:
    """Build the gauge-independent effective potential along a path.

    e_field maps a 3-vector position to the quasistatic E 3-vector; binding
    maps position to the binding potential energy; path maps arclength
    s >= 0 (from the origin) to position.  The field term is
    int_0^s E(path(u)) . path'(u) du, so for a uniform field E = -E0 x_hat
    along the +x escape path it reduces to -E0*x + V(x).
    """
    origin = np.asarray(path(0.0), dtype=float)
    if origin.shape != (3,):
        raise ParameterError(f"path must produce 3-vectors, got shape {origin.shape}")

    def tangent(s: float) -> np.ndarray:
        h = 1e-7 * max(1.0, abs(s))
        sp, sm = s + h, s - h
        # divide by the realized spacing so affine paths differentiate exactly
        return (np.asarray(path(sp), float) - np.asarray(path(sm), float)) / (sp - sm)

    def field_term(s: float) -> float:
        if s == 0.0:
            return 0.0
        val, _ = quad(
            lambda u: float(
                np.dot(np.asarray(e_field(np.asarray(path(u), float)), float), tangent(u))
            ),
            0.0,
            s,
            limit=200,
            epsabs=1e-13,
            epsrel=1e-12,
        )
        return val

    def binding_term(s: float) -> float:
        return float(binding(np.asarray(path(s), float)))

    def v_eff(s: float) -> float:
        return field_term(s) + binding_term(s)

    return EffectivePotential(
        v_eff=v_eff, field_term=field_term, binding_term=binding_term
    )


# ---------------------------------------------------------------------------
# position-dependent energy and tier momentum formulas
# ---------------------------------------------------------------------------


def kinetic_q_z(model: BarrierModel, p_z: float, x, c: float = C_DEFAULT):
    """Kinetic transverse momentum q_z(x) = p_z + A_z(x)/c."""
    az = np.asarray(model.vector_potential_z(x), dtype=float)
    return _as_float_or_array(x, p_z + az / c)


def position_energy(
    model: BarrierModel,
    eps_total: float,
    p_y: float,
    p_z: float,
    x,
    c: float = C_DEFAULT,
):
    """Energy available to the escape coordinate at x:

        eps_x(x) = eps_total - p_y^2/2 - q_z(x)^2/2.

    Without a transverse vector potential q_z = p_z and eps_x is constant;
    that same constant is recovered from any a_z in the limit c -> inf.
    """
    qz = np.asarray(kinetic_q_z(model, p_z, x, c), dtype=float)
    return _as_float_or_array(x, eps_total - 0.5 * p_y * p_y - 0.5 * qz * qz)


def p_x_squared(
    model: BarrierModel,
    eps_total: float,
    p_y: float,
    p_z: float,
    tier: PhysicsTier,
    x,
    c: float = C_DEFAULT,
):
    """Squared longitudinal momentum p_x^2(x) under the given physics tier
    (negative inside the barrier).

    For the relativistic tiers eps_total keeps the same convention as the
    others (energy relative to rest, e.g. -I_p for a bound state); the rest
    energy c^2 is added internally.
    """
    tier = PhysicsTier(tier)
    scalar = np.ndim(x) == 0
    ld = np.longdouble
    if scalar:
        # extended precision so the residual at a returned turning point is
        # limited by the spacing of representable x, not by cancellation
        v = _potential_ld(model.shape, x)
    else:
        v = np.asarray(model.potential(x), dtype=float)
    if tier == PhysicsTier.NONREL:
        if scalar:
            out = 2.0 * (
                ld(eps_total) - ld(0.5) * ld(p_y) ** 2 - ld(0.5) * ld(p_z) ** 2 - v
            )
        else:
            out = 2.0 * (eps_total - 0.5 * p_y * p_y - 0.5 * p_z * p_z - v)
    elif tier in (
        PhysicsTier.MAGNETIC_DIPOLE,
        PhysicsTier.MAGNETIC_DIPOLE_PLUS_KINETIC,
    ):
        if model.a_z is None:
            raise ParameterError(
                f"tier {tier.value} needs a transverse vector potential on the model"
            )
        qz = np.asarray(kinetic_q_z(model, p_z, x, c))
        if scalar:
            w = ld(eps_total) - ld(0.5) * ld(p_y) ** 2 - ld(0.5) * ld(float(qz)) ** 2 - v
        else:
            w = eps_total - 0.5 * p_y * p_y - 0.5 * qz * qz - v
        if tier == PhysicsTier.MAGNETIC_DIPOLE:
            out = 2.0 * w
        else:
            # leading kinetic-energy correction to the dispersion
            out = 2.0 * w * (1.0 + w / (2.0 * c * c))
    elif tier in (PhysicsTier.FULLY_RELATIVISTIC, PhysicsTier.KLEIN_GORDON):
        if model.a_z is None:
            qz = np.asarray(p_z, dtype=float)
        else:
            qz = np.asarray(kinetic_q_z(model, p_z, x, c))
        # ((c^2 + eps - V)/c)^2 - c^2 written as a^2 + 2ac with a = (eps-V)/c
        # to avoid cancellation between the squared total energy and c^2
        if scalar:
            a = (ld(eps_total) - v) / ld(c)
            out = a * a + 2.0 * a * ld(c) - ld(p_y) ** 2 - ld(float(qz)) ** 2
        else:
            a = (eps_total - v) / c
            out = a * a + 2.0 * a * c - p_y * p_y - qz * qz
    else:  # pragma: no cover - enum is exhaustive
        raise ParameterError(f"unknown tier {tier!r}")
    if scalar:
        out = float(out)
    return _as_float_or_array(x, out)


# ---------------------------------------------------------------------------
# turning points
# ---------------------------------------------------------------------------

_BISECT_RTOL = 4.0 * np.finfo(float).eps


def _polish_root(g, x: float, lo: float, hi: float) -> float:
    """Newton-polish a near-root of g to the representable floor so that
    |p_x| at the returned point is limited by rounding, not bracketing."""
    for _ in range(3):
        gx = g(x)
        if gx == 0.0:
            return x
        h = 1e-7 * max(abs(x), 1e-12)
        d = (g(x + h) - g(x - h)) / (2.0 * h)
        if d == 0.0 or not math.isfinite(d):
            return x
        x_new = min(max(x - gx / d, lo), hi)
        if x_new == x:
            break
        x = x_new
    # settle on the representable neighbour closest to the true zero; the
    # residual is rounding-limited so scan a few ulps either side
    best, best_val = x, abs(g(x))
    for direction in (-np.inf, np.inf):
        cand = x
        for _ in range(4):
            cand = float(np.nextafter(cand, direction))
            val = abs(g(cand))
            if val < best_val:
                best, best_val = cand, val
    return best


def turning_points(
    model: BarrierModel,
    eps_total: float,
    p_y: float,
    p_z: float,
    tier: PhysicsTier,
    c: float = C_DEFAULT,
) -> tuple[float, float]:
    """Entry and exit points (x0, x_e) of the classically forbidden region.

    Smooth turning points are found by a coarse scan for sign changes of
    p_x^2 followed by bracketing refinement to 1e-13 relative; barrier
    edges (square, linear, zero-range) are returned exactly.  Raises
    NoBarrierError when the energy lies above the barrier top.
    """
    tier = PhysicsTier(tier)
    shape = model.shape

    def g(x: float) -> float:
        return float(p_x_squared(model, eps_total, p_y, p_z, tier, float(x), c))

    if isinstance(shape, Square):
        probe = np.linspace(0.0, shape.a, 201)[1:-1]
        if np.all(
            np.asarray(p_x_squared(model, eps_total, p_y, p_z, tier, probe, c)) < 0.0
        ):
            return 0.0, shape.a
        raise NoBarrierError(
            f"energy {eps_total:.6g} is not below the square barrier everywhere"
        )

    if isinstance(shape, (Linear, ZeroRangeTriangular)):
        x_entry = model.x0
        if g(x_entry + 1e-12) >= 0.0:
            raise NoBarrierError(
                f"energy {eps_total:.6g} is above the barrier edge"
            )
        x_exit = _walk_out_root(g, x_entry, _exit_cap(model, eps_total, p_y, p_z, tier, c))
        return x_entry, x_exit

    if isinstance(shape, Parabolic):
        half_width = math.sqrt(
            2.0 * max(shape.v0 - eps_total, 1e-300) / shape.curvature
        )
        lo, hi = -3.0 * half_width - 1.0, 3.0 * half_width + 1.0
        # the barrier top is where p_x^2 is most negative
        top = minimize_scalar(g, bounds=(lo, hi), method="bounded")
        if top.fun >= 0.0:
            raise NoBarrierError(
                f"energy {eps_total:.6g} is above the parabolic barrier top"
            )
        x_top = float(top.x)
        x_entry = _walk_in_root(g, x_top, lo)
        x_exit = _walk_out_root(g, x_top, hi)
        return x_entry, x_exit

    if isinstance(shape, (Coulomb1D, ParabolicCoord)):
        scale = (
            shape.kappa / max(abs(eps_total), 1e-30)
            if isinstance(shape, Coulomb1D)
            else 1.0
        )
        x_min = 1e-9 * scale
        cap = _exit_cap(model, eps_total, p_y, p_z, tier, c)
        top = minimize_scalar(g, bounds=(x_min, cap), method="bounded")
        if top.fun >= 0.0:
            raise NoBarrierError(
                f"energy {eps_total:.6g} is above the barrier top (over-the-barrier)"
            )
        x_top = float(top.x)
        x_entry = _walk_in_root(g, x_top, x_min)
        x_exit = _walk_out_root(g, x_top, cap)
        return x_entry, x_exit

    raise ParameterError(f"unsupported barrier shape {shape!r}")


def _exit_cap(
    model: BarrierModel,
    eps_total: float,
    p_y: float,
    p_z: float,
    tier: PhysicsTier,
    c: float,
) -> float:
    """Upper bound for the exit-point search.  With a transverse vector
    potential the (A_z/c)^2 term recloses the barrier far out, so the
    search must stop at the reopened region's energy minimum."""
    shape = model.shape
    e0 = getattr(shape, "e0", None)
    if e0 is None:
        return math.inf
    if isinstance(shape, ParabolicCoord):
        # far-field slope is e0/8 and the attractive tail contributes O(1)
        naive = 4.0 * (abs(eps_total) + 0.5) / (e0 / 8.0) + 1.0
    else:
        naive = 4.0 * (abs(eps_total) + getattr(shape, "kappa", 0.0)) / e0 + 1.0
    if model.a_z is None or tier == PhysicsTier.NONREL:
        return naive
    # The (A_z/c)^2 term grows quadratically, so the effective potential has
    # a single well beyond the barrier; the classical exit (if any) lies
    # before the well's minimum.  Capping there keeps the top/exit searches
    # out of the reclosed region.
    far = 3.0 * c * c / e0
    dip = minimize_scalar(
        lambda x: float(model.potential(x))
        + 0.5 * p_y * p_y
        + 0.5 * float(np.asarray(kinetic_q_z(model, p_z, x, c))) ** 2,
        bounds=(1e-6, far),
        method="bounded",
    )
    return float(dip.x)


def _walk_out_root(g, x_from: float, cap: float) -> float:
    """First zero of g beyond x_from (g < 0 just after x_from)."""
    step = max(1e-6, abs(x_from) * 1e-3)
    x = x_from + step
    while g(x) < 0.0:
        prev = x
        step *= 1.6
        x = x + step
        if x > cap:
            if g(cap) < 0.0:
                raise NoBarrierError(
                    "barrier does not reopen before the search cap; no classical exit"
                )
            x = cap
            break
    else:
        prev = max(x_from, x - step)
    root = float(brentq(g, prev, x, rtol=_BISECT_RTOL))
    return _polish_root(g, root, prev, x)


def _walk_in_root(g, x_from: float, floor: float) -> float:
    """First zero of g below x_from (g < 0 just below x_from)."""
    x = x_from
    step = max(1e-6, abs(x_from) * 1e-3)
    while True:
        nxt = x - step
        if nxt <= floor:
            nxt = floor
        if g(nxt) > 0.0:
            root = float(brentq(g, nxt, x, rtol=_BISECT_RTOL))
            return _polish_root(g, root, nxt, x)
        if nxt == floor:
            raise NoBarrierError(
                "no inner turning point above the domain floor; barrier entry not found"
            )
        x = nxt
        step *= 1.6


# ---------------------------------------------------------------------------
# grid export
# ---------------------------------------------------------------------------


def barrier_grid_rows(
    model: BarrierModel,
    eps_total: float,
    p_y: float,
    p_z: float,
    xs: Sequence[float],
    c: float = C_DEFAULT,
) -> list[tuple[float, float, float, float]]:
    rows = []
    for x in xs:
        x = float(x)
        rows.append(
            (
                x,
                float(model.potential(x)),
                float(position_energy(model, eps_total, p_y, p_z, x, c)),
                float(kinetic_q_z(model, p_z, x, c)),
            )
        )
    return rows


def dump_grid_csv(
    model: BarrierModel,
    eps_total: float,
    p_y: float,
    p_z: float,
    xs: Sequence[float],
    fh: IO[str],
    c: float = C_DEFAULT,
) -> None:
    """Write the barrier grid as CSV with columns x, V_eff, eps_x, q_z."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["x", "V_eff", "eps_x", "q_z"])
    for row in barrier_grid_rows(model, eps_total, p_y, p_z, xs, c):
        writer.writerow([repr(v) for v in row])
