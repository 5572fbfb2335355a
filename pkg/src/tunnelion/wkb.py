"""WKB tunneling exponents and momentum-resolved tunneling probabilities.

The tunneling probability is exponent-only, |T|^2 ∝ exp(-2 ∫ |p_x| dx), with
the longitudinal momentum supplied per physics tier by the barrier module.
Scan grids are normalized to the nonrelativistic maximum over the same
canonical-momentum range, which makes tier comparisons direct: the
magnetic-dipole term suppresses the peak, the kinetic correction restores
part of it.
"""

from __future__ import annotations

import csv
import dataclasses
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from typing import IO, Sequence

import numpy as np
from scipy.integrate import quad

from tunnelion.core import C_DEFAULT, NoBarrierError, ParameterError, PhysicsTier
from tunnelion.barrier import (
    BarrierModel,
    kinetic_q_z,
    p_x_squared,
    turning_points,
    with_uniform_a_z,
)

__all__ = [
    "ScanEdgeWarning",
    "TunnelingAmplitudeGrid",
    "ExitShiftCurve",
    "longitudinal_momentum",
    "tunneling_exponent",
    "momentum_scan",
    "exit_shift_curve",
    "dump_scan_csv",
]


class ScanEdgeWarning(UserWarning):
    """The discrete maximum of a scan sits on the range edge (or the grid
    has several interior maxima); the peak estimate is unreliable."""


def resolve_workers(workers: int | None) -> int:
    """Worker count for scan parallelism: explicit argument, else the
    TUNNELION_THREADS environment variable, else serial."""
    if workers is None:
        raw = os.environ.get("TUNNELION_THREADS", "").strip()
        workers = int(raw) if raw else 1
    if workers < 1:
        raise ParameterError(f"worker count must be >= 1, got {workers}")
    return workers


def _map_maybe_parallel(fn, items, workers: int):
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# longitudinal momentum and tunneling exponent
# ---------------------------------------------------------------------------


def longitudinal_momentum(
    model: BarrierModel,
    eps_total: float,
    p_y: float,
    p_z: float,
    x: float,
    tier: PhysicsTier,
    c: float = C_DEFAULT,
) -> float:
    """|p_x(x)| under the tier's dispersion: the evanescent magnitude inside
    the barrier, the real momentum outside; zero at turning points."""
    g = p_x_squared(model, eps_total, p_y, p_z, tier, float(x), c)
    return math.sqrt(abs(g))


def tunneling_exponent(
    model: BarrierModel,
    eps_total: float,
    p_y: float,
    p_z: float,
    tier: PhysicsTier,
    c: float = C_DEFAULT,
) -> float:
    """Exponent 2 ∫_{x0}^{x_e} |p_x| dx of the WKB tunneling probability
    |T|^2 ∝ exp(-exponent).  Raises NoBarrierError above the barrier top."""
    x0, xe = turning_points(model, eps_total, p_y, p_z, tier, c=c)

    def magnitude(x: float) -> float:
        return math.sqrt(
            max(-p_x_squared(model, eps_total, p_y, p_z, tier, x, c), 0.0)
        )

    # |p_x| vanishes like a square root at smooth turning points, so
    # integrate in u with x = x0 + u^2 on the left half and the mirrored
    # substitution on the right half
    xm = 0.5 * (x0 + xe)
    u_left = math.sqrt(xm - x0)
    u_right = math.sqrt(xe - xm)
    left, _ = quad(
        lambda u: 2.0 * u * magnitude(x0 + u * u),
        0.0,
        u_left,
        epsabs=1e-12,
        epsrel=1e-10,
        limit=200,
    )
    right, _ = quad(
        lambda u: 2.0 * u * magnitude(xe - u * u),
        0.0,
        u_right,
        epsabs=1e-12,
        epsrel=1e-10,
        limit=200,
    )
    return 2.0 * (left + right)


# ---------------------------------------------------------------------------
# momentum-resolved scans
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class TunnelingAmplitudeGrid:
    """Relative tunneling probability sampled against the kinetic transverse
    momentum at the barrier entry or exit, normalized so the nonrelativistic
    maximum over the same canonical-momentum range equals one."""

    axis: np.ndarray
    values: np.ndarray
    tier: PhysicsTier

    def interpolated_peak(self) -> tuple[float, float]:
        """Peak location and height from a quadratic through the three grid
        points around the discrete maximum."""
        i = int(np.argmax(self.values))
        if i == 0 or i == len(self.values) - 1:
            warnings.warn(
                "scan maximum lies on the range edge; peak estimate is the "
                "edge sample itself",
                ScanEdgeWarning,
                stacklevel=2,
            )
            return float(self.axis[i]), float(self.values[i])
        x0, x1, x2 = (float(v) for v in self.axis[i - 1 : i + 2])
        y0, y1, y2 = (float(v) for v in self.values[i - 1 : i + 2])
        d01, d12 = (y1 - y0) / (x1 - x0), (y2 - y1) / (x2 - x1)
        curv = (d12 - d01) / (x2 - x0)
        if curv >= 0.0:  # flat or degenerate triple; fall back to the sample
            return x1, y1
        vertex = 0.5 * (x0 + x1 - d01 / curv)
        y_at = y0 + d01 * (vertex - x0) + curv * (vertex - x0) * (vertex - x1)
        return float(vertex), float(y_at)


def _scan_exponents(model, eps_total, p_y, p_z_values, tier, c, workers):
    def one(p_z: float) -> float:
        try:
            return tunneling_exponent(model, eps_total, p_y, float(p_z), tier, c)
        except NoBarrierError:
            # over the barrier: no exponential suppression in this bookkeeping
            return 0.0

    return np.array(_map_maybe_parallel(one, list(p_z_values), workers))


def momentum_scan(
    model: BarrierModel,
    eps_total: float,
    tier: PhysicsTier,
    axis: str,
    p_z_values: Sequence[float],
    p_y: float = 0.0,
    c: float = C_DEFAULT,
    eps_nonrel: float | None = None,
    workers: int | None = None,
) -> TunnelingAmplitudeGrid:
    """Tunneling probability against the kinetic momentum q_z at the barrier
    entry (axis="entry") or exit (axis="exit").

    Values are exp(-exponent) normalized to the maximum of the
    nonrelativistic scan over the same p_z range; eps_nonrel overrides the
    energy used for that reference (defaults to eps_total, for tiers whose
    energy convention matches the nonrelativistic one).
    """
    if axis not in ("entry", "exit"):
        raise ParameterError(f'axis must be "entry" or "exit", got {axis!r}')
    tier = PhysicsTier(tier)
    workers = resolve_workers(workers)
    p_z_values = np.asarray(list(p_z_values), dtype=float)
    if p_z_values.size < 3:
        raise ParameterError("momentum_scan needs at least 3 p_z samples")

    exps = _scan_exponents(model, eps_total, p_y, p_z_values, tier, c, workers)
    if tier == PhysicsTier.NONREL:
        ref = exps
    else:
        eps_ref = eps_total if eps_nonrel is None else eps_nonrel
        ref = _scan_exponents(
            model, eps_ref, p_y, p_z_values, PhysicsTier.NONREL, c, workers
        )
    w_min = float(np.min(ref))
    values = np.exp(-(exps - w_min))

    def q_axis(p_z: float) -> float:
        x0, xe = turning_points(model, eps_total, p_y, p_z, tier, c=c)
        x = x0 if axis == "entry" else xe
        return float(kinetic_q_z(model, p_z, x, c))

    axis_vals = np.array(_map_maybe_parallel(q_axis, list(p_z_values), workers))

    interior = values[1:-1]
    n_max = int(
        np.sum((interior > values[:-2]) & (interior >= values[2:]))
    )
    if n_max > 1:
        warnings.warn(
            f"scan has {n_max} interior maxima; expected a single peak",
            ScanEdgeWarning,
            stacklevel=2,
        )
    grid = TunnelingAmplitudeGrid(axis=axis_vals, values=values, tier=tier)
    i = int(np.argmax(values))
    if i == 0 or i == len(values) - 1:
        warnings.warn(
            "scan maximum lies on the range edge; widen the p_z range",
            ScanEdgeWarning,
            stacklevel=2,
        )
    return grid


# ---------------------------------------------------------------------------
# exit-momentum shift against the reduced field
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class ExitShiftCurve:
    """Kinetic momentum at the tunnel exit, at the probability-maximizing
    canonical momentum, sampled against E0/E_a."""

    ratios: np.ndarray
    q_z_exit: np.ndarray
    tier: PhysicsTier


def exit_shift_curve(
    template: BarrierModel,
    kappa: float,
    ratios: Sequence[float],
    tier: PhysicsTier,
    p_y: float = 0.0,
    c: float = C_DEFAULT,
    eps_total: float | None = None,
    n_scan: int = 61,
    workers: int | None = None,
) -> ExitShiftCurve:
    """Sample q_z(x_e) at the scan peak for each reduced field E0/E_a.

    The template model fixes the barrier family (its e0 is replaced by
    ratio * kappa^3 point by point); relativistic tiers get the matching
    uniform-field vector potential attached automatically.
    """
    tier = PhysicsTier(tier)
    ip = 0.5 * kappa * kappa
    if eps_total is None:
        if tier in (PhysicsTier.FULLY_RELATIVISTIC, PhysicsTier.KLEIN_GORDON):
            eps_total = -(kappa * kappa) / (1.0 + math.sqrt(1.0 - (kappa / c) ** 2))
        else:
            eps_total = -ip
    unit = ip / c
    p_z_values = np.linspace(-1.1 * unit, 0.1 * unit, n_scan)

    ratios = np.asarray(list(ratios), dtype=float)
    out = np.empty_like(ratios)
    for k, ratio in enumerate(ratios):
        e0 = float(ratio) * kappa**3
        shape = dataclasses.replace(template.shape, e0=e0)
        model = BarrierModel(shape, x0=template.x0)
        if tier != PhysicsTier.NONREL:
            model = with_uniform_a_z(model)
        grid = momentum_scan(
            model,
            eps_total,
            tier,
            "exit",
            p_z_values,
            p_y=p_y,
            c=c,
            eps_nonrel=-ip,
            workers=workers,
        )
        out[k], _ = grid.interpolated_peak()
    return ExitShiftCurve(ratios=ratios, q_z_exit=out, tier=tier)


def dump_scan_csv(grid: TunnelingAmplitudeGrid, fh: IO[str]) -> None:
    """Write a scan as CSV with columns q_z, weight, tier."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["q_z", "weight", "tier"])
    for q, w in zip(grid.axis, grid.values):
        writer.writerow([repr(float(q)), repr(float(w)), grid.tier.value])
