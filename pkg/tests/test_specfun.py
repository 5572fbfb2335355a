"""Tests for the complex special-function layer.

Reference values frozen from a 30-digit multiprecision evaluation
(mpmath.pcfd / mpmath.airyai / mpmath.airybi); the package itself never
imports mpmath.
"""

import cmath
import math
import warnings

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from tunnelion.core import ConvergenceError, RangeError
from tunnelion.specfun import (
    AccuracyWarning,
    AIRY_RADIUS,
    airy_ai,
    airy_all,
    airy_bi,
    find_complex_root,
    pcf_d,
    pcf_d_ray,
)

LAM45 = cmath.exp(1j * math.pi / 4)


def crel(got, want):
    return abs(complex(got) - complex(want)) / abs(complex(want))


# ---------------------------------------------------------------------------
# Airy pair
# ---------------------------------------------------------------------------


def test_airy_reference_values():
    assert crel(airy_ai(0.0), 0.3550280538878172) < 1e-13
    assert crel(airy_bi(0.0), 0.6149266274460007) < 1e-13
    assert crel(airy_ai(1.5 + 0.7j), 0.045105938329532004 - 0.06362522036772607j) < 1e-12
    assert crel(airy_bi(1.5 + 0.7j), 1.2636198877311369 + 1.0719265547881944j) < 1e-12
    assert crel(airy_ai(-4.0 + 1.0j), -0.36000873063686856 - 1.4083845071088261j) < 1e-12
    assert crel(airy_bi(-4.0 + 1.0j), 1.4580011545176788 - 0.3412741000409919j) < 1e-12
    # dominant directions stay representable well inside the documented radius
    assert crel(airy_ai(60.0 + 20.0j), 1.9599496878120637e-131 + 9.991263924585294e-131j) < 1e-10
    assert crel(airy_bi(60.0 + 20.0j), 6.451932079815216e126 - 1.964497277641823e128j) < 1e-10


def test_airy_wronskian_sampled():
    # Ai Bi' - Ai' Bi = 1/pi on a seeded sample of the supported disk
    rng = np.random.default_rng(20260815)
    for _ in range(40):
        r = 50.0 * math.sqrt(rng.uniform())
        th = rng.uniform(-math.pi, math.pi)
        z = r * cmath.exp(1j * th)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", AccuracyWarning)
            ai, aip, bi, bip = airy_all(z)
        if max(abs(ai), abs(bi)) > 1e120:
            continue  # skip points where the product overflows the check itself
        assert abs(ai * bip - aip * bi - 1.0 / math.pi) < 1e-9 * max(
            1.0, abs(ai * bip)
        )


def test_airy_range_and_finite_errors():
    with pytest.raises(RangeError):
        airy_ai(AIRY_RADIUS + 5.0)
    with pytest.raises(RangeError):
        airy_bi(complex(float("nan"), 0.0))


def test_airy_crossover_warning():
    z_on = 12.0 * cmath.exp(1j * 2.0 * math.pi / 3.0)
    with pytest.warns(AccuracyWarning):
        airy_ai(z_on)
    z_off = 12.0 * cmath.exp(0.3j)
    with warnings.catch_warnings():
        warnings.simplefilter("error", AccuracyWarning)
        airy_ai(z_off)  # far from the crossover zone: silent


# ---------------------------------------------------------------------------
# parabolic cylinder function: closed forms and frozen references
# ---------------------------------------------------------------------------


def test_pcf_closed_form_orders():
    # D_0(z) = exp(-z^2/4), D_1(z) = z exp(-z^2/4)
    for z in (0.5 + 0.0j, 2.0 + 1.0j, -3.0 + 0.2j):
        want0 = cmath.exp(-z * z / 4)
        assert crel(pcf_d(0.0, z, backend="series"), want0) < 1e-13
        assert crel(pcf_d(0.0, z, backend="auto"), want0) < 1e-10
    z = 1.3 - 0.4j
    assert crel(pcf_d(1.0, z, backend="series"), z * cmath.exp(-z * z / 4)) < 1e-13


def test_pcf_value_at_zero():
    # D_a(0) = 2^(a/2) sqrt(pi) / Gamma((1-a)/2)
    assert crel(pcf_d(-26.54, 0.0), 5.233241597498598e-14) < 1e-12


# deep-barrier order on the real axis: the recessive direction, where the
# Maclaurin route cancels and the inward ODE integration must take over
REAL_AXIS_TABLE = [
    (0.05, complex(4.054605379718422e-14, 0.0)),
    (0.8, complex(8.773791334199602e-16, 0.0)),
    (1.6, complex(1.4304166670362145e-17, 0.0)),
    (2.33, complex(3.1959920721869544e-19, 0.0)),
    (2.93, complex(1.3431022163768544e-20, 0.0)),
]


def test_pcf_real_axis_recessive_auto():
    for w, want in REAL_AXIS_TABLE:
        assert crel(pcf_d(-26.54, w), want) < 5e-9


def test_pcf_real_axis_recessive_ray():
    radii = [w for w, _ in REAL_AXIS_TABLE]
    got = pcf_d_ray(-26.54, 1.0, radii)
    for g, (_, want) in zip(got, REAL_AXIS_TABLE):
        assert crel(g, want) < 5e-9


# same barrier, reflected order on the imaginary axis: growing direction,
# no cancellation, series stays at machine accuracy
IMAG_AXIS_TABLE = [
    (0.4, complex(-10998461609016.42, 9375208969527.344)),
    (1.2, complex(-648256546044247.4, 571509696212568.0)),
    (2.6, complex(-9.22419835871076e17, 8.132224772648888e17)),
]


def test_pcf_imaginary_axis_series():
    for w, want in IMAG_AXIS_TABLE:
        assert crel(pcf_d(25.54, 1j * w, backend="series"), want) < 1e-12
        assert crel(pcf_d(25.54, 1j * w, backend="auto"), want) < 1e-12


# near-threshold complex order on the diagonal ray
SMALL_ORDER_RAY_TABLE = [
    (0.5, complex(0.9790562886144167, -0.18939668529129475)),
    (3.0, complex(-0.3832281340945112, -0.33859207419878207)),
    (5.5, complex(0.07307932127292624, -0.3685803239290973)),
    (9.0, complex(0.043514775716679874, -0.289680127312265)),
    (16.0, complex(0.1002252580402697, -0.1951807988277495)),
]


def test_pcf_small_order_ray_auto():
    a = -0.5 + 0.167j
    for r, want in SMALL_ORDER_RAY_TABLE:
        assert crel(pcf_d(a, LAM45 * r), want) < 5e-8


# strongly oscillatory order (relativistic steady-state regime): the order's
# imaginary part drives ~120-e-fold dichotomies that the renormalized ray
# integration must bridge
KG_ORDER_RAY_TABLE = [
    (0.3, complex(-2.833539533448215e24, -5.718116296932918e22)),
    (2.0, complex(-9.945100983312288e17, -2.0069331426662052e16)),
    (8.0, complex(-0.00017912966581985873, -3.6148578458060228e-06)),
    (17.5, complex(-3.462766785338798e-27, 1.7172152994439822e-27)),
]


def test_pcf_oscillatory_order_ray():
    a = -0.5 + 76.86j
    radii = [r for r, _ in KG_ORDER_RAY_TABLE]
    got = pcf_d_ray(a, LAM45, radii)
    for g, (_, want) in zip(got, KG_ORDER_RAY_TABLE):
        assert crel(g, want) < 5e-8


def test_pcf_oscillatory_order_conjugate():
    a = -0.5 - 76.86j
    got = pcf_d_ray(a, LAM45, [0.3, 8.0])
    assert crel(got[0], complex(3.4663431570393403e25, 1.8543407271580087e25)) < 5e-8
    assert crel(got[1], complex(3.6225544638765755e25, -9.6896504512173e24)) < 5e-8


GENERIC_TABLE = [
    (3.2 - 1.5j, 2.0 - 3.0j, complex(-30.345303420954274, -27.639252526082647)),
    (-0.5 + 0.167j, 4.0 + 0.0j, complex(0.008714545796350526, 0.0021393215349169853)),
    (-8.5 + 0.0j, 1.0 + 1.0j, complex(-0.00032868976642200644, -8.936288529977158e-05)),
]


def test_pcf_generic_points_auto():
    for a, z, want in GENERIC_TABLE:
        assert crel(pcf_d(a, z), want) < 5e-9


def test_pcf_connection_sector():
    # pi/2 < |arg z| < 3pi/4 exercises the exact reflection + companion form
    a = -1.3 + 0.4j
    want_up = complex(259760063.4434214, 140309944.49693435)
    z_up = 12.0 * cmath.exp(2.0j)
    assert crel(pcf_d(a, z_up, backend="asymptotic"), want_up) < 1e-12
    # lower half-plane mirror, independently frozen
    z_dn = 12.0 * cmath.exp(-2.0j)
    got_dn = pcf_d(a, z_dn, backend="asymptotic")
    got_ode = pcf_d(a, z_dn, backend="ode")
    assert crel(got_dn, got_ode) < 1e-10


# ---------------------------------------------------------------------------
# parabolic cylinder function: differential/recurrence invariants
# ---------------------------------------------------------------------------


def weber_residual(a, z, h=2e-2):
    # sixth-order 7-point second derivative on a uniform grid; one backend
    # serves every node so backend-level jumps are not amplified by the 1/h^2
    def d(zz):
        return pcf_d(a, zz, backend="series")

    w = np.array([1 / 90, -3 / 20, 3 / 2, -49 / 18, 3 / 2, -3 / 20, 1 / 90])
    nodes = [d(z + k * h) for k in range(-3, 4)]
    d2 = sum(wk * nk for wk, nk in zip(w, nodes)) / (h * h)
    dd = nodes[3]
    coef = z * z / 4.0 - a - 0.5
    return abs(d2 - coef * dd) / (abs(coef * dd) + abs(dd))


def test_pcf_weber_equation_residual():
    # stencils placed where the series backend is at machine accuracy, so the
    # 1/h^2 amplification of value jitter stays below the target
    assert weber_residual(-0.5 + 0.167j, LAM45 * 1.1) < 1e-8
    assert weber_residual(3.2 - 1.5j, 1.1 - 0.8j) < 1e-8
    assert weber_residual(-2.3, 1.4) < 1e-8
    assert weber_residual(-26.54, 0.6) < 1e-8


def test_pcf_recurrence():
    # D_(a+1)(z) - z D_a(z) + a D_(a-1)(z) = 0
    cases = [
        (-0.5 + 0.167j, LAM45 * 2.2),
        (-8.5, 1.0 + 1.0j),
        (3.2 - 1.5j, 2.0 - 3.0j),
        (-26.54, 1.6),
    ]
    for a, z in cases:
        d_up = pcf_d(a + 1.0, z)
        d_mid = pcf_d(a, z)
        d_dn = pcf_d(a - 1.0, z)
        scale = max(abs(d_up), abs(z * d_mid), abs(a * d_dn))
        assert abs(d_up - z * d_mid + a * d_dn) / scale < 1e-8


def test_pcf_backend_agreement():
    # independent backends agree where their validity regions overlap
    a = -0.5 + 0.167j
    for r in (0.5, 3.0, 5.5):
        z = LAM45 * r
        assert crel(pcf_d(a, z, backend="series"), pcf_d(a, z, backend="ode")) < 1e-8
    z = 15.0 * cmath.exp(0.4j)  # asymptotic region for a = -3
    assert (
        crel(pcf_d(-3.0, z, backend="asymptotic"), pcf_d(-3.0, z, backend="ode"))
        < 1e-8
    )


def test_pcf_zero_anchored_ode_oracle():
    # independent check: integrate the Weber equation outward from z = 0 with
    # the closed-form D_a(0), D'_a(0) and compare along the real axis (range
    # kept short enough that dominant-solution contamination stays < 1e-8)
    cases = [
        (-2.3, 4.0, 0.8873430782132825, -1.2106113551862707),
        (-26.54, 1.8, 5.233241597498606e-14, -2.670737889027599e-13),
    ]
    for a, span, d0, d0p in cases:

        def rhs(t, y, a=a):
            return [y[1], (t * t / 4.0 - a - 0.5) * y[0]]

        grid = np.linspace(0.0, span, 25)
        sol = solve_ivp(
            rhs,
            (0.0, span),
            [complex(d0), complex(d0p)],
            t_eval=grid,
            rtol=1e-13,
            atol=1e-30,
            method="DOP853",
        )
        assert sol.success
        mine = pcf_d_ray(a, 1.0, grid)
        relerr = np.abs(mine - sol.y[0]) / np.abs(sol.y[0])
        assert relerr.max() < 1e-7


def test_pcf_cross_check_mode_silent_on_clean_points():
    with warnings.catch_warnings():
        warnings.simplefilter("error", AccuracyWarning)
        v = pcf_d(-0.5 + 0.167j, LAM45 * 3.0, backend="cross-check")
    assert crel(v, SMALL_ORDER_RAY_TABLE[1][1]) < 5e-8
    with warnings.catch_warnings():
        warnings.simplefilter("error", AccuracyWarning)
        v2 = pcf_d(-26.54, 1.6, backend="cross-check")
    assert crel(v2, REAL_AXIS_TABLE[2][1]) < 5e-8


def test_pcf_range_errors():
    with pytest.raises(RangeError):
        pcf_d(150.0, 1.0)
    with pytest.raises(RangeError):
        pcf_d(1.0, 200.0)
    with pytest.raises(RangeError):
        pcf_d(float("nan"), 1.0)
    with pytest.raises(ValueError):
        pcf_d(1.0, 1.0, backend="nonsense")


def test_pcf_series_reports_cancellation():
    # recessive value at moderate |z|: the series loses too many digits and
    # must refuse rather than return garbage
    with pytest.raises(ConvergenceError):
        pcf_d(-26.54, 5.9, backend="series")


def test_pcf_asymptotic_rejects_small_argument():
    with pytest.raises(RangeError):
        pcf_d(-26.54, 1.6, backend="asymptotic")


# ---------------------------------------------------------------------------
# complex root finder
# ---------------------------------------------------------------------------


def test_root_finder_quadratic():
    s = find_complex_root(lambda z: z * z + 1.0, 0.5j, tol=1e-13)
    assert abs(s.root - 1j) < 1e-10
    assert s.residual <= 1e-13
    assert s.path[0] == 0.5j
    assert len(s.path) == s.iterations + 1


def test_root_finder_saddle_closed_form():
    # sin(eta) = 1.5i has the purely imaginary root i*asinh(1.5)
    s = find_complex_root(lambda e: cmath.sin(e) - 1.5j, 0.2 + 1.0j, tol=1e-13)
    assert abs(s.root - 1.1947632172871092j) < 1e-10


def test_root_finder_idempotent():
    f = lambda e: cmath.sin(e) - 1.5j
    s1 = find_complex_root(f, 0.2 + 1.0j, tol=1e-13)
    s2 = find_complex_root(f, s1.root, tol=1e-13)
    assert s2.root == s1.root
    assert s2.iterations == 0
    assert s2.path == (s1.root,)


def test_root_finder_no_root_raises():
    # real Newton iteration for z^2+1 from a real guess never leaves the
    # real axis and never converges
    with pytest.raises(ConvergenceError):
        find_complex_root(lambda z: z * z + 1.0, 1e6 + 0j, max_iter=40)


def test_root_finder_singular_derivative():
    with pytest.raises(ConvergenceError):
        find_complex_root(lambda z: 1.0 + 0.0 * z, 0.3 + 0.1j)


def test_root_finder_rejects_bad_tol():
    with pytest.raises(ValueError):
        find_complex_root(lambda z: z, 1.0, tol=0.0)
