"""Barrier-module tests: shapes, gauge-invariant effective potential,
position-dependent energy, tier dispersions, and turning points.

Reference values were frozen from closed-form solutions (quadratic roots of
the 1-D Coulomb barrier, triangular-barrier exit) or from converged runs of
this module cross-checked against those closed forms.
"""

import io
import math

import numpy as np
import pytest

from tunnelion.core import C_DEFAULT, NoBarrierError, ParameterError, PhysicsTier
from tunnelion.barrier import (
    BarrierModel,
    Coulomb1D,
    Linear,
    Parabolic,
    ParabolicCoord,
    Square,
    ZeroRangeTriangular,
    dump_grid_csv,
    effective_potential,
    kinetic_q_z,
    p_x_squared,
    position_energy,
    turning_points,
    uniform_field_a_z,
    with_uniform_a_z,
)

KAPPA = 90.0
IP = 0.5 * KAPPA**2          # 4050
EA = KAPPA**3                # 729000
E30 = EA / 30.0              # 24300
C = C_DEFAULT

TIER_NR = PhysicsTier.NONREL
TIER_MD = PhysicsTier.MAGNETIC_DIPOLE
TIER_MDK = PhysicsTier.MAGNETIC_DIPOLE_PLUS_KINETIC
TIER_FR = PhysicsTier.FULLY_RELATIVISTIC
TIER_KG = PhysicsTier.KLEIN_GORDON


# ---------------------------------------------------------------------------
# shapes
# ---------------------------------------------------------------------------


def test_shape_validation():
    with pytest.raises(ParameterError):
        Square(2.0, 0.0)
    with pytest.raises(ParameterError):
        Square(math.nan, 1.0)
    with pytest.raises(ParameterError):
        Linear(0.5, -2.0)
    with pytest.raises(ParameterError):
        Parabolic(5.0, 0.0)
    with pytest.raises(ParameterError):
        Coulomb1D(-90.0, E30)
    with pytest.raises(ParameterError):
        Coulomb1D(KAPPA, 0.0)
    with pytest.raises(ParameterError):
        ZeroRangeTriangular(0.0, E30)
    with pytest.raises(ParameterError):
        ParabolicCoord(-0.1)


def test_shape_potentials():
    sq = Square(2.0, 1.3)
    assert sq.potential(0.5) == 2.0
    assert sq.potential(-0.1) == 0.0
    assert sq.potential(1.4) == 0.0
    lin = Linear(0.5, 2.0)
    assert lin.potential(0.1) == pytest.approx(0.3, rel=1e-15)
    assert lin.potential(-1.0) == 0.0
    par = Parabolic(5.0, 4.0)
    assert par.potential(0.5) == pytest.approx(4.5, rel=1e-15)
    cou = Coulomb1D(KAPPA, E30)
    assert cou.potential(0.05) == pytest.approx(-3015.0, rel=1e-15)
    assert cou.potential(0.0) == math.inf
    assert cou.potential(-1.0) == math.inf
    zr = ZeroRangeTriangular(IP, E30)
    assert zr.potential(0.1) == pytest.approx(-2430.0, rel=1e-15)
    assert zr.potential(-0.1) == 0.0
    pc = ParabolicCoord(0.08)
    assert pc.potential(2.0) == pytest.approx(-0.25 / 2 - 0.125 / 4 - 0.125 * 0.08 * 2,
                                              rel=1e-15)
    assert pc.potential(0.0) == math.inf
    # array in, array out, matching scalars
    xs = np.array([0.5, 1.4])
    np.testing.assert_allclose(sq.potential(xs), [2.0, 0.0])
    assert isinstance(sq.potential(0.5), float)


# ---------------------------------------------------------------------------
# effective potential (gauge invariance is structural: built from E, not phi/A)
# ---------------------------------------------------------------------------


def _coulomb_binding(r):
    n = float(np.linalg.norm(r))
    return -KAPPA / n if n > 0 else -math.inf


def _x_axis_path(s):
    return np.array([s, 0.0, 0.0])


def test_effective_potential_uniform_plus_coulomb():
    # E = E0 x_hat with Coulomb binding gives x E0 - kappa/x on the +x axis
    ep = effective_potential(
        lambda r: np.array([E30, 0.0, 0.0]), _coulomb_binding, _x_axis_path
    )
    for x in (0.05, 0.1, 0.2, 0.5):
        want = E30 * x - KAPPA / x
        assert ep.v_eff(x) == pytest.approx(want, rel=1e-12)
    # mirrored field (electron escapes toward +x) reproduces the 1-D
    # tunnel-ionization barrier shape
    ep_m = effective_potential(
        lambda r: np.array([-E30, 0.0, 0.0]), _coulomb_binding, _x_axis_path
    )
    shape = Coulomb1D(KAPPA, E30)
    for x in (0.05, 0.1, 0.2, 0.5):
        assert ep_m.v_eff(x) == pytest.approx(shape.potential(x), rel=1e-12)


def test_effective_potential_gauge_stories_agree():
    # one observer describes the field through a scalar potential, another
    # through a time-dependent vector potential; same E, same V_eff
    def e_from_phi(r):
        phi = lambda rr: -E30 * rr[0] + 7.3
        h = 1e-2
        out = np.empty(3)
        for i in range(3):
            e = np.zeros(3)
            e[i] = h
            hp, hm = r + e, r - e
            out[i] = -(phi(hp) - phi(hm)) / (hp[i] - hm[i])
        return out

    def e_from_a(r):
        a_t = lambda t: np.array([-C * E30 * t, 0.0, 0.0])
        t, h = 0.4, 1e-2
        tp, tm = t + h, t - h
        return -(a_t(tp) - a_t(tm)) / (C * (tp - tm))

    xs = [0.05, 0.1, 0.2, 0.5]
    g1 = effective_potential(e_from_phi, _coulomb_binding, _x_axis_path).grid_values(xs)
    g2 = effective_potential(e_from_a, _coulomb_binding, _x_axis_path).grid_values(xs)
    np.testing.assert_allclose(g1, g2, rtol=1e-12)


def test_effective_potential_zero_field_identity():
    ep = effective_potential(lambda r: np.zeros(3), _coulomb_binding, _x_axis_path)
    for x in (0.05, 0.3, 2.0):
        assert ep.v_eff(x) == _coulomb_binding(_x_axis_path(x))
        assert ep.field_term(x) == 0.0


def test_effective_potential_rejects_bad_path():
    with pytest.raises(ParameterError):
        effective_potential(
            lambda r: np.zeros(3), _coulomb_binding, lambda s: np.array([s, 0.0])
        )


# ---------------------------------------------------------------------------
# kinetic transverse momentum and position-dependent energy
# ---------------------------------------------------------------------------


def test_kinetic_q_z_field_region():
    a = 1.3
    m = BarrierModel(Square(2.0, a), a_z=uniform_field_a_z(E30, 0.0, a))
    # conserved canonical p_z, kick accumulated only across the field region
    assert kinetic_q_z(m, 0.37, -2.0, C) == 0.37
    assert kinetic_q_z(m, 0.37, a, C) - kinetic_q_z(m, 0.37, 0.0, C) == E30 * a / C
    assert kinetic_q_z(m, 0.37, 5.0, C) == kinetic_q_z(m, 0.37, a, C)


def test_uniform_field_a_z_validation():
    with pytest.raises(ParameterError):
        uniform_field_a_z(0.0)
    with pytest.raises(ParameterError):
        uniform_field_a_z(E30, 1.0, 0.5)


def test_with_uniform_a_z():
    m = with_uniform_a_z(BarrierModel(Coulomb1D(KAPPA, E30)))
    assert m.a_z is not None
    assert kinetic_q_z(m, 0.0, 0.1, C) == pytest.approx(E30 * 0.1 / C, rel=1e-15)
    with pytest.raises(ParameterError):
        with_uniform_a_z(BarrierModel(Square(2.0, 1.3)))
    with pytest.raises(ParameterError):
        with_uniform_a_z(BarrierModel(Parabolic(5.0, 4.0)))


def test_position_energy_constant_without_a_z():
    m = BarrierModel(Coulomb1D(KAPPA, E30))
    vals = position_energy(m, -IP, 0.3, -2.0, np.array([0.01, 0.1, 1.0]), C)
    np.testing.assert_allclose(vals, -IP - 0.5 * 0.3**2 - 0.5 * 2.0**2, rtol=1e-15)


def test_position_energy_md_frozen_and_c_limit():
    m = with_uniform_a_z(BarrierModel(Coulomb1D(KAPPA, E30)))
    assert position_energy(m, -IP, 0.0, -16.914, 0.05, C) == pytest.approx(
        -4082.3828714211327, rel=1e-14
    )
    # the vector-potential term dies out as c -> inf
    assert position_energy(m, -IP, 0.0, -16.914, 0.05, C * 1e12) == pytest.approx(
        -IP - 0.5 * 16.914**2, rel=1e-12
    )


# ---------------------------------------------------------------------------
# tier dispersions
# ---------------------------------------------------------------------------


def test_p_x_squared_tier_ordering_inside_barrier():
    # the magnetic-dipole term removes energy from the escape coordinate
    # (lower tunneling probability); the kinetic correction gives part back
    m_nr = BarrierModel(Coulomb1D(KAPPA, E30))
    m = with_uniform_a_z(m_nr)
    nr = p_x_squared(m_nr, -IP, 0.0, 0.0, TIER_NR, 0.08, C)
    md = p_x_squared(m, -IP, 0.0, 0.0, TIER_MD, 0.08, C)
    mdk = p_x_squared(m, -IP, 0.0, 0.0, TIER_MDK, 0.08, C)
    assert nr == pytest.approx(-1962.0, rel=1e-12)
    assert md == pytest.approx(-2163.2441111636467, rel=1e-12)
    assert mdk == pytest.approx(-2100.9450174881263, rel=1e-12)
    assert md < mdk < nr < 0.0


def test_p_x_squared_md_requires_a_z():
    m = BarrierModel(Coulomb1D(KAPPA, E30))
    with pytest.raises(ParameterError):
        p_x_squared(m, -IP, 0.0, 0.0, TIER_MD, 0.08, C)


def test_p_x_squared_c_to_inf_reduces_to_nonrel():
    # at c scaled x100 every tier lands on the nonrelativistic dispersion
    m = with_uniform_a_z(BarrierModel(Coulomb1D(1.0, 0.05)))
    big_c = C * 100.0
    ip_rel = 1.0 / (1.0 + math.sqrt(1.0 - (1.0 / big_c) ** 2))  # kappa = 1
    nr = p_x_squared(m, -0.5, 0.0, 0.0, TIER_NR, 5.0, big_c)
    for tier, eps in (
        (TIER_MD, -0.5),
        (TIER_MDK, -0.5),
        (TIER_FR, -ip_rel),
        (TIER_KG, -ip_rel),
    ):
        val = p_x_squared(m, eps, 0.0, 0.0, tier, 5.0, big_c)
        assert val == pytest.approx(nr, rel=1e-6)


def test_p_x_squared_array_matches_scalar():
    m = with_uniform_a_z(BarrierModel(Coulomb1D(KAPPA, E30)))
    xs = np.array([0.05, 0.08, 0.12])
    arr = p_x_squared(m, -IP, 0.0, -16.914, TIER_MD, xs, C)
    for x, v in zip(xs, arr):
        assert p_x_squared(m, -IP, 0.0, -16.914, TIER_MD, float(x), C) == pytest.approx(
            v, rel=1e-9, abs=1e-9
        )


# ---------------------------------------------------------------------------
# turning points
# ---------------------------------------------------------------------------


def test_turning_points_zero_range_triangle():
    # kappa=90, E0 = E_a/30: exit at I_p/E0 = 1/6
    m = BarrierModel(ZeroRangeTriangular(IP, E30))
    x0, xe = turning_points(m, -IP, 0.0, 0.0, TIER_NR)
    assert x0 == 0.0
    assert xe == pytest.approx(IP / E30, rel=1e-13)
    assert xe == pytest.approx(1.0 / 6.0, rel=1e-13)


def test_turning_points_square_edges():
    m = BarrierModel(Square(2.0, 1.3))
    assert turning_points(m, 0.7, 0.0, 0.0, TIER_NR) == (0.0, 1.3)
    with pytest.raises(NoBarrierError):
        turning_points(m, 2.5, 0.0, 0.0, TIER_NR)


def test_turning_points_linear_edge():
    m = BarrierModel(Linear(0.5, 2.0))
    x0, xe = turning_points(m, 0.2, 0.0, 0.0, TIER_NR)
    assert x0 == 0.0
    assert xe == pytest.approx(0.15, rel=1e-13)
    with pytest.raises(NoBarrierError):
        turning_points(m, 0.6, 0.0, 0.0, TIER_NR)


def test_turning_points_parabolic_symmetric():
    m = BarrierModel(Parabolic(5.0, 4.0))
    x0, xe = turning_points(m, 3.0, 0.0, 0.0, TIER_NR)
    w = math.sqrt(2.0 * 2.0 / 4.0)
    assert x0 == pytest.approx(-w, rel=1e-13)
    assert xe == pytest.approx(w, rel=1e-13)
    with pytest.raises(NoBarrierError):
        turning_points(m, 5.5, 0.0, 0.0, TIER_NR)


def test_turning_points_coulomb_nonrel_exact_roots():
    # -I_p = -E0 x - kappa/x has the two quadratic roots below
    m = BarrierModel(Coulomb1D(KAPPA, E30))
    disc = math.sqrt(IP * IP - 4.0 * E30 * KAPPA)
    x0_ref = (IP - disc) / (2.0 * E30)
    xe_ref = (IP + disc) / (2.0 * E30)
    x0, xe = turning_points(m, -IP, 0.0, 0.0, TIER_NR)
    assert x0 == pytest.approx(x0_ref, rel=1e-13)
    assert xe == pytest.approx(xe_ref, rel=1e-13)
    # the barrier is shorter than the zero-range one by about (1 - 8 E0/E_a)
    length_factor = (xe - x0) * E30 / IP
    assert length_factor == pytest.approx(1.0 - 8.0 * E30 / EA, rel=0.08)
    # first-order estimate for the exit alone carries a 4 E0/E_a correction
    assert xe == pytest.approx((IP / E30) * (1.0 - 4.0 * E30 / EA), rel=0.03)


def test_turning_points_coulomb_md_frozen():
    # under-the-barrier magnetic-dipole dynamics at the probability-maximizing
    # canonical momentum p_z = -0.5723 I_p/c
    m = with_uniform_a_z(BarrierModel(Coulomb1D(KAPPA, E30)))
    x0, xe = turning_points(m, -IP, 0.0, -16.9140, TIER_MD, c=C)
    assert x0 == pytest.approx(0.02570101245320784, rel=1e-10)
    assert xe == pytest.approx(0.14198707632332247, rel=1e-10)
    # kinetic transverse momentum in units of I_p/c: -0.42 at entry,
    # +0.28 at the exit
    unit = IP / C
    assert kinetic_q_z(m, -16.9140, x0, C) / unit == pytest.approx(-0.4181, abs=2e-4)
    assert kinetic_q_z(m, -16.9140, xe, C) / unit == pytest.approx(0.2796, abs=2e-4)


def test_turning_points_residuals_under_bound():
    # |p_x| < 1e-8 kappa at every returned point, all tiers, several fields
    ip_rel = C * C - math.sqrt(C**4 - KAPPA * KAPPA * C * C)
    bound = 1e-8 * KAPPA
    for frac, pz in ((30.0, -16.914), (17.0, -16.914), (20.0, -5.0)):
        e0 = EA / frac
        m = with_uniform_a_z(BarrierModel(Coulomb1D(KAPPA, e0)))
        cases = [
            (m, -IP, pz, TIER_MD),
            (m, -IP, pz, TIER_MDK),
            (m, -ip_rel, pz, TIER_FR),
            (m, -ip_rel, pz, TIER_KG),
            (BarrierModel(Coulomb1D(KAPPA, e0)), -IP, 0.0, TIER_NR),
        ]
        for model, eps, p_z, tier in cases:
            x0, xe = turning_points(model, eps, 0.0, p_z, tier, c=C)
            assert x0 < xe
            for x in (x0, xe):
                res = abs(p_x_squared(model, eps, 0.0, p_z, tier, x, C))
                assert math.sqrt(res) < bound


def test_turning_points_parabolic_coord_border():
    # near-threshold barrier survives just below the critical field and
    # disappears just above it
    x0, xe = turning_points(
        BarrierModel(ParabolicCoord(0.98 / 9.0)), -0.125, 0.0, 0.0, TIER_NR
    )
    assert x0 == pytest.approx(3.9603837280244525, rel=1e-10)
    assert xe == pytest.approx(5.634817656057066, rel=1e-10)
    with pytest.raises(NoBarrierError):
        turning_points(
            BarrierModel(ParabolicCoord(1.05 / 9.0)), -0.125, 0.0, 0.0, TIER_NR
        )


def test_momentum_kick_order_of_magnitude():
    # exit-minus-entry kinetic momentum matches x_e E0/c within a factor 2
    m = with_uniform_a_z(BarrierModel(Coulomb1D(KAPPA, E30)))
    x0, xe = turning_points(m, -IP, 0.0, -16.9140, TIER_MD, c=C)
    kick = kinetic_q_z(m, -16.9140, xe, C) - kinetic_q_z(m, -16.9140, x0, C)
    estimate = xe * E30 / C
    assert 0.5 < kick / estimate < 2.0


# ---------------------------------------------------------------------------
# grid export
# ---------------------------------------------------------------------------


def test_dump_grid_csv_golden():
    m = with_uniform_a_z(BarrierModel(Coulomb1D(KAPPA, E30)))
    buf = io.StringIO()
    dump_grid_csv(m, -IP, 0.0, -16.914, [0.05, 0.1], buf, C)
    assert buf.getvalue() == (
        "x,V_eff,eps_x,q_z\n"
        "0.05,-3015.0,-4082.3828714211327,-8.04771662288535\n"
        "0.1,-3330.0,-4050.3350257655648,0.8185667542293018\n"
    )
