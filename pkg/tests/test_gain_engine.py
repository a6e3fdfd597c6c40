import math

import numpy as np
import numpy.testing as npt
import pytest
from scipy.integrate import dblquad

from nearfield_bd.array_geometry import (
    CircArray,
    FixedApertureLength,
    FixedElementDiagonal,
    TxGeometry,
    characteristic_distances,
    make_rect_array,
    wavelength_from_carrier,
)
from nearfield_bd.field_model import QuadratureSpec, exact_field, matched_filter_phase
from nearfield_bd.gain_engine import (
    GainProfile,
    SweepEvalError,
    analytic_gain_circ,
    analytic_gain_nonbroadside,
    analytic_gain_rect,
    circ_gain_broadside,
    disk_gain_exact,
    disk_gain_fresnel,
    effective_distance,
    exact_array_gain,
    exact_array_gain_steered,
    gain_profile,
    projected_gain_approx,
    rect_gain_broadside,
    rect_gain_slanted,
)

LAM = wavelength_from_carrier(3e9)
D_F = LAM / 8

FAST_QUAD = QuadratureSpec(order=8, refinement=0)


def square_array():
    return make_rect_array(100, 1.0, FixedElementDiagonal(LAM / 4), LAM)


def test_effective_distance():
    assert effective_distance(math.inf, 3.0) == 3.0
    assert math.isinf(effective_distance(5.0, 5.0))
    npt.assert_allclose(effective_distance(2.0, 6.0), 3.0)
    npt.assert_allclose(effective_distance(6.0, 2.0), 3.0)
    with pytest.raises(ValueError):
        effective_distance(5.0, -1.0)
    with pytest.raises(ValueError):
        effective_distance(-5.0, 1.0)


def test_analytic_rect_limits():
    assert analytic_gain_rect(1.0, 0.0) == 1.0
    assert analytic_gain_rect(3.0, 1e-15) == 1.0
    val = analytic_gain_rect(1.0, 1.25)
    assert abs(val - 0.5) < 0.01
    for eta, a in [(0.3, 0.7), (2.0, 4.4), (1.0, 9.0)]:
        g = analytic_gain_rect(eta, a)
        assert 0.0 < g <= 1.0
    with pytest.raises(ValueError):
        analytic_gain_rect(0.0, 1.0)
    with pytest.raises(ValueError):
        analytic_gain_rect(1.0, -0.5)


def test_aspect_ratio_symmetry():
    """Swapping eta for 1/eta at the same effective distance leaves the
    closed-form gain unchanged."""
    rng = np.random.default_rng(7)
    d_fa = 1250 * LAM
    for _ in range(200):
        eta = rng.uniform(0.05, 20.0)
        z_eff = rng.uniform(5 * LAM, 4000 * LAM)
        a1 = d_fa / (4 * z_eff * (1 + eta ** 2))
        a2 = d_fa / (4 * z_eff * (1 + eta ** -2))
        g1 = analytic_gain_rect(eta, a1)
        g2 = analytic_gain_rect(1 / eta, a2)
        assert abs(g1 - g2) < 1e-10


def test_nonbroadside_reduces_to_rect():
    for eta, p in [(1.0, 0.8), (4.0, 0.33), (0.2, 2.1)]:
        g_rect = analytic_gain_rect(eta, p * p)
        g_slant = analytic_gain_nonbroadside(eta, p, 0.0, 0.0)
        assert abs(g_rect - g_slant) < 1e-12
    with pytest.raises(ValueError):
        analytic_gain_nonbroadside(1.0, 0.0, 0.1, 0.0)


def test_slanted_wrapper_reduces_to_broadside():
    for eta, z, f in [(1.0, 60 * LAM, 100 * LAM), (4.0, 400 * LAM, 125 * LAM),
                      (0.3, 77 * LAM, 10000 * LAM)]:
        arr = make_rect_array(100, eta, FixedElementDiagonal(LAM / 4), LAM)
        g1 = rect_gain_broadside(arr, z, f)
        g2 = rect_gain_slanted(arr, TxGeometry(z), f)
        assert abs(g1 - g2) < 1e-12


def test_thin_array_gain_angle_independence():
    """A vanishing width ratio removes the azimuth dependence."""
    arr = make_rect_array(100, 1e-3, FixedApertureLength(25 * LAM), LAM)
    f = 400 * D_F
    gains = []
    for phi in (0.0, np.pi / 8, np.pi / 4):
        tx = TxGeometry(1000 * D_F, azimuth=phi)
        gains.append(rect_gain_slanted(arr, tx, f))
    assert max(gains) - min(gains) < 1e-3


def test_slanted_perfect_focus_limit():
    """At d = F the gain collapses to the sinc^2 product, below 1 off-axis."""
    arr = square_array()
    tx = TxGeometry(400 * D_F, azimuth=np.pi / 8)
    g = rect_gain_slanted(arr, tx, 400 * D_F)
    d_fa = 1250 * LAM
    pq = 0.5 * math.sin(np.pi / 8) * math.sqrt(2 * d_fa / (LAM * 2))
    expected = (math.sin(math.pi * pq) / (math.pi * pq)) ** 2
    npt.assert_allclose(g, expected, rtol=1e-12)
    assert g < 0.05
    # broadside perfect focus is exactly 1
    assert rect_gain_slanted(arr, TxGeometry(400 * D_F), 400 * D_F) == 1.0


def test_analytic_circ_values():
    assert analytic_gain_circ(0.0) == 1.0
    for k in (1, 2, 3):
        assert abs(analytic_gain_circ(float(k))) < 1e-30
    peak = max(np.linspace(1.0, 2.0, 20001), key=analytic_gain_circ)
    assert abs(peak - 1.4303) < 1e-3
    with pytest.raises(ValueError):
        analytic_gain_circ(-0.1)


def test_exact_gain_perfect_focus():
    arr = square_array()
    d_b = characteristic_distances(arr, 1.25).d_b
    g = exact_array_gain(arr, TxGeometry(d_b), d_b, FAST_QUAD)
    assert g >= 0.99
    g_steer = exact_array_gain_steered(arr, TxGeometry(d_b), d_b, FAST_QUAD)
    assert g_steer >= 0.99
    assert g_steer >= g - 1e-9


def test_far_field_filter_loses_gain():
    arr = square_array()
    d_b = characteristic_distances(arr, 1.25).d_b
    g_far = exact_array_gain(arr, TxGeometry(d_b), math.inf, FAST_QUAD)
    assert g_far < 0.05


def test_exact_gain_bounds_and_refinement():
    arr = square_array()
    tx = TxGeometry(700 * D_F)
    g0 = exact_array_gain(arr, tx, 1000 * D_F, QuadratureSpec(order=8, refinement=0))
    g1 = exact_array_gain(arr, tx, 1000 * D_F, QuadratureSpec(order=8, refinement=1))
    assert 0.0 <= g0 <= 1.0 + 1e-6
    assert abs(g1 - g0) < 1e-6


def test_reactive_near_field_rejected():
    arr = square_array()
    with pytest.raises(ValueError):
        exact_array_gain(arr, TxGeometry(29 * LAM), 50 * LAM)
    with pytest.raises(ValueError):
        exact_array_gain_steered(arr, TxGeometry(29 * LAM), 50 * LAM)
    with pytest.raises(ValueError):
        exact_array_gain(arr, TxGeometry(50 * LAM), -2.0)
    with pytest.raises(ValueError):
        disk_gain_exact(CircArray(12.5 * LAM, LAM), 29 * LAM, 50 * LAM)


def test_single_element_matches_antenna_gain():
    """N = 1 degenerates to the plain aperture gain of the element."""
    one = make_rect_array(1, 1.0, FixedElementDiagonal(2 * LAM), LAM)
    tx = TxGeometry(10 * LAM)
    focus = 7 * LAM
    half_w = one.elem_w / 2
    half_h = one.elem_h / 2

    def integrand_re(y, x):
        val = exact_field(tx, x, y, LAM) * matched_filter_phase(focus, x, y, LAM)
        return val.real

    def integrand_im(y, x):
        val = exact_field(tx, x, y, LAM) * matched_filter_phase(focus, x, y, LAM)
        return val.imag

    def integrand_sq(y, x):
        return abs(exact_field(tx, x, y, LAM)) ** 2

    re_v, _ = dblquad(integrand_re, -half_w, half_w, -half_h, half_h, epsabs=1e-14)
    im_v, _ = dblquad(integrand_im, -half_w, half_w, -half_h, half_h, epsabs=1e-14)
    sq_v, _ = dblquad(integrand_sq, -half_w, half_w, -half_h, half_h, epsabs=1e-16)
    expected = (re_v ** 2 + im_v ** 2) / (one.elem_area * sq_v)
    g = exact_array_gain(one, tx, focus, QuadratureSpec(order=16, refinement=1))
    npt.assert_allclose(g, expected, rtol=1e-9)


def test_exact_matches_analytic_spotcheck():
    arr = square_array()
    focus = 1000 * D_F
    worst = 0.0
    for z in np.geomspace(400 * D_F, 10000 * D_F, 9):
        ge = exact_array_gain(arr, TxGeometry(z), focus, FAST_QUAD)
        ga = rect_gain_broadside(arr, z, focus)
        worst = max(worst, abs(ge - ga))
    assert worst <= 0.02


def test_discrepancy_shrinks_with_distance():
    """|exact - analytic| averaged over the near half of [d_B, 10 d_B]
    dominates the far half."""
    arr = square_array()
    d_b = characteristic_distances(arr, 1.25).d_b
    focus = 4 * d_b
    zs = np.geomspace(d_b, 10 * d_b, 16)
    diffs = [abs(exact_array_gain(arr, TxGeometry(z), focus, FAST_QUAD)
                 - rect_gain_broadside(arr, z, focus)) for z in zs]
    assert np.mean(diffs[:8]) >= np.mean(diffs[8:])


def test_disk_fresnel_oracle_matches_sinc():
    circ = CircArray(12.5 * LAM, LAM)
    focus = 50 * LAM
    for z in np.geomspace(50 * LAM, 5000 * LAM, 25):
        g_quad = disk_gain_fresnel(circ, z, focus)
        g_closed = circ_gain_broadside(circ, z, focus)
        assert abs(g_quad - g_closed) < 1e-10
    assert disk_gain_fresnel(circ, focus, focus) == pytest.approx(1.0, abs=1e-12)


def test_disk_exact_agreement_band():
    """Exact-field disk gain: within 0.021 of sinc^2 from d_B, within 0.01
    from 1.6 d_B outward."""
    circ = CircArray(12.5 * LAM, LAM)
    focus = 50 * LAM
    d_b = 50 * LAM
    near = max(abs(disk_gain_exact(circ, z, focus) - circ_gain_broadside(circ, z, focus))
               for z in np.geomspace(d_b, 1.6 * d_b, 12))
    far = max(abs(disk_gain_exact(circ, z, focus) - circ_gain_broadside(circ, z, focus))
              for z in np.geomspace(1.6 * d_b, 100 * d_b, 25))
    assert near <= 0.021
    assert far <= 0.01


def test_projected_equals_exact_at_broadside():
    arr = square_array()
    tx = TxGeometry(1000 * D_F)
    g1 = projected_gain_approx(arr, tx, 400 * D_F, FAST_QUAD)
    g2 = exact_array_gain(arr, tx, 400 * D_F, FAST_QUAD)
    npt.assert_allclose(g1, g2, rtol=1e-12)


def test_projected_tracks_steered_gain():
    arr = square_array()
    tx = TxGeometry(1000 * D_F, azimuth=np.pi / 4)
    g_proj = projected_gain_approx(arr, tx, 400 * D_F, FAST_QUAD)
    g_exact = exact_array_gain_steered(arr, tx, 400 * D_F, FAST_QUAD)
    assert abs(g_proj - g_exact) < 0.1


def test_gain_profile_analytic_peak_at_focus():
    arr = square_array()
    rng = np.random.default_rng(3)
    for _ in range(10):
        focus = rng.uniform(300, 4000) * D_F
        grid = np.sort(rng.uniform(100, 10000, 41)) * D_F
        grid = np.unique(np.append(grid, focus * rng.uniform(0.97, 1.03)))
        prof = gain_profile("analytic", arr, grid, focus)
        peak_idx = int(np.argmax(prof.gains))
        nearest = int(np.argmin(np.abs(prof.distances - focus)))
        assert peak_idx == nearest


def test_gain_profile_perfect_track_is_unity():
    arr = square_array()
    for z in (100 * D_F, 700 * D_F, 5000 * D_F):
        assert rect_gain_broadside(arr, z, z) == 1.0


def test_gain_profile_exact_kind_and_threads():
    arr = square_array()
    grid = np.geomspace(400 * D_F, 3000 * D_F, 6)
    serial = gain_profile("exact", arr, grid, 1000 * D_F, quad=FAST_QUAD)
    threaded = gain_profile("exact", arr, grid, 1000 * D_F, quad=FAST_QUAD, threads=3)
    npt.assert_allclose(serial.gains, threaded.gains, rtol=0, atol=0)
    assert serial.kind == "exact"


def test_gain_profile_error_aggregation():
    arr = square_array()
    grid = [10 * LAM, 20 * LAM, 1000 * D_F]
    with pytest.raises(SweepEvalError) as info:
        gain_profile("exact", arr, grid, 1000 * D_F, quad=FAST_QUAD)
    assert info.value.indices == [0, 1]


def test_gain_profile_kind_validation():
    arr = square_array()
    circ = CircArray(12.5 * LAM, LAM)
    with pytest.raises(ValueError):
        gain_profile("bogus", arr, [1.0, 2.0], 1.0)
    with pytest.raises(ValueError):
        gain_profile("steered", circ, [10.0, 20.0], 1.0)
    with pytest.raises(ValueError):
        gain_profile("exact", circ, [10.0, 20.0], 1.0, azimuth=0.3)
    with pytest.raises(TypeError):
        gain_profile("exact", "not geometry", [1.0], 1.0)


def test_gain_profile_type_invariants():
    with pytest.raises(ValueError):
        GainProfile(1.0, np.array([2.0, 1.0]), np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        GainProfile(1.0, np.array([1.0, 2.0]), np.array([0.5, 1.5]))
    with pytest.raises(ValueError):
        GainProfile(1.0, np.array([1.0, 2.0]), np.array([-0.1, 0.5]))
    prof = GainProfile(1.0, np.array([1.0, 2.0]), np.array([1.0, 0.5]))
    assert prof.gains[0] == 1.0
