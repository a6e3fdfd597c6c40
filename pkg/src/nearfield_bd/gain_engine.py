"""Normalized array gain in the radiative near-field.

Exact gains integrate the spherical-wave field over the aperture
(composite per-element Gauss-Legendre) after multiplying in a focusing
filter; closed-form gains evaluate the Fresnel-integral expressions for
rectangular apertures (broadside and slanted transmitters) and the sinc^2
expression for circular apertures. A profile driver sweeps distance grids
and aggregates per-point failures.

Two focusing conventions are provided. ``exact_array_gain`` injects the
broadside quadratic phase e^{+j(2 pi/lambda)(x^2+y^2)/(2F)}, which is what
the closed forms approximate. ``exact_array_gain_steered`` conjugates the
true propagation phase toward the point at range F along the transmitter
ray, which is the natural reference when the array steers at a slanted
user; the projected-array approximation targets this quantity.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from .array_geometry import (
    CircArray,
    RectArray,
    TxGeometry,
    element_grid,
    project_array,
)
from .field_model import SQRT_4PI, QuadratureSpec
from .fresnel_core import fresnel_cs, sinc

REACTIVE_LIMIT_FACTOR = 1.2

_GAIN_REFINE_ATOL = 1e-6


class SweepEvalError(RuntimeError):
    """One or more sweep points failed; carries the offending indices."""

    def __init__(self, failures):
        self.failures = failures
        idx = ", ".join(str(i) for i, _ in failures)
        first = failures[0][1]
        super().__init__(f"gain evaluation failed at sweep indices [{idx}]: {first}")

    @property
    def indices(self):
        return [i for i, _ in self.failures]


def effective_distance(focus: float, dist: float) -> float:
    """F*d/|F - d|: infinite at perfect focus, d under the far-field filter."""
    if not dist > 0:
        raise ValueError(f"distance must be positive, got {dist}")
    if math.isinf(focus):
        return dist
    if not focus > 0:
        raise ValueError(f"focal distance must be positive, got {focus}")
    if focus == dist:
        return math.inf
    return focus * dist / abs(focus - dist)


def _d_fa(arr: RectArray) -> float:
    return 2.0 * arr.elem_diag ** 2 / arr.wavelength * arr.n_elements


def _check_radiative(arr: RectArray, tx: TxGeometry):
    limit = REACTIVE_LIMIT_FACTOR * arr.aperture_len
    if tx.dist < limit:
        raise ValueError(
            f"transmitter at {tx.dist:.6g} m is inside the reactive near-field "
            f"boundary {limit:.6g} m (1.2 x aperture length)")


def _check_focus(focus: float):
    if not (math.isinf(focus) or focus > 0):
        raise ValueError(f"focal distance must be positive or inf, got {focus}")


def _composite_grid(arr: RectArray, order: int):
    """Per-element tensor Gauss-Legendre nodes/weights over the aperture."""
    nodes, wts = roots_legendre(order)
    xc, yc = element_grid(arr)
    gx = (xc[:, None] + 0.5 * arr.elem_w * nodes[None, :]).ravel()
    gy = (yc[:, None] + 0.5 * arr.elem_h * nodes[None, :]).ravel()
    wx = np.tile(0.5 * arr.elem_w * wts, arr.n_per_side)
    wy = np.tile(0.5 * arr.elem_h * wts, arr.n_per_side)
    return gx, gy, wx, wy


def _gain_once(arr, tx, mf_phase, order):
    gx, gy, wx, wy = _composite_grid(arr, order)
    lam = arr.wavelength
    z = tx.z
    dx2 = (gx - tx.x) ** 2
    dy2 = (gy - tx.y) ** 2
    r2 = dx2[:, None] + dy2[None, :] + z * z
    amp = np.sqrt(z * (dx2[:, None] + z * z)) / (SQRT_4PI * r2 ** 1.25)
    phase = -2.0 * np.pi / lam * np.sqrt(r2)
    phase += mf_phase(gx, gy)
    num = np.abs(wx @ (amp * np.exp(1j * phase)) @ wy) ** 2
    den = wx @ (amp * amp) @ wy
    return float(num / (arr.aperture_area * den))


def _gain_refined(arr, tx, mf_phase, quad):
    g = _gain_once(arr, tx, mf_phase, quad.order)
    if quad.refinement >= 1:
        g2 = _gain_once(arr, tx, mf_phase, 2 * quad.order)
        if abs(g2 - g) > _GAIN_REFINE_ATOL:
            raise RuntimeError(
                f"aperture quadrature did not converge: order {quad.order} and "
                f"{2 * quad.order} gains differ by {abs(g2 - g):.3e}")
        g = g2
    return g


def exact_array_gain(arr: RectArray, tx: TxGeometry, focus: float,
                     quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Gain with the broadside quadratic focusing phase toward (0, 0, F)."""
    _check_radiative(arr, tx)
    _check_focus(focus)
    lam = arr.wavelength

    def mf_phase(gx, gy):
        if math.isinf(focus):
            return 0.0
        return (2.0 * np.pi / lam) * ((gx * gx)[:, None] + (gy * gy)[None, :]) \
            / (2.0 * focus)

    return _gain_refined(arr, tx, mf_phase, quad)


def exact_array_gain_steered(arr: RectArray, tx: TxGeometry, focus: float,
                             quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Gain with the true propagation phase conjugated toward the point at
    range F along the transmitter ray (steered focusing)."""
    _check_radiative(arr, tx)
    _check_focus(focus)
    lam = arr.wavelength
    ux, uy, uz = tx.x / tx.dist, tx.y / tx.dist, tx.z / tx.dist

    def mf_phase(gx, gy):
        if math.isinf(focus):
            # plane wave arriving from the ray direction
            return -(2.0 * np.pi / lam) * ((gx * ux)[:, None] + (gy * uy)[None, :])
        fx, fy, fz = focus * ux, focus * uy, focus * uz
        rho = np.sqrt(((gx - fx) ** 2)[:, None] + ((gy - fy) ** 2)[None, :]
                      + fz * fz)
        return (2.0 * np.pi / lam) * rho

    return _gain_refined(arr, tx, mf_phase, quad)


def analytic_gain_rect(eta: float, a: float) -> float:
    """Closed-form broadside gain as a function of the aperture phase
    parameter a = d_FA/(4 z_eff (1 + eta^2)); a = 0 is the focused limit."""
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    if a < 0:
        raise ValueError(f"a must be non-negative, got {a}")
    if a < 1e-12:
        return 1.0
    root = math.sqrt(a)
    c1, s1 = fresnel_cs(eta * root)
    c2, s2 = fresnel_cs(root)
    return (c1 * c1 + s1 * s1) * (c2 * c2 + s2 * s2) / (eta * a) ** 2


def analytic_gain_nonbroadside(eta: float, p: float, q: float, q_tilde: float) -> float:
    """Closed-form slanted-transmitter gain with p = (1/2)sqrt(d_FA/(d_eff(1+eta^2)))
    and angular offsets q (azimuth axis) and q_tilde (elevation axis) in
    Fresnel-integral units."""
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    if not p > 0:
        raise ValueError(f"p must be positive, got {p}")
    c1p, s1p = fresnel_cs(p + q_tilde)
    c1m, s1m = fresnel_cs(p - q_tilde)
    c2p, s2p = fresnel_cs(eta * p + q)
    c2m, s2m = fresnel_cs(eta * p - q)
    br1 = (c1p + c1m) ** 2 + (s1p + s1m) ** 2
    br2 = (c2p + c2m) ** 2 + (s2p + s2m) ** 2
    return br1 * br2 / (4.0 * eta * p * p) ** 2


def analytic_gain_circ(l: float) -> float:
    """Closed-form circular-aperture gain sinc^2(pi l), l = R^2/(2 lambda z_eff)."""
    if l < 0:
        raise ValueError(f"l must be non-negative, got {l}")
    return sinc(math.pi * l) ** 2


def rect_gain_broadside(arr: RectArray, z: float, focus: float) -> float:
    """Closed-form gain for a broadside transmitter at distance z."""
    _check_focus(focus)
    z_eff = effective_distance(focus, z)
    if math.isinf(z_eff):
        return 1.0
    a = _d_fa(arr) / (4.0 * z_eff * (1.0 + arr.eta ** 2))
    return analytic_gain_rect(arr.eta, a)


def rect_gain_slanted(arr: RectArray, tx: TxGeometry, focus: float) -> float:
    """Closed-form gain for a slanted transmitter at range d == tx.dist,
    focusing filter toward (0, 0, F)."""
    _check_focus(focus)
    d = tx.dist
    eta = arr.eta
    lam = arr.wavelength
    d_fa = _d_fa(arr)
    sin_az = tx.x / d
    sin_el = tx.y / d
    d_eff = effective_distance(focus, d)
    if math.isinf(d_eff):
        # p -> 0 while the products p*q stay finite; the bracket terms
        # collapse to sincs of those products
        pq = 0.5 * sin_az * math.sqrt(2.0 * d_fa / (lam * (1.0 + eta * eta)))
        pqt = 0.5 * sin_el * math.sqrt(2.0 * d_fa / (lam * (1.0 + eta * eta)))
        return sinc(math.pi * eta * pq) ** 2 * sinc(math.pi * pqt) ** 2
    p = 0.5 * math.sqrt(d_fa / (d_eff * (1.0 + eta * eta)))
    scale = math.sqrt(2.0 * d_eff / lam)
    return analytic_gain_nonbroadside(eta, p, sin_az * scale, sin_el * scale)


def circ_gain_broadside(circ: CircArray, z: float, focus: float) -> float:
    """Closed-form gain for a circular aperture, broadside transmitter."""
    _check_focus(focus)
    z_eff = effective_distance(focus, z)
    if math.isinf(z_eff):
        return 1.0
    return analytic_gain_circ(circ.radius ** 2 / (2.0 * circ.wavelength * z_eff))


def disk_gain_exact(circ: CircArray, z: float, focus: float,
                    n_radial: int = 96, n_angular: int = 64) -> float:
    """Quadrature gain over the continuous disk, broadside transmitter:
    radial Gauss-Legendre times angular trapezoid."""
    _check_focus(focus)
    limit = REACTIVE_LIMIT_FACTOR * 2.0 * circ.radius
    if z < limit:
        raise ValueError(
            f"broadside distance {z:.6g} m is inside the reactive near-field "
            f"boundary {limit:.6g} m (1.2 x aperture diameter)")
    lam = circ.wavelength
    nodes, wts = roots_legendre(n_radial)
    rho = 0.5 * circ.radius * (nodes + 1.0)
    w_rad = 0.5 * circ.radius * wts * rho
    theta = np.linspace(0.0, 2.0 * np.pi, n_angular, endpoint=False)
    w_ang = 2.0 * np.pi / n_angular
    r2 = rho * rho + z * z
    amp = np.sqrt(z * (np.outer(rho * rho, np.cos(theta) ** 2) + z * z)) \
        / (SQRT_4PI * r2[:, None] ** 1.25)
    phase = -2.0 * np.pi / lam * np.sqrt(r2)
    if not math.isinf(focus):
        phase = phase + 2.0 * np.pi / lam * rho * rho / (2.0 * focus)
    num = np.abs(np.sum(w_rad * np.exp(1j * phase) * (w_ang * amp.sum(axis=1)))) ** 2
    den = np.sum(w_rad * (w_ang * (amp * amp).sum(axis=1)))
    area = np.pi * circ.radius ** 2
    return float(num / (area * den))


def disk_gain_fresnel(circ: CircArray, z: float, focus: float,
                      n_radial: int = 96) -> float:
    """Polar quadrature of the gain with the Fresnel-approximated field
    (flat amplitude, quadratic phase) over the disk. The integrand is
    rotationally symmetric, so the angular factor is exact and only the
    radial Gauss-Legendre rule remains. This is the construction the
    sinc^2 closed form summarizes, so it validates that algebra."""
    _check_focus(focus)
    if not z > 0:
        raise ValueError(f"z must be positive, got {z}")
    lam = circ.wavelength
    nodes, wts = roots_legendre(n_radial)
    rho = 0.5 * circ.radius * (nodes + 1.0)
    w_rad = 0.5 * circ.radius * wts * rho * 2.0 * np.pi
    phase = -2.0 * np.pi / lam * (z + rho * rho / (2.0 * z))
    if not math.isinf(focus):
        phase = phase + 2.0 * np.pi / lam * rho * rho / (2.0 * focus)
    num = np.abs(np.sum(w_rad * np.exp(1j * phase))) ** 2
    area = np.pi * circ.radius ** 2
    # flat amplitude cancels: denominator reduces to area^2
    return float(num / area ** 2)


def projected_gain_approx(arr: RectArray, tx: TxGeometry, focus: float,
                          quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Broadside gain of the width-compressed array at the transmitter range,
    approximating the steered slanted gain."""
    flat = project_array(arr, tx.azimuth)
    return exact_array_gain(flat, TxGeometry(tx.dist), focus, quad)


@dataclass(frozen=True)
class GainProfile:
    """Gain samples over a strictly increasing distance grid."""

    focus: float
    distances: np.ndarray
    gains: np.ndarray
    kind: str = "exact"

    def __post_init__(self):
        d = np.asarray(self.distances, dtype=float)
        g = np.asarray(self.gains, dtype=float)
        if d.shape != g.shape or d.ndim != 1:
            raise ValueError("distances and gains must be 1-D arrays of equal length")
        if not np.all(np.diff(d) > 0):
            raise ValueError("distances must be strictly increasing")
        if np.any(g < 0) or np.max(g, initial=0.0) > 1.0 + 1e-6:
            raise ValueError("gains must lie in [0, 1 + 1e-6]")
        object.__setattr__(self, "distances", d)
        object.__setattr__(self, "gains", g)


_RECT_KINDS = ("exact", "analytic", "steered", "projected")
_CIRC_KINDS = ("exact", "analytic")


def gain_profile(kind: str, geometry, distances, focus: float, *,
                 azimuth: float = 0.0, elevation: float = 0.0,
                 quad: QuadratureSpec = QuadratureSpec(),
                 threads: int | None = None) -> GainProfile:
    """Sweep the transmitter over a distance grid and collect gains.

    ``kind`` selects the estimator: for rectangular arrays one of
    exact | analytic | steered | projected, for circular arrays
    exact | analytic. Per-point failures are aggregated into a
    SweepEvalError carrying the offending sweep indices.
    """
    if isinstance(geometry, RectArray):
        if kind not in _RECT_KINDS:
            raise ValueError(f"kind must be one of {_RECT_KINDS}, got {kind!r}")
    elif isinstance(geometry, CircArray):
        if kind not in _CIRC_KINDS:
            raise ValueError(f"kind must be one of {_CIRC_KINDS}, got {kind!r}")
        if azimuth != 0.0 or elevation != 0.0:
            raise ValueError("circular profiles support broadside transmitters only")
    else:
        raise TypeError(f"unsupported geometry: {geometry!r}")

    def eval_point(dist):
        if isinstance(geometry, CircArray):
            if kind == "analytic":
                return circ_gain_broadside(geometry, dist, focus)
            return disk_gain_exact(geometry, dist, focus)
        tx = TxGeometry(dist, azimuth=azimuth, elevation=elevation)
        if kind == "analytic":
            if azimuth == 0.0 and elevation == 0.0:
                return rect_gain_broadside(geometry, dist, focus)
            return rect_gain_slanted(geometry, tx, focus)
        if kind == "steered":
            return exact_array_gain_steered(geometry, tx, focus, quad)
        if kind == "projected":
            return projected_gain_approx(geometry, tx, focus, quad)
        return exact_array_gain(geometry, tx, focus, quad)

    dgrid = [float(d) for d in distances]
    results = [None] * len(dgrid)
    failures = []
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for i, res in enumerate(pool.map(_safe_call, [(eval_point, d) for d in dgrid])):
                if isinstance(res, Exception):
                    failures.append((i, res))
                else:
                    results[i] = res
    else:
        for i, d in enumerate(dgrid):
            try:
                results[i] = eval_point(d)
            except (ValueError, RuntimeError) as exc:
                failures.append((i, exc))
    if failures:
        raise SweepEvalError(failures)
    return GainProfile(focus=focus, distances=np.array(dgrid),
                       gains=np.array(results), kind=kind)


def _safe_call(bundle):
    fn, arg = bundle
    try:
        return fn(arg)
    except (ValueError, RuntimeError) as exc:
        return exc
