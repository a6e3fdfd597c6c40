"""Electric-field models over a planar aperture at z = 0.

The exact spherical-wave field, its Fresnel (quadratic-phase)
approximations for broadside and slanted transmitters, the matched-filter
phase used to focus the aperture, per-element channel responses by 2D
Gauss-Legendre quadrature, and the Taylor distance-approximation error
diagnostics used to compare the direct and indirect expansions.

Fields are only ever used in ratios, so the source amplitude is fixed at 1;
the 1/sqrt(4*pi) prefactor is kept so values match the underlying spherical
wave literally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from .array_geometry import RectArray, TxGeometry, element_center, element_grid

SQRT_4PI = math.sqrt(4.0 * math.pi)

_REFINE_RTOL = 1e-8


@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor Gauss-Legendre rule: points per axis, plus how many times a
    rectangle may be subdivided when the doubled-order estimate disagrees."""

    order: int = 8
    refinement: int = 1

    def __post_init__(self):
        if self.order < 2:
            raise ValueError(f"quadrature order must be >= 2, got {self.order}")
        if self.refinement < 0:
            raise ValueError(f"refinement must be >= 0, got {self.refinement}")


def exact_field(tx: TxGeometry, x, y, wavelength: float):
    """Spherical-wave field of a unit transmitter at aperture point (x, y, 0).

    Amplitude sqrt(z*((x-x_t)^2 + z^2)) / (sqrt(4 pi) * rho^(5/2)) with rho
    the Euclidean distance; the phase is exactly -(2 pi / lambda) * rho.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dx = x - tx.x
    dy = y - tx.y
    z = tx.z
    r2 = dx * dx + dy * dy + z * z
    if np.any(r2 == 0.0):
        raise ValueError("transmitter lies in the aperture plane at this point")
    amp = np.sqrt(z * (dx * dx + z * z)) / (SQRT_4PI * r2 ** 1.25)
    return amp * np.exp(-2j * np.pi / wavelength * np.sqrt(r2))


def fresnel_field_broadside(z: float, x, y, wavelength: float):
    """Quadratic-phase approximation for a transmitter at (0, 0, z):
    constant amplitude 1/(sqrt(4 pi) z), phase -(2 pi/lambda)(z + (x^2+y^2)/2z)."""
    if not z > 0:
        raise ValueError(f"z must be positive, got {z}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    phase = z + (x * x + y * y) / (2.0 * z)
    return np.exp(-2j * np.pi / wavelength * phase) / (SQRT_4PI * z)


def fresnel_field_nonbroadside(tx: TxGeometry, x, y, wavelength: float):
    """Quadratic-phase approximation for a slanted transmitter: phase from
    d + (x^2 + y^2 - 2(x x_t + y y_t))/(2d), amplitude 1/(sqrt(4 pi) z)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = tx.dist
    phase = d + (x * x + y * y - 2.0 * (x * tx.x + y * tx.y)) / (2.0 * d)
    return np.exp(-2j * np.pi / wavelength * phase) / (SQRT_4PI * tx.z)


def matched_filter_phase(focus: float, x, y, wavelength: float):
    """Unit-modulus focusing phase e^{+j(2 pi/lambda)(x^2+y^2)/(2F)}.

    focus = inf selects the far-field (plane-wave) filter, identically 1.
    """
    if math.isinf(focus):
        shape = np.broadcast(np.asarray(x), np.asarray(y)).shape
        return np.ones(shape) if shape else 1.0 + 0.0j
    if not focus > 0:
        raise ValueError(f"focal distance must be positive, got {focus}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.exp(2j * np.pi / wavelength * (x * x + y * y) / (2.0 * focus))


def _gl_rect(f, xc, yc, wx, wy, order):
    """Integral of f over the wx-by-wy rectangle centered at (xc, yc)."""
    nodes, wts = roots_legendre(order)
    gx = xc + 0.5 * wx * nodes
    gy = yc + 0.5 * wy * nodes
    vals = f(gx[:, None], gy[None, :])
    return 0.25 * wx * wy * (wts @ vals @ wts)


def _refining_rect(f, xc, yc, wx, wy, order, depth):
    coarse = _gl_rect(f, xc, yc, wx, wy, order)
    fine = _gl_rect(f, xc, yc, wx, wy, 2 * order)
    if depth <= 0 or abs(fine - coarse) <= _REFINE_RTOL * max(abs(fine), 1e-300):
        return fine
    total = 0.0 + 0.0j
    for sx in (-0.25, 0.25):
        for sy in (-0.25, 0.25):
            total += _refining_rect(f, xc + sx * wx, yc + sy * wy,
                                    0.5 * wx, 0.5 * wy, order, depth - 1)
    return total


def element_channel(arr: RectArray, n: int, m: int, tx: TxGeometry,
                    quad: QuadratureSpec = QuadratureSpec()) -> complex:
    """Channel of element (n, m): (1/sqrt(A)) * integral of the exact field
    over the element area."""
    xc, yc, _ = element_center(arr, n, m)

    def f(gx, gy):
        return exact_field(tx, gx, gy, arr.wavelength)

    val = _refining_rect(f, xc, yc, arr.elem_w, arr.elem_h,
                         quad.order, quad.refinement)
    return complex(val / math.sqrt(arr.elem_area))


def distance_exact(arr: RectArray, n: int, m: int, tx: TxGeometry) -> float:
    """Euclidean distance from the transmitter to the element center."""
    x, y, _ = element_center(arr, n, m)
    return math.sqrt((x - tx.x) ** 2 + (y - tx.y) ** 2 + tx.z ** 2)


def distance_taylor_direct(arr: RectArray, n: int, m: int, tx: TxGeometry) -> float:
    """First-order expansion around the broadside axis:
    z * (1 + ((x - x_t)^2 + (y - y_t)^2) / (2 z^2))."""
    x, y, _ = element_center(arr, n, m)
    z = tx.z
    return z * (1.0 + ((x - tx.x) ** 2 + (y - tx.y) ** 2) / (2.0 * z * z))


def distance_taylor_indirect(arr: RectArray, n: int, m: int, tx: TxGeometry) -> float:
    """First-order expansion after recentering on the transmitter range:
    d + (x^2 + y^2 - 2(x x_t + y y_t)) / (2 d)."""
    x, y, _ = element_center(arr, n, m)
    d = tx.dist
    return d + (x * x + y * y - 2.0 * (x * tx.x + y * tx.y)) / (2.0 * d)


def mean_abs_distance_error(arr: RectArray, tx: TxGeometry, variant: str) -> float:
    """Mean over all N elements of |exact - Taylor| distance, in meters."""
    xs, ys = element_grid(arr)
    X = xs[:, None]
    Y = ys[None, :]
    f = np.sqrt((X - tx.x) ** 2 + (Y - tx.y) ** 2 + tx.z ** 2)
    if variant == "direct":
        z = tx.z
        approx = z * (1.0 + ((X - tx.x) ** 2 + (Y - tx.y) ** 2) / (2.0 * z * z))
    elif variant == "indirect":
        d = tx.dist
        approx = d + (X * X + Y * Y - 2.0 * (X * tx.x + Y * tx.y)) / (2.0 * d)
    else:
        raise ValueError(f"variant must be 'direct' or 'indirect', got {variant!r}")
    return float(np.mean(np.abs(f - approx)))
