"""Aperture geometry for planar arrays.

Rectangular arrays are n-by-n grids of elements whose width-to-height
ratio is ``eta``; three sizing modes fix either the element diagonal, the
total aperture area, or the aperture length (diagonal of the whole array).
Also provides circular apertures, transmitter placement in azimuth and
elevation, the characteristic distances of an array, and the projected
(width-compressed) array seen from a non-broadside direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299792458.0


def wavelength_from_carrier(carrier_hz: float) -> float:
    if not (carrier_hz > 0 and math.isfinite(carrier_hz)):
        raise ValueError(f"carrier frequency must be positive, got {carrier_hz}")
    return SPEED_OF_LIGHT / carrier_hz


@dataclass(frozen=True)
class FixedElementDiagonal:
    """Size by the diagonal of a single element."""

    diag: float


@dataclass(frozen=True)
class FixedApertureArea:
    """Size by the total aperture area N*w*h."""

    area: float


@dataclass(frozen=True)
class FixedApertureLength:
    """Size by the diagonal of the whole aperture."""

    length: float


@dataclass(frozen=True)
class RectArray:
    """n_per_side x n_per_side grid of w-by-h elements."""

    n_per_side: int
    eta: float
    elem_diag: float
    elem_h: float
    elem_w: float
    wavelength: float

    @property
    def n_elements(self) -> int:
        return self.n_per_side * self.n_per_side

    @property
    def elem_area(self) -> float:
        return self.elem_w * self.elem_h

    @property
    def aperture_len(self) -> float:
        return self.n_per_side * self.elem_diag

    @property
    def aperture_area(self) -> float:
        return self.n_elements * self.elem_area

    @property
    def aperture_w(self) -> float:
        return self.n_per_side * self.elem_w

    @property
    def aperture_h(self) -> float:
        return self.n_per_side * self.elem_h


@dataclass(frozen=True)
class CircArray:
    """Circular aperture of the given radius."""

    radius: float
    wavelength: float

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError(f"radius must be positive, got {self.radius}")
        if not (self.wavelength > 0 and math.isfinite(self.wavelength)):
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")


@dataclass(frozen=True)
class ArrayDistances:
    """Characteristic distances of an aperture (all in meters)."""

    d_f: float
    d_fa: float
    d_b: float
    bd_limit: float


@dataclass(frozen=True)
class TxGeometry:
    """Transmitter placement: range plus azimuth/elevation from broadside."""

    dist: float
    azimuth: float = 0.0
    elevation: float = 0.0

    def __post_init__(self):
        if not (self.dist > 0 and math.isfinite(self.dist)):
            raise ValueError(f"dist must be positive, got {self.dist}")
        if not abs(self.azimuth) < math.pi / 2:
            raise ValueError(f"azimuth must lie in (-pi/2, pi/2), got {self.azimuth}")
        if not abs(self.elevation) < math.pi / 2:
            raise ValueError(f"elevation must lie in (-pi/2, pi/2), got {self.elevation}")

    @property
    def x(self) -> float:
        return self.dist * math.sin(self.azimuth) * math.cos(self.elevation)

    @property
    def y(self) -> float:
        return self.dist * math.sin(self.elevation)

    @property
    def z(self) -> float:
        return self.dist * math.cos(self.elevation) * math.cos(self.azimuth)

    @property
    def position(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


def _check_positive(name, value):
    if not (np.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be positive and finite, got {value}")


def make_rect_array(n_per_side: int, eta: float, sizing, wavelength: float) -> RectArray:
    """Build a rectangular array under one of the three sizing modes."""
    if int(n_per_side) != n_per_side or n_per_side < 1:
        raise ValueError(f"n_per_side must be a positive integer, got {n_per_side}")
    n_per_side = int(n_per_side)
    _check_positive("eta", eta)
    _check_positive("wavelength", wavelength)
    n_total = n_per_side * n_per_side
    if isinstance(sizing, FixedElementDiagonal):
        _check_positive("element diagonal", sizing.diag)
        diag = float(sizing.diag)
    elif isinstance(sizing, FixedApertureArea):
        _check_positive("aperture area", sizing.area)
        diag = math.sqrt(sizing.area * (1.0 + eta * eta) / (n_total * eta))
    elif isinstance(sizing, FixedApertureLength):
        _check_positive("aperture length", sizing.length)
        diag = sizing.length / n_per_side
    else:
        raise TypeError(f"unknown sizing mode: {sizing!r}")
    elem_h = diag / math.sqrt(1.0 + eta * eta)
    elem_w = eta * elem_h
    return RectArray(n_per_side=n_per_side, eta=float(eta), elem_diag=diag,
                     elem_h=elem_h, elem_w=elem_w, wavelength=float(wavelength))


def element_center(arr: RectArray, n: int, m: int) -> tuple[float, float, float]:
    """Center of element (n, m), 1-based indices along width and height."""
    side = arr.n_per_side
    if not (1 <= n <= side and 1 <= m <= side):
        raise IndexError(f"element index ({n}, {m}) outside 1..{side}")
    offset = (side + 1) / 2.0
    return ((n - offset) * arr.elem_w, (m - offset) * arr.elem_h, 0.0)


def element_grid(arr: RectArray) -> tuple[np.ndarray, np.ndarray]:
    """1-D arrays of element-center x and y coordinates along each side."""
    idx = np.arange(1, arr.n_per_side + 1, dtype=float)
    offset = (arr.n_per_side + 1) / 2.0
    return (idx - offset) * arr.elem_w, (idx - offset) * arr.elem_h


def characteristic_distances(arr: RectArray, a3db: float) -> ArrayDistances:
    """Fraunhofer distances (element and array), the 2*aperture bound, and
    the onset range beyond which focusing no longer bounds the beam depth."""
    if not a3db > 0:
        raise ValueError(f"a3db must be positive, got {a3db}")
    d_f = 2.0 * arr.elem_diag ** 2 / arr.wavelength
    d_fa = arr.n_elements * d_f
    d_b = 2.0 * arr.elem_diag * arr.n_per_side
    bd_limit = d_fa / (4.0 * a3db * (1.0 + arr.eta ** 2))
    return ArrayDistances(d_f=d_f, d_fa=d_fa, d_b=d_b, bd_limit=bd_limit)


def project_array(arr: RectArray, azimuth: float) -> RectArray:
    """Array seen from azimuth phi: element width compressed by cos(phi)."""
    if not abs(azimuth) < math.pi / 2:
        raise ValueError(
            f"projection degenerates for |azimuth| >= pi/2, got {azimuth}")
    scale = math.cos(azimuth)
    elem_w = arr.elem_w * scale
    diag = math.hypot(arr.elem_h, elem_w)
    return RectArray(n_per_side=arr.n_per_side, eta=arr.eta * scale,
                     elem_diag=diag, elem_h=arr.elem_h, elem_w=elem_w,
                     wavelength=arr.wavelength)
