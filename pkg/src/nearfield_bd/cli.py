"""Experiment runner: JSON config in, reproducible CSV sweeps out.

Each experiment reproduces one study as a CSV artifact.  Distances in
configs carry an explicit unit suffix ("m" or "dF"); presets bundle ready
configurations for the reference figures.  Exit codes: 0 success, 2 config
error, 3 numerical failure (offending sweep indices on stderr).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import re
import sys
from types import SimpleNamespace

import numpy as np

from . import __version__
from .array_geometry import (
    CircArray,
    FixedApertureArea,
    FixedApertureLength,
    FixedElementDiagonal,
    TxGeometry,
    characteristic_distances,
    make_rect_array,
    project_array,
    wavelength_from_carrier,
)
from .beam_depth import (
    STATUS_FINITE,
    bd_circ,
    bd_rect,
    circ_lobe_catalog,
    finite_bd_limit_rect,
    solve_a3db,
)
from .field_model import QuadratureSpec, mean_abs_distance_error
from .gain_engine import (
    REACTIVE_LIMIT_FACTOR,
    SweepEvalError,
    exact_array_gain_steered,
    gain_profile,
    projected_gain_approx,
)
from .multiplexing import (
    build_channel_matrix,
    mmse_precoder,
    monte_carlo_sum_rate,
    plan_focal_points,
    sum_rate,
)

EXPERIMENTS = (
    "gain-profile", "bd-vs-eta", "bd-vs-phi", "a3db-curve",
    "finite-limit-curve", "circular-gain", "lobe-catalog", "distance-error",
    "projection-error", "multiplex-plan", "sum-rate-vs-snr",
    "sum-rate-vs-users", "sum-rate-vs-eta", "sum-rate-vs-phi",
)

DEFAULT_SEED = 12345

_LEN_RE = re.compile(r"^\s*([-+0-9.eE]+)\s*(m|dF)\s*$")
_AREA_RE = re.compile(r"^\s*([-+0-9.eE]+)\s*(m2)\s*$")


class ConfigError(Exception):
    pass


def parse_length(value, d_f, field):
    """Length with a mandatory unit suffix: '12.5 m' or '400 dF'."""
    if isinstance(value, (int, float)):
        raise ConfigError(f"{field}: bare number; append a unit ('m' or 'dF')")
    m = _LEN_RE.match(str(value))
    if not m:
        raise ConfigError(f"{field}: cannot parse length {value!r}")
    num = float(m.group(1))
    if m.group(2) == "m":
        return num
    if math.isnan(d_f):
        raise ConfigError(f"{field}: 'dF' units are not available here; use 'm'")
    return num * d_f


def parse_area(value, field):
    if isinstance(value, (int, float)):
        raise ConfigError(f"{field}: bare number; append the unit 'm2'")
    m = _AREA_RE.match(str(value))
    if not m:
        raise ConfigError(f"{field}: cannot parse area {value!r}")
    return float(m.group(1))


def _require(cfg, key, section):
    if key not in cfg:
        raise ConfigError(f"missing required field {section}.{key}")
    return cfg[key]


def _sizing_from_config(scfg):
    mode = _require(scfg, "mode", "geometry.sizing")
    value = _require(scfg, "value", "geometry.sizing")
    if mode == "element-diag":
        return FixedElementDiagonal(parse_length(value, math.nan, "sizing.value"))
    if mode == "aperture-length":
        return FixedApertureLength(parse_length(value, math.nan, "sizing.value"))
    if mode == "aperture-area":
        return FixedApertureArea(parse_area(value, "sizing.value"))
    raise ConfigError(f"unknown sizing mode {mode!r}")


def build_geometry(gcfg):
    """Returns (geometry object, reference d_F for unit conversion)."""
    kind = gcfg.get("kind", "rect")
    carrier = _require(gcfg, "carrier_hz", "geometry")
    lam = wavelength_from_carrier(float(carrier))
    if kind == "rect":
        n = int(_require(gcfg, "n_per_side", "geometry"))
        eta = float(_require(gcfg, "eta", "geometry"))
        sizing = _sizing_from_config(_require(gcfg, "sizing", "geometry"))
        try:
            arr = make_rect_array(n, eta, sizing, lam)
        except (ValueError, TypeError) as err:
            raise ConfigError(f"geometry: {err}") from err
        return arr, characteristic_distances(arr, 1.25).d_f
    if kind == "circ":
        radius = parse_length(_require(gcfg, "radius", "geometry"), math.nan,
                              "geometry.radius")
        ref_diag = gcfg.get("ref_elem_diag")
        diag = (parse_length(ref_diag, math.nan, "geometry.ref_elem_diag")
                if ref_diag is not None else lam / 4)
        try:
            circ = CircArray(radius, lam)
        except ValueError as err:
            raise ConfigError(f"geometry: {err}") from err
        return circ, 2.0 * diag ** 2 / lam
    raise ConfigError(f"unknown geometry kind {kind!r}")


def _distance_grid(sweep, d_f):
    z_min = parse_length(_require(sweep, "z_min", "sweep"), d_f, "sweep.z_min")
    z_max = parse_length(_require(sweep, "z_max", "sweep"), d_f, "sweep.z_max")
    n = int(_require(sweep, "n_points", "sweep"))
    if n < 1:
        raise ConfigError("sweep.n_points must be at least 1")
    if not 0 < z_min < z_max:
        raise ConfigError("sweep requires 0 < z_min < z_max")
    spacing = sweep.get("spacing", "log")
    if spacing == "log":
        return np.geomspace(z_min, z_max, n)
    if spacing == "linear":
        return np.linspace(z_min, z_max, n)
    raise ConfigError(f"unknown spacing {spacing!r}")


def _scalar_grid(sweep, lo_key, hi_key, n_key, values_key, section="sweep"):
    if values_key in sweep:
        vals = [float(v) for v in sweep[values_key]]
        if not vals:
            raise ConfigError(f"{section}.{values_key} is empty")
        return np.asarray(vals)
    lo = float(_require(sweep, lo_key, section))
    hi = float(_require(sweep, hi_key, section))
    n = int(_require(sweep, n_key, section))
    if n < 1:
        raise ConfigError(f"{section}.{n_key} must be at least 1")
    return np.linspace(lo, hi, n)


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return x


def write_csv(path, experiment, preset, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(f"# nearfield-bd v{__version__} experiment={experiment} "
                 f"preset={preset}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(c) for c in row])
    return path


def _variant_path(base, suffix):
    root, ext = os.path.splitext(base)
    return f"{root}_{suffix}{ext or '.csv'}"


def _sweep_rows(fn, values):
    rows, failures = [], []
    for i, v in enumerate(values):
        try:
            rows.append(fn(v))
        except (ValueError, RuntimeError) as exc:
            failures.append((i, exc))
    if failures:
        raise SweepEvalError(failures)
    return rows


def _quad(ctx):
    return QuadratureSpec(order=int(ctx.sweep.get("quad_order", 8)),
                          refinement=int(ctx.sweep.get("refinement", 1)))


def run_gain_profile(ctx):
    kinds = ctx.sweep.get("kinds", ["exact"])
    if not kinds:
        raise ConfigError("sweep.kinds is empty")
    grid = _distance_grid(ctx.sweep, ctx.d_f)
    focus = parse_length(_require(ctx.sweep, "focus", "sweep"), ctx.d_f,
                         "sweep.focus")
    azimuth = float(ctx.sweep.get("azimuth", 0.0))
    elevation = float(ctx.sweep.get("elevation", 0.0))
    paths = []
    for kind in kinds:
        pts = grid
        if kind in ("exact", "steered", "projected") and not isinstance(ctx.geometry, CircArray):
            floor = REACTIVE_LIMIT_FACTOR * ctx.geometry.aperture_len
            pts = grid[grid >= floor]
        elif kind == "exact" and isinstance(ctx.geometry, CircArray):
            floor = REACTIVE_LIMIT_FACTOR * 2 * ctx.geometry.radius
            pts = grid[grid >= floor]
        if pts.size == 0:
            raise ConfigError(f"sweep range is entirely below the radiative "
                              f"floor for kind {kind!r}")
        prof = gain_profile(kind, ctx.geometry, pts, focus,
                            azimuth=azimuth, elevation=elevation,
                            quad=_quad(ctx), threads=ctx.threads)
        out = ctx.out if len(kinds) == 1 else _variant_path(ctx.out, kind)
        rows = [(z / ctx.d_f, g) for z, g in zip(prof.distances, prof.gains)]
        paths.append(write_csv(out, ctx.experiment, ctx.preset,
                               ["distance_over_dF", "gain"], rows))
    return paths


def run_circular_gain(ctx):
    if not isinstance(ctx.geometry, CircArray):
        raise ConfigError("circular-gain requires a circ geometry")
    return run_gain_profile(ctx)


def _rect_for_eta(ctx, eta, sizing_mode):
    base = ctx.geometry
    if isinstance(base, CircArray):
        raise ConfigError(f"{ctx.experiment} requires a rect geometry")
    if sizing_mode == "aperture-area":
        sizing = FixedApertureArea(base.aperture_area)
    elif sizing_mode == "aperture-length":
        sizing = FixedApertureLength(base.aperture_len)
    else:
        raise ConfigError(f"unknown sizing mode {sizing_mode!r}")
    return make_rect_array(base.n_per_side, float(eta), sizing, base.wavelength)


def run_bd_vs_eta(ctx):
    etas = _scalar_grid(ctx.sweep, "eta_min", "eta_max", "n_points", "eta_values")
    if np.any(etas <= 0):
        raise ConfigError("eta values must be positive")
    if "eta_values" not in ctx.sweep and ctx.sweep.get("spacing", "log") == "log":
        etas = np.geomspace(etas.min(), etas.max(), len(etas))
    modes = ctx.sweep.get("sizing_modes", ["aperture-area"])
    if not modes:
        raise ConfigError("sweep.sizing_modes is empty")
    paths = []
    for mode in modes:
        def one(eta, mode=mode):
            arr = _rect_for_eta(ctx, eta, mode)
            d = characteristic_distances(arr, solve_a3db(arr.eta))
            res = bd_rect(arr, d.d_b)
            finite = 1 if res.status == STATUS_FINITE else 0
            depth = res.depth / d.d_f if finite else math.inf
            return (float(eta), d.d_b / d.d_f, depth, finite)
        rows = _sweep_rows(one, etas)
        out = ctx.out if len(modes) == 1 else _variant_path(ctx.out, mode)
        paths.append(write_csv(out, ctx.experiment, ctx.preset,
                               ["eta", "F_over_dF", "bd_over_dF", "finite"],
                               rows))
    return paths


def run_bd_vs_phi(ctx):
    phis = _scalar_grid(ctx.sweep, "phi_min", "phi_max", "n_points", "phi_values")
    focus = parse_length(_require(ctx.sweep, "focus", "sweep"), ctx.d_f,
                         "sweep.focus")

    def one(phi):
        proj = project_array(ctx.geometry, float(phi))
        res = bd_rect(proj, focus)
        finite = 1 if res.status == STATUS_FINITE else 0
        depth = res.depth / ctx.d_f if finite else math.inf
        return (proj.eta, focus / ctx.d_f, depth, finite)

    rows = _sweep_rows(one, phis)
    return [write_csv(ctx.out, ctx.experiment, ctx.preset,
                      ["eta", "F_over_dF", "bd_over_dF", "finite"], rows)]


def run_a3db_curve(ctx):
    etas = _scalar_grid(ctx.sweep, "eta_min", "eta_max", "n_points", "eta_values")
    if "eta_values" not in ctx.sweep and ctx.sweep.get("spacing", "log") == "log":
        etas = np.geomspace(etas.min(), etas.max(), len(etas))

    def one(eta):
        a = solve_a3db(float(eta))
        return (float(eta), a, a * (1 + float(eta) ** 2))

    rows = _sweep_rows(one, etas)
    return [write_csv(ctx.out, ctx.experiment, ctx.preset,
                      ["eta", "a3db", "product"], rows)]


def run_finite_limit_curve(ctx):
    etas = _scalar_grid(ctx.sweep, "eta_min", "eta_max", "n_points", "eta_values")
    if "eta_values" not in ctx.sweep and ctx.sweep.get("spacing", "log") == "log":
        etas = np.geomspace(etas.min(), etas.max(), len(etas))
    mode = ctx.sweep.get("sizing_mode", "aperture-area")

    def one(eta):
        arr = _rect_for_eta(ctx, eta, mode)
        d_f = characteristic_distances(arr, 1.25).d_f
        return (float(eta), finite_bd_limit_rect(arr) / d_f)

    rows = _sweep_rows(one, etas)
    return [write_csv(ctx.out, ctx.experiment, ctx.preset,
                      ["eta", "limit_over_dF"], rows)]


def run_lobe_catalog(ctx):
    if not isinstance(ctx.geometry, CircArray):
        raise ConfigError("lobe-catalog requires a circ geometry")
    k_max = int(_require(ctx.sweep, "k_max", "sweep"))
    if k_max < 1:
        raise ConfigError("sweep.k_max must be at least 1")
    focus = parse_length(_require(ctx.sweep, "focus", "sweep"), ctx.d_f,
                         "sweep.focus")
    entries = circ_lobe_catalog(ctx.geometry, focus, k_max)
    rows = [(e.index, e.kind, e.l_value, e.z_value / ctx.d_f, e.gain_db)
            for e in entries]
    return [write_csv(ctx.out, ctx.experiment, ctx.preset,
                      ["k", "kind", "l", "z_over_dF", "gain_db"], rows)]


def run_distance_error(ctx):
    phis = _scalar_grid(ctx.sweep, "phi_min", "phi_max", "n_points", "phi_values")
    fixed = ctx.sweep.get("dist")
    d_b = characteristic_distances(ctx.geometry, 1.25).d_b

    def one(phi):
        phi = float(phi)
        dist = (parse_length(fixed, ctx.d_f, "sweep.dist") if fixed is not None
                else d_b / math.cos(phi))
        tx = TxGeometry(dist, azimuth=phi)
        return (phi,
                mean_abs_distance_error(ctx.geometry, tx, "direct"),
                mean_abs_distance_error(ctx.geometry, tx, "indirect"))

    rows = _sweep_rows(one, phis)
    return [write_csv(ctx.out, ctx.experiment, ctx.preset,
                      ["phi", "direct_err_m", "indirect_err_m"], rows)]


def run_projection_error(ctx):
    phis = _scalar_grid(ctx.sweep, "phi_min", "phi_max", "n_points", "phi_values")
    dist = parse_length(_require(ctx.sweep, "dist", "sweep"), ctx.d_f,
                        "sweep.dist")
    focus = parse_length(_require(ctx.sweep, "focus", "sweep"), ctx.d_f,
                         "sweep.focus")
    quad = _quad(ctx)

    def one(phi):
        tx = TxGeometry(dist, azimuth=float(phi))
        exact = exact_array_gain_steered(ctx.geometry, tx, focus, quad)
        proj = projected_gain_approx(ctx.geometry, tx, focus, quad)
        return (float(phi), exact, proj, abs(exact - proj))

    rows = _sweep_rows(one, phis)
    return [write_csv(ctx.out, ctx.experiment, ctx.preset,
                      ["phi", "exact_gain", "projected_gain", "abs_err"], rows)]


def _region(ctx, arr=None):
    arr = arr or ctx.geometry
    if isinstance(arr, CircArray):
        raise ConfigError(f"{ctx.experiment} requires a rect geometry")
    d = characteristic_distances(arr, solve_a3db(arr.eta))
    z_min = (parse_length(ctx.sweep["z_min"], ctx.d_f, "sweep.z_min")
             if "z_min" in ctx.sweep else d.d_b)
    z_max = (parse_length(ctx.sweep["z_max"], ctx.d_f, "sweep.z_max")
             if "z_max" in ctx.sweep else d.d_fa / 10)
    return z_min, z_max


def run_multiplex_plan(ctx):
    region = _region(ctx)
    max_users = ctx.sweep.get("max_users")
    plan = plan_focal_points(ctx.geometry, region,
                             None if max_users is None else int(max_users))
    rows = [(k + 1, f / ctx.d_f, lo / ctx.d_f, hi / ctx.d_f)
            for k, (f, (lo, hi)) in enumerate(zip(plan.focal_points,
                                                  plan.intervals))]
    return [write_csv(ctx.out, ctx.experiment, ctx.preset,
                      ["k", "F_over_dF", "zlo_over_dF", "zhi_over_dF"], rows)]


def _planned_rate(arr, plan, power, azimuth=0.0):
    users = [TxGeometry(float(f), azimuth=azimuth) for f in plan.focal_points]
    h = build_channel_matrix(arr, users)
    w = mmse_precoder(h)
    return sum_rate(h, w, [power] * len(plan))


_RATE_HEADER = ["snr_db", "k_users", "placement", "mean_rate", "stderr",
                "n_trials", "seed"]


def run_sum_rate_vs_snr(ctx):
    snrs = _scalar_grid(ctx.sweep, "snr_min_db", "snr_max_db", "n_points",
                        "snr_values_db")
    k_users = int(ctx.sweep.get("k_users", 5))
    n_trials = int(ctx.sweep.get("n_trials", 200))
    region = _region(ctx)
    plan = plan_focal_points(ctx.geometry, region, max_users=k_users)
    rows = []
    for snr in snrs:
        planned = _planned_rate(ctx.geometry, plan, 10 ** (float(snr) / 10))
        rows.append((float(snr), len(plan), "planned", planned, 0.0, 1,
                     ctx.seed))
        mc = monte_carlo_sum_rate(ctx.geometry, k_users, region, n_trials,
                                  float(snr), ctx.seed)
        rows.append((float(snr), k_users, "random", mc.mean_rate, mc.stderr,
                     mc.n_trials, ctx.seed))
    return [write_csv(ctx.out, ctx.experiment, ctx.preset, _RATE_HEADER, rows)]


def run_sum_rate_vs_users(ctx):
    k_lo = int(ctx.sweep.get("k_min", 1))
    k_hi = int(ctx.sweep.get("k_max", 8))
    if not 1 <= k_lo <= k_hi:
        raise ConfigError("sweep requires 1 <= k_min <= k_max")
    snr = float(ctx.sweep.get("snr_db", 25.0))
    n_trials = int(ctx.sweep.get("n_trials", 500))
    region = _region(ctx)
    rows = []
    for k in range(k_lo, k_hi + 1):
        mc = monte_carlo_sum_rate(ctx.geometry, k, region, n_trials, snr,
                                  ctx.seed)
        rows.append((snr, k, "random", mc.mean_rate, mc.stderr, mc.n_trials,
                     ctx.seed))
    return [write_csv(ctx.out, ctx.experiment, ctx.preset, _RATE_HEADER, rows)]


def run_sum_rate_vs_eta(ctx):
    etas = _scalar_grid(ctx.sweep, "eta_min", "eta_max", "n_points", "eta_values")
    if "eta_values" not in ctx.sweep and ctx.sweep.get("spacing", "log") == "log":
        etas = np.geomspace(etas.min(), etas.max(), len(etas))
    snr = float(ctx.sweep.get("snr_db", 25.0))
    mode = ctx.sweep.get("sizing_mode", "aperture-length")
    region = _region(ctx)

    def one(eta):
        arr = _rect_for_eta(ctx, eta, mode)
        plan = plan_focal_points(arr, region)
        rate = _planned_rate(arr, plan, 10 ** (snr / 10))
        return (float(eta), snr, len(plan), "planned", rate, 0.0, 1, ctx.seed)

    rows = _sweep_rows(one, etas)
    return [write_csv(ctx.out, ctx.experiment, ctx.preset,
                      ["eta"] + _RATE_HEADER, rows)]


def run_sum_rate_vs_phi(ctx):
    phis = _scalar_grid(ctx.sweep, "phi_min", "phi_max", "n_points", "phi_values")
    snr = float(ctx.sweep.get("snr_db", 25.0))
    region = _region(ctx)
    k_users = ctx.sweep.get("k_users")
    plan = plan_focal_points(ctx.geometry, region,
                             max_users=None if k_users is None else int(k_users))

    def one(phi):
        rate = _planned_rate(ctx.geometry, plan, 10 ** (snr / 10), float(phi))
        return (float(phi), snr, len(plan), "planned", rate, 0.0, 1, ctx.seed)

    rows = _sweep_rows(one, phis)
    return [write_csv(ctx.out, ctx.experiment, ctx.preset,
                      ["phi"] + _RATE_HEADER, rows)]


_RUNNERS = {
    "gain-profile": run_gain_profile,
    "bd-vs-eta": run_bd_vs_eta,
    "bd-vs-phi": run_bd_vs_phi,
    "a3db-curve": run_a3db_curve,
    "finite-limit-curve": run_finite_limit_curve,
    "circular-gain": run_circular_gain,
    "lobe-catalog": run_lobe_catalog,
    "distance-error": run_distance_error,
    "projection-error": run_projection_error,
    "multiplex-plan": run_multiplex_plan,
    "sum-rate-vs-snr": run_sum_rate_vs_snr,
    "sum-rate-vs-users": run_sum_rate_vs_users,
    "sum-rate-vs-eta": run_sum_rate_vs_eta,
    "sum-rate-vs-phi": run_sum_rate_vs_phi,
}


def _square_geometry(n=100, eta=1.0, diag_wl=0.25, carrier=3e9):
    lam = wavelength_from_carrier(carrier)
    return {"kind": "rect", "n_per_side": n, "eta": eta,
            "sizing": {"mode": "element-diag", "value": f"{diag_wl * lam} m"},
            "carrier_hz": carrier}


def _wide_geometry():
    return _square_geometry(n=200, diag_wl=0.5)


def _circ_geometry(radius_wl=12.5, carrier=3e9):
    lam = wavelength_from_carrier(carrier)
    return {"kind": "circ", "radius": f"{radius_wl * lam} m",
            "carrier_hz": carrier}


def build_presets():
    lam = wavelength_from_carrier(3e9)
    presets = {
        "fig2": {
            "description": "broadside gain profile, exact vs closed form "
                           "(eta=4, F=1000 dF)",
            "geometry": _square_geometry(eta=4.0),
            "experiment": "gain-profile",
            "sweep": {"z_min": "40 dF", "z_max": "10000 dF", "n_points": 200,
                      "spacing": "log", "focus": "1000 dF",
                      "kinds": ["exact", "analytic"]},
        },
        "fig3": {
            "description": "greedy focal-point plan with disjoint half-power "
                           "intervals (200x200 array)",
            "geometry": _wide_geometry(),
            "experiment": "multiplex-plan",
            "sweep": {},
        },
        "fig4": {
            "description": "sum rate vs SNR, planned vs random placement "
                           "(5 users)",
            "geometry": _wide_geometry(),
            "experiment": "sum-rate-vs-snr",
            "sweep": {"snr_min_db": 0.0, "snr_max_db": 30.0, "n_points": 7,
                      "k_users": 5, "n_trials": 200},
        },
        "fig5": {
            "description": "mean sum rate vs number of users at 25 dB",
            "geometry": _wide_geometry(),
            "experiment": "sum-rate-vs-users",
            "sweep": {"k_min": 1, "k_max": 8, "snr_db": 25.0,
                      "n_trials": 500},
        },
        "fig6": {
            "description": "half-power depth vs aspect ratio, fixed-area and "
                           "fixed-length sizing",
            "geometry": _square_geometry(),
            "experiment": "bd-vs-eta",
            "sweep": {"eta_min": 0.1, "eta_max": 10.0, "n_points": 41,
                      "sizing_modes": ["aperture-area", "aperture-length"]},
        },
        "fig8": {
            "description": "mean distance-approximation error vs azimuth at "
                           "the boundary distance",
            "geometry": _square_geometry(),
            "experiment": "distance-error",
            "sweep": {"phi_min": 0.0, "phi_max": 3 * math.pi / 8,
                      "n_points": 49},
        },
        "fig9": {
            "description": "slanted gain profile, exact vs closed form "
                           "(phi=pi/16)",
            "geometry": _square_geometry(),
            "experiment": "gain-profile",
            "sweep": {"z_min": "400 dF", "z_max": "10000 dF", "n_points": 120,
                      "spacing": "log", "focus": "1000 dF",
                      "azimuth": math.pi / 16,
                      "kinds": ["exact", "analytic"]},
        },
        "fig10": {
            "description": "half-power gain argument and its aspect product "
                           "vs eta",
            "geometry": _square_geometry(),
            "experiment": "a3db-curve",
            "sweep": {"eta_min": 0.1, "eta_max": 10.0, "n_points": 81},
        },
        "fig12a": {
            "description": "projected-aperture approximation error vs azimuth "
                           "(d=1000 dF, F=400 dF)",
            "geometry": _square_geometry(),
            "experiment": "projection-error",
            "sweep": {"phi_min": 0.0, "phi_max": 3 * math.pi / 8,
                      "n_points": 25, "dist": "1000 dF", "focus": "400 dF"},
        },
        "fig12b": {
            "description": "steered vs projected gain profiles at phi=pi/4 "
                           "(F=400 dF)",
            "geometry": _square_geometry(),
            "experiment": "gain-profile",
            "sweep": {"z_min": "250 dF", "z_max": "4000 dF", "n_points": 120,
                      "spacing": "log", "focus": "400 dF",
                      "azimuth": math.pi / 4,
                      "kinds": ["steered", "projected"]},
        },
        "fig13": {
            "description": "planned sum rate vs aspect ratio at fixed "
                           "aperture length",
            "geometry": {"kind": "rect", "n_per_side": 200, "eta": 1.0,
                         "sizing": {"mode": "aperture-length",
                                    "value": f"{100 * lam} m"},
                         "carrier_hz": 3e9},
            "experiment": "sum-rate-vs-eta",
            "sweep": {"eta_values": [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0],
                      "snr_db": 25.0, "sizing_mode": "aperture-length"},
        },
        "fig14": {
            "description": "circular-aperture gain profile, exact vs closed "
                           "form (R=12.5 wavelengths, F=50 wavelengths)",
            "geometry": _circ_geometry(),
            "experiment": "circular-gain",
            "sweep": {"z_min": "240 dF", "z_max": "40000 dF", "n_points": 200,
                      "spacing": "log", "focus": "400 dF",
                      "kinds": ["exact", "analytic"]},
        },
        "fig15": {
            "description": "null and sidelobe catalog of the circular "
                           "aperture (deep orders)",
            "geometry": _circ_geometry(),
            "experiment": "lobe-catalog",
            "sweep": {"k_max": 6, "focus": "400 dF"},
        },
        "table1": {
            "description": "null and sidelobe catalog, first three orders",
            "geometry": _circ_geometry(),
            "experiment": "lobe-catalog",
            "sweep": {"k_max": 4, "focus": "400 dF"},
        },
    }
    return presets


def load_config(args):
    if not args.preset and not args.config:
        raise ConfigError("provide --config and/or --preset")
    cfg = {}
    if args.preset:
        presets = build_presets()
        if args.preset not in presets:
            raise ConfigError(f"unknown preset {args.preset!r}; "
                              f"run 'nearfield-bd presets'")
        cfg = json.loads(json.dumps(presets[args.preset]))
    if args.config:
        try:
            with open(args.config) as fh:
                user = json.load(fh)
        except OSError as err:
            raise ConfigError(f"cannot read config: {err}") from err
        except json.JSONDecodeError as err:
            raise ConfigError(f"config is not valid JSON: {err}") from err
        if not isinstance(user, dict):
            raise ConfigError("config root must be a JSON object")
        for key, val in user.items():
            if key in ("geometry", "sweep") and isinstance(val, dict):
                cfg.setdefault(key, {}).update(val)
            else:
                cfg[key] = val
    return cfg


def resolve_threads(args, cfg):
    if args.threads is not None:
        return args.threads
    env = os.environ.get("NEARFIELD_BD_THREADS")
    if env:
        try:
            return int(env)
        except ValueError as err:
            raise ConfigError(f"NEARFIELD_BD_THREADS: {err}") from err
    return int(cfg.get("threads", 1))


def cmd_run(args):
    cfg = load_config(args)
    experiment = cfg.get("experiment")
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown or missing experiment {experiment!r}")
    geometry, d_f = build_geometry(_require(cfg, "geometry", "config"))
    sweep = cfg.get("sweep", {})
    if not isinstance(sweep, dict):
        raise ConfigError("sweep must be an object")
    seed = int(args.seed if args.seed is not None
               else cfg.get("seed", DEFAULT_SEED))
    out = args.out or cfg.get("output") or f"{args.preset or experiment}.csv"
    ctx = SimpleNamespace(geometry=geometry, d_f=d_f, sweep=sweep,
                          experiment=experiment,
                          preset=args.preset or "custom", seed=seed,
                          threads=resolve_threads(args, cfg), out=out)
    try:
        paths = _RUNNERS[experiment](ctx)
    except OSError as err:
        raise ConfigError(f"cannot write output: {err}") from err
    except ValueError as err:
        raise ConfigError(str(err)) from err
    for p in paths:
        print(p)
    return 0


def cmd_presets(_args):
    presets = build_presets()
    width = max(len(name) for name in presets)
    for name in sorted(presets):
        info = presets[name]
        print(f"{name:<{width}}  {info['experiment']:<18}  "
              f"{info['description']}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="nearfield-bd",
        description="Near-field beam-depth experiment runner (CSV output)")
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run an experiment from a config/preset")
    runp.add_argument("--config", help="JSON config path")
    runp.add_argument("--preset", help="preset name (see 'presets')")
    runp.add_argument("--out", help="output CSV path")
    runp.add_argument("--threads", type=int, help="sweep parallelism")
    runp.add_argument("--seed", type=int, help="PRNG seed override")
    sub.add_parser("presets", help="list available presets")
    args = parser.parse_args(argv)
    try:
        if args.command == "presets":
            return cmd_presets(args)
        return cmd_run(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except SweepEvalError as err:
        for idx, exc in err.failures:
            print(f"sweep index {idx}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
