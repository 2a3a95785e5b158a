"""Maximal averages over thickened curve families, and the scaling experiments.

The operators share one recipe: slide a delta-thickened curve through its
allowed positions (a delta/2 translate lattice), average |f| or f over the
tube by midpoint quadrature, and take the sup.  Position lattices are
clipped to the integrand's support box, which is what makes small-support
experiments (Knapp boxes) affordable at fine delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .family import CinematicSpec, MOMENT, moment_spec
from .raster import GridFunction


@dataclass(frozen=True)
class MaximalProfile:
    """Operator values sampled over the projection parameter."""

    kind: str
    delta: float
    params: np.ndarray
    values: np.ndarray
    quadrature: dict

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise ArithmeticError("maximal profile values must be finite and >= 0")

    def sup(self) -> float:
        return float(self.values.max()) if self.values.size else 0.0

    def lp_norm(self, p: float) -> float:
        if self.params.size < 2:
            return self.sup()
        dv = float(np.mean(np.diff(self.params)))
        return float((np.sum(self.values ** p) * dv) ** (1.0 / p))


def _segment_window(f: GridFunction, delta: float):
    box = f.support_bbox(pad=0.5 + 2 * delta)
    if box is None:
        (x0, x1), (y0, y1) = f.extent
        return ((x0, x1), (y0, y1))
    return box


def kakeya_maximal(f: GridFunction, delta: float, directions, h: float = None) -> MaximalProfile:
    """sup over unit segments parallel to each direction of (1/delta) int |f|.

    Directions are angles; translates run over a delta/2 lattice restricted
    to where the segment tube can meet the support of f.
    """
    h = h or min(f.h, delta / 4.0)
    directions = np.asarray(directions, dtype=float)
    s_pts = (np.arange(-0.5, 0.5, h) + h / 2.0)
    tau_pts = (np.arange(-delta, delta, h) + h / 2.0)
    (wx0, wx1), (wy0, wy1) = _segment_window(f, delta)
    cx = np.arange(wx0, wx1 + delta / 2.0, delta / 2.0)
    cy = np.arange(wy0, wy1 + delta / 2.0, delta / 2.0)
    vals = np.empty(len(directions))
    S, T = np.meshgrid(s_pts, tau_pts, indexing="ij")
    for di, theta in enumerate(directions):
        e = np.array([math.cos(theta), math.sin(theta)])
        n = np.array([-e[1], e[0]])
        px = S * e[0] + T * n[0]
        py = S * e[1] + T * n[1]
        best = 0.0
        for x in cx:
            samp_x = x + px
            for y in cy:
                total = float(np.sum(np.abs(f.sample(samp_x, y + py)))) * h * h
                if total > best:
                    best = total
        vals[di] = best / delta
    return MaximalProfile(kind="kakeya", delta=delta, params=directions, values=vals,
                          quadrature={"h": h, "lattice": delta / 2.0,
                                      "tube_samples": int(S.size)})


def wolff_maximal(f: GridFunction, delta: float, radii, h: float = None) -> MaximalProfile:
    """sup over centers of (1/delta) int over the delta-annulus of radius r of |f|."""
    h = h or min(f.h, delta / 4.0)
    radii = np.asarray(radii, dtype=float)
    (fx0, fx1), (fy0, fy1) = f.extent
    rmax = float(radii.max())
    cx = np.arange(fx0 - rmax - delta, fx1 + rmax + delta, delta / 2.0)
    cy = np.arange(fy0 - rmax - delta, fy1 + rmax + delta, delta / 2.0)
    vals = np.empty(len(radii))
    for ri, r in enumerate(radii):
        n_theta = max(int(math.ceil(2.0 * math.pi * r / h)), 16)
        theta = 2.0 * math.pi * (np.arange(n_theta) + 0.5) / n_theta
        dtheta = 2.0 * math.pi / n_theta
        rho = np.arange(r - delta, r + delta, h) + h / 2.0
        RR, TT = np.meshgrid(rho, theta, indexing="ij")
        px = RR * np.cos(TT)
        py = RR * np.sin(TT)
        w = RR * h * dtheta  # polar area element
        best = 0.0
        for x in cx:
            sx = x + px
            for y in cy:
                total = float(np.sum(np.abs(f.sample(sx, y + py)) * w))
                if total > best:
                    best = total
        vals[ri] = best / delta
    return MaximalProfile(kind="wolff", delta=delta, params=radii, values=vals,
                          quadrature={"h": h, "lattice": delta / 2.0})


class FiberChartError(ValueError):
    """The parameterization's projection exposes no coordinate fiber chart."""


def _fiber_chart(spec: CinematicSpec, s: int):
    """Projected vs free coordinate indices for coordinate-selection projections."""
    m = spec.m
    if spec.projection is None:
        proj = tuple(range(s, m))
    elif isinstance(spec.projection, (tuple, list)) and np.ndim(spec.projection) == 1:
        proj = tuple(int(i) for i in spec.projection)
    else:
        raise FiberChartError("matrix projections have no built-in fiber chart")
    free = tuple(i for i in range(m) if i not in proj)
    if len(proj) != m - s:
        raise FiberChartError(f"projection must fix {m - s} coordinates for s={s}")
    return proj, free


def _tube_integral_graphs(f: GridFunction, curves_y: np.ndarray, xs: np.ndarray,
                          delta: float) -> np.ndarray:
    """int over the vertical delta-tube around each row of ``curves_y``.

    curves_y has shape (n_curves, len(xs)); uses column slab prefix sums, so
    the quadrature in t is midpoint at the grid's own step.
    """
    dx = float(xs[1] - xs[0]) if len(xs) > 1 else 1.0
    slab = f.column_slab_integral(xs, curves_y - delta, curves_y + delta)
    return np.sum(np.atleast_2d(slab), axis=-1) * dx


def cinematic_maximal(spec: CinematicSpec, f: GridFunction, delta: float,
                      v_grid, s: int = None, h: float = None,
                      signed: bool = True) -> MaximalProfile:
    """M_delta f(v) = (1/delta) sup over the fiber of |int over the curve tube of f|.

    By default the absolute value sits outside the integral (the integrand
    is signed); ``signed=False`` averages |f| instead.  Fibers are sampled
    on a lattice of spacing <= delta in the free parameters, clipped to
    positions whose tube can meet supp f.
    """
    m = spec.m
    s = s if s is not None else m - 1
    proj, free = _fiber_chart(spec, s)
    if spec.kind != MOMENT:
        raise FiberChartError("built-in fiber tubes are implemented for moment specs; "
                              "rewrite other kinds through their approximating family")
    if not signed:
        f = GridFunction(values=np.abs(f.values), extent=f.extent)
    h = h or min(f.h, delta / 4.0)
    t0, t1 = spec.time_interval
    xs = np.arange(t0, t1, h) + h / 2.0
    v_grid = np.atleast_2d(np.asarray(v_grid, dtype=float))
    if v_grid.shape[1] != len(proj):
        v_grid = v_grid.reshape(-1, len(proj))

    support = f.support_bbox(pad=2 * delta)
    powers = xs[None, :] ** np.arange(m)[:, None]   # (m, nt)
    values = np.empty(len(v_grid))
    free_axes = []
    for i in free:
        lo, hi = spec.box[i]
        free_axes.append(np.arange(lo, hi + delta, delta))
    for vi, v in enumerate(v_grid):
        grids = np.meshgrid(*free_axes, indexing="ij") if free_axes else []
        u = np.zeros((m,) + (grids[0].shape if grids else (1,)))
        for idx, coord in zip(proj, v):
            u[idx] = coord
        for axis_i, idx in enumerate(free):
            u[idx] = grids[axis_i] if grids else 0.0
        u_flat = u.reshape(m, -1).T                 # (n_fiber, m)
        if support is not None and free == (0,):
            # intercept window: its shift is the only fiber freedom, so one
            # reach profile bounds which intercepts can touch the support box
            (sx0, sx1), (sy0, sy1) = support
            rest = u_flat[0].copy()
            rest[0] = 0.0
            reach = rest @ powers                   # (nt,)
            in_x = (xs >= sx0) & (xs <= sx1)
            if np.any(in_x):
                lo_need = sy0 - reach[in_x].max()
                hi_need = sy1 - reach[in_x].min()
                keep = (u_flat[:, 0] >= lo_need - delta) & (u_flat[:, 0] <= hi_need + delta)
                u_flat = u_flat[keep]
        if len(u_flat) == 0:
            values[vi] = 0.0
            continue
        ys = u_flat @ powers                        # (n_fiber, nt)
        tube = _tube_integral_graphs(f, ys, xs, delta)
        values[vi] = float(np.max(np.abs(tube))) / delta
    params = v_grid[:, 0] if v_grid.shape[1] == 1 else np.arange(len(v_grid), dtype=float)
    return MaximalProfile(kind="cinematic", delta=delta, params=params, values=values,
                          quadrature={"h": h, "fiber_spacing": delta, "signed": signed})


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log(ys) against log(xs)."""
    lx, ly = np.log(np.asarray(xs, dtype=float)), np.log(np.asarray(ys, dtype=float))
    A = np.stack([lx, np.ones_like(lx)], axis=1)
    sol, *_ = np.linalg.lstsq(A, ly, rcond=None)
    return float(sol[0])


def knapp_experiment(s: int, p, deltas, v_count: int = None):
    """Operator-norm ratios ||M_delta chi_Knapp||_p / ||chi_Knapp||_p per delta.

    The Knapp box is [0, delta^(1/s)] x [0, delta]; the operator is the
    s-parameter maximal function of the (s+1)-moment family projected onto
    its last coordinate.  ``p`` may be a single exponent or a list; profiles
    are computed once per delta and shared.  Returns per-p tables with fitted
    log-log slopes.
    """
    m = s + 1
    p_list = [float(p)] if np.ndim(p) == 0 else [float(q) for q in p]
    profiles = []
    for delta in deltas:
        w = delta ** (1.0 / s)
        h = min(w, delta) / 4.0
        f = GridFunction.indicator_box(
            box=((0.0, w), (0.0, delta)),
            extent=((0.0, min(4 * w, 1.0)), (-2 * delta, 4 * delta)), h=h)
        spec = moment_spec(m, box=tuple((0.0, 1.0) for _ in range(m)))
        nv = v_count or max(int(round(1.0 / delta)), 8)
        v_grid = np.linspace(0.0, 1.0, nv)
        profiles.append((delta, w, cinematic_maximal(spec, f, delta, v_grid[:, None], s=s)))
    tables = []
    for q in p_list:
        rows = []
        for delta, w, prof in profiles:
            f_norm = (w * delta) ** (1.0 / q)  # exact for an indicator box
            rows.append({"delta": delta, "ratio": prof.lp_norm(q) / f_norm,
                         "m_norm": prof.lp_norm(q), "f_norm": f_norm})
        slope = loglog_slope([r["delta"] for r in rows], [r["ratio"] for r in rows])
        tables.append({"s": s, "p": q, "rows": rows, "slope": slope})
    return tables[0] if np.ndim(p) == 0 else tables


def sharpness_log_experiment(s: int, rho_list):
    """Log-law checks for f(x,y) = (y+rho)^(-1/(s+1)) on the unit square.

    ||f||_{s+1}^{s+1} = log((1+rho)/rho) exactly; the integral of f along the
    osculating curve y = t^(s+1) grows like log(1/rho).  Both are computed by
    adaptive quadrature and fitted against their predicted laws.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    rows = []
    for rho in rho_list:
        norm_power, _ = integrate.quad(lambda y: 1.0 / (y + rho), 0.0, 1.0)
        closed = math.log((1.0 + rho) / rho)

        def line_integrand(t):
            y = t ** (s + 1)
            arc = math.sqrt(1.0 + ((s + 1) * t ** s) ** 2)
            return (y + rho) ** (-1.0 / (s + 1)) * arc

        line, _ = integrate.quad(line_integrand, 0.0, 1.0, limit=200)
        rows.append({"rho": rho, "norm_power": norm_power, "norm_closed_form": closed,
                     "line_integral": line, "log_inv_rho": math.log(1.0 / rho)})

    logs = np.array([r["log_inv_rho"] for r in rows])
    lines = np.array([r["line_integral"] for r in rows])
    A = np.stack([logs, np.ones_like(logs)], axis=1)
    sol, res, *_ = np.linalg.lstsq(A, lines, rcond=None)
    ss_res = float(res[0]) if len(res) else float(np.sum((lines - A @ sol) ** 2))
    ss_tot = float(np.sum((lines - lines.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return {"s": s, "rows": rows, "line_fit_slope": float(sol[0]),
            "line_fit_intercept": float(sol[1]), "line_fit_r2": r2}
