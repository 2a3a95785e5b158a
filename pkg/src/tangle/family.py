"""Curve families: construction, tangency-forbidding constants, jet Jacobians.

A family is a finite list of PolyCurve graphs on a common interval, all with
certified C^k norm at most 1.  Built-in parameterizations: the moment family
h(u;t) = u0 + u1 t + ... + u_{m-1} t^{m-1}, circles, and rotated ellipses
(the latter two admitted through polynomial approximation with a certified
residual, since the downstream calculus is stated for polynomials).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .poly import (
    DomainError,
    PolyCurve,
    ck_norm,
    inf_abs_jet_sum,
    poly_der,
    poly_eval,
    poly_sub,
    sup_abs,
)

MOMENT = "moment"
CIRCLE = "circle"
ELLIPSE = "ellipse"
CUSTOM = "custom"

# Default pass threshold for the minimum singular value in transversality
# reports; the underlying condition is qualitative, so this is a choice.
SINGULAR_VALUE_FLOOR = 1e-6


class ConstructionError(ValueError):
    """A family could not be built within the requested approximation bounds."""


@dataclass(frozen=True)
class CinematicSpec:
    """An m-parameter curve family with a projection onto m-s coordinates.

    ``projection`` selects coordinates (tuple of indices) or is a full-rank
    (m-s) x m matrix.  ``box`` is the compact parameter region, one (lo, hi)
    pair per axis; ``time_interval`` is the common curve domain.
    """

    kind: str
    box: tuple
    time_interval: tuple[float, float]
    projection: object = None
    h: object = None          # custom kinds: callable h(u, t)
    degree: int = None        # custom kinds: polynomial degree in t

    def __post_init__(self):
        if self.kind not in (MOMENT, CIRCLE, ELLIPSE, CUSTOM):
            raise ValueError(f"unknown family kind {self.kind!r}")
        box = tuple((float(lo), float(hi)) for lo, hi in self.box)
        if any(hi <= lo for lo, hi in box):
            raise ValueError("parameter box must have positive volume")
        object.__setattr__(self, "box", box)
        t0, t1 = self.time_interval
        if not (t1 > t0):
            raise DomainError("time interval is degenerate")
        object.__setattr__(self, "time_interval", (float(t0), float(t1)))
        if self.kind == CIRCLE and self.m != 3:
            raise ValueError("circle spec has parameters (x, y, r)")
        if self.kind == ELLIPSE and self.m != 5:
            raise ValueError("ellipse spec has parameters (a, b, x, y, theta)")
        if self.kind == CUSTOM and self.h is None:
            raise ValueError("custom spec needs an h(u, t) callable")

    @property
    def m(self) -> int:
        return len(self.box)

    def projection_matrix(self, s: int) -> np.ndarray:
        """The derivative of Phi as an (m-s) x m matrix."""
        m = self.m
        if self.projection is None:
            idx = tuple(range(s, m))  # default: last m-s coordinates
        elif isinstance(self.projection, (tuple, list)) and np.ndim(self.projection) == 1:
            idx = tuple(int(i) for i in self.projection)
        else:
            mat = np.asarray(self.projection, dtype=float)
            if mat.shape != (m - s, m):
                raise ValueError(f"projection matrix must be {(m - s, m)}, got {mat.shape}")
            return mat
        if len(idx) != m - s:
            raise ValueError(f"projection must select {m - s} coordinates")
        mat = np.zeros((m - s, m))
        for row, col in enumerate(idx):
            mat[row, col] = 1.0
        return mat

    def h_value(self, u, t):
        u = np.asarray(u, dtype=float)
        if self.kind == MOMENT:
            return float(np.sum(u * t ** np.arange(self.m)))
        if self.kind == CIRCLE:
            x, y, r = u
            return math.sqrt(r * r - (t - x) ** 2) - y
        if self.kind == ELLIPSE:
            return _ellipse_h(u, t)
        return float(self.h(u, t))


def _ellipse_coeffs(a, b, x, y, theta):
    A = a * a * math.sin(theta) ** 2 + b * b * math.cos(theta) ** 2
    B = 2.0 * (b * b - a * a) * math.sin(theta) * math.cos(theta)
    C = a * a * math.cos(theta) ** 2 + b * b * math.sin(theta) ** 2
    D = -2.0 * A * x - B * y
    E = -B * x - 2.0 * C * y
    F = A * x * x + B * x * y + C * y * y - a * a * b * b
    return A, B, C, D, E, F


def _ellipse_h(u, t):
    a, b, x, y, theta = u
    A, B, C, D, E, F = _ellipse_coeffs(a, b, x, y, theta)
    disc = (B * t + E) ** 2 - 4.0 * C * (A * t * t + D * t + F)
    if disc < 0:
        raise DomainError(f"t={t} off the ellipse (negative discriminant)")
    return (-(B * t + E) + math.sqrt(disc)) / (2.0 * C)


def jet_of_h(spec: CinematicSpec, u, t: float, order: int, dt: float = None) -> np.ndarray:
    """(h, d_t h, ..., d_t^order h) at (u, t).

    Moment families are exact; other kinds use a local Chebyshev polynomial
    fit of h(u, .) whose derivatives converge far faster than stacked finite
    differences.
    """
    u = np.asarray(u, dtype=float)
    if spec.kind == MOMENT:
        out = np.empty(order + 1)
        coeffs = u.copy()
        for i in range(order + 1):
            out[i] = poly_eval(coeffs, t) if len(coeffs) else 0.0
            coeffs = poly_der(coeffs) if len(coeffs) > 1 else np.zeros(1)
        return out
    half = dt if dt is not None else 1e-2
    deg = max(2 * order + 2, 8)
    nodes = t + half * np.cos(np.pi * np.arange(deg + 1) / deg)
    vals = np.array([spec.h_value(u, x) for x in nodes])
    fit = np.polynomial.polynomial.polyfit(nodes - t, vals, deg)
    out = np.empty(order + 1)
    c = fit
    for i in range(order + 1):
        out[i] = poly_eval(c, 0.0)
        c = poly_der(c) if len(c) > 1 else np.zeros(1)
    return out


def jet_jacobian(spec: CinematicSpec, u, t: float, order: int, du: float = 1e-6) -> np.ndarray:
    """Jacobian in u of u -> (h, d_t h, ..., d_t^order h); rows are jet entries."""
    u = np.asarray(u, dtype=float)
    m = spec.m
    if spec.kind == MOMENT:
        # d/du_j of d_t^i h = d_t^i t^j, independent of u
        jac = np.zeros((order + 1, m))
        for j in range(m):
            e = np.zeros(m)
            e[j] = 1.0
            jac[:, j] = jet_of_h(spec, e, t, order)
        return jac
    cols = []
    for j in range(m):
        e = np.zeros(m)
        e[j] = du
        cols.append((jet_of_h(spec, u + e, t, order) - jet_of_h(spec, u - e, t, order)) / (2 * du))
    return np.stack(cols, axis=1)


@dataclass(frozen=True)
class CurveFamily:
    """Immutable list of curves on a common domain with certified C^k norms <= 1."""

    curves: tuple
    k: int
    norm_bound: float = 1.0
    source: CinematicSpec = None
    jet_separation: float = None
    rescale_factor: float = 1.0

    def __post_init__(self):
        if self.curves:
            dom = self.curves[0].domain
            if any(c.domain != dom for c in self.curves):
                raise ValueError("family curves must share one domain")

    def __len__(self):
        return len(self.curves)

    def __iter__(self):
        return iter(self.curves)

    def __getitem__(self, i):
        return self.curves[i]

    @property
    def domain(self):
        return self.curves[0].domain if self.curves else (0.0, 1.0)


def certify_family(curves, k: int, source=None, rescale_factor=1.0) -> CurveFamily:
    for i, c in enumerate(curves):
        _, upper = ck_norm(c, k)
        if upper > 1.0 + 1e-9:
            raise ConstructionError(f"curve {i} has C^{k} norm {upper:.6g} > 1")
    return CurveFamily(curves=tuple(curves), k=k, source=source,
                       rescale_factor=rescale_factor)


def forbid_constant(family, k: int, tol: float = 1e-9):
    """min over curve pairs of inf_t sum_i |f^(i)-g^(i)| / ||f-g||_{C^k}.

    The inf over t is exact: roots of every derivative difference partition
    the domain into sign-constant pieces, and on each piece the absolute sum
    is a single polynomial whose minimum sits at an endpoint or critical
    point.  Duplicate curves are reported rather than divided by zero.
    """
    curves = list(family)
    if len(curves) < 2:
        return math.inf, []
    lo, hi = curves[0].domain
    c_min = math.inf
    duplicates = []
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            d = poly_sub(curves[i].coeffs, curves[j].coeffs)
            norm = sum(sup_abs(poly_der(d, m) if m else d, lo, hi) for m in range(k + 1))
            if norm <= tol:
                duplicates.append((i, j))
                continue
            c_min = min(c_min, inf_abs_jet_sum(d, k, lo, hi) / norm)
    return c_min, duplicates


def poly_approximate(fn, degree: int, interval=(0.0, 1.0), n_samples=None,
                     cond_threshold: float = 1e12):
    """Least-squares polynomial fit at Chebyshev nodes with a dense-grid error.

    Returns (PolyCurve, sup_error_estimate).  The error estimate is the max
    residual on a grid ten times denser than the node set.
    """
    if degree < 0:
        raise ValueError("degree must be >= 0")
    lo, hi = interval
    n = max(n_samples or 4 * (degree + 1), degree + 1)
    theta = np.pi * (np.arange(n) + 0.5) / n
    nodes = 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos(theta)
    vals = np.array([fn(x) for x in nodes])
    # fit in the scaled variable for conditioning, then expand exactly
    scaled = (nodes - 0.5 * (lo + hi)) / (0.5 * (hi - lo))
    V = np.vander(scaled, degree + 1, increasing=True)
    sv = np.linalg.svd(V, compute_uv=False)
    cond = sv[0] / sv[-1] if sv[-1] > 0 else math.inf
    if cond > cond_threshold:
        raise ConstructionError(
            f"ill-conditioned fit (cond ~ {cond:.3g}); lower the degree or change basis")
    cs, *_ = np.linalg.lstsq(V, vals, rcond=None)
    from .poly import poly_compose_affine
    coeffs = poly_compose_affine(cs, -(lo + hi) / (hi - lo), 2.0 / (hi - lo))
    dense = np.linspace(lo, hi, 10 * n + 1)
    err = float(np.max(np.abs(poly_eval(coeffs, dense) - np.array([fn(x) for x in dense]))))
    return PolyCurve(coeffs, (lo, hi)), err


def build_family(spec: CinematicSpec, grid, seed: int = 0, k: int = None,
                 approx_error_bound: float = 1e-6) -> CurveFamily:
    """Curves t -> h(u; t) for u on a per-axis grid inside the parameter box.

    Non-polynomial kinds are replaced by least-squares approximants of degree
    ceil(1/eta) with the residual certified against ``approx_error_bound``.
    If any curve exceeds C^k norm 1, the whole family is rescaled by one
    common factor, recorded on the returned family.
    """
    m = spec.m
    counts = [int(g) for g in (grid if np.ndim(grid) else [grid] * m)]
    if len(counts) != m or any(c < 1 for c in counts):
        raise ValueError("grid needs one positive count per parameter axis")
    axes = [np.linspace(lo, hi, c) if c > 1 else np.array([(lo + hi) / 2.0])
            for (lo, hi), c in zip(spec.box, counts)]
    mesh = np.meshgrid(*axes, indexing="ij")
    params = np.stack([ax.ravel() for ax in mesh], axis=1)
    if k is None:
        k = m - 1
    t0, t1 = spec.time_interval

    curves = []
    if spec.kind == MOMENT:
        for u in params:
            curves.append(PolyCurve(u, (t0, t1)))
    else:
        degree = spec.degree or max(2 * m, math.ceil(1.0 / 0.05))
        for u in params:
            curve, err = poly_approximate(lambda t: spec.h_value(u, t), degree, (t0, t1))
            if err > approx_error_bound:
                raise ConstructionError(
                    f"approximation error {err:.3g} > {approx_error_bound:.3g} at u={u.tolist()}")
            curves.append(curve)

    norms = [ck_norm(c, k)[1] for c in curves]
    worst = max(norms) if norms else 0.0
    factor = 1.0
    if worst > 1.0:
        factor = 1.0 / worst
        curves = [PolyCurve(c.coeffs * factor, c.domain) for c in curves]
    sep = _min_jet_separation(curves, k) if len(curves) > 1 else None
    fam = CurveFamily(curves=tuple(curves), k=k, source=spec,
                      jet_separation=sep, rescale_factor=factor)
    return fam


def _min_jet_separation(curves, k: int) -> float:
    lo, hi = curves[0].domain
    grid = np.linspace(lo, hi, 33)
    stacks = np.array([[poly_eval(c.der_coeffs(i), grid) for i in range(k + 1)] for c in curves])
    n = len(curves)
    best = math.inf
    for i in range(n):
        d = np.abs(stacks[i + 1:] - stacks[i]).sum(axis=1).max(axis=1)
        if d.size:
            best = min(best, float(d.min()))
    return best


def cinematic_check(spec: CinematicSpec, samples: int, seed: int = 0):
    """Monte Carlo minimum of |det D_u (h, d_t h, ..., d_t^{m-1} h)| over box x I0."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    m = spec.m
    lows = np.array([lo for lo, _ in spec.box])
    highs = np.array([hi for _, hi in spec.box])
    t0, t1 = spec.time_interval
    best, arg = math.inf, None
    for i in range(samples):
        g = rng.stream(seed, i)
        u = lows + (highs - lows) * g.random(m)
        t = t0 + (t1 - t0) * g.random()
        det = float(np.linalg.det(jet_jacobian(spec, u, t, m - 1)))
        if not math.isfinite(det):
            raise ArithmeticError(f"non-finite jet Jacobian determinant at u={u.tolist()}, t={t}")
        if abs(det) < best:
            best, arg = abs(det), (u.tolist(), t)
    return {"min_abs_det": best, "argmin": arg, "samples": samples}


def transversality_rank(spec: CinematicSpec, s: int, samples: int, seed: int = 0,
                        floor: float = SINGULAR_VALUE_FLOOR):
    """Smallest singular value of D(Phi) restricted to tangent spaces of V_{u;t}.

    The tangent space is the null space of the (s+1) x m jet Jacobian; the
    condition is vacuous for s = m-1 (V is a point).
    """
    m = spec.m
    if not (1 <= s < m):
        raise ValueError("require 1 <= s < m")
    if s == m - 1:
        return {"vacuous": True, "reason": "s = m-1: fibers V_{u;t} are points",
                "min_singular_value": math.inf, "pass": True}
    phi = spec.projection_matrix(s)
    lows = np.array([lo for lo, _ in spec.box])
    highs = np.array([hi for _, hi in spec.box])
    t0, t1 = spec.time_interval
    best, arg, failures = math.inf, None, []
    for i in range(samples):
        g = rng.stream(seed, i)
        u = lows + (highs - lows) * g.random(m)
        t = t0 + (t1 - t0) * g.random()
        A = jet_jacobian(spec, u, t, s)
        if np.linalg.matrix_rank(A, tol=1e-9) < s + 1:
            failures.append({"u": u.tolist(), "t": t, "reason": "rank-deficient jet Jacobian"})
            continue
        _, _, vt = np.linalg.svd(A)
        null_basis = vt[s + 1:].T  # m x (m - s - 1), orthonormal
        restricted = phi @ null_basis
        sv = np.linalg.svd(restricted, compute_uv=False)
        smin = float(sv[-1]) if sv.size else 0.0
        if smin < best:
            best, arg = smin, (u.tolist(), t)
    return {"vacuous": False, "min_singular_value": best, "argmin": arg,
            "cinematic_failures": failures, "pass": best > floor and not failures}


def moment_spec(m: int, box=None, time_interval=(0.0, 1.0), projection=None) -> CinematicSpec:
    box = box if box is not None else tuple((0.0, 1.0) for _ in range(m))
    return CinematicSpec(kind=MOMENT, box=box, time_interval=time_interval,
                         projection=projection)


def circle_spec(center_box=((-0.1, 0.1), (-0.1, 0.1)), radius_box=(0.9, 1.1),
                time_interval=(-0.1, 0.1), projection=None, degree=None) -> CinematicSpec:
    box = (center_box[0], center_box[1], radius_box)
    return CinematicSpec(kind=CIRCLE, box=box, time_interval=time_interval,
                         projection=projection, degree=degree)


def ellipse_spec(a_box=(0.9, 1.1), b_box=(0.9, 1.1), center_box=((-0.05, 0.05), (-0.05, 0.05)),
                 theta_box=(-0.1, 0.1), time_interval=(-0.1, 0.1), projection=None,
                 degree=None) -> CinematicSpec:
    box = (a_box, b_box, center_box[0], center_box[1], theta_box)
    return CinematicSpec(kind=ELLIPSE, box=box, time_interval=time_interval,
                         projection=projection, degree=degree)
