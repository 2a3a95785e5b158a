"""Polynomial curves with certified sup norms and derivative jets.

Everything downstream (tangency tests, rectangle covers, lemma checkers)
reduces to questions about a univariate polynomial on a closed interval:
its value jet, its extreme values, and the location of its roots.  Those
are answered here exactly (up to float rounding) by isolating the real
roots of derivative chains, never by grid sampling.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

# Bisection refinement depth for isolated roots; 2^-80 of the bracket width.
_BISECT_ITERS = 80
# Default slack added to exact-arithmetic sups to absorb float rounding.
NORM_SLACK = 1e-12


class DomainError(ValueError):
    """Evaluation point or interval lies outside a curve's domain."""


def as_coeffs(c) -> np.ndarray:
    """Coefficients in ascending degree as a float array, trailing zeros kept."""
    a = np.atleast_1d(np.asarray(c, dtype=float))
    if a.ndim != 1 or a.size == 0:
        raise ValueError("coefficient array must be one-dimensional and non-empty")
    if not np.all(np.isfinite(a)):
        raise ValueError("coefficients must be finite")
    return a


def trim(c) -> np.ndarray:
    """Drop trailing (leading-degree) zero coefficients."""
    a = as_coeffs(c)
    nz = np.nonzero(a)[0]
    if nz.size == 0:
        return a[:1] * 0.0
    return a[: nz[-1] + 1]


def poly_eval(c, x):
    return P.polyval(x, as_coeffs(c))


def poly_der(c, m: int = 1) -> np.ndarray:
    a = as_coeffs(c)
    if len(a) <= m:
        return np.zeros(1)
    return P.polyder(a, m)


def poly_sub(c1, c2) -> np.ndarray:
    return P.polysub(as_coeffs(c1), as_coeffs(c2))


def poly_compose_affine(c, shift: float, scale: float) -> np.ndarray:
    """Coefficients of x -> p(shift + scale*x), computed exactly by Horner."""
    a = as_coeffs(c)
    out = np.zeros(1)
    lin = np.array([shift, scale])
    for coef in a[::-1]:
        out = P.polyadd(P.polymul(out, lin), [coef])
    return out


def real_roots(c, lo: float, hi: float, tol: float = 0.0) -> np.ndarray:
    """All real roots of the polynomial in [lo, hi], in increasing order.

    Recursive critical-point isolation: the roots of p' split [lo, hi] into
    intervals on which p is monotone, so each root is bracketed by a sign
    change and refined by bisection.  Roots where p touches zero without a
    sign change are detected at critical points with |p| below ``tol``.
    """
    a = trim(c)
    d = len(a) - 1
    if hi < lo:
        return np.empty(0)
    if d == 0:
        return np.empty(0)  # constant: root sets are either empty or trivial
    if d == 1:
        with np.errstate(over="ignore", divide="ignore"):
            r = -a[0] / a[1]
        return np.array([r]) if lo <= r <= hi else np.empty(0)

    crit = real_roots(poly_der(a), lo, hi)
    nodes = np.unique(np.concatenate([[lo], crit, [hi]]))
    vals = poly_eval(a, nodes)

    roots = []
    for i, (x, v) in enumerate(zip(nodes, vals)):
        if v == 0.0 or (tol > 0.0 and abs(v) <= tol and 0 < i < len(nodes) - 1):
            roots.append(x)
    lo_ends, hi_ends = nodes[:-1], nodes[1:]
    keep = vals[:-1] * vals[1:] < 0.0
    if np.any(keep):
        xl = lo_ends[keep].copy()
        xr = hi_ends[keep].copy()
        sl = np.sign(vals[:-1][keep])
        for _ in range(_BISECT_ITERS):
            xm = 0.5 * (xl + xr)
            vm = poly_eval(a, xm)
            left = sl * vm > 0
            xl = np.where(left, xm, xl)
            xr = np.where(left, xr, xm)
        roots.extend(0.5 * (xl + xr))
    return np.unique(np.array(sorted(roots), dtype=float))


def poly_range(c, lo: float, hi: float) -> tuple[float, float]:
    """Exact (min, max) of the polynomial over [lo, hi] via critical points."""
    a = trim(c)
    if hi < lo:
        raise DomainError(f"empty interval [{lo}, {hi}]")
    if len(a) <= 1:
        return float(a[0]), float(a[0])
    if len(a) == 2:
        v0, v1 = poly_eval(a, lo), poly_eval(a, hi)
        return (min(v0, v1), max(v0, v1))
    if len(a) == 3:
        # closed-form vertex; this is the hot path for quadratic differences
        pts = [lo, hi]
        with np.errstate(over="ignore", divide="ignore"):
            v = -a[1] / (2.0 * a[2])
        if lo < v < hi:
            pts.append(v)
        vals = poly_eval(a, np.array(pts))
        return float(vals.min()), float(vals.max())
    crit = real_roots(poly_der(a), lo, hi)
    pts = np.concatenate([[lo, hi], crit])
    vals = poly_eval(a, pts)
    return float(vals.min()), float(vals.max())


def sup_abs(c, lo: float, hi: float) -> float:
    """sup of |p| over [lo, hi]."""
    mn, mx = poly_range(c, lo, hi)
    return max(abs(mn), abs(mx))


def inf_abs(c, lo: float, hi: float) -> float:
    """inf of |p| over [lo, hi]: zero iff p has a root there."""
    a = trim(c)
    if len(a) == 1:
        return abs(float(a[0]))
    if real_roots(a, lo, hi).size:
        return 0.0
    mn, mx = poly_range(a, lo, hi)
    return min(abs(mn), abs(mx))  # same sign throughout, no interior root


def inf_abs_jet_sum(c, k: int, lo: float, hi: float) -> float:
    """Exact inf over [lo, hi] of sum_{i<=k} |p^(i)(t)|.

    Roots of every derivative partition the interval into sign-constant
    pieces; on each piece the absolute sum is a single polynomial minimized
    at an endpoint or critical point.
    """
    ders = [as_coeffs(c)] + [poly_der(c, m) for m in range(1, k + 1)]
    cuts = {float(lo), float(hi)}
    for dd in ders:
        cuts.update(float(r) for r in real_roots(dd, lo, hi))
    nodes = sorted(cuts)
    best = math.inf
    for a, b in zip(nodes[:-1], nodes[1:]):
        mid = 0.5 * (a + b)
        signed = np.zeros(max(len(dd) for dd in ders))
        for dd in ders:
            s = 1.0 if poly_eval(dd, mid) >= 0 else -1.0
            signed[: len(dd)] += s * dd
        pts = [a, b] + [float(r) for r in real_roots(poly_der(signed), a, b)]
        best = min(best, float(np.min(np.abs(poly_eval(signed, np.array(pts))))))
    return best


def sup_abs_batch(coeff_rows: np.ndarray, lo, hi) -> np.ndarray:
    """Vectorised sup|p| over [lo, hi] for many polynomials of degree <= 2.

    ``coeff_rows`` has shape (n, 3) (pad with zeros).  ``lo``/``hi`` may be
    scalars or arrays broadcastable against the rows.
    """
    rows = np.atleast_2d(np.asarray(coeff_rows, dtype=float))
    if rows.shape[1] > 3:
        raise ValueError("sup_abs_batch handles degree <= 2 only")
    if rows.shape[1] < 3:
        rows = np.pad(rows, ((0, 0), (0, 3 - rows.shape[1])))
    lo = np.broadcast_to(np.asarray(lo, dtype=float), rows.shape[0]).astype(float)
    hi = np.broadcast_to(np.asarray(hi, dtype=float), rows.shape[0]).astype(float)
    c0, c1, c2 = rows[:, 0], rows[:, 1], rows[:, 2]
    v_lo = c0 + c1 * lo + c2 * lo * lo
    v_hi = c0 + c1 * hi + c2 * hi * hi
    out = np.maximum(np.abs(v_lo), np.abs(v_hi))
    with np.errstate(divide="ignore", invalid="ignore"):
        vert = np.where(c2 != 0.0, -c1 / (2.0 * c2), np.nan)
    inside = (vert > lo) & (vert < hi)
    if np.any(inside):
        vv = c0[inside] + c1[inside] * vert[inside] + c2[inside] * vert[inside] ** 2
        out[inside] = np.maximum(out[inside], np.abs(vv))
    return out


@dataclass(frozen=True)
class JetPoint:
    """Value and derivatives (f(t), f'(t), ..., f^{(j)}(t)) at a single time."""

    t: float
    values: np.ndarray

    @property
    def order(self) -> int:
        return len(self.values) - 1


@dataclass(frozen=True)
class PolyCurve:
    """A univariate polynomial graph over a closed interval.

    Coefficients are monomial, ascending degree.  Derivative coefficient
    arrays are derived exactly from ``coeffs`` and cached on first use.
    """

    coeffs: np.ndarray
    domain: tuple[float, float] = (0.0, 1.0)
    _ders: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", as_coeffs(self.coeffs))
        lo, hi = float(self.domain[0]), float(self.domain[1])
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
            raise DomainError(f"degenerate domain [{lo}, {hi}]")
        object.__setattr__(self, "domain", (lo, hi))

    @property
    def degree(self) -> int:
        return len(trim(self.coeffs)) - 1

    def der_coeffs(self, i: int) -> np.ndarray:
        if i == 0:
            return self.coeffs
        if i not in self._ders:
            self._ders[i] = poly_der(self.coeffs, i)
        return self._ders[i]

    def __call__(self, t):
        return poly_eval(self.coeffs, t)

    def derivative(self, i: int = 1) -> "PolyCurve":
        return PolyCurve(self.der_coeffs(i), self.domain)

    def _check_inside(self, t: float):
        lo, hi = self.domain
        if not (lo - 1e-12 <= t <= hi + 1e-12):
            raise DomainError(f"t={t} outside domain [{lo}, {hi}]")

    def shift_scale(self, shift: float, scale: float, new_domain=(0.0, 1.0)) -> "PolyCurve":
        """Curve x -> self(shift + scale*x) on ``new_domain``."""
        return PolyCurve(poly_compose_affine(self.coeffs, shift, scale), new_domain)

    def to_json_dict(self) -> dict:
        return {"coeffs": [float(v) for v in self.coeffs]}


def eval_jet(f: PolyCurve, j: int, t: float) -> JetPoint:
    """Jet (f(t), f'(t), ..., f^{(j)}(t)), each derivative by exact Horner."""
    if j < 0:
        raise ValueError("jet order must be >= 0")
    f._check_inside(t)
    vals = np.array([poly_eval(f.der_coeffs(i), t) for i in range(j + 1)])
    return JetPoint(t=float(t), values=vals)


def taylor_coeffs(f: PolyCurve, a: float, order: int) -> np.ndarray:
    """Taylor coefficients c_i = f^{(i)}(a)/i! for i = 0..order, in powers of (t-a)."""
    jp = eval_jet(f, order, a)
    fact = np.array([math.factorial(i) for i in range(order + 1)], dtype=float)
    return jp.values / fact


def sup_norms(f: PolyCurve, k: int, interval=None) -> np.ndarray:
    """sup|f^{(i)}| over the interval for i = 0..k, each via root isolation."""
    lo, hi = interval if interval is not None else f.domain
    if hi <= lo:
        raise DomainError(f"degenerate interval [{lo}, {hi}]")
    return np.array([sup_abs(f.der_coeffs(i), lo, hi) for i in range(k + 1)])


def ck_norm(f: PolyCurve, k: int, interval=None, slack: float = NORM_SLACK):
    """Certified bracket (lower, upper) for sum_i sup|f^{(i)}| over the interval.

    The sups are exact at isolated critical points; the bracket width only
    absorbs float rounding of the isolation itself.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    total = float(np.sum(sup_norms(f, k, interval)))
    pad = slack * (1.0 + total)
    return max(total - pad, 0.0), total + pad


def family_to_json(curves, k: int, provenance: str = "") -> str:
    """Serialize a curve list with shared domain; shortest round-trip floats."""
    if not curves:
        raise ValueError("empty curve list")
    dom = curves[0].domain
    if any(c.domain != dom for c in curves):
        raise ValueError("curves must share a common domain")
    doc = {
        "k": int(k),
        "domain": [dom[0], dom[1]],
        "curves": [c.to_json_dict() for c in curves],
        "provenance": provenance,
    }
    return json.dumps(doc)


def family_from_json(text: str):
    doc = json.loads(text)
    dom = tuple(doc["domain"])
    curves = [PolyCurve(entry["coeffs"], dom) for entry in doc["curves"]]
    return curves, int(doc["k"]), doc.get("provenance", "")
