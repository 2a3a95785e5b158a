"""Tangency prisms, the covering order, and the anisotropic rescaling maps.

The prism attached to a (delta; k) rectangle lives in R^(k+1): fibers around
the Taylor data of the base shrink like delta^(1-j/k).  Covering (one prism
inside another) is what survives rescaling, so it is the order that drives
the multiscale induction experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .poly import PolyCurve, eval_jet, poly_compose_affine, poly_sub, sup_abs
from .rectangles import TangencyRect, _shifted_poly, prism_constant


@dataclass(frozen=True)
class TangencyPrism:
    """Region in R^(k+1) around the polynomial flow of Taylor data (b_0..b_{k-1}).

    Membership: t in [a, a + delta^(1/k)] and, for each j < k,
    |y_j - sum_{i>=j} (t-a)^(i-j)/(i-j)! * b_i| <= K * delta^(1-j/k).
    """

    anchor: float
    data: np.ndarray
    delta: float
    K: float

    def __post_init__(self):
        object.__setattr__(self, "data", np.asarray(self.data, dtype=float))
        if self.delta <= 0:
            raise ValueError("delta must be positive")

    @property
    def k(self) -> int:
        return len(self.data)

    @property
    def interval(self) -> tuple[float, float]:
        return (self.anchor, self.anchor + self.delta ** (1.0 / self.k))

    def fiber_center(self, j: int) -> np.ndarray:
        """Coefficients (in powers of (t-a)) of the j-th fiber center polynomial."""
        k = self.k
        out = np.zeros(k - j)
        for i in range(j, k):
            out[i - j] = self.data[i] / math.factorial(i - j)
        return out

    def fiber_radius(self, j: int) -> float:
        return self.K * self.delta ** (1.0 - j / self.k)

    def contains(self, t, ys, slack: float = 1e-12) -> bool:
        """Point membership; ys has the k fiber coordinates."""
        a, b = self.interval
        if not (a - slack <= t <= b + slack):
            return False
        for j in range(self.k):
            center = np.polynomial.polynomial.polyval(t - self.anchor, self.fiber_center(j))
            if abs(ys[j] - center) > self.fiber_radius(j) * (1.0 + slack) + slack:
                return False
        return True

    def jet_inside(self, f: PolyCurve, t: float, slack: float = 1e-12) -> bool:
        jp = eval_jet(f, self.k - 1, t)
        return self.contains(t, jp.values, slack)


def prism_of(rect: TangencyRect, K: float = None) -> TangencyPrism:
    """The prism with the rectangle's anchor and base Taylor data b_i = g^(i)(a).

    Prisms are defined for plain (delta; k) rectangles, so T must be 1.
    """
    if abs(rect.T - 1.0) > 1e-12:
        raise ValueError("prisms are defined for T = 1 rectangles only")
    jp = eval_jet(rect.base, rect.k - 1, rect.anchor)
    return TangencyPrism(anchor=rect.anchor, data=jp.values, delta=rect.delta,
                         K=K if K is not None else prism_constant(rect.k))


def covers(s_rect: TangencyRect, r_rect: TangencyRect, K: float = None) -> bool:
    """Whether the prism of R sits inside the prism of S (S covers R, S > R).

    With fixed t the fibers are boxes whose centers are polynomials in t, so
    the inclusion reduces to k exact sup tests:
      sup_{I(R)} |center_j^R - center_j^S| <= K * (rho^(1-j/k) - delta^(1-j/k)).
    """
    if s_rect.k != r_rect.k:
        raise ValueError("covering requires equal k")
    if r_rect.delta >= s_rect.delta:
        raise ValueError("covering is defined for delta < rho")
    k = s_rect.k
    K = K if K is not None else prism_constant(k)
    ps, pr = prism_of(s_rect, K), prism_of(r_rect, K)
    (ra, rb), (sa, sb) = pr.interval, ps.interval
    if ra < sa - 1e-12 or rb > sb + 1e-12:
        return False
    for j in range(k):
        room = K * (s_rect.delta ** (1.0 - j / k) - r_rect.delta ** (1.0 - j / k))
        d = poly_sub(_shifted_poly(pr.fiber_center(j), pr.anchor),
                     _shifted_poly(ps.fiber_center(j), ps.anchor))
        if sup_abs(d, ra, rb) > room * (1.0 + 1e-12) + 1e-15:
            return False
    return True


@dataclass(frozen=True)
class RescaleMap:
    """The pair (phi^S, psi^S) normalizing a (rho; k) rectangle to unit scale.

    phi^S maps S onto [0,1] x [-c, c] with c = 1/((k+1)K); psi^S maps the
    prism of S onto [0,1] x [-1/(k+1), 1/(k+1)]^k.
    """

    source: TangencyRect
    K: float = None

    def __post_init__(self):
        if self.K is None:
            object.__setattr__(self, "K", prism_constant(self.source.k))

    @property
    def c(self) -> float:
        return 1.0 / ((self.source.k + 1) * self.K)

    def phi(self, x, y):
        s = self.source
        rho = s.delta
        return (rho ** (-1.0 / s.k) * (np.asarray(x) - s.anchor),
                self.c / rho * (np.asarray(y) - s.base_values(x)))

    def psi(self, x, ys):
        s = self.source
        rho, k = s.delta, s.k
        tx = rho ** (-1.0 / k) * (x - s.anchor)
        out = [tx]
        for j in range(k):
            gj = np.polynomial.polynomial.polyval(x, s.base.der_coeffs(j))
            out.append(self.c * rho ** (-1.0 + j / k) * (ys[j] - gj))
        return np.array(out)


def rescale_fn(s_rect: TangencyRect, f: PolyCurve, K: float = None,
               check_tangent: bool = True) -> PolyCurve:
    """The normalized curve f_S(x) = c/rho * (f - g)(a + rho^(1/k) x) on [0,1].

    Exact polynomial composition; if f is tangent to S and both norms are at
    most 1, the result again has C^k norm at most 1.
    """
    from .rectangles import is_tangent

    if check_tangent and not is_tangent(f, s_rect):
        raise ValueError("f is not tangent to S")
    k = s_rect.k
    K = K if K is not None else prism_constant(k)
    c = 1.0 / ((k + 1) * K)
    rho = s_rect.delta
    diff = poly_sub(f.coeffs, s_rect.base.coeffs)
    comp = poly_compose_affine(diff, s_rect.anchor, rho ** (1.0 / k))
    return PolyCurve(c / rho * comp, (0.0, 1.0))


def rescale_rect(s_rect: TangencyRect, r_rect: TangencyRect, K: float = None,
                 check_cover: bool = True) -> TangencyRect:
    """The (delta/rho; k) rectangle R_S: the image of R's base under phi^S.

    Tangency transports: f ~ R and f ~ S imply f_S ~ R_S.
    """
    if check_cover and not covers(s_rect, r_rect, K):
        raise ValueError("S does not cover R")
    k = s_rect.k
    new_delta = r_rect.delta / s_rect.delta
    base = rescale_fn(s_rect, r_rect.base, K, check_tangent=False)
    new_anchor = (r_rect.anchor - s_rect.anchor) * s_rect.delta ** (-1.0 / k)
    return TangencyRect(base=base, anchor=new_anchor, delta=new_delta, k=k)


def jet_tangency_margin(f: PolyCurve, prism: TangencyPrism, n_samples: int = 100):
    """Worst fiber slack of the (k-1)-jet of f over the prism interval.

    Positive margin certifies J_{k-1} f ~ prism at the sampled resolution;
    the fiber centers and jets are polynomials, so sampling controls the
    error via their derivative bounds.
    """
    a, b = prism.interval
    ts = np.linspace(a, b, n_samples)
    pv = np.polynomial.polynomial.polyval
    worst = math.inf
    for j in range(prism.k):
        jet_vals = pv(ts, f.der_coeffs(j))
        centers = pv(ts - prism.anchor, prism.fiber_center(j))
        radius = prism.fiber_radius(j)
        slack = (radius - np.abs(jet_vals - centers)) / radius
        worst = min(worst, float(slack.min()))
    return worst
