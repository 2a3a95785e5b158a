"""Tangency rectangles: curvilinear delta-neighborhoods and their calculus.

A (delta; k; T) rectangle is the closed vertical delta-neighborhood of the
graph of a C^k-bounded base curve over an interval of length (T*delta)^(1/k).
Tangency, comparability and the quantized rectangle grid are decided with
exact polynomial sups, so every positive answer is a certificate.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .poly import (
    PolyCurve,
    poly_eval,
    poly_sub,
    sup_abs,
    sup_norms,
    taylor_coeffs,
)


class GridCapError(MemoryError):
    """The requested rectangle grid exceeds the configured size cap."""


def prism_constant(k: int) -> float:
    """Fiber constant K(k): the explicit chain constant plus one.

    Deliberately explicit rather than tight; pass ``K`` to the constructors
    to override.
    """
    return 2.0 * 8.0 ** (k * k) * k + 1.0


@dataclass(frozen=True)
class TangencyRect:
    """Vertical delta-neighborhood of ``base`` over [anchor, anchor+(T*delta)^(1/k)]."""

    base: PolyCurve
    anchor: float
    delta: float
    k: int
    T: float = 1.0

    def __post_init__(self):
        if self.delta <= 0 or self.delta > 1:
            raise ValueError("delta must lie in (0, 1]")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.T < 1 or self.T > 1.0 / self.delta + 1e-9:
            raise ValueError("T must lie in [1, 1/delta]")
        lo, hi = self.base.domain
        a, b = self.interval
        if a < lo - 1e-12 or b > hi + 1e-12:
            raise ValueError(f"interval [{a}, {b}] not inside base domain [{lo}, {hi}]")

    @property
    def length(self) -> float:
        return (self.T * self.delta) ** (1.0 / self.k)

    @property
    def interval(self) -> tuple[float, float]:
        return (self.anchor, self.anchor + self.length)

    def base_values(self, t):
        return poly_eval(self.base.coeffs, t)

    def to_json_dict(self) -> dict:
        return {"k": self.k, "delta": self.delta, "T": self.T, "anchor": self.anchor,
                "base_coeffs": [float(v) for v in self.base.coeffs]}

    @staticmethod
    def from_json_dict(doc, domain=(0.0, 1.0)) -> "TangencyRect":
        return TangencyRect(base=PolyCurve(doc["base_coeffs"], domain),
                            anchor=float(doc["anchor"]), delta=float(doc["delta"]),
                            k=int(doc["k"]), T=float(doc.get("T", 1.0)))


def is_tangent(f: PolyCurve, rect: TangencyRect, return_margin: bool = False):
    """Whether the graph of f over I(R) stays inside R (closed: boundary counts).

    The sup of |f - base| over I(R) is computed exactly; it is returned as the
    margin when requested.
    """
    a, b = rect.interval
    lo, hi = f.domain
    if a < lo - 1e-12 or b > hi + 1e-12:
        raise ValueError(f"rectangle interval [{a}, {b}] outside curve domain [{lo}, {hi}]")
    margin = sup_abs(poly_sub(f.coeffs, rect.base.coeffs), a, b)
    ok = margin <= rect.delta * (1.0 + 1e-12)
    return (ok, margin) if return_margin else ok


def taylor_model(rect: TangencyRect) -> PolyCurve:
    """The (k-1)-st Taylor polynomial of the base at the anchor.

    The rectangle is contained in the vertical 2*delta neighborhood of this
    model over its interval whenever T = 1 (Taylor remainder <= delta).
    """
    tc = taylor_coeffs(rect.base, rect.anchor, rect.k - 1)
    return PolyCurve(_shifted_poly(tc, rect.anchor), rect.base.domain)


def comparable(r1: TangencyRect, r2: TangencyRect, extra_bases=()) -> bool:
    """Whether a (2^k delta; k; T) rectangle demonstrably contains both.

    Candidate covers sit over the interval hull and use either rectangle's
    base curve (plus any ``extra_bases``, e.g. a known common tangent, which
    is what witnesses comparability of overlapping same-tangent rectangles).
    Containment of each rectangle is a sup test with room 2^k*delta - delta,
    and the hull must fit the length budget.  The decided predicate can be
    stricter than the existential definition but never accepts a pair
    without a certificate; using both bases makes it symmetric.
    """
    if (r1.k, r1.T) != (r2.k, r2.T) or abs(r1.delta - r2.delta) > 1e-15:
        raise ValueError("comparability requires matching (delta, k, T)")
    for base in (r1.base, r2.base, *extra_bases):
        if _candidate_covers_both(base, r1, r2):
            return True
    return False


def _candidate_covers_both(base: PolyCurve, ra: TangencyRect, rb: TangencyRect) -> bool:
    k, delta, T = ra.k, ra.delta, ra.T
    big = 2.0 ** k * delta
    lo = min(ra.anchor, rb.anchor)
    hi = max(ra.interval[1], rb.interval[1])
    if hi - lo > (T * big) ** (1.0 / k) * (1.0 + 1e-12):
        return False
    dlo, dhi = base.domain
    if lo < dlo - 1e-12 or hi > dhi + 1e-12:
        return False
    if float(np.sum(sup_norms(base, k, (lo, hi)))) > 1.0 + 1e-9:
        return False
    room = big - delta
    for r in (ra, rb):
        if r.base is base:
            continue
        sep = sup_abs(poly_sub(r.base.coeffs, base.coeffs), *r.interval)
        if sep > room * (1.0 + 1e-12):
            return False
    return True


def grid_quantum(rho: float, k: int, i: int) -> float:
    """Quantization step for the i-th Taylor datum at scale rho."""
    return rho ** (1.0 - i / k) / (100.0 * 2.0 ** k)


def grid_count_estimate(rho: float, k: int) -> float:
    """Upper estimate of the full grid size before the norm filter."""
    n_anchors = math.ceil(rho ** (-1.0 / k))
    per = 1.0
    for i in range(k):
        per *= 2.0 * 1.0 / grid_quantum(rho, k, i) + 1.0
    return n_anchors * per


def canonical_rect_grid(rho: float, k: int, cap: int = 2_000_000):
    """All (rho; k) rectangles with quantized Taylor data and C^k norm <= 1.

    Anchors run over rho^(1/k) * Z in [0, 1); the i-th datum over multiples of
    rho^(1-i/k) / (100 * 2^k) in [-1, 1].  Every curve of norm <= 1 stays
    within rho/2 of some grid base over each anchor interval, which is what
    makes this grid a universal net for tangency bookkeeping.
    """
    if not (0 < rho <= 1):
        raise ValueError("rho must lie in (0, 1]")
    est = grid_count_estimate(rho, k)
    if est > cap:
        raise GridCapError(f"grid of ~{est:.3g} rectangles exceeds cap {cap}")
    step = rho ** (1.0 / k)
    n_anchors = int(math.ceil(1.0 / step - 1e-9))
    quanta = [grid_quantum(rho, k, i) for i in range(k)]
    ranges = [np.arange(-math.floor(1.0 / q), math.floor(1.0 / q) + 1) * q for q in quanta]
    rects = []
    for ai in range(n_anchors):
        a = ai * step
        hi = min(a + step, 1.0)
        for combo in itertools.product(*ranges):
            coeffs = _shifted_poly(combo, a)
            base = PolyCurve(coeffs, (0.0, 1.0))
            if float(np.sum(sup_norms(base, k, (a, hi)))) <= 1.0 + 1e-12:
                rects.append(TangencyRect(base=base, anchor=a, delta=rho, k=k))
    return rects


def _shifted_poly(data, a: float) -> np.ndarray:
    """Monomial coefficients of sum_i data[i] * (t - a)^i."""
    out = np.zeros(len(data))
    pw = np.array([1.0])
    for i, b in enumerate(data):
        out[: len(pw)] += b * pw
        pw = np.convolve(pw, [-a, 1.0])
    return out


def nearest_grid_rect(f: PolyCurve, rho: float, k: int, anchor: float,
                      search_neighbors: bool = True):
    """The grid rectangle at this anchor nearest to f, with its sup distance.

    Quantizes the Taylor data of f at the anchor; if the nearest lattice point
    misses the rho/2 guarantee (possible only by float slack), the +-1 lattice
    neighbors are searched too.
    """
    hi = min(anchor + rho ** (1.0 / k), 1.0)
    if hi <= anchor:
        raise ValueError("anchor at or beyond the right edge")
    tc = taylor_coeffs(f, anchor, k - 1)
    quanta = np.array([grid_quantum(rho, k, i) for i in range(k)])
    base_idx = np.round(tc / quanta)

    def build(idx):
        data = idx * quanta
        base = PolyCurve(_shifted_poly(data, anchor), f.domain)
        rect = TangencyRect(base=base, anchor=anchor, delta=rho, k=k)
        return rect, sup_abs(poly_sub(f.coeffs, base.coeffs), anchor, hi)

    rect, d = build(base_idx)
    if d <= rho / 2.0 or not search_neighbors:
        return rect, d
    best = (rect, d)
    for combo in itertools.product(*[(-1, 0, 1)] * k):
        if all(c == 0 for c in combo):
            continue
        cand = build(base_idx + np.array(combo))
        if cand[1] < best[1]:
            best = cand
    return best


def rect_grid_to_jsonl(rects, fh):
    """Stream rectangles as one JSON object per line."""
    for r in sorted(rects, key=lambda r: (r.anchor, tuple(r.base.coeffs))):
        fh.write(json.dumps(r.to_json_dict()))
        fh.write("\n")
