"""Curve-rectangle incidence graphs and their combinatorial refinements."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .poly import poly_eval, sup_abs, sup_abs_batch
from .rectangles import TangencyRect, comparable, is_tangent


@dataclass
class IncidenceGraph:
    """Bipartite tangency graph between curve indices and rectangle indices.

    ``witnesses[r]`` is the certified curve set F(R) of rectangle r; it is
    always a subset of r's neighbors.
    """

    n_curves: int
    rects: list
    edges: set = field(default_factory=set)          # (curve_idx, rect_idx)
    witnesses: dict = field(default_factory=dict)    # rect_idx -> sorted curve list

    def curve_degrees(self) -> dict:
        deg = {}
        for f, _ in self.edges:
            deg[f] = deg.get(f, 0) + 1
        return deg

    def rect_degrees(self) -> dict:
        deg = {}
        for _, r in self.edges:
            deg[r] = deg.get(r, 0) + 1
        return deg

    def left_vertices(self):
        return sorted({f for f, _ in self.edges})

    def right_vertices(self):
        return sorted({r for _, r in self.edges})

    def rects_of(self, f: int):
        return sorted(r for g, r in self.edges if g == f)

    def to_csv(self, fh):
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(["curve", "rect"])
        for f, r in sorted(self.edges):
            w.writerow([f, r])


def coeff_matrix(curves, width: int = None) -> np.ndarray:
    """Curve coefficients padded into one (n, width) array; None if too wide."""
    degs = [len(c.coeffs) for c in curves]
    width = width or 3
    if not degs or max(degs) > width:
        return None
    out = np.zeros((len(curves), width))
    for i, c in enumerate(curves):
        out[i, : len(c.coeffs)] = c.coeffs
    return out


def _tangency_row(curves, rect: TangencyRect, prefilter: bool = True,
                  cmat: np.ndarray = None) -> np.ndarray:
    """Boolean tangency of every curve to one rectangle."""
    a, b = rect.interval
    n = len(curves)
    simple = cmat is not None and len(rect.base.coeffs) <= cmat.shape[1] == 3
    if simple:
        diff = cmat.copy()
        bc = rect.base.coeffs
        diff[:, : len(bc)] -= bc
        keep = np.ones(n, dtype=bool)
        if prefilter:
            # |f - g| moves at most 2*len along I (both norms <= 1), so a curve
            # far from the base at the anchor cannot come back within delta
            at_a = diff[:, 0] + diff[:, 1] * a + diff[:, 2] * a * a
            keep = np.abs(at_a) <= rect.delta + 2.0 * rect.length + 1e-12
        out = np.zeros(n, dtype=bool)
        idx = np.nonzero(keep)[0]
        if idx.size:
            sups = sup_abs_batch(diff[idx], a, b)
            out[idx] = sups <= rect.delta * (1.0 + 1e-12)
        return out
    keep = np.ones(n, dtype=bool)
    if prefilter:
        anchors = np.array([poly_eval(c.coeffs, a) for c in curves])
        g_a = poly_eval(rect.base.coeffs, a)
        keep = np.abs(anchors - g_a) <= rect.delta + 2.0 * rect.length + 1e-12
    out = np.zeros(n, dtype=bool)
    for i in np.nonzero(keep)[0]:
        out[i] = is_tangent(curves[i], rect)
    return out


def build_incidences(curves, rects, prefilter: bool = True) -> IncidenceGraph:
    """Exact tangency edges; witness sets default to the full neighbor lists."""
    curves = list(curves)
    g = IncidenceGraph(n_curves=len(curves), rects=list(rects))
    cmat = coeff_matrix(curves)
    for r_idx, rect in enumerate(g.rects):
        row = _tangency_row(curves, rect, prefilter, cmat)
        hits = np.nonzero(row)[0]
        for f_idx in hits:
            g.edges.add((int(f_idx), r_idx))
        if hits.size:
            g.witnesses[r_idx] = [int(i) for i in hits]
    return g


def graph_refine(g: IncidenceGraph) -> IncidenceGraph:
    """Peel low-degree vertices until both sides clear 1/4 of the average degree.

    Thresholds are fixed from the ORIGINAL counts: left vertices need degree
    at least #E/(4#A), right at least #E/(4#B).  The refined graph keeps at
    least half the edges; violations indicate a bug and raise.
    """
    if not g.edges:
        raise ValueError("graph refinement needs a nonempty edge set")
    A = set(g.left_vertices())
    B = set(g.right_vertices())
    E = set(g.edges)
    tA = len(E) / (4.0 * len(A))
    tB = len(E) / (4.0 * len(B))
    e0 = len(E)
    changed = True
    while changed:
        changed = False
        ldeg, rdeg = {}, {}
        for f, r in E:
            ldeg[f] = ldeg.get(f, 0) + 1
            rdeg[r] = rdeg.get(r, 0) + 1
        drop_l = {f for f in A if ldeg.get(f, 0) < tA}
        drop_r = {r for r in B if rdeg.get(r, 0) < tB}
        if drop_l or drop_r:
            changed = True
            A -= drop_l
            B -= drop_r
            E = {(f, r) for f, r in E if f in A and r in B}
    assert len(E) >= e0 / 2.0, "refinement dropped more than half the edges"
    ldeg, rdeg = {}, {}
    for f, r in E:
        ldeg[f] = ldeg.get(f, 0) + 1
        rdeg[r] = rdeg.get(r, 0) + 1
    assert all(d >= tA for d in ldeg.values()), "left degree below threshold"
    assert all(d >= tB for d in rdeg.values()), "right degree below threshold"
    out = IncidenceGraph(n_curves=g.n_curves, rects=g.rects, edges=E)
    for r in B:
        neigh = sorted(f for f, rr in E if rr == r)
        old = g.witnesses.get(r)
        out.witnesses[r] = sorted(set(old) & set(neigh)) if old else neigh
    return out


def select_incomparable(rects, order=None):
    """Greedy maximal pairwise-incomparable subset in a deterministic order."""
    items = list(rects)
    if order is None:
        order = sorted(range(len(items)),
                       key=lambda i: (items[i].anchor, tuple(items[i].base.coeffs)))
    kept = []
    kept_idx = []
    for i in order:
        r = items[i]
        if all(not comparable(r, other) for other in kept):
            kept.append(r)
            kept_idx.append(i)
    return kept, kept_idx


def two_ends_interval(rects_of_f, eps1: float, delta: float = None, k: int = None):
    """Dyadic interval maximizing |I|^(-eps1) * #{R : I(R) inside I}.

    Exhaustive over dyadic subintervals of [0,1] with length >= delta^(1/k);
    ties break leftmost, then shortest.
    """
    rects = list(rects_of_f)
    if not rects:
        raise ValueError("two-ends selection needs at least one rectangle")
    if eps1 <= 0:
        raise ValueError("eps1 must be positive")
    delta = delta if delta is not None else rects[0].delta
    k = k if k is not None else rects[0].k
    j_max = int(math.floor(math.log2(1.0 / delta) / k + 1e-9))
    intervals = np.array([r.interval for r in rects])
    best = None
    for j in range(j_max + 1):
        length = 2.0 ** (-j)
        width = 2 ** j
        starts = np.floor(intervals[:, 0] / length).astype(int)
        fits = (intervals[:, 1] <= (starts + 1) * length + 1e-12) & (starts < width)
        counts = np.bincount(starts[fits], minlength=width)
        for m in range(width):
            if counts[m] == 0:
                continue
            value = length ** (-eps1) * counts[m]
            key = (-value, m * length, length)
            if best is None or key < best[0]:
                best = (key, (m * length, (m + 1) * length), int(counts[m]))
    if best is None:
        raise ValueError("no admissible dyadic interval contains any rectangle")
    return {"interval": best[1], "count": best[2], "value": -best[0][0]}
