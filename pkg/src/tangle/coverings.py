"""Covering numbers, (delta, alpha; C)-sets, and Cantor-type generators.

Covering numbers carry two-sided estimates: an upper bound from a greedy net
(exact interval sweep in one dimension) and a lower bound from a maximal
separated packing.  The (delta, alpha)-condition is tested over dyadic radii
with balls centered at data points, which costs at most a factor two in the
radius and is folded into the constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .poly import poly_eval


def _pairwise_dist(points: np.ndarray, metric) -> np.ndarray:
    if metric == "euclidean":
        diff = points[:, None, :] - points[None, :, :]
        return np.sqrt(np.sum(diff * diff, axis=2))
    raise ValueError(f"unknown metric {metric!r}")


def ck_jet_distances(coeff_list, k: int, domain=(0.0, 1.0), grid_points: int = 256):
    """Pairwise sum_i sup-grid |f^(i) - g^(i)| distances for curve collections.

    A fixed 256-point grid stands in for the true sup; for polynomials of
    degree d the two differ by a factor at most 1/(1 - (d^2/2)(|I|/grid)^2)
    (Markov), reported alongside.
    """
    from .poly import poly_der

    lo, hi = domain
    ts = np.linspace(lo, hi, grid_points)
    stacks = []
    max_deg = 0
    for c in coeff_list:
        c = np.asarray(c, dtype=float)
        max_deg = max(max_deg, len(c) - 1)
        rows = []
        cur = c
        for _ in range(k + 1):
            rows.append(poly_eval(cur, ts))
            cur = poly_der(cur) if len(cur) > 1 else np.zeros(1)
        stacks.append(np.array(rows))
    stacks = np.array(stacks)              # (n, k+1, grid)
    diff = np.abs(stacks[:, None] - stacks[None, :]).max(axis=3).sum(axis=2)
    markov = 0.5 * max_deg ** 2 * ((hi - lo) / (grid_points - 1)) ** 2
    equivalence = 1.0 / max(1.0 - markov, 1e-6)
    return diff, equivalence


def covering_number(points, delta: float, metric="euclidean", distances=None):
    """(net_upper, packing_lower) bracket for the delta-covering number.

    One-dimensional euclidean data gets the exact interval sweep; otherwise a
    greedy maximal delta-separated set (every point within delta of a center)
    bounds above, and a strictly 2*delta-separated subset bounds below.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    n = len(pts)
    if n == 0:
        return 0, 0
    if metric == "euclidean" and pts.shape[1] == 1 and distances is None:
        xs = np.sort(pts[:, 0])
        net = 0
        i = 0
        while i < n:
            net += 1
            right = xs[i] + 2.0 * delta  # ball of radius delta placed greedily
            i = int(np.searchsorted(xs, right, side="right"))
        packing = _greedy_separated_1d(xs, 2.0 * delta)
        return net, packing
    d = distances if distances is not None else _pairwise_dist(pts, metric)
    net_centers = _greedy_separated(d, delta)
    packing_centers = _greedy_separated(d, 2.0 * delta)
    return len(net_centers), len(packing_centers)


def _greedy_separated_1d(sorted_xs, gap: float) -> int:
    count = 0
    last = -math.inf
    for x in sorted_xs:
        if x - last > gap:
            count += 1
            last = x
    return count


def _greedy_separated(dist: np.ndarray, gap: float):
    """Indices of a maximal subset with pairwise distance > gap (greedy order)."""
    n = len(dist)
    alive = np.ones(n, dtype=bool)
    chosen = []
    for i in range(n):
        if alive[i]:
            chosen.append(i)
            alive &= dist[i] > gap
    return chosen


@dataclass(frozen=True)
class DeltaAlphaSet:
    """A point set claimed to satisfy E_delta(X cap B_r) <= C (r/delta)^alpha."""

    points: np.ndarray
    delta: float
    alpha: float
    C: float
    metric: str = "euclidean"

    def __post_init__(self):
        object.__setattr__(self, "points", np.asarray(self.points, dtype=float))

    def __len__(self):
        return len(self.points)


def is_delta_alpha(points, delta: float, alpha: float, C: float,
                   metric="euclidean", distances=None):
    """Test the covering inequality over dyadic radii and data-point centers.

    Returns (ok, worst) where worst records the radius, center and ratio of
    the most violating ball.  Centers are data points thinned to an (r/2)-net
    per radius; both concessions cost at most a factor 2 in r, absorbed into
    C by convention.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    n = len(pts)
    if n <= 1:
        return True, {"ratio": 0.0}
    one_d = metric == "euclidean" and pts.shape[1] == 1 and distances is None
    if one_d:
        order = np.argsort(pts[:, 0])
        pts = pts[order]
        xs = pts[:, 0]
        d = None
    else:
        d = distances if distances is not None else _pairwise_dist(pts, metric)
    worst = {"ratio": 0.0}
    r = delta
    while r <= 1.0 + 1e-12:
        budget = C * (r / delta) ** alpha
        if one_d:
            centers = _net_indices_1d(xs, r / 2.0)
        else:
            centers = _greedy_separated(d, r / 2.0)
        for i in centers:
            if one_d:
                lo = int(np.searchsorted(xs, xs[i] - r))
                hi = int(np.searchsorted(xs, xs[i] + r, side="right"))
                cover, _ = covering_number(pts[lo:hi], delta)
            else:
                inside = np.nonzero(d[i] <= r)[0]
                cover, _ = covering_number(pts[inside], delta, metric,
                                           distances=d[np.ix_(inside, inside)])
            ratio = cover / budget
            if ratio > worst["ratio"]:
                worst = {"ratio": ratio, "r": r, "center_index": int(i),
                         "cover": cover, "budget": budget}
        r *= 2.0
    return worst["ratio"] <= 1.0 + 1e-9, worst


def _net_indices_1d(sorted_xs, gap: float):
    idx = []
    last = -math.inf
    for i, x in enumerate(sorted_xs):
        if x - last > gap:
            idx.append(i)
            last = x
    return idx


def digit_restricted_set(delta: float, alpha: float, seed: int = 0):
    """Subset of the delta-grid in [0,1] with ~delta^(-alpha) points.

    Binary digit restriction: ceil(alpha * n) of the n digit positions are
    free (spread evenly), the rest are pinned to seeded values.  Covering
    numbers then scale like r^alpha across dyadic r with constant <= 4.
    """
    n = int(round(math.log2(1.0 / delta)))
    if abs(2.0 ** -n - delta) > 1e-12:
        raise ValueError("delta must be a reciprocal power of two")
    n_free = int(math.ceil(alpha * n - 1e-9))
    if n_free > 0:
        stride = n / n_free
        free = sorted({min(int(math.floor(i * stride)), n - 1) for i in range(n_free)})
        while len(free) < n_free:  # collision fallback: fill leftmost open slots
            for pos in range(n):
                if pos not in free:
                    free.append(pos)
                    break
            free = sorted(free)
    else:
        free = []
    g = rng.stream(seed, n)
    pinned = {pos: int(g.integers(0, 2)) for pos in range(n) if pos not in free}
    pts = []
    for combo in range(2 ** len(free)):
        bits = dict(pinned)
        for idx, pos in enumerate(free):
            bits[pos] = (combo >> idx) & 1
        x = sum(bits[p] * 2.0 ** (-(p + 1)) for p in range(n))
        pts.append(x)
    return np.array(sorted(pts))


def cantor_generator(delta_target: float, alpha: float, seed: int = 0, M: int = None,
                     spread: bool = False):
    """Randomized self-similar (delta, alpha; C<=4)-set in [0,1].

    Branching data: M children per level with round(M^alpha) survivors; the
    admissible delta nearest to the target (a power of 1/M) is used and
    reported.  Survivor choices are seeded per node; ``spread`` picks them
    evenly instead (first/last children: the middle-half pattern for M=4).
    """
    if not (0.0 < alpha <= 1.0):
        raise ValueError("alpha must lie in (0, 1]")
    M = M or 4
    branches = max(int(round(M ** alpha)), 1)
    n = max(int(round(math.log(1.0 / delta_target) / math.log(M))), 1)
    delta = float(M) ** -n
    even = [round(i * (M - 1) / max(branches - 1, 1)) for i in range(branches)]
    level = [0.0]
    width = 1.0
    for depth in range(n):
        width /= M
        nxt = []
        for node_i, x in enumerate(level):
            if spread:
                picks = even
            else:
                g = rng.stream(seed, depth, node_i)
                picks = sorted(g.choice(M, size=branches, replace=False))
            nxt.extend(x + p * width for p in picks)
        level = nxt
    pts = np.array(sorted(level))
    ok, worst = is_delta_alpha(pts, delta, alpha, 4.0)
    return DeltaAlphaSet(points=pts, delta=delta, alpha=alpha, C=4.0), ok, worst


def stripe_intervals(abscissas, tau: float):
    """The closed tau-neighborhood of a point set on [0,1], as merged intervals."""
    xs = np.sort(np.asarray(abscissas, dtype=float).ravel())
    out = []
    for x in xs:
        a, b = x - tau, x + tau
        if out and a <= out[-1][1] + 1e-15:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def make_striped_shading(f, delta: float, tau: float, abscissas, raster,
                         curve_id: int = 0):
    """Rasterized f^delta cut down to columns meeting N_tau of the abscissa set."""
    from .raster import rasterize

    stripes = stripe_intervals(abscissas, tau)
    return rasterize(f, delta, raster, stripes=stripes, curve_id=curve_id)
