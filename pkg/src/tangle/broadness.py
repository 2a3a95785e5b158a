"""Richness/broadness certificates and the rectangle-count bound experiment.

Broadness quantifies over every coarser rectangle containing R; the finite
reduction checked here is the one that suffices up to constants: dyadic
thickness and aspect, and covers that are thickened graphs of the witness
curves themselves, tested at the extreme admissible interval placements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .incidence import build_incidences, select_incomparable
from .poly import poly_sub, sup_abs, sup_abs_batch
from .rectangles import GridCapError, TangencyRect, nearest_grid_rect


@dataclass
class BroadnessCertificate:
    rect_id: int
    mu: int
    eps: float
    B: float
    max_ratio: float
    worst: dict = field(default_factory=dict)
    lattice: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return self.max_ratio <= 1.0 + 1e-12


def _cover_positions(rect: TangencyRect, length: float):
    """Extreme (and middle) placements of a length-``length`` interval containing I(R)."""
    a, b = rect.interval
    x_lo = max(0.0, b - length)
    x_hi = min(a, 1.0 - length)
    if x_hi < x_lo:  # interval longer than the room around R: pin to the unit interval
        return [max(0.0, min(x_lo, 1.0 - length))]
    if x_hi - x_lo < 1e-15:
        return [x_lo]
    return [x_lo, 0.5 * (x_lo + x_hi), x_hi]


def broadness_check(rect: TangencyRect, witnesses, eps: float, B: float,
                    delta: float = None, rect_id: int = 0) -> BroadnessCertificate:
    """Certify: every coarser cover keeps at most B * T^(-eps) of F(R).

    Covers tested: for each dyadic rho = delta*2^j and T = 2^l <= 1/(2 rho),
    the vertical 2*rho neighborhoods of each witness graph over intervals of
    length (T * 2 rho)^(1/k) containing I(R).  A valid certificate forces
    #F(R) >= B^(-1) (2 delta)^(-eps), which is asserted.
    """
    curves = list(witnesses)
    if not curves:
        raise ValueError("broadness needs a nonempty witness set")
    delta = delta if delta is not None else rect.delta
    k = rect.k
    n = len(curves)
    simple = all(len(c.coeffs) <= 3 for c in curves)
    coeff_rows = None
    if simple:
        coeff_rows = np.zeros((n, 3))
        for i, c in enumerate(curves):
            coeff_rows[i, : len(c.coeffs)] = c.coeffs

    # the corner rho = delta, T maximal dyadic is obligatory (each witness is
    # tangent to its own thickened graph there); if it already violates the
    # budget, skip the sweep and report that witness
    ell_corner = int(math.floor(math.log2(1.0 / (2.0 * delta)) + 1e-12))
    if ell_corner >= 0:
        T = 2.0 ** ell_corner
        length = (T * 2.0 * delta) ** (1.0 / k)
        if length <= 1.0 + 1e-12 and 1.0 > B * T ** (-eps) * n:
            lo = _cover_positions(rect, length)[0]
            return BroadnessCertificate(
                rect_id=rect_id, mu=n, eps=eps, B=B,
                max_ratio=1.0 / (B * T ** (-eps) * n),
                worst={"rho": delta, "T": T, "center_curve": 0,
                       "interval": (lo, lo + length), "count": 1,
                       "short_circuit": True},
                lattice={"n_rho": 1, "n_T": 1, "positions_per_cover": 1})

    max_ratio, worst = 0.0, {}
    n_rho = n_t = 0
    j = 0
    while delta * 2.0 ** j <= 0.5 + 1e-12:
        rho = delta * 2.0 ** j
        n_rho += 1
        ell = 0
        while 2.0 ** ell <= 1.0 / (2.0 * rho) + 1e-12:
            T = 2.0 ** ell
            n_t = max(n_t, ell + 1)
            length = (T * 2.0 * rho) ** (1.0 / k)
            if length > 1.0 + 1e-12:
                break
            positions = _cover_positions(rect, length)
            allowance = B * T ** (-eps) * n
            for ci, center in enumerate(curves):
                for x0 in positions:
                    lo, hi = x0, x0 + length
                    if simple:
                        diff = coeff_rows - coeff_rows[ci]
                        sups = sup_abs_batch(diff, lo, hi)
                        count = int(np.sum(sups <= 2.0 * rho * (1.0 + 1e-12)))
                    else:
                        count = sum(
                            1 for c in curves
                            if sup_abs(poly_sub(c.coeffs, center.coeffs), lo, hi)
                            <= 2.0 * rho * (1.0 + 1e-12))
                    ratio = count / allowance
                    if ratio > max_ratio:
                        max_ratio = ratio
                        worst = {"rho": rho, "T": T, "center_curve": ci,
                                 "interval": (lo, hi), "count": count}
            ell += 1
        j += 1
    cert = BroadnessCertificate(rect_id=rect_id, mu=n, eps=eps, B=B,
                                max_ratio=max_ratio, worst=worst,
                                lattice={"n_rho": n_rho, "n_T": n_t,
                                         "positions_per_cover": 3})
    if cert.valid:
        floor = (2.0 * delta) ** (-eps) / B
        assert n >= floor * (1.0 - 1e-9), \
            f"valid certificate with {n} witnesses below the floor {floor:.3g}"
    return cert


def candidate_rects_from_curves(curves, delta: float, k: int):
    """Grid rectangles actually near some curve: one quantization per anchor.

    Enumerate anchors a in delta^(1/k) Z; for each curve keep the nearest
    grid rectangle when it captures the curve within delta/2.  Deduplicated
    and deterministically ordered.
    """
    step = delta ** (1.0 / k)
    n_anchors = int(math.floor(1.0 / step + 1e-9))
    seen = {}
    for ai in range(n_anchors):
        a = ai * step
        if a + step > 1.0 + 1e-12:
            break
        for f in curves:
            rect, dist = nearest_grid_rect(f, delta, k, a)
            if dist <= delta / 2.0 + 1e-15:
                key = (round(a, 12), tuple(np.round(rect.base.coeffs, 14)))
                seen.setdefault(key, rect)
    return [seen[key] for key in sorted(seen.keys())]


def verify_rect_bound(curves, delta: float, k: int, eps: float, eta: float,
                      mu, max_candidates: int = 200_000):
    """Count incomparable mu-rich eps-broad rectangles against the power bound.

    Pipeline: quantized candidate rectangles -> exact incidences -> richness
    filter (>= mu tangent witnesses) -> broadness certificates with error
    B = delta^(-eta) -> greedy incomparable selection.  The reported bound is
    delta^(-eps) * (#F/mu)^((k+1)/k).  ``mu`` may be a list; the expensive
    stages (candidates, incidences, certificates) are shared across values.
    """
    curves = list(curves)
    mus = [int(mu)] if np.ndim(mu) == 0 else [int(v) for v in mu]
    reports = []
    if not curves:
        for m in mus:
            reports.append({"delta": delta, "k": k, "eps": eps, "eta": eta, "mu": m,
                            "n_curves": 0, "bound": 0.0, "observed": 0, "pass": True,
                            "stages": {"candidates": 0, "rich": 0, "broad": 0,
                                       "incomparable": 0},
                            "lattice_stats": {}})
        return reports[0] if np.ndim(mu) == 0 else reports
    cands = candidate_rects_from_curves(curves, delta, k)
    if len(cands) > max_candidates:
        raise GridCapError(f"{len(cands)} candidate rectangles exceed cap {max_candidates}")
    graph = build_incidences(curves, cands)
    B = delta ** (-eta)
    mu_min = min(mus)
    certs = {}
    lattice_stats = {}
    for i, r in enumerate(cands):
        wit_idx = graph.witnesses.get(i, [])
        if len(wit_idx) < mu_min:
            continue
        cert = broadness_check(r, [curves[j] for j in wit_idx], eps, B,
                               delta=delta, rect_id=i)
        certs[i] = cert
        lattice_stats = cert.lattice
    for m in mus:
        rich = [i for i in range(len(cands)) if len(graph.witnesses.get(i, [])) >= m]
        broad = [cands[i] for i in rich if certs[i].valid]
        kept, _ = select_incomparable(broad)
        bound = delta ** (-eps) * (len(curves) / m) ** ((k + 1.0) / k)
        reports.append({"delta": delta, "k": k, "eps": eps, "eta": eta, "mu": m,
                        "n_curves": len(curves), "bound": bound,
                        "observed": len(kept), "pass": len(kept) <= bound,
                        "stages": {"candidates": len(cands), "rich": len(rich),
                                   "broad": len(broad), "incomparable": len(kept)},
                        "lattice_stats": lattice_stats})
    return reports[0] if np.ndim(mu) == 0 else reports


def random_refine(curves, p: float, seed: int, reps: int = 0, A: float = 2.0):
    """Bernoulli(p) refinement of a curve list, with optional Chernoff tallies.

    Keep decisions use one counter-based stream per curve, so the refinement
    is reproducible under any work partition.  With ``reps`` > 0, the report
    tallies the empirical frequencies of {X <= pn/2} and {X >= Apn} across
    repetitions against exp(-pn/8) and exp(-Apn/6).
    """
    if not (0.0 < p <= 1.0):
        raise ValueError("p must lie in (0, 1]")
    curves = list(curves)
    n = len(curves)
    keep = [rng.stream(seed, i).random() < p for i in range(n)]
    refined = [c for c, k_ in zip(curves, keep) if k_]
    report = {"p": p, "n": n, "kept": len(refined), "A": A}
    if reps > 0 and n > 0:
        lows = highs = 0
        for rep in range(reps):
            x = int(np.sum(rng.stream(seed, rep, 1).random(n) < p))
            lows += x <= p * n / 2.0
            highs += x >= A * p * n
        report.update({
            "reps": reps,
            "freq_low": lows / reps,
            "freq_high": highs / reps,
            "bound_low": math.exp(-p * n / 8.0),
            "bound_high": math.exp(-A * p * n / 6.0),
        })
    return refined, report
