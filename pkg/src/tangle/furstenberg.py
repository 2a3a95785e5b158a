"""Discretized Furstenberg instances of curves and the union-measure bound.

An instance is a (delta, beta; C)-set of curves, each carrying a shading
that is a (delta, alpha; C)-set inside the 2*delta-neighborhood of its
graph.  The measure bound on the union is checked through the same pairing
and Hoelder chain that proves it, each link as a numeric inequality.
"""

from __future__ import annotations

import json
import os
import struct
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .coverings import digit_restricted_set, is_delta_alpha, stripe_intervals
from .poly import PolyCurve, poly_eval
from .raster import Raster, Shading, lp_count_norm, rasterize, union_area


class InstanceValidationError(ValueError):
    """A Furstenberg instance violates one of its defining inequalities."""


@dataclass
class FurstenbergInstance:
    """Curves, per-curve shadings, and the claimed (delta, alpha, beta; C) data."""

    curves: list
    shadings: list
    delta: float
    alpha: float
    beta: float
    C: float
    k: int
    raster: Raster
    meta: dict = field(default_factory=dict)

    def validate(self, check_alpha_sets: bool = True):
        """Check the defining inequalities; raises on violation.

        #F >= C^-1 delta^-beta, each |A_f| >= C^-1 delta^(2-alpha), shadings
        inside f^(2 delta), and (on request) the per-shading alpha condition
        on abscissas.
        """
        n_needed = self.delta ** (-self.beta) / self.C
        if len(self.curves) < n_needed - 1e-9:
            raise InstanceValidationError(
                f"family of {len(self.curves)} curves below C^-1 delta^-beta = {n_needed:.3g}")
        area_needed = self.delta ** (2.0 - self.alpha) / self.C
        h = self.raster.h
        (x0, _), (y0, _) = self.raster.extent
        for f, sh in zip(self.curves, self.shadings):
            if sh.area() < area_needed * (1.0 - 1e-9):
                raise InstanceValidationError(
                    f"shading area {sh.area():.3g} below C^-1 delta^(2-alpha) = {area_needed:.3g}")
            if not sh.cols.size:
                continue
            # containment in f^(2 delta): every cell's y-range near the graph
            t0 = x0 + sh.cols * h
            v0 = poly_eval(f.coeffs, t0)
            v1 = poly_eval(f.coeffs, t0 + h)
            band_lo = np.minimum(v0, v1) - 2.0 * self.delta - h
            band_hi = np.maximum(v0, v1) + 2.0 * self.delta + h
            bad = (y0 + sh.lo * h < band_lo - 1e-12) | (y0 + (sh.hi + 1) * h > band_hi + 1e-12)
            if np.any(bad):
                raise InstanceValidationError(
                    f"shading cell outside the 2*delta neighborhood (curve {sh.curve_id})")
        if check_alpha_sets:
            for sh in self.shadings:
                xs = (sh.cols + 0.5) * h
                ok, worst = is_delta_alpha(xs, self.delta, self.alpha, 4.0 * self.C)
                if not ok:
                    raise InstanceValidationError(
                        f"shading abscissas fail the alpha condition: {worst}")
        return True


def furstenberg_check(instance: FurstenbergInstance, eps: float, validate: bool = True):
    """Verify the Hoelder chain and |E| >= delta^(2-alpha-beta+eps).

    Chain links, each checked numerically on the raster:
      pairing = ||chi_E sum chi_A||_1 = sum |A_f|           (E is the union)
      pairing <= ||chi_E||_{k+1} * ||sum chi_A||_{(k+1)/k}  (Hoelder)
      |E| >= (pairing / ||sum chi_A||)^{k+1}                (rearranged)
    """
    if validate:
        instance.validate()
    k = instance.k
    delta, alpha, beta = instance.delta, instance.alpha, instance.beta
    shadings = instance.shadings
    raster = instance.raster
    area = union_area(shadings, raster)
    pairing = float(sum(sh.area() for sh in shadings))  # counts are additive
    p_hi = k + 1.0
    p_lo = (k + 1.0) / k
    chi_e_norm = area ** (1.0 / p_hi)
    count_norm = lp_count_norm(shadings, p_lo, raster)
    holder_ok = pairing <= chi_e_norm * count_norm * (1.0 + 1e-9)
    bound = delta ** (2.0 - alpha - beta + eps)
    report = {
        "delta": delta, "alpha": alpha, "beta": beta, "eps": eps, "k": k,
        "n_curves": len(instance.curves),
        "union_area": area,
        "pairing_l1": pairing,
        "chi_E_norm": chi_e_norm,
        "count_norm": count_norm,
        "holder_ok": bool(holder_ok),
        "implied_area_floor": (pairing / count_norm) ** p_hi if count_norm > 0 else 0.0,
        "bound": bound,
        "bound_ok": bool(area >= bound),
        "pass": bool(holder_ok and area >= bound),
    }
    return report


def random_instance(delta: float, alpha: float, beta: float, k: int, seed: int,
                    raster: Raster = None, C: float = 4.0) -> FurstenbergInstance:
    """Seeded instance: vertical translates of one curve over a beta-set,
    shaded over per-curve alpha-sets of abscissas.

    Translation makes the C^k distance between two members exactly their
    offset gap, so the beta-set structure of the offsets transfers to the
    family verbatim.
    """
    raster = raster or Raster(h=delta / 4.0)
    g = rng.stream(seed)
    # gentle common curvature; offsets carry the set structure
    slope = g.uniform(-0.2, 0.2)
    quad = g.uniform(-0.2, 0.2) if k >= 2 else 0.0
    offsets = digit_restricted_set(delta, beta, seed=seed + 1)
    offsets = offsets * 0.5 - 0.25  # fit the vertical extent with room for the curve
    curves = [PolyCurve([b, slope, quad][: k + 1]) for b in offsets]
    shadings = []
    for i, f in enumerate(curves):
        stripes_pts = digit_restricted_set(delta, alpha, seed=seed + 2 + i)
        sh = rasterize(f, delta, raster,
                       stripes=stripe_intervals(stripes_pts, delta), curve_id=i)
        shadings.append(sh)
    return FurstenbergInstance(curves=curves, shadings=shadings, delta=delta,
                               alpha=alpha, beta=beta, C=C, k=k, raster=raster,
                               meta={"seed": seed, "slope": slope, "quad": quad})


def quasi_product_bound(shadings, raster: Raster, delta: float, alpha: float,
                        q: float, eta: float = 0.0):
    """Check the quasi-product inequalities for a union of shadings.

    Projection covering number <= delta^-eta * delta^-alpha; every fiber
    covering number <= delta^-eta * delta^-q; total measure
    <= delta^(2-alpha-q-2*eta).
    """
    cols = sorted(set(int(c) for sh in shadings for c in sh.cols))
    h = raster.h
    xs = (np.array(cols, dtype=float) + 0.5) * h
    from .coverings import covering_number

    proj_cover, _ = covering_number(xs, delta) if len(xs) else (0, 0)
    proj_budget = delta ** (-eta) * delta ** (-alpha)
    fiber_worst = 0
    per_col = {}
    for sh in shadings:
        for c, lo, hi in zip(sh.cols, sh.lo, sh.hi):
            per_col.setdefault(int(c), []).append((int(lo), int(hi)))
    for c, runs in per_col.items():
        ys = []
        for lo, hi in runs:
            ys.extend(range(lo, hi + 1))
        yv = (np.unique(np.array(ys, dtype=float)) + 0.5) * h
        cover, _ = covering_number(yv, delta)
        fiber_worst = max(fiber_worst, cover)
    fiber_budget = delta ** (-eta) * delta ** (-q)
    area = union_area(shadings, raster)
    area_budget = delta ** (2.0 - alpha - q - 2.0 * eta)
    return {
        "projection_cover": proj_cover, "projection_budget": proj_budget,
        "projection_ok": proj_cover <= proj_budget * (1.0 + 1e-9),
        "fiber_cover_max": fiber_worst, "fiber_budget": fiber_budget,
        "fiber_ok": fiber_worst <= fiber_budget * (1.0 + 1e-9),
        "area": area, "area_budget": area_budget,
        "area_ok": area <= area_budget * (1.0 + 1e-9),
        "pass": bool(proj_cover <= proj_budget * (1.0 + 1e-9)
                     and fiber_worst <= fiber_budget * (1.0 + 1e-9)
                     and area <= area_budget * (1.0 + 1e-9)),
    }


def save_instance_bundle(instance: FurstenbergInstance, outdir: str,
                         report: dict = None):
    """Directory bundle: family.json, stripes.json, cells.rle, report.json."""
    os.makedirs(outdir, exist_ok=True)
    from .poly import family_to_json

    with open(os.path.join(outdir, "family.json"), "w") as fh:
        fh.write(family_to_json(list(instance.curves), instance.k,
                                provenance=json.dumps(instance.meta, sort_keys=True)))
    stripes_doc = []
    for sh in instance.shadings:
        stripes_doc.append({"curve_id": sh.curve_id,
                            "intervals": [[a, b] for a, b in (sh.stripe or [])]})
    with open(os.path.join(outdir, "stripes.json"), "w") as fh:
        json.dump({"delta": instance.delta, "alpha": instance.alpha,
                   "beta": instance.beta, "C": instance.C,
                   "stripes": stripes_doc}, fh)
    with open(os.path.join(outdir, "cells.rle"), "wb") as fh:
        write_rle_shadings(instance.shadings, fh)
    doc = {"delta": instance.delta, "alpha": instance.alpha, "beta": instance.beta,
           "C": instance.C, "k": instance.k, "n_curves": len(instance.curves),
           "raster_h": instance.raster.h, "meta": instance.meta}
    if report is not None:
        doc["check"] = report
    with open(os.path.join(outdir, "report.json"), "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


_RLE_MAGIC = b"TGRL"


def write_rle_shadings(shadings, fh):
    """Binary run-length cell lists: per shading, (col, lo, hi) uint32 triples."""
    fh.write(_RLE_MAGIC)
    fh.write(struct.pack("<I", len(shadings)))
    for sh in shadings:
        fh.write(struct.pack("<IdI", sh.curve_id, sh.delta, len(sh.cols)))
        arr = np.stack([sh.cols, sh.lo, sh.hi], axis=1).astype("<u4")
        fh.write(arr.tobytes())


def read_rle_shadings(fh, raster: Raster):
    head = fh.read(4)
    if head != _RLE_MAGIC:
        raise ValueError("not a shading run-length file")
    (n,) = struct.unpack("<I", fh.read(4))
    out = []
    for _ in range(n):
        curve_id, delta, runs = struct.unpack("<IdI", fh.read(16))
        arr = np.frombuffer(fh.read(12 * runs), dtype="<u4").reshape(runs, 3)
        out.append(Shading(raster=raster, delta=delta, curve_id=curve_id,
                           cols=arr[:, 0].astype(np.int64),
                           lo=arr[:, 1].astype(np.int64),
                           hi=arr[:, 2].astype(np.int64)))
    return out
