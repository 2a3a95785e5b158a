"""Rasterized shadings of curve neighborhoods and exact-on-the-grid norms.

Shadings are stored per column as contiguous row ranges (a vertical
neighborhood always meets a column in one run), so count fields are
accumulated with a difference trick and norms stream over column blocks
without materializing the full grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .poly import PolyCurve, poly_der, poly_eval, real_roots


class RasterTooCoarse(ValueError):
    """Cell size exceeds delta/4 for the requested shading."""


@dataclass(frozen=True)
class Raster:
    """Cell grid on [0,1] x [-1,1]; ``h`` must be a power-of-two reciprocal."""

    h: float
    extent: tuple = ((0.0, 1.0), (-1.0, 1.0))

    def __post_init__(self):
        q = math.log2(1.0 / self.h)
        if abs(q - round(q)) > 1e-9:
            raise ValueError(f"h={self.h} is not a reciprocal power of two")

    @property
    def nx(self) -> int:
        (x0, x1), _ = self.extent
        return int(round((x1 - x0) / self.h))

    @property
    def ny(self) -> int:
        _, (y0, y1) = self.extent
        return int(round((y1 - y0) / self.h))

    def col_span(self, i):
        (x0, _), _ = self.extent
        return (x0 + i * self.h, x0 + (i + 1) * self.h)


@dataclass(frozen=True)
class Shading:
    """Cells within a curve's vertical delta-neighborhood (column runs)."""

    raster: Raster
    delta: float
    curve_id: int
    cols: np.ndarray          # active column indices, increasing
    lo: np.ndarray            # first row per active column (inclusive)
    hi: np.ndarray            # last row per active column (inclusive)
    stripe: object = None     # abscissa set used to cut columns, if any

    def cell_count(self) -> int:
        return int(np.sum(self.hi - self.lo + 1)) if self.cols.size else 0

    def area(self) -> float:
        return self.cell_count() * self.raster.h ** 2


def _column_ranges(f: PolyCurve, raster: Raster):
    """Exact (min, max) of f over every column t-span, via edges + critical points."""
    (x0, x1), _ = raster.extent
    nx = raster.nx
    edges = x0 + raster.h * np.arange(nx + 1)
    lo_dom, hi_dom = f.domain
    vals = poly_eval(f.coeffs, np.clip(edges, lo_dom, hi_dom))
    mins = np.minimum(vals[:-1], vals[1:])
    maxs = np.maximum(vals[:-1], vals[1:])
    der = poly_der(f.coeffs)
    if len(der) > 1 or der[0] != 0.0:
        crit = real_roots(der, max(x0, lo_dom), min(x1, hi_dom))
        if crit.size:
            cv = poly_eval(f.coeffs, crit)
            idx = np.clip(((crit - x0) / raster.h).astype(int), 0, nx - 1)
            np.minimum.at(mins, idx, cv)
            np.maximum.at(maxs, idx, cv)
    return mins, maxs


def _stripe_mask(raster: Raster, stripes) -> np.ndarray:
    """Columns whose t-span meets the union of closed stripe intervals."""
    (x0, _), _ = raster.extent
    nx = raster.nx
    mask = np.zeros(nx, dtype=bool)
    for a, b in stripes:
        first = int(math.floor((a - x0) / raster.h))
        last = int(math.floor((b - x0) / raster.h))
        if b == x0 + last * raster.h and last > first:
            last -= 1  # half-open columns: touching at the seam only
        mask[max(first, 0): min(last, nx - 1) + 1] = True
    return mask


def rasterize(f: PolyCurve, delta: float, raster: Raster, stripes=None,
              curve_id: int = 0) -> Shading:
    """Cells meeting the closed vertical delta-neighborhood of f.

    A cell is included iff its t-span meets the stripe set (when given) and
    the exact range of f over that span, widened by delta, meets the cell's
    y-span.  The result covers the true neighborhood and is contained in the
    (delta + 2h)-neighborhood.
    """
    if raster.h > delta / 4.0 + 1e-15:
        raise RasterTooCoarse(f"h={raster.h} > delta/4={delta / 4.0}")
    _, (y0, y1) = raster.extent
    nx, ny = raster.nx, raster.ny
    mins, maxs = _column_ranges(f, raster)
    A = mins - delta
    B = maxs + delta
    lo = np.floor((A - y0) / raster.h).astype(np.int64)
    hi = np.floor((B - y0) / raster.h).astype(np.int64)
    hi = np.where((B - y0) / raster.h == hi, hi - 1, hi)  # top edge exactly on a seam
    active = (hi >= 0) & (lo <= ny - 1)
    if stripes is not None:
        active &= _stripe_mask(raster, stripes)
    # clip curve domain to columns it actually spans
    (x0, _), _ = raster.extent
    dom_lo, dom_hi = f.domain
    col_centers_lo = x0 + raster.h * np.arange(nx)
    active &= (col_centers_lo + raster.h > dom_lo - 1e-15) & (col_centers_lo < dom_hi + 1e-15)
    cols = np.nonzero(active)[0]
    return Shading(raster=raster, delta=delta, curve_id=curve_id, cols=cols,
                   lo=np.clip(lo[cols], 0, ny - 1), hi=np.clip(hi[cols], 0, ny - 1),
                   stripe=stripes)


def iter_count_blocks(shadings, raster: Raster, weights=None, block: int = 1024):
    """Yield (col_start, field) for consecutive column blocks.

    ``field`` has shape (block_width, ny); entry (i, j) is the (weighted)
    number of shadings covering that cell.  Uses a difference array along y
    and one cumulative sum per block, so cost is #cells + #runs.
    """
    nx, ny = raster.nx, raster.ny
    dtype = np.float64 if weights is not None else np.int32
    for start in range(0, nx, block):
        width = min(block, nx - start)
        diff = np.zeros((width, ny + 1), dtype=dtype)
        for idx, sh in enumerate(shadings):
            w = 1 if weights is None else weights[idx]
            sel = (sh.cols >= start) & (sh.cols < start + width)
            if not np.any(sel):
                continue
            c = sh.cols[sel] - start
            np.add.at(diff, (c, sh.lo[sel]), w)
            np.add.at(diff, (c, sh.hi[sel] + 1), -w)
        yield start, np.cumsum(diff[:, :-1], axis=1)


def lp_count_norm(shadings, p: float, raster: Raster = None) -> float:
    """(sum_cells count^p * h^2)^(1/p); exact for the rasterized counts."""
    if p < 1:
        raise ValueError("p must be >= 1")
    shadings = list(shadings)
    if not shadings:
        return 0.0
    raster = raster or shadings[0].raster
    total = 0.0
    for _, field_block in iter_count_blocks(shadings, raster):
        total += float(np.sum(field_block.astype(np.float64) ** p))
    return (total * raster.h ** 2) ** (1.0 / p)


def union_area(shadings, raster: Raster = None) -> float:
    shadings = list(shadings)
    if not shadings:
        return 0.0
    raster = raster or shadings[0].raster
    cells = 0
    for _, field_block in iter_count_blocks(shadings, raster):
        cells += int(np.count_nonzero(field_block))
    return cells * raster.h ** 2


def weighted_dual_norm(shadings, weights, p_dual: float, raster: Raster = None):
    """L^p' norm of sum_j y_j chi_j, plus its dyadic-class triangle majorant.

    Classes: |y| <= 1, then 2^k <= |y| < 2^{k+1}; the majorant is
    sum over classes of (class weight cap) * ||sum of class indicators||_{p'}.
    """
    shadings = list(shadings)
    weights = np.asarray(weights, dtype=float)
    if len(shadings) != len(weights):
        raise ValueError("one weight per shading")
    if not np.all(np.isfinite(weights)):
        raise ValueError("weights must be finite")
    raster = raster or shadings[0].raster
    total = 0.0
    for _, field_block in iter_count_blocks(shadings, raster, weights=np.abs(weights)):
        total += float(np.sum(np.abs(field_block) ** p_dual))
    direct = (total * raster.h ** 2) ** (1.0 / p_dual)

    majorant = 0.0
    mags = np.abs(weights)
    caps = [(mags <= 1.0, 1.0)]
    kmax = 0 if not len(mags) or mags.max() <= 1 else int(math.floor(math.log2(mags.max())))
    for k in range(0, kmax + 1):
        sel = (mags >= 2.0 ** k) & (mags < 2.0 ** (k + 1))
        caps.append((sel, 2.0 ** (k + 1)))
    for sel, cap in caps:
        group = [sh for sh, keep in zip(shadings, sel) if keep]
        if group:
            majorant += cap * lp_count_norm(group, p_dual, raster)
    return direct, majorant


def dump_pgm(shadings, raster: Raster, path: str):
    """Binary PGM (P5) of the count field for eyeballing; y increases upward."""
    nx, ny = raster.nx, raster.ny
    img = np.zeros((nx, ny), dtype=np.int64)
    for start, field_block in iter_count_blocks(shadings, raster):
        img[start: start + field_block.shape[0]] = field_block
    peak = max(int(img.max()), 1)
    scaled = (img.T[::-1] * (255.0 / peak)).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{nx} {ny}\n255\n".encode())
        fh.write(scaled.tobytes())


@dataclass
class GridFunction:
    """A piecewise-constant function on a free-extent cell grid.

    Used as the integrand for the maximal operators; column prefix sums make
    vertical slab integrals O(1) per lookup.
    """

    values: np.ndarray                      # shape (nx, ny)
    extent: tuple                           # ((x0, x1), (y0, y1))
    _colsum: np.ndarray = field(default=None, repr=False)

    @property
    def h(self) -> float:
        (x0, x1), _ = self.extent
        return (x1 - x0) / self.values.shape[0]

    @classmethod
    def from_callable(cls, fn, extent, h):
        (x0, x1), (y0, y1) = extent
        nx = int(round((x1 - x0) / h))
        ny = int(round((y1 - y0) / h))
        xc = x0 + h * (np.arange(nx) + 0.5)
        yc = y0 + h * (np.arange(ny) + 0.5)
        vals = np.array([[fn(x, y) for y in yc] for x in xc], dtype=float)
        return cls(values=vals, extent=((x0, x0 + nx * h), (y0, y0 + ny * h)))

    @classmethod
    def indicator_box(cls, box, extent, h):
        (bx0, bx1), (by0, by1) = box
        return cls.from_callable(
            lambda x, y: 1.0 if (bx0 <= x <= bx1 and by0 <= y <= by1) else 0.0,
            extent, h)

    def sample(self, xs, ys):
        """Cell values at points; zero outside the extent."""
        (x0, x1), (y0, y1) = self.extent
        nx, ny = self.values.shape
        i = np.floor((np.asarray(xs) - x0) / self.h).astype(np.int64)
        j = np.floor((np.asarray(ys) - y0) / self.h).astype(np.int64)
        ok = (i >= 0) & (i < nx) & (j >= 0) & (j < ny)
        out = np.zeros(np.broadcast(i, j).shape)
        ii, jj = np.broadcast_arrays(i, j)
        out[ok] = self.values[ii[ok], jj[ok]]
        return out

    def column_slab_integral(self, xs, y_lo, y_hi):
        """Integral of f over {x fixed} x [y_lo, y_hi] per column containing xs.

        Linear interpolation of the column prefix sums makes this exact for
        the piecewise-constant grid function.
        """
        if self._colsum is None:
            self._colsum = np.concatenate(
                [np.zeros((self.values.shape[0], 1)),
                 np.cumsum(self.values, axis=1) * self.h], axis=1)
        (x0, _), (y0, y1) = self.extent
        nx, ny = self.values.shape
        i = np.floor((np.asarray(xs) - x0) / self.h).astype(np.int64)
        inside = (i >= 0) & (i < nx)
        i = np.clip(i, 0, nx - 1)

        def lookup(y):
            pos = np.clip((np.asarray(y) - y0) / self.h, 0.0, ny)
            j = np.minimum(pos.astype(np.int64), ny - 1)
            frac = pos - j
            return self._colsum[i, j] + frac * (self._colsum[i, j + 1] - self._colsum[i, j])

        out = lookup(y_hi) - lookup(y_lo)
        return np.where(inside, out, 0.0)

    def lp_norm(self, p: float) -> float:
        return float((np.sum(np.abs(self.values) ** p) * self.h ** 2) ** (1.0 / p))

    def support_bbox(self, pad: float = 0.0):
        nz = np.nonzero(self.values)
        (x0, _), (y0, _) = self.extent
        if nz[0].size == 0:
            return None
        return ((x0 + nz[0].min() * self.h - pad, x0 + (nz[0].max() + 1) * self.h + pad),
                (y0 + nz[1].min() * self.h - pad, y0 + (nz[1].max() + 1) * self.h + pad))
