import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tangle.coverings import (
    cantor_generator,
    covering_number,
    digit_restricted_set,
    is_delta_alpha,
    make_striped_shading,
    stripe_intervals,
)
from tangle.furstenberg import (
    InstanceValidationError,
    furstenberg_check,
    quasi_product_bound,
    random_instance,
    read_rle_shadings,
    save_instance_bundle,
    write_rle_shadings,
)
from tangle.poly import PolyCurve
from tangle.raster import Raster, rasterize
from tangle.rectangles import TangencyRect


class TestCoveringNumber:
    def test_two_points(self):
        net, packing = covering_number(np.array([0.0, 1.0]), 0.1)
        assert (net, packing) == (2, 2)

    def test_midpoint_ball_covers_two(self):
        net, packing = covering_number(np.array([0.0, 0.5, 1.0]), 0.4)
        assert (net, packing) == (2, 2)

    def test_middle_half_cantor_net(self):
        # level-n middle-half set: 2^n points, delta-separated at 4^-n
        cs, ok, _ = cantor_generator(4.0 ** -5, 0.5, spread=True)
        assert len(cs) == 2 ** 5
        net, _ = covering_number(cs.points, 4.0 ** -5)
        assert net == 2 ** 5
        for j in (1, 2, 3):
            net_j, _ = covering_number(cs.points, 4.0 ** -j)
            assert net_j == 2 ** j

    def test_sandwich_everywhere(self):
        gen = np.random.default_rng(0)
        for _ in range(50):
            pts = gen.uniform(0, 1, int(gen.integers(2, 40)))
            d = float(gen.uniform(0.01, 0.3))
            net, packing = covering_number(pts, d)
            assert packing <= net


class TestIsDeltaAlpha:
    def test_single_point(self):
        ok, worst = is_delta_alpha(np.array([0.42]), 0.01, 0.5, 1.0)
        assert ok

    def test_full_grid_alpha_one(self):
        d = 2.0 ** -8
        ok, _ = is_delta_alpha(np.arange(0, 1, d), d, 1.0, 4.0)
        assert ok

    def test_full_grid_fails_alpha_half(self):
        # direct count: covering the r=1/2 ball needs ~ r/(3 delta) balls,
        # above 4 (r/delta)^(1/2) once delta <= 2^-8
        d = 2.0 ** -8
        ok, worst = is_delta_alpha(np.arange(0, 1, d), d, 0.5, 4.0)
        assert not ok
        assert worst["ratio"] > 1.5

    @given(st.integers(0, 10_000))
    @settings(max_examples=30, deadline=None)
    def test_monotone_in_C_and_alpha(self, seed):
        g = np.random.default_rng(seed)
        pts = g.uniform(0, 1, 48)
        d = 2.0 ** -7
        ok_base, _ = is_delta_alpha(pts, d, 0.6, 2.0)
        if ok_base:
            assert is_delta_alpha(pts, d, 0.6, 4.0)[0]   # larger C
            assert is_delta_alpha(pts, d, 0.8, 2.0)[0]   # larger alpha


class TestCantor:
    def test_alpha_one_full_grid(self):
        cs, ok, _ = cantor_generator(2.0 ** -6, 1.0, M=2)
        assert ok
        assert len(cs) == 2 ** 6

    def test_alpha_half_randomized(self):
        cs, ok, worst = cantor_generator(4.0 ** -5, 0.5, seed=3)
        assert ok, worst
        assert len(cs) == 2 ** 5
        assert cs.delta == 4.0 ** -5

    def test_single_branch_limit(self):
        cs, ok, _ = cantor_generator(4.0 ** -4, 0.05, seed=1, M=4)
        assert len(cs) == 1  # one branch per level: a singleton at every scale

    def test_nearest_admissible_delta(self):
        cs, _, _ = cantor_generator(0.7 * 4.0 ** -3, 0.5, M=4)
        assert cs.delta == 4.0 ** -3

    def test_digit_set_counts(self):
        ds = digit_restricted_set(2.0 ** -8, 0.6, seed=0)
        assert len(ds) == 2 ** 5
        ok, _ = is_delta_alpha(ds, 2.0 ** -8, 0.6, 4.0)
        assert ok


class TestStripedShading:
    def test_full_stripes_equal_plain(self):
        d = 2.0 ** -6
        r = Raster(h=2.0 ** -9)
        f = PolyCurve([0.1, 0.2])
        plain = rasterize(f, d, r)
        full = make_striped_shading(f, d, d, np.arange(0, 1, d), r)
        assert np.array_equal(plain.cols, full.cols)
        assert np.array_equal(plain.lo, full.lo)

    def test_empty_abscissas(self):
        d = 2.0 ** -6
        r = Raster(h=2.0 ** -9)
        sh = make_striped_shading(PolyCurve([0.0]), d, d, np.array([]), r)
        assert sh.cell_count() == 0

    def test_cell_count_oracle(self):
        # brute-force cell count agrees with the shading construction
        d = 2.0 ** -5
        h = 2.0 ** -8
        r = Raster(h=h)
        pts = digit_restricted_set(2.0 ** -5, 0.5, seed=2)
        f = PolyCurve([0.25])
        sh = make_striped_shading(f, d, d, pts, r)
        stripes = stripe_intervals(pts, d)
        count = 0
        for i in range(r.nx):
            t0, t1 = i * h, (i + 1) * h
            if not any(a < t1 and b > t0 for a, b in stripes):
                continue
            lo_y, hi_y = 0.25 - d, 0.25 + d
            j0 = math.floor((lo_y + 1.0) / h)
            j1 = math.floor((hi_y + 1.0) / h)
            if (hi_y + 1.0) / h == j1:
                j1 -= 1
            count += j1 - j0 + 1
        assert count == sh.cell_count()

    def test_rescaling_stripe_covariance(self):
        # mapping a striped shading through the rectangle normalization takes
        # (tau, alpha)-stripes to (tau/rho^(1/k), alpha)-stripes: covering
        # numbers of the image abscissas match within a factor 4
        k, rho = 2, 2.0 ** -4
        tau = 2.0 ** -8
        base = PolyCurve([0.0])
        S = TangencyRect(base=base, anchor=0.0, delta=rho, k=k)
        pts = digit_restricted_set(2.0 ** -8, 0.5, seed=5) * S.length  # inside I(S)
        image_pts = (pts - S.anchor) / S.length
        for r_scale in (2.0 ** -6, 2.0 ** -4, 2.0 ** -2):
            c_src, _ = covering_number(pts, tau)
            c_img, _ = covering_number(image_pts, tau / S.length)
            assert c_img <= 4 * c_src and c_src <= 4 * c_img


class TestFurstenberg:
    def test_degenerate_single_cell(self):
        # alpha = beta = 0: one curve, one stripe point
        d = 2.0 ** -6
        r = Raster(h=d / 4)
        f = PolyCurve([0.0])
        sh = make_striped_shading(f, d, d, np.array([0.5]), r, curve_id=0)
        from tangle.furstenberg import FurstenbergInstance

        inst = FurstenbergInstance(curves=[f], shadings=[sh], delta=d, alpha=0.0,
                                   beta=0.0, C=4.0, k=1, raster=r)
        rep = furstenberg_check(inst, eps=0.0)
        assert rep["union_area"] >= d * d / 4.0  # comfortably above C^-1 delta^2
        assert rep["holder_ok"]

    def test_single_curve_full_shading(self):
        # beta = 0 single curve, alpha = 1 full shading: |E| ~ 2 delta^2/delta
        d = 2.0 ** -8
        r = Raster(h=d / 4)
        f = PolyCurve([0.0])
        sh = rasterize(f, d, r, curve_id=0)
        from tangle.furstenberg import FurstenbergInstance

        inst = FurstenbergInstance(curves=[f], shadings=[sh], delta=d, alpha=1.0,
                                   beta=0.0, C=4.0, k=2, raster=r)
        rep = furstenberg_check(inst, eps=0.3)
        assert rep["holder_ok"]
        assert rep["union_area"] >= d ** (2 - 1 - 0 + 0.3)
        assert abs(rep["union_area"] - 2 * d) <= 6 * r.h

    def test_random_instance_passes(self):
        inst = random_instance(2.0 ** -8, 0.8, 0.5, 2, seed=11)
        rep = furstenberg_check(inst, eps=0.3)
        assert rep["pass"] and rep["holder_ok"]

    def test_validation_catches_displaced_shading(self):
        d = 2.0 ** -6
        inst = random_instance(d, 0.8, 0.5, 1, seed=3)
        rogue = rasterize(PolyCurve([0.9]), d, inst.raster, curve_id=0)
        inst.shadings[0] = rogue
        with pytest.raises(InstanceValidationError):
            inst.validate()


class TestQuasiProduct:
    def test_full_square(self):
        d = 2.0 ** -6
        r = Raster(h=d / 4)
        shadings = [rasterize(PolyCurve([y]), d, r, curve_id=i)
                    for i, y in enumerate(np.arange(0.0, 0.9, 2 * d))]
        rep = quasi_product_bound(shadings, r, d, 1.0, 1.0, eta=0.0)
        assert rep["area_ok"]  # measure bound delta^0 = 1 >= |X|

    def test_cantor_product_equality_regime(self):
        d = 4.0 ** -3
        r = Raster(h=d / 4)
        cs, _, _ = cantor_generator(d, 0.5, seed=2, spread=True)
        shadings = []
        for i, y in enumerate(cs.points):
            yy = y - 0.5  # center vertically
            sh = make_striped_shading(PolyCurve([yy]), d, d, cs.points, r, curve_id=i)
            shadings.append(sh)
        rep = quasi_product_bound(shadings, r, d, 0.5, 0.5, eta=0.3)
        assert rep["pass"], rep

    def test_fiber_violation_reported(self):
        d = 2.0 ** -6
        r = Raster(h=d / 4)
        shadings = [rasterize(PolyCurve([y]), d, r, curve_id=i)
                    for i, y in enumerate(np.arange(-0.5, 0.5, 2 * d))]
        rep = quasi_product_bound(shadings, r, d, 1.0, 0.0, eta=0.0)
        assert not rep["fiber_ok"] and not rep["pass"]


class TestBundles:
    def test_rle_round_trip(self, tmp_path):
        import io

        d = 2.0 ** -6
        r = Raster(h=d / 4)
        shadings = [rasterize(PolyCurve([0.1 * i]), d, r, curve_id=i) for i in range(3)]
        buf = io.BytesIO()
        write_rle_shadings(shadings, buf)
        buf.seek(0)
        back = read_rle_shadings(buf, r)
        for a, b in zip(shadings, back):
            assert a.curve_id == b.curve_id
            assert np.array_equal(a.cols, b.cols)
            assert np.array_equal(a.lo, b.lo)
            assert np.array_equal(a.hi, b.hi)

    def test_bundle_directory(self, tmp_path):
        import json as _json

        inst = random_instance(2.0 ** -6, 0.8, 0.5, 1, seed=1)
        out = tmp_path / "bundle"
        save_instance_bundle(inst, str(out), report=furstenberg_check(inst, 0.3))
        assert (out / "family.json").exists()
        assert (out / "stripes.json").exists()
        assert (out / "cells.rle").exists()
        doc = _json.loads((out / "report.json").read_text())
        assert doc["check"]["pass"] is True
