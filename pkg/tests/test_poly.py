import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tangle.poly import (
    DomainError,
    PolyCurve,
    ck_norm,
    eval_jet,
    family_from_json,
    family_to_json,
    inf_abs_jet_sum,
    poly_compose_affine,
    poly_eval,
    real_roots,
    sup_abs,
    sup_abs_batch,
    taylor_coeffs,
)


def central_diff(f, t, order, h=1e-5):
    # finite-difference oracle, independent of the derivative-coefficient path
    if order == 0:
        return f(t)
    if order == 1:
        return (f(t + h) - f(t - h)) / (2 * h)
    return (central_diff(f, t + h, order - 1, h) - central_diff(f, t - h, order - 1, h)) / (2 * h)


class TestEvalJet:
    def test_square(self):
        f = PolyCurve([0.0, 0.0, 1.0])
        jp = eval_jet(f, 1, 0.5)
        assert jp.values.tolist() == [0.25, 1.0]

    def test_constant_any_order(self):
        f = PolyCurve([3.5])
        jp = eval_jet(f, 4, 0.7)
        assert jp.values.tolist() == [3.5, 0.0, 0.0, 0.0, 0.0]

    def test_against_finite_differences(self):
        f = PolyCurve([0.0, -1.0, 0.0, 1.0])  # t^3 - t
        jp = eval_jet(f, 2, 0.3)
        for i in range(3):
            fd = central_diff(lambda t: t ** 3 - t, 0.3, i)
            assert abs(jp.values[i] - fd) < 1e-6

    def test_outside_domain(self):
        f = PolyCurve([0.0, 1.0], domain=(0.0, 0.5))
        with pytest.raises(DomainError):
            eval_jet(f, 1, 0.9)


class TestCkNorm:
    def test_linear(self):
        lo, hi = ck_norm(PolyCurve([0.0, 1.0]), 1)
        assert lo <= 2.0 <= hi

    def test_zero(self):
        lo, hi = ck_norm(PolyCurve([0.0]), 3)
        assert lo == 0.0 and hi <= 1e-11

    def test_parabola_closed_form(self):
        # sup|t^2-t| = 1/4 at t=1/2; sup|2t-1| = 1; sup|2| = 2
        lo, hi = ck_norm(PolyCurve([0.0, -1.0, 1.0]), 2)
        assert lo <= 3.25 <= hi
        assert hi - lo < 1e-9

    def test_degenerate_interval(self):
        with pytest.raises(DomainError):
            ck_norm(PolyCurve([1.0]), 1, interval=(0.5, 0.5))

    def test_certificate_sandwich_bulk(self):
        # dense-grid empirical norm must fall inside the certified bracket;
        # the grid undershoots true sups by O(h^2), so the bracket tolerance
        # is configured above that
        gen = np.random.default_rng(0)
        grid = np.linspace(0.0, 1.0, 100_001)
        for _ in range(1000):
            deg = int(gen.integers(0, 11))
            c = gen.uniform(-1.0, 1.0, deg + 1)
            f = PolyCurve(c)
            lo, hi = ck_norm(f, 2, slack=1e-9)
            emp = sum(np.max(np.abs(poly_eval(f.der_coeffs(i), grid))) for i in range(3))
            assert lo <= emp <= hi


class TestRoots:
    def test_cubic(self):
        r = real_roots([0.0, -1.0, 0.0, 1.0], -2.0, 2.0)
        assert np.allclose(np.sort(r), [-1.0, 0.0, 1.0], atol=1e-10)

    def test_no_roots(self):
        assert real_roots([1.0, 0.0, 1.0], -5.0, 5.0).size == 0

    def test_range_and_sup(self):
        # |t^2 - 1/2| on [0,1]: max 1/2 at both ends, min 0 at 1/sqrt(2)
        assert abs(sup_abs([-0.5, 0.0, 1.0], 0.0, 1.0) - 0.5) < 1e-12
        assert inf_abs_jet_sum([-0.5, 0.0, 1.0], 0, 0.0, 1.0) < 1e-12

    @given(st.lists(st.floats(-2, 2), min_size=2, max_size=7),
           st.floats(0.05, 0.95))
    @settings(max_examples=150, deadline=None)
    def test_roots_really_vanish(self, coeffs, width):
        for r in real_roots(coeffs, 0.0, float(width)):
            scale = max(np.max(np.abs(coeffs)), 1.0)
            assert abs(poly_eval(coeffs, r)) < 1e-8 * scale

    @given(st.lists(st.floats(-1, 1), min_size=1, max_size=6))
    @settings(max_examples=150, deadline=None)
    def test_sup_dominates_samples(self, coeffs):
        s = sup_abs(coeffs, 0.0, 1.0)
        samples = np.abs(poly_eval(coeffs, np.linspace(0, 1, 257)))
        assert s >= samples.max() - 1e-10


class TestBatchSup:
    def test_matches_scalar(self):
        gen = np.random.default_rng(3)
        rows = gen.uniform(-1, 1, (200, 3))
        los = gen.uniform(0.0, 0.4, 200)
        his = los + gen.uniform(0.05, 0.5, 200)
        batch = sup_abs_batch(rows, los, his)
        for row, lo, hi, got in zip(rows, los, his, batch):
            assert abs(got - sup_abs(row, lo, hi)) < 1e-12


class TestJetConsistency:
    @given(st.lists(st.floats(-1, 1), min_size=1, max_size=8),
           st.floats(0.0, 1.0))
    @settings(max_examples=200, deadline=None)
    def test_jet_matches_derivative_chain(self, coeffs, t):
        # eval_jet values must agree with direct evaluation of der_coeffs
        f = PolyCurve(coeffs)
        jp = eval_jet(f, 3, t)
        for i in range(4):
            assert abs(jp.values[i] - poly_eval(f.der_coeffs(i), t)) < 1e-12


class TestComposeAndTaylor:
    def test_affine_compose(self):
        c = poly_compose_affine([1.0, 2.0, 3.0], 0.5, 2.0)
        xs = np.linspace(-1, 1, 11)
        direct = poly_eval([1.0, 2.0, 3.0], 0.5 + 2.0 * xs)
        assert np.allclose(poly_eval(c, xs), direct, atol=1e-12)

    def test_taylor_coeffs(self):
        f = PolyCurve([1.0, -2.0, 0.5, 4.0])
        tc = taylor_coeffs(f, 0.3, 3)
        xs = np.linspace(0.0, 1.0, 9)
        rebuilt = sum(tc[i] * (xs - 0.3) ** i for i in range(4))
        assert np.allclose(rebuilt, poly_eval(f.coeffs, xs), atol=1e-12)


class TestSerialization:
    def test_round_trip(self):
        curves = [PolyCurve([0.1, 0.25]), PolyCurve([1.0 / 3.0, 0.0, -0.2])]
        text = family_to_json(curves, 2, provenance="test")
        back, k, prov = family_from_json(text)
        assert k == 2 and prov == "test"
        for a, b in zip(curves, back):
            # shortest round-trip floats reproduce coefficients exactly
            assert np.array_equal(np.pad(a.coeffs, (0, len(b.coeffs) - len(a.coeffs))),
                                  b.coeffs) or np.array_equal(a.coeffs, b.coeffs)

    def test_schema_fields(self):
        doc = json.loads(family_to_json([PolyCurve([0.0])], 1))
        assert set(doc) == {"k", "domain", "curves", "provenance"}
        assert doc["curves"][0] == {"coeffs": [0.0]}
