import math

import numpy as np
import pytest

from tangle.family import (
    ConstructionError,
    build_family,
    cinematic_check,
    circle_spec,
    ellipse_spec,
    forbid_constant,
    jet_jacobian,
    moment_spec,
    poly_approximate,
    transversality_rank,
)
from tangle.poly import PolyCurve, poly_eval


class TestForbidConstant:
    def test_two_constants_k0(self):
        c, dups = forbid_constant([PolyCurve([0.0]), PolyCurve([1.0])], 0)
        assert not dups
        assert abs(c - 1.0) < 1e-12

    def test_line_pair_closed_form(self):
        # inf_t(|t-1/2| + 1) = 1, ||f-g||_C1 = 1/2 + 1 = 3/2 so c = 2/3
        c, _ = forbid_constant([PolyCurve([0.0]), PolyCurve([-0.5, 1.0])], 1)
        assert abs(c - 2.0 / 3.0) < 1e-12

    def test_duplicates_reported(self):
        c, dups = forbid_constant([PolyCurve([0.2]), PolyCurve([0.2])], 1)
        assert dups == [(0, 1)]

    def test_small_family_marker(self):
        c, _ = forbid_constant([PolyCurve([0.0])], 1)
        assert math.isinf(c)

    def test_grid_refinement_stability(self):
        # 50 random cubics: c > 0, and the brute-force grid value is stable
        # under refinement 1e3 -> 1e4
        gen = np.random.default_rng(5)
        curves = [PolyCurve(gen.uniform(-0.3, 0.3, 4)) for _ in range(50)]
        k = 3
        c_exact, _ = forbid_constant(curves, k)
        assert c_exact > 0

        def grid_value(n):
            ts = np.linspace(0, 1, n)
            stacks = np.array([[poly_eval(c.der_coeffs(m), ts) for m in range(k + 1)]
                               for c in curves])
            best = math.inf
            for i in range(len(curves)):
                for j in range(i + 1, len(curves)):
                    diff = np.abs(stacks[i] - stacks[j])
                    best = min(best, float(diff.sum(axis=0).min()) / diff.max(axis=1).sum())
            return best

        g3, g4 = grid_value(1000), grid_value(10000)
        assert abs(g3 - g4) < 1e-3
        # grid values over-estimate the true inf and under-estimate norms only slightly
        assert c_exact <= g4 + 1e-3

    def test_scale_covariance(self):
        gen = np.random.default_rng(9)
        curves = [PolyCurve(gen.uniform(-0.4, 0.4, 3)) for _ in range(6)]
        c1, _ = forbid_constant(curves, 2)
        lam = 3.7
        scaled = [PolyCurve(lam * f.coeffs) for f in curves]
        c2, _ = forbid_constant(scaled, 2)
        assert abs(c1 - c2) < 1e-9 * max(1.0, abs(c1))


class TestBuildFamily:
    def test_moment_lines(self):
        fam = build_family(moment_spec(2), [2, 2], k=1)
        assert len(fam) == 4
        # curves are {0, t, 1, 1+t} scaled by one family-wide factor
        raw = sorted(tuple(np.round(c.coeffs / fam.rescale_factor, 9)) for c in fam)
        assert raw == [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]
        assert 0 < fam.rescale_factor <= 1.0

    def test_circle_approximant(self):
        spec = circle_spec(center_box=((-1e-9, 1e-9), (-1e-9, 1e-9)),
                           radius_box=(1.0 - 1e-9, 1.0 + 1e-9),
                           time_interval=(-0.1, 0.1), degree=10)
        fam = build_family(spec, [1, 1, 1], k=2)
        curve = fam[0] if fam.rescale_factor == 1.0 else PolyCurve(
            fam[0].coeffs / fam.rescale_factor, fam[0].domain)
        ts = np.linspace(-0.1, 0.1, 2001)
        err = np.max(np.abs(poly_eval(curve.coeffs, ts) - np.sqrt(1 - ts ** 2)))
        assert err < 1e-8

    def test_ellipse_degenerates_to_circle(self):
        eps = 1e-9
        c_spec = circle_spec(center_box=((-eps, eps), (-eps, eps)),
                             radius_box=(1 - eps, 1 + eps),
                             time_interval=(-0.1, 0.1), degree=10)
        e_spec = ellipse_spec(a_box=(1 - eps, 1 + eps), b_box=(1 - eps, 1 + eps),
                              center_box=((-eps, eps), (-eps, eps)),
                              theta_box=(-eps, eps),
                              time_interval=(-0.1, 0.1), degree=10)
        ts = np.linspace(-0.1, 0.1, 33)
        hc = [c_spec.h_value([0.0, 0.0, 1.0], t) for t in ts]
        he = [e_spec.h_value([1.0, 1.0, 0.0, 0.0, 0.0], t) for t in ts]
        assert np.allclose(hc, he, atol=1e-10)

    def test_approx_error_enforced(self):
        spec = circle_spec(center_box=((-1e-9, 1e-9), (-1e-9, 1e-9)),
                           radius_box=(1 - 1e-9, 1 + 1e-9),
                           time_interval=(-0.1, 0.1), degree=1)
        with pytest.raises(ConstructionError):
            build_family(spec, [1, 1, 1], k=2, approx_error_bound=1e-9)


class TestCinematicCheck:
    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_moment_determinant(self, m):
        # oracle: brute-force confluent Vandermonde determinant at random (u, t)
        expected = float(np.prod([math.factorial(j) for j in range(m)]))
        rep = cinematic_check(moment_spec(m), samples=20, seed=1)
        assert abs(rep["min_abs_det"] - expected) < 1e-9
        gen = np.random.default_rng(0)
        t = gen.uniform(0, 1)
        jac = jet_jacobian(moment_spec(m), gen.uniform(0, 1, m), t, m - 1)
        brute = np.zeros((m, m))
        for j in range(m):
            for i in range(m):
                brute[i, j] = (math.factorial(j) / math.factorial(j - i) * t ** (j - i)
                               if j >= i else 0.0)
        assert abs(np.linalg.det(jac) - np.linalg.det(brute)) < 1e-9

    def test_moment_two_exact(self):
        rep = cinematic_check(moment_spec(2), samples=5, seed=3)
        assert rep["min_abs_det"] == 1.0

    def test_circle_positive(self):
        rep = cinematic_check(circle_spec(), samples=500, seed=2)
        assert rep["min_abs_det"] > 0


class TestTransversality:
    def test_moment_maximal_rank(self):
        rep = transversality_rank(moment_spec(3), 1, samples=100, seed=4)
        assert rep["pass"] and rep["min_singular_value"] > 0.5
        # at t = 0 the fiber tangent is coordinate-aligned and the value is 1
        from tangle.family import jet_jacobian as jj
        A = jj(moment_spec(3), np.array([0.3, 0.2, 0.1]), 0.0, 1)
        _, _, vt = np.linalg.svd(A)
        null = vt[2:].T
        phi = moment_spec(3).projection_matrix(1)
        sv = np.linalg.svd(phi @ null, compute_uv=False)
        assert abs(sv[-1] - 1.0) < 1e-9

    def test_vacuous_marker(self):
        rep = transversality_rank(moment_spec(3), 2, samples=10, seed=0)
        assert rep["vacuous"] and rep["pass"]

    def test_circle_rank_one(self):
        # independent derivation: V through (0,0,1) at t=0 is {(0, s, 1+s)},
        # tangent (0,1,1)/sqrt(2); DPhi restricted has singular value 1/sqrt(2)
        spec = circle_spec(center_box=((-0.001, 0.001), (-0.001, 0.001)),
                           radius_box=(0.999, 1.001), time_interval=(-0.001, 0.001),
                           projection=(0, 1))
        rep = transversality_rank(spec, 1, samples=50, seed=5)
        assert rep["pass"]
        assert abs(rep["min_singular_value"] - 1.0 / math.sqrt(2.0)) < 1e-3


class TestPolyApproximate:
    def test_exact_reproduction(self):
        target = lambda t: 2.0 - t + 0.5 * t ** 3
        curve, err = poly_approximate(target, 5)
        assert err <= 1e-10

    def test_sqrt_branch(self):
        curve, err = poly_approximate(lambda t: math.sqrt(1 - t * t), 8, (-0.5, 0.5))
        assert err < 1e-6
        dense = np.linspace(-0.5, 0.5, 5001)
        true_err = np.max(np.abs(poly_eval(curve.coeffs, dense) - np.sqrt(1 - dense ** 2)))
        assert true_err < 2e-6

    def test_kink_reported_honestly(self):
        curve, err = poly_approximate(lambda t: abs(t - 0.5), 4)
        assert err >= 0.01
