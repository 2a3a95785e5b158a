"""Acceptance gate: one test per release criterion, with stated tolerances.

Each test finishes by printing a single PASS/FAIL line (run with ``-s`` or
read the captured output).  Tolerances are pinned here; none are tuned at
runtime.
"""

import math
import os
import subprocess
import sys
import time

import numpy as np

from tangle import rng
from tangle.broadness import verify_rect_bound
from tangle.furstenberg import furstenberg_check, random_instance
from tangle.maximal import knapp_experiment, sharpness_log_experiment
from tangle.poly import PolyCurve, ck_norm, sup_abs
from tangle.prisms import covers, jet_tangency_margin, prism_of, rescale_fn
from tangle.raster import Raster, lp_count_norm, rasterize
from tangle.rectangles import TangencyRect
from tangle.suites import run_lemma_suite, run_wongkew_reference
from tangle.wongkew import annulus_proxy_area_exact, strip_area_exact


def _report(num, name, ok, detail):
    line = f"ACCEPTANCE {num} {name}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line, flush=True)
    assert ok, line


def scaled_random_curve(g, degree, k, norm_cap=1.0):
    c = g.uniform(-1.0, 1.0, degree + 1)
    _, up = ck_norm(PolyCurve(c), k)
    return PolyCurve(c * (norm_cap / up) * 0.999)


def tangent_perturbation(g, base, k, eps, interval, frac=1.0):
    lo, hi = interval
    p = g.uniform(-1.0, 1.0, k + 2)
    s = sup_abs(p, lo, hi)
    _, pn = ck_norm(PolyCurve(p), k)
    _, bn = ck_norm(base, k)
    room = max(1.0 - bn, 0.0)
    scale = min(frac * eps / max(s, 1e-300), room / pn) * 0.999
    out = np.zeros(max(len(base.coeffs), len(p)))
    out[: len(base.coeffs)] += base.coeffs
    out[: len(p)] += scale * p
    return PolyCurve(out)


def test_criterion_1_lemma_suite():
    t0 = time.time()
    reports, tally = run_lemma_suite(n_instances=1000, seed=2026)
    elapsed = time.time() - t0
    failures = sum(t["fail"] for t in tally.values())
    precond = sum(t["precondition"] for t in tally.values())
    ok = failures == 0 and precond == 0 and elapsed < 300.0
    _report(1, "lemma suite (7 x 10^3 instances)", ok,
            f"failures={failures} precondition={precond} time={elapsed:.0f}s")


def test_criterion_2_rescaling_certificates():
    t0 = time.time()
    n_total = 10_000
    fails = {"rescale_norm": 0, "prism_jets": 0, "covering": 0}
    for i in range(n_total):
        g = rng.stream(515, i)
        k = 1 + i % 3
        d = 2.0 ** -int(g.integers(6, 11))
        rho = 2.0 ** k * d
        base = scaled_random_curve(g, k + 1, k, 0.5)
        a = g.uniform(0.0, 1.0 - rho ** (1.0 / k))
        S = TangencyRect(base=base, anchor=a, delta=rho, k=k)
        f = tangent_perturbation(g, base, k, rho / 2.0, S.interval, frac=0.9)
        fS = rescale_fn(S, f)
        if ck_norm(fS, k)[1] > 1.0 + 1e-9:
            fails["rescale_norm"] += 1
        a_r = g.uniform(a, a + rho ** (1.0 / k) - d ** (1.0 / k))
        h = tangent_perturbation(g, f, k, d / 2.0, (a_r, a_r + d ** (1.0 / k)), frac=0.9)
        R = TangencyRect(base=h, anchor=a_r, delta=d, k=k)
        if jet_tangency_margin(f, prism_of(R)) < 0.0:
            fails["prism_jets"] += 1
        if not covers(S, R):
            fails["covering"] += 1
    elapsed = time.time() - t0
    ok = all(v == 0 for v in fails.values()) and elapsed < 120.0
    _report(2, "rescaling certificates (10^4 configs, k in {1,2,3})", ok,
            f"fails={fails} time={elapsed:.0f}s")


def test_criterion_3_rect_bound_trend():
    t0 = time.time()
    k, eps, eta = 2, 0.3, 0.05
    sizes = {0: 100, 1: 400}
    violations = []
    total = 0
    for e in range(6, 11):
        delta = 2.0 ** -e
        for seed, n in sizes.items():
            curves = []
            for i in range(n):
                g = rng.stream(700 + seed, e, i)
                c = g.uniform(-1.0, 1.0, k + 1)
                _, up = ck_norm(PolyCurve(c), k)
                curves.append(PolyCurve(c / (up * 1.0000001) * g.uniform(0.2, 1.0)))
            reports = verify_rect_bound(curves, delta, k, eps, eta, [2, 4, 8])
            for rep in reports:
                total += 1
                if not rep["pass"]:
                    violations.append((delta, rep["mu"], rep["observed"], rep["bound"]))
    elapsed = time.time() - t0
    ok = not violations and elapsed < 900.0
    _report(3, "rectangle-count trend (k=2, 30 seeded instances)", ok,
            f"instances={total} violations={violations} time={elapsed:.0f}s")


def _transverse_lines(delta, seed):
    # slopes 4*delta apart in [0, 0.35]: any radius-r ball in C^1 then holds
    # at most r/delta curves; intercepts seeded in [0, 0.25]
    n = int(0.35 / (4.0 * delta)) + 1
    g = rng.stream(seed)
    return [PolyCurve([float(g.uniform(0.0, 0.25)), 4.0 * delta * i]) for i in range(n)]


def _ball_condition_certificate(curves, delta):
    # within-2r-of-a-member counts dominate any radius-r ball's count
    coe = np.array([[c.coeffs[0], c.coeffs[1]] for c in curves])
    db = coe[:, 0][:, None] - coe[:, 0][None, :]
    dm = coe[:, 1][:, None] - coe[:, 1][None, :]
    dist = np.maximum(np.abs(db), np.abs(db + dm)) + np.abs(dm)
    r = delta
    while r <= 1.0:
        counts = np.sum(dist <= 2.0 * r, axis=1)
        if counts.max() > r / delta + 1e-9:
            return False
        r *= 2.0
    return True


def test_criterion_4_cordoba_trend():
    t0 = time.time()
    worst = 0.0
    for e in range(4, 11):
        delta = 2.0 ** -e
        curves = _transverse_lines(delta, seed=40 + e)
        assert _ball_condition_certificate(curves, delta)
        raster = Raster(h=delta / 8.0)
        shadings = [rasterize(c, delta, raster, curve_id=i) for i, c in enumerate(curves)]
        lhs = lp_count_norm(shadings, 2.0)
        bound = 4.0 * math.sqrt(math.log(1.0 / delta)) * delta * len(curves)
        worst = max(worst, lhs / bound)
        assert lhs < bound  # strict
    elapsed = time.time() - t0
    ok = worst < 1.0 and elapsed < 300.0
    _report(4, "transverse-line L2 bound (delta down to 2^-10)", ok,
            f"worst_ratio={worst:.3f} time={elapsed:.0f}s")


def test_criterion_5_knapp_slopes():
    t0 = time.time()
    deltas = [2.0 ** -e for e in range(4, 11)]
    tables = knapp_experiment(1, [1.5, 3.0], deltas)
    s15, s30 = tables[0]["slope"], tables[1]["slope"]
    elapsed = time.time() - t0
    ok = s15 <= -0.1 and s30 >= -0.05 and elapsed < 300.0
    _report(5, "Knapp sharpness slopes (s=1)", ok,
            f"slope(p=1.5)={s15:.3f} slope(p=3)={s30:.3f} time={elapsed:.0f}s")


def test_criterion_6_log_laws():
    t0 = time.time()
    res = sharpness_log_experiment(1, [2.0 ** -e for e in range(4, 13)])
    max_rel = max(abs(r["norm_power"] - r["norm_closed_form"]) / r["norm_closed_form"]
                  for r in res["rows"])
    elapsed = time.time() - t0
    ok = max_rel <= 0.01 and res["line_fit_r2"] >= 0.98 and elapsed < 120.0
    _report(6, "osculating log laws", ok,
            f"norm_rel_err={max_rel:.2e} R2={res['line_fit_r2']:.4f} time={elapsed:.0f}s")


def test_criterion_7_furstenberg_instances():
    t0 = time.time()
    delta, k, eps = 2.0 ** -8, 2, 0.3
    pairs = [(0.8, 0.5)] * 7 + [(1.0, 1.0)] * 7 + [(0.6, 0.6)] * 6
    bad = []
    for seed, (alpha, beta) in enumerate(pairs):
        inst = random_instance(delta, alpha, beta, k, seed=seed)
        rep = furstenberg_check(inst, eps)
        if not (rep["holder_ok"] and rep["bound_ok"]):
            bad.append((seed, alpha, beta, rep["union_area"], rep["bound"]))
    elapsed = time.time() - t0
    ok = not bad and elapsed < 600.0
    _report(7, "Furstenberg measure bound (20 instances)", ok,
            f"violations={bad} time={elapsed:.0f}s")


def test_criterion_8_wongkew_references():
    t0 = time.time()
    reports = run_wongkew_reference(samples=100_000, seed=2026, rho=0.01, C=8.0)
    strip, annulus = reports
    checks = []
    for rep, exact in ((strip, strip_area_exact(0.01, 1.0)),
                       (annulus, annulus_proxy_area_exact(0.01, 1.25))):
        sigma = rep.detail["volume_ci_95"] / 1.96
        checks.append(abs(rep.lhs - exact) <= 3.0 * sigma and rep.passed)
    elapsed = time.time() - t0
    ok = all(checks) and elapsed < 60.0
    _report(8, "thin-neighborhood volume references", ok,
            f"strip={checks[0]} annulus={checks[1]} time={elapsed:.0f}s")


def test_criterion_9_thread_determinism(tmp_path):
    cfg = tmp_path / "det.toml"
    cfg.write_text("""
kind = "lemmas"
seed = 99
[params]
instances = 30
""")
    outs = {}
    for threads in (1, 8):
        out = tmp_path / f"t{threads}"
        proc = subprocess.run(
            [sys.executable, "-m", "tangle.cli", "lemmas", "--config", str(cfg),
             "--threads", str(threads), "--out", str(out)],
            capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        outs[threads] = (out / "results.csv").read_bytes()
    ok = outs[1] == outs[8]
    _report(9, "determinism at 1 vs 8 threads", ok,
            f"bytes_equal={ok} size={len(outs[1])}")
