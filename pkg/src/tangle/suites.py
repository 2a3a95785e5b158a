"""Randomized admissible-instance generators for the lemma checkers.

Instances are built to satisfy each checker's hypotheses by construction
(certified norms with safety factors), so a reported failure is a genuine
defect rather than generator slop.  Every instance is reproducible from
(lemma name, seed, index) alone.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import rng
from .gronwall import LinearJetField, gronwall_closeness
from .lemmas import (
    LemmaReport,
    PreconditionError,
    cinematic_norm_check,
    derivative_bound_check,
    long_rect_check,
    pigeonhole_rect_check,
    polya_check,
    remez_check,
)
from .poly import PolyCurve, ck_norm, sup_abs
from .wongkew import (
    annulus_proxy_area_exact,
    circle_polynomial,
    strip_area_exact,
    strip_polynomial,
    wongkew_volume,
)

LEMMA_NAMES = (
    "remez",
    "polya",
    "derivative_bound",
    "long_rect",
    "pigeonhole_rect",
    "gronwall_closeness",
    "cinematic_norm",
)

_LEMMA_STREAM = {name: 101 + i for i, name in enumerate(LEMMA_NAMES)}


def _scaled_curve(g, degree: int, k: int, window, target_sup: float,
                  domain=(0.0, 1.0)) -> PolyCurve:
    """Random polynomial with sup over the window <= target_sup and C^k norm <= 1."""
    coeffs = g.uniform(-1.0, 1.0, degree + 1)
    raw = PolyCurve(coeffs, domain)
    lo, hi = window
    s = sup_abs(raw.coeffs, lo, hi)
    _, norm_up = ck_norm(raw, k)
    scale = min(target_sup / max(s, 1e-300), 1.0 / norm_up) * 0.999
    return PolyCurve(coeffs * scale, domain)


def make_remez(seed: int, i: int) -> LemmaReport:
    g = rng.stream(seed, _LEMMA_STREAM["remez"], i)
    degree = int(g.integers(1, 9))
    coeffs = g.uniform(-1.0, 1.0, degree + 1)
    if abs(coeffs[-1]) < 1e-3:
        coeffs[-1] = 1e-3
    cuts = np.sort(g.uniform(0.0, 1.0, 6))
    e_iv = [(cuts[0], cuts[1]), (cuts[2], cuts[3]), (cuts[4], cuts[5])]
    if sum(b - a for a, b in e_iv) < 1e-3:
        e_iv = [(0.0, 0.25)]
    return remez_check(coeffs, (0.0, 1.0), e_iv)


def make_polya(seed: int, i: int) -> LemmaReport:
    g = rng.stream(seed, _LEMMA_STREAM["polya"], i)
    degree = int(g.integers(1, 7))
    coeffs = np.concatenate([g.uniform(-1.0, 1.0, degree), [1.0]])  # monic
    lam = 2.0 ** -int(g.integers(0, 9))
    return polya_check(coeffs, lam)


def make_derivative_bound(seed: int, i: int) -> LemmaReport:
    g = rng.stream(seed, _LEMMA_STREAM["derivative_bound"], i)
    k = int(g.integers(1, 4))
    delta = 2.0 ** -int(g.integers(4, 11))
    length = delta ** (1.0 / k) * g.uniform(0.3, 1.0)
    a = g.uniform(0.0, 1.0 - length)
    f = _scaled_curve(g, int(g.integers(k, 6)), k, (a, a + length),
                      delta * g.uniform(0.2, 1.0))
    return derivative_bound_check(f, delta, (a, a + length), k)


def make_long_rect(seed: int, i: int) -> LemmaReport:
    g = rng.stream(seed, _LEMMA_STREAM["long_rect"], i)
    k = int(g.integers(2, 4))
    delta = 2.0 ** -int(g.integers(4, 11))
    ell_max = int(math.floor(math.log2(1.0 / delta)))
    T = 2.0 ** int(g.integers(0, ell_max + 1))
    pre_len = (T * delta) ** (1.0 / (k - 1))
    if pre_len > 0.9:
        T = 1.0
        pre_len = delta ** (1.0 / (k - 1))
    a = g.uniform(0.0, 1.0 - max(pre_len, (max(delta, T ** -float(k))) ** (1.0 / k)))
    f = _scaled_curve(g, int(g.integers(k, 6)), k, (a, a + pre_len),
                      delta * g.uniform(0.2, 1.0))
    return long_rect_check(f, delta, T, a, k)


def make_pigeonhole_rect(seed: int, i: int) -> LemmaReport:
    g = rng.stream(seed, _LEMMA_STREAM["pigeonhole_rect"], i)
    k = int(g.integers(1, 3))
    delta = 2.0 ** -int(g.integers(6, 11))
    A = float(g.choice([2.0, 4.0, 8.0]))
    n = int(g.integers(8, 25))
    base = _scaled_curve(g, 3, k, (0.0, 1.0), 0.4)
    base = PolyCurve(base.coeffs * 0.5)
    spread = (A - 1.0) * delta * 0.95
    offsets = g.uniform(-spread / 2.0, spread / 2.0, n)
    # guarantee one cluster of the advertised fraction
    eps = 1.0 / (2.0 * math.ceil(2.0 * A))
    cluster_size = min(n, int(math.ceil(1.5 * eps * n)) + 1)
    anchor = g.uniform(-spread / 2.0, spread / 2.0)
    offsets[:cluster_size] = anchor + g.uniform(-delta / 8.0, delta / 8.0, cluster_size)
    offsets = np.clip(offsets, -spread / 2.0, spread / 2.0)
    curves = []
    for off in offsets:
        wig = _scaled_curve(g, 2, k, (0.0, 1.0), delta / 160.0)
        coeffs = _pad_add(base.coeffs, 0.25 * wig.coeffs)
        coeffs[0] += off
        curves.append(PolyCurve(coeffs))
    return pigeonhole_rect_check(curves, delta, A, k)


def _pad_add(a, b):
    n = max(len(a), len(b))
    out = np.zeros(n)
    out[: len(a)] += a
    out[: len(b)] += b
    return out


def make_gronwall(seed: int, i: int) -> LemmaReport:
    g = rng.stream(seed, _LEMMA_STREAM["gronwall_closeness"], i)
    n = int(g.integers(1, 3))
    base = _scaled_curve(g, int(g.integers(n + 1, 7)), n, (0.0, 1.0), 0.4)
    w = g.uniform(-1.0, 1.0, n)
    L = float(np.sum(np.abs(w)))
    if L < 0.1:
        w = w + 0.1
        L = float(np.sum(np.abs(w)))
    field = LinearJetField.fitted_to(base, w)
    eps = 10.0 ** g.uniform(-4.0, -2.5)
    pert = PolyCurve(g.uniform(-1.0, 1.0, len(base.coeffs)))
    other = PolyCurve(base.coeffs + eps * pert.coeffs)
    res_sup = sup_abs(field.residual_curve(other), 0.0, 1.0)
    ts = np.linspace(0.0, 1.0, 33)
    from .poly import eval_jet

    gaps = [np.max(np.abs(eval_jet(base, n, t).values - eval_jet(other, n, t).values))
            for t in ts]
    rho = max(res_sup, min(gaps)) * 1.05 + 1e-15
    return gronwall_closeness(base, other, field, L=L, rho=rho,
                              interval=(0.0, 1.0), n=n)


def make_cinematic_norm(seed: int, i: int) -> LemmaReport:
    g = rng.stream(seed, _LEMMA_STREAM["cinematic_norm"], i)
    k = int(g.integers(2, 4))
    delta = 2.0 ** -int(g.integers(4, 9))
    jlen = min(delta ** (1.0 / k), 1.0) * g.uniform(0.3, 1.0)
    jlo = g.uniform(0.0, 1.0 - jlen)
    f = _scaled_curve(g, int(g.integers(k, 6)), k, (jlo, jlo + jlen),
                      delta * g.uniform(0.2, 0.7))
    from .poly import inf_abs_jet_sum

    for _ in range(5):
        _, norm_up = ck_norm(f, k)
        s = inf_abs_jet_sum(f.coeffs, k, 0.0, 1.0)
        if s > max(norm_up, 1e-9) * 1e-7:
            break
        shift = delta * 0.25
        f = PolyCurve(_pad_add(f.coeffs, np.array([shift])))
    else:
        f = PolyCurve([delta / 2.0])
        _, norm_up = ck_norm(f, k)
        s = inf_abs_jet_sum(f.coeffs, k, 0.0, 1.0)
    K = norm_up / s * 1.01
    return cinematic_norm_check(f, (0.0, 1.0), (jlo, jlo + jlen), K=K,
                                delta=delta, k=k)


_MAKERS = {
    "remez": make_remez,
    "polya": make_polya,
    "derivative_bound": make_derivative_bound,
    "long_rect": make_long_rect,
    "pigeonhole_rect": make_pigeonhole_rect,
    "gronwall_closeness": make_gronwall,
    "cinematic_norm": make_cinematic_norm,
}


def run_one(name: str, seed: int, index: int) -> LemmaReport:
    rep = _MAKERS[name](seed, index)
    rep.detail["repro"] = f"tangle lemmas --only {name} --index {index} --seed {seed}"
    return rep


def run_lemma_suite(names=None, n_instances: int = 1000, seed: int = 0,
                    threads: int = 1):
    """All requested lemma suites; returns reports plus a tally.

    Precondition errors are tallied separately from lemma failures; the
    generators are built not to produce any.
    """
    names = list(names or LEMMA_NAMES)
    bad = [n for n in names if n not in _MAKERS]
    if bad:
        raise ValueError(f"unknown lemma names: {bad}")
    jobs = [(name, idx) for name in names for idx in range(n_instances)]

    def work(job):
        name, idx = job
        try:
            return name, idx, run_one(name, seed, idx), None
        except PreconditionError as exc:
            return name, idx, None, str(exc)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, jobs))
    else:
        results = [work(j) for j in jobs]

    reports = []
    tally = {name: {"pass": 0, "fail": 0, "precondition": 0} for name in names}
    for name, idx, rep, pre_err in results:
        if pre_err is not None:
            tally[name]["precondition"] += 1
            continue
        reports.append(rep)
        tally[name]["pass" if rep.passed else "fail"] += 1
    return reports, tally


def run_wongkew_reference(samples: int = 100_000, seed: int = 0,
                          rho: float = 0.01, C: float = 8.0):
    """The two closed-form reference cases with their exact areas attached."""
    strip = wongkew_volume(strip_polynomial(), rho, 1.0, samples, seed=seed, C=C)
    strip.detail["exact_area"] = strip_area_exact(rho, 1.0)
    ann = wongkew_volume(circle_polynomial(), rho, 1.25, samples, seed=seed + 1, C=C)
    ann.detail["exact_area"] = annulus_proxy_area_exact(rho, 1.25)
    return [strip, ann]
