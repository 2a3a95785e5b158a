#!/usr/bin/env python3
"""Counting rich, robustly broad rectangles against the power bound.

A fan of lines through one window is the canonical rich-and-broad
arrangement; a cluster of near-duplicates is rich but fails broadness.
The full pipeline then runs on a random quadratic family and reports the
observed count against delta^(-eps) (#F/mu)^((k+1)/k).
"""

from tangle import (
    PolyCurve, TangencyRect, broadness_check, build_incidences,
    graph_refine, random_refine, select_incomparable,
    two_ends_interval, verify_rect_bound, ck_norm,
)
from tangle import rng

delta = 2.0 ** -8

print("== a broad fan vs a concentrated cluster ==")
R = TangencyRect(base=PolyCurve([0.0]), anchor=0.0, delta=delta, k=1)
fan = [PolyCurve([0.0, (i - 4) / 8.0]) for i in range(8)]
cert = broadness_check(R, fan, eps=0.3, B=16.0, delta=delta)
print(f"fan of 8 diverging lines: broad={cert.valid} "
      f"(worst cover ratio {cert.max_ratio:.3f})")
cluster = [PolyCurve([delta / 10 * i / 8.0]) for i in range(8)]
cert2 = broadness_check(R, cluster, eps=0.3, B=2.0, delta=delta)
print(f"8 near-duplicates:        broad={cert2.valid} "
      f"(worst cover ratio {cert2.max_ratio:.2f})")

print("\n== bipartite refinement and two-ends selection ==")
g = build_incidences(fan, [R])
print(f"incidence edges: {sorted(g.edges)}")
refined = graph_refine(g)
print(f"after degree peeling: {len(refined.edges)} edges (>= half survive)")
rects = [TangencyRect(base=PolyCurve([0.0]), anchor=j * delta, delta=delta, k=1)
         for j in range(8)]
sel = two_ends_interval(rects, eps1=0.3)
print(f"two-ends interval for a left-packed row of rectangles: {sel['interval']}")

print("\n== random refinement with concentration tails ==")
_, rep = random_refine(fan * 30, p=0.25, seed=7, reps=3000)
print(f"kept {rep['kept']}/{rep['n']}; "
      f"lower-tail freq {rep['freq_low']:.4f} <= bound {rep['bound_low']:.4f}; "
      f"upper-tail freq {rep['freq_high']:.4f} <= bound {rep['bound_high']:.4f}")

print("\n== the rectangle-count experiment ==")
curves = []
for i in range(150):
    s = rng.stream(42, i)
    c = s.uniform(-1, 1, 3)
    _, up = ck_norm(PolyCurve(c), 2)
    curves.append(PolyCurve(c / (up * 1.0000001) * s.uniform(0.2, 1.0)))
for mu, report in zip([2, 4, 8], verify_rect_bound(curves, delta, 2, 0.3, 0.05, [2, 4, 8])):
    print(f"mu={mu}: observed {report['observed']:4d} <= bound {report['bound']:8.1f} "
          f"(stages {report['stages']})")

print("\n== greedy incomparable selection ==")
kept, _ = select_incomparable(rects)
print(f"{len(rects)} overlapping rectangles -> {len(kept)} pairwise incomparable")
