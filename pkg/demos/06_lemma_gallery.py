#!/usr/bin/env python3
"""One verified instance of every quantitative lemma checker.

Each checker validates its hypotheses first (a precondition error is never
a lemma failure), then tests the conclusion with its explicit constant.
"""

import numpy as np

from tangle import (
    PolyCurve, remez_check, polya_check, derivative_bound_check,
    long_rect_check, pigeonhole_rect_check, cinematic_norm_check,
    gronwall_closeness, wongkew_volume,
)
from tangle.gronwall import LinearJetField
from tangle.poly import sup_abs
from tangle.suites import run_lemma_suite
from tangle.wongkew import circle_polynomial, strip_polynomial

delta = 2.0 ** -8
reports = []

reports.append(remez_check([0.0, 1.0], (0.0, 1.0), [(0.0, 0.5)]))
reports.append(polya_check([0.0, 0.0, 1.0], 1.0))
reports.append(derivative_bound_check(PolyCurve([delta / 2]), delta,
                                      (0.3, 0.3 + delta), 2))
reports.append(long_rect_check(PolyCurve([0.0]), delta, 4.0, 0.1, 2))
reports.append(pigeonhole_rect_check([PolyCurve([0.9 * delta * j]) for j in range(10)],
                                     delta, 9.0, 1))
reports.append(cinematic_norm_check(PolyCurve([delta / 2]), (0.0, 1.0),
                                    (0.4, 0.4 + delta ** 0.5 / 2), K=3.0,
                                    delta=delta, k=2))

coeffs = np.array([1.0, 1.0, 0.5, 1 / 6, 1 / 24, 1 / 120, 1 / 720])
base = PolyCurve(coeffs)
field = LinearJetField.fitted_to(base, np.array([1.0]))
other = PolyCurve(coeffs * 1.0005)
rho = max(sup_abs(field.residual_curve(other), 0, 1), 0.0005 * np.e) * 1.05
reports.append(gronwall_closeness(base, other, field, L=1.0, rho=rho,
                                  interval=(0.0, 1.0), n=1))

reports.append(wongkew_volume(strip_polynomial(), 0.01, 1.0, 50_000, seed=1))
reports.append(wongkew_volume(circle_polynomial(), 0.01, 1.25, 50_000, seed=2))

print(f"{'lemma':20s} {'lhs':>12s} {'rhs':>12s} {'constant':>10s}  pass")
for r in reports:
    print(f"{r.lemma:20s} {r.lhs:12.5g} {r.rhs:12.5g} {r.constant:10.4g}  {r.passed}")

print("\nrandomized mini-suite (verbose suites run through `tangle lemmas`):")
_, tally = run_lemma_suite(n_instances=25, seed=0)
for name, t in sorted(tally.items()):
    print(f"  {name:20s} pass={t['pass']:3d} fail={t['fail']} "
          f"precondition={t['precondition']}")
