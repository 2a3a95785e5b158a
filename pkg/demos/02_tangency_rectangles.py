#!/usr/bin/env python3
"""The (delta; k) tangency-rectangle calculus, drawn.

Builds a curvilinear rectangle, tests tangency with exact sups, lifts to
the prism in jet space, rescales back to unit size, and renders the planar
picture to demos/out/rectangles.svg.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from tangle import (
    PolyCurve, TangencyRect, is_tangent, taylor_model, comparable,
    prism_of, covers, rescale_fn, rescale_rect, ck_norm,
)

delta, k = 2.0 ** -5, 2
base = PolyCurve([0.1, 0.3, -0.35])
print(f"base curve norm <= 1: {ck_norm(base, k)[1]:.3f}")
R = TangencyRect(base=base, anchor=0.3, delta=delta, k=k)
print(f"R: delta={delta}, interval={R.interval}")

f_in = PolyCurve(base.coeffs + np.array([delta / 2, 0, 0]))
f_out = PolyCurve(base.coeffs + np.array([3 * delta, 0, 0]))
for name, f in [("f_in", f_in), ("f_out", f_out)]:
    ok, margin = is_tangent(f, R, return_margin=True)
    print(f"{name}: tangent={ok}, sup distance {margin:.5f} vs delta {delta}")

model = taylor_model(R)
print(f"Taylor model coeffs: {np.round(model.coeffs, 4)} "
      "(rectangle sits in its 2*delta neighborhood)")

S = TangencyRect(base=base, anchor=0.3, delta=2 ** k * delta, k=k)
print(f"coarser S covers R: {covers(S, R)}")
print(f"R comparable to itself: {comparable(R, R)}")

fS = rescale_fn(S, f_in)
print(f"rescaled curve norm (stays <= 1): {ck_norm(fS, k)[1]:.2e}")
RS = rescale_rect(S, R)
print(f"R rescaled through S: delta'={RS.delta}, interval={tuple(round(v, 4) for v in RS.interval)}")

prism = prism_of(R)
shape = [round(prism.fiber_radius(j) / prism.K, 6) for j in range(k)]
print(f"prism fiber shape delta^(1-j/k): {shape}  (times the chain constant "
      f"K = {prism.K:.0f})")

os.makedirs("demos/out", exist_ok=True)
fig, ax = plt.subplots(figsize=(7, 4))
ts = np.linspace(0.0, 1.0, 400)
ax.plot(ts, base(ts), "k-", lw=1, label="base")
a, b = R.interval
tI = np.linspace(a, b, 100)
ax.fill_between(tI, base(tI) - delta, base(tI) + delta, alpha=0.4, label="R")
tS = np.linspace(*S.interval, 100)
ax.fill_between(tS, S.base_values(tS) - S.delta, S.base_values(tS) + S.delta,
                alpha=0.15, label="S (coarser cover)")
ax.plot(ts, f_in(ts), "--", lw=1, label="tangent curve")
ax.plot(ts, f_out(ts), ":", lw=1, label="non-tangent curve")
ax.legend(loc="upper left", fontsize=8)
ax.set_title("a tangency rectangle, its cover, and two test curves")
fig.tight_layout()
fig.savefig("demos/out/rectangles.svg")
print("wrote demos/out/rectangles.svg")
