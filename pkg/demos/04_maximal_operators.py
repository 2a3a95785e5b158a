#!/usr/bin/env python3
"""Maximal averages over thickened curves and their scaling laws.

Computes Kakeya and circular-annulus maximal profiles at a coarse scale,
then reproduces the two sharpness experiments: the Knapp-box operator
ratios whose log-log slopes bracket the critical exponent p = s+1, and the
logarithmic blow-up along an osculating curve.  Plots land in demos/out/.
"""

import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from tangle import (
    GridFunction, kakeya_maximal, wolff_maximal, knapp_experiment,
    sharpness_log_experiment,
)

os.makedirs("demos/out", exist_ok=True)

print("== Kakeya profile of the unit square ==")
delta = 0.1
f = GridFunction.indicator_box(((0, 1), (0, 1)), ((-0.2, 1.2), (-0.2, 1.2)), h=delta / 4)
dirs = np.linspace(0, math.pi, 12, endpoint=False)
prof = kakeya_maximal(f, delta, dirs)
print("direction -> (1/delta) * tube average:")
for th, v in zip(dirs[:4], prof.values[:4]):
    print(f"  theta={th:.2f}: {v:.3f}")
print(f"(a horizontal strip of the square has mass 2*delta, so values sit near 2)")

print("\n== Wolff annulus ==")
fw = GridFunction.from_callable(
    lambda x, y: 1.0 if abs(math.hypot(x, y) - 1.0) <= delta else 0.0,
    ((-1.3, 1.3), (-1.3, 1.3)), h=delta / 4)
pw = wolff_maximal(fw, delta, [1.0])
print(f"best annulus average at r=1: {pw.values[0]:.3f} vs 4*pi = {4 * math.pi:.3f}")

print("\n== Knapp sharpness ==")
deltas = [2.0 ** -e for e in range(4, 10)]
tables = knapp_experiment(1, [1.5, 3.0], deltas)
for tab in tables:
    print(f"p={tab['p']}: ratios "
          + ", ".join(f"{r['ratio']:.3f}" for r in tab["rows"])
          + f"  -> slope {tab['slope']:+.3f}")
print("below p = s+1 = 2 the ratio blows up as delta -> 0; above it decays")

fig, ax = plt.subplots(figsize=(6, 4))
for tab in tables:
    ax.plot([r["delta"] for r in tab["rows"]], [r["ratio"] for r in tab["rows"]],
            marker="o", label=f"p={tab['p']}")
ax.set_xscale("log", base=2)
ax.set_yscale("log", base=2)
ax.set_xlabel("delta")
ax.set_ylabel("operator ratio")
ax.legend()
fig.tight_layout()
fig.savefig("demos/out/knapp.svg")

print("\n== logarithmic sharpness along an osculating curve ==")
res = sharpness_log_experiment(1, [2.0 ** -e for e in range(4, 13)])
print(f"||f||_2^2 matches log((1+rho)/rho) to machine precision; "
      f"line-integral fit R^2 = {res['line_fit_r2']:.4f}, "
      f"slope {res['line_fit_slope']:.3f} per unit log(1/rho)")

fig, ax = plt.subplots(figsize=(6, 4))
ax.plot([r["log_inv_rho"] for r in res["rows"]],
        [r["line_integral"] for r in res["rows"]], "o-")
ax.set_xlabel("log(1/rho)")
ax.set_ylabel("integral along y = t^2")
fig.tight_layout()
fig.savefig("demos/out/sharpness.svg")
print("wrote demos/out/knapp.svg and demos/out/sharpness.svg")
