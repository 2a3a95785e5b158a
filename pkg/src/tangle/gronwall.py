"""Stability of near-solutions of a common ODE: the closeness certificate.

Two curves that almost satisfy the same n-th order ODE with an L-Lipschitz
right-hand side, and whose jets nearly agree at one time, stay within
C * exp(L |I|) * rho of each other on the whole interval.  The certificate
constructs the midpoint comparison solution explicitly with an adaptive
integrator and checks every hypothesis before asserting the conclusion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .lemmas import LemmaReport, PreconditionError, _finish
from .poly import PolyCurve, eval_jet, poly_eval, sup_abs, poly_sub

# proof-traced closeness constant (midpoint construction + triangle inequality)
GRONWALL_CONSTANT = 8.0


def _as_first_order(field_fn, n: int):
    def rhs(t, y):
        out = np.empty(n)
        out[:-1] = y[1:]
        out[-1] = field_fn(t, y)
        return out
    return rhs


def solve_jet_ivp(field_fn, n: int, t0: float, jet0, interval, tol: float):
    """Solve y^(n) = F(t, J_{n-1} y) with the given initial jet.

    Adaptive 4(5)-order integration at the requested tolerance; returns a
    dense-output callable for the solution's value component.
    """
    lo, hi = interval
    rhs = _as_first_order(field_fn, n)
    pieces = []
    if hi > t0:
        sol = solve_ivp(rhs, (t0, hi), np.asarray(jet0, dtype=float), method="RK45",
                        rtol=tol, atol=tol, dense_output=True)
        if not sol.success:
            raise ArithmeticError(f"forward integration failed: {sol.message}")
        pieces.append((t0, hi, sol.sol))
    if lo < t0:
        sol = solve_ivp(rhs, (t0, lo), np.asarray(jet0, dtype=float), method="RK45",
                        rtol=tol, atol=tol, dense_output=True)
        if not sol.success:
            raise ArithmeticError(f"backward integration failed: {sol.message}")
        pieces.append((lo, t0, sol.sol))

    def value(ts):
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        out = np.empty(len(ts))
        for i, t in enumerate(ts):
            for a, b, fn in pieces:
                if a - 1e-12 <= t <= b + 1e-12:
                    out[i] = fn(t)[0]
                    break
            else:
                raise ValueError(f"t={t} outside the solved interval")
        return out

    return value


def gronwall_closeness(f: PolyCurve, g: PolyCurve, field_fn, L: float, rho: float,
                       interval, n: int, grid_points: int = 257,
                       C: float = GRONWALL_CONSTANT) -> LemmaReport:
    """Certify sup_I |f - g| <= C exp(L |I|) rho for near-solutions f, g.

    Hypotheses, checked on a quadrature grid (the field is a black box):
      residuals |f^(n) - F(t, J_{n-1} f)| and the same for g at most rho;
      some grid point t0 with |J_n f(t0) - J_n g(t0)| <= rho (max norm).
    The midpoint comparison solution h is integrated at tolerance rho/100
    and its distances to f and g are reported alongside.
    """
    lo, hi = interval
    if hi <= lo:
        raise PreconditionError("empty interval")
    if n < 1:
        raise PreconditionError("order n must be >= 1")
    ts = np.linspace(lo, hi, grid_points)

    def residual(curve):
        worst = 0.0
        for t in ts:
            jp = eval_jet(curve, n, t)
            worst = max(worst, abs(jp.values[n] - field_fn(t, jp.values[:n])))
        return worst

    res_f, res_g = residual(f), residual(g)
    if res_f > rho * (1.0 + 1e-9):
        raise PreconditionError(f"residual of first curve {res_f:.3g} exceeds rho")
    if res_g > rho * (1.0 + 1e-9):
        raise PreconditionError(f"residual of second curve {res_g:.3g} exceeds rho")

    jet_gaps = np.empty(len(ts))
    for i, t in enumerate(ts):
        jf = eval_jet(f, n, t).values
        jg = eval_jet(g, n, t).values
        jet_gaps[i] = np.max(np.abs(jf - jg))
    i0 = int(np.argmin(jet_gaps))
    if jet_gaps[i0] > rho * (1.0 + 1e-9):
        raise PreconditionError(
            f"closest jets differ by {jet_gaps[i0]:.3g} > rho at every grid point")
    t0 = float(ts[i0])

    lhs = sup_abs(poly_sub(f.coeffs, g.coeffs), lo, hi)
    rhs = C * math.exp(L * (hi - lo)) * rho
    # midpoint comparison solution, as in the proof
    mid_jet = 0.5 * (eval_jet(f, n - 1, t0).values + eval_jet(g, n - 1, t0).values)
    h_value = solve_jet_ivp(field_fn, n, t0, mid_jet, interval, tol=rho / 100.0)
    hv = h_value(ts)
    dist_fh = float(np.max(np.abs(poly_eval(f.coeffs, ts) - hv)))
    dist_gh = float(np.max(np.abs(poly_eval(g.coeffs, ts) - hv)))
    return _finish("gronwall_closeness",
                   f"n={n} L={L:.3g} rho={rho:.3g} |I|={hi - lo:.3g}",
                   lhs, rhs, C,
                   {"t0": t0, "residual_f": res_f, "residual_g": res_g,
                    "dist_f_to_midpoint_solution": dist_fh,
                    "dist_g_to_midpoint_solution": dist_gh,
                    "ivp_tolerance": rho / 100.0})


@dataclass(frozen=True)
class LinearJetField:
    """F(t, x) = w . x + b(t) with polynomial drift; Lipschitz constant |w|_1.

    Fitting b := p^(n) - w . J_{n-1} p to a base polynomial p makes p an
    exact solution, which is how the randomized suite builds admissible
    instances with known answers.
    """

    weights: np.ndarray
    drift_coeffs: np.ndarray

    def __call__(self, t, x):
        return float(np.dot(self.weights, np.asarray(x)[: len(self.weights)])
                     + poly_eval(self.drift_coeffs, t))

    @property
    def lipschitz(self) -> float:
        return float(np.sum(np.abs(self.weights)))

    @classmethod
    def fitted_to(cls, p: PolyCurve, weights) -> "LinearJetField":
        w = np.asarray(weights, dtype=float)
        n = len(w)
        drift = p.der_coeffs(n).copy()
        for i, wi in enumerate(w):
            d = p.der_coeffs(i)
            drift = np.polynomial.polynomial.polysub(drift, wi * d)
        return cls(weights=w, drift_coeffs=drift)

    def residual_curve(self, q: PolyCurve) -> np.ndarray:
        """Coefficients of q^(n) - w . J_{n-1} q - b, the exact residual."""
        n = len(self.weights)
        out = q.der_coeffs(n).copy()
        for i, wi in enumerate(self.weights):
            out = np.polynomial.polynomial.polysub(out, wi * q.der_coeffs(i))
        return np.polynomial.polynomial.polysub(out, self.drift_coeffs)
