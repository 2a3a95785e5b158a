"""Numerical verifiers for the quantitative one-variable inequalities.

Each checker validates its own hypotheses first (raising PreconditionError,
which is never a lemma failure), then tests the conclusion with an explicit
constant.  Constants are deliberately explicit rather than tight and can be
overridden; enlarging one never flips a pass into a failure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .poly import (
    PolyCurve,
    ck_norm,
    inf_abs_jet_sum,
    poly_eval,
    real_roots,
    sup_abs,
)

PASS_SLACK = 1e-9


class PreconditionError(ValueError):
    """Instance violates a checker's hypotheses; not a lemma failure."""


@dataclass
class LemmaReport:
    lemma: str
    instance: str
    lhs: float
    rhs: float
    constant: float
    margin: float = 0.0
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs * (1.0 + PASS_SLACK) + PASS_SLACK

    def to_dict(self) -> dict:
        return {"lemma": self.lemma, "instance": self.instance, "lhs": self.lhs,
                "rhs": self.rhs, "constant": self.constant, "pass": self.passed,
                "margin": self.margin, "detail": self.detail}


def _finish(lemma, instance, lhs, rhs, constant, detail=None) -> LemmaReport:
    return LemmaReport(lemma=lemma, instance=instance, lhs=float(lhs), rhs=float(rhs),
                       constant=float(constant), margin=float(rhs - lhs),
                       detail=detail or {})


def derivative_chain_constant(k: int) -> float:
    """Explicit constant for the small-on-an-interval derivative bounds."""
    return 2.0 * 8.0 ** (k * k) * k


def remez_check(coeffs, interval, e_intervals) -> LemmaReport:
    """sup_I |P| <= (4|I|/|E|)^D * sup_E |P| for E a finite interval union."""
    lo, hi = interval
    if hi <= lo:
        raise PreconditionError("empty interval I")
    e_len = 0.0
    sup_e = 0.0
    for a, b in e_intervals:
        if a < lo - 1e-12 or b > hi + 1e-12 or b < a:
            raise PreconditionError(f"E component [{a}, {b}] not inside I")
        e_len += b - a
        if b > a:
            sup_e = max(sup_e, sup_abs(coeffs, a, b))
    if e_len <= 0:
        raise PreconditionError("E has measure zero")
    from .poly import trim

    deg = max(len(trim(coeffs)) - 1, 1)
    factor = (4.0 * (hi - lo) / e_len) ** deg
    lhs = sup_abs(coeffs, lo, hi)
    return _finish("remez", f"deg={deg} |I|={hi - lo:.3g} |E|={e_len:.3g}",
                   lhs, factor * sup_e, factor,
                   {"sup_E": sup_e, "degree": deg})


def polya_check(coeffs, lam: float) -> LemmaReport:
    """|{x : |P(x)| <= lam}| <= 4 (lam / 2|a|)^(1/D) for leading coefficient a.

    The sublevel set is computed exactly from the real roots of P -+ lam:
    consecutive roots bound the sign-constant pieces of |P| - lam.
    """
    from .poly import as_coeffs, trim

    raw = as_coeffs(coeffs)
    if len(raw) >= 2 and raw[-1] == 0.0:
        raise PreconditionError("leading coefficient is zero (degree drop)")
    c = trim(raw)
    deg = len(c) - 1
    if deg < 1:
        raise PreconditionError("leading coefficient must be nonzero")
    a = abs(float(c[-1]))
    if lam <= 0:
        raise PreconditionError("lam must be positive")
    # window surely containing the sublevel set: |P| <= lam is bounded
    bound = 2.0 + (lam + float(np.sum(np.abs(c[:-1])))) / a
    cuts = set()
    for shift in (-lam, lam):
        shifted = c.copy()
        shifted[0] += shift
        cuts.update(float(r) for r in real_roots(shifted, -bound, bound))
    nodes = sorted(cuts | {-bound, bound})
    measure = 0.0
    for x0, x1 in zip(nodes[:-1], nodes[1:]):
        if abs(poly_eval(c, 0.5 * (x0 + x1))) <= lam:
            measure += x1 - x0
    rhs = 4.0 * (lam / (2.0 * a)) ** (1.0 / deg)
    return _finish("polya", f"deg={deg} lam={lam:.3g} lead={a:.3g}",
                   measure, rhs, 4.0, {"degree": deg})


def derivative_bound_check(f: PolyCurve, delta: float, interval, k: int,
                           K: float = None) -> LemmaReport:
    """If ||f||_Ck <= 1 and |f| <= delta on I with |I| <= delta^(1/k), then
    sup_I |f^(i)| <= K delta |I|^(-i) for every i < k."""
    lo, hi = interval
    length = hi - lo
    if length <= 0:
        raise PreconditionError("empty interval")
    if length > delta ** (1.0 / k) * (1.0 + 1e-12):
        raise PreconditionError(f"|I|={length:.3g} exceeds delta^(1/k)={delta ** (1.0 / k):.3g}")
    _, norm_up = ck_norm(f, k)
    if norm_up > 1.0 + 1e-9:
        raise PreconditionError(f"C^{k} norm {norm_up:.6g} exceeds 1")
    sup0 = sup_abs(f.coeffs, lo, hi)
    if sup0 > delta * (1.0 + 1e-9):
        raise PreconditionError(f"sup_I |f| = {sup0:.3g} exceeds delta = {delta:.3g}")
    K = K if K is not None else derivative_chain_constant(k)
    worst_ratio, worst_i = 0.0, 0
    per = []
    for i in range(k):
        lhs_i = sup_abs(f.der_coeffs(i), lo, hi)
        rhs_i = K * delta * length ** (-i)
        per.append((lhs_i, rhs_i))
        if rhs_i > 0 and lhs_i / rhs_i > worst_ratio:
            worst_ratio, worst_i = lhs_i / rhs_i, i
    lhs, rhs = per[worst_i]
    return _finish("derivative_bound", f"k={k} delta={delta:.3g} |I|={length:.3g}",
                   lhs, rhs, K, {"worst_order": worst_i,
                                 "all_orders": [(float(a), float(b)) for a, b in per]})


def long_rect_check(f: PolyCurve, delta: float, T: float, a: float, k: int) -> LemmaReport:
    """Smallness over a long thin window upgrades to a plain window.

    With |f| <= delta on [a, a + (T delta)^(1/(k-1))] and ||f||_Ck <= 1, set
    rho = max(delta, T^-k): then |f| <= C rho on [a, a + rho^(1/k)], where C
    is assembled from the derivative chain and the Taylor remainder.
    """
    if k < 2:
        raise PreconditionError("upgrade step needs k >= 2")
    if not (1.0 <= T <= 1.0 / delta + 1e-9):
        raise PreconditionError("T must lie in [1, 1/delta]")
    pre_len = (T * delta) ** (1.0 / (k - 1))
    if a < 0 or a + pre_len > 1.0 + 1e-12:
        raise PreconditionError("long window leaves [0,1]")
    _, norm_up = ck_norm(f, k)
    if norm_up > 1.0 + 1e-9:
        raise PreconditionError(f"C^{k} norm {norm_up:.6g} exceeds 1")
    sup_pre = sup_abs(f.coeffs, a, a + pre_len)
    if sup_pre > delta * (1.0 + 1e-9):
        raise PreconditionError(f"sup over the long window = {sup_pre:.3g} exceeds delta")

    rho = max(delta, T ** (-float(k)))
    out_len = rho ** (1.0 / k)
    lhs = sup_abs(f.coeffs, a, min(a + out_len, 1.0))
    if T >= delta ** (-1.0 / k) - 1e-12:
        # long window already contains the target window
        return _finish("long_rect", f"k={k} T={T:.3g} (containment branch)",
                       lhs, delta, 1.0, {"rho": rho, "branch": "containment"})
    K = derivative_chain_constant(k)
    C = sum(K * (delta * pre_len ** (-i)) * rho ** (i / k) / math.factorial(i)
            for i in range(k)) / rho + 1.0 / math.factorial(k)
    return _finish("long_rect", f"k={k} T={T:.3g} delta={delta:.3g}",
                   lhs, C * rho, C, {"rho": rho, "branch": "chain"})


def pigeonhole_rect_check(curves, delta: float, A: float, k: int,
                          interval=(0.0, 1.0)) -> LemmaReport:
    """From pairwise sups <= A delta, extract a pairwise-delta subfamily.

    The witness comes from greedy clustering at radius delta/2 in the exact
    sup metric (cluster members are then pairwise delta-close); the target
    fraction is eps = 1 / (2 ceil(2A)).  Returns the witness indices.
    """
    curves = list(curves)
    n = len(curves)
    if n < 1:
        raise PreconditionError("need at least one curve")
    lo, hi = interval
    sups = _pairwise_sups(curves, lo, hi)
    if sups.max() > A * delta * (1.0 + 1e-9):
        raise PreconditionError(
            f"pairwise sup {sups.max():.3g} exceeds A*delta = {A * delta:.3g}")
    eps = 1.0 / (2.0 * math.ceil(2.0 * A))
    if sups.max() <= delta * (1.0 + 1e-12):
        witness = list(range(n))
    else:
        # cluster at delta/2 around the best-connected member
        within = sups <= delta / 2.0
        center = int(np.argmax(within.sum(axis=1)))
        witness = [j for j in range(n) if within[center, j]]
        wit_sups = sups[np.ix_(witness, witness)]
        assert wit_sups.max() <= delta * (1.0 + 1e-12), "cluster not pairwise delta-close"
    frac = len(witness) / n
    return _finish("pigeonhole_rect", f"n={n} A={A:.3g} k={k}",
                   eps, frac, eps, {"witness": witness, "witness_fraction": frac})


def _pairwise_sups(curves, lo: float, hi: float) -> np.ndarray:
    """Matrix of exact sup |f_i - f_j| over [lo, hi].

    Differences whose trailing coefficients cancel (common high-degree part)
    drop to the closed-form quadratic path automatically.
    """
    from .poly import sup_abs_batch

    n = len(curves)
    width = max(len(c.coeffs) for c in curves)
    mat = np.zeros((n, width))
    for i, c in enumerate(curves):
        mat[i, : len(c.coeffs)] = c.coeffs
    diffs = mat[:, None, :] - mat[None, :, :]
    flat = diffs.reshape(n * n, width)
    nz = np.nonzero(np.any(flat != 0.0, axis=0))[0]
    eff_width = int(nz[-1]) + 1 if nz.size else 1
    if eff_width <= 3:
        sups = sup_abs_batch(flat[:, :eff_width], lo, hi).reshape(n, n)
    else:
        sups = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                s = sup_abs(flat[i * n + j], lo, hi)
                sups[i, j] = sups[j, i] = s
    return sups


def cinematic_norm_check(f: PolyCurve, interval, sub_interval, K: float,
                         delta: float, k: int, C: float = None) -> LemmaReport:
    """Smallness on a subwindow controls the whole C^k norm, given that the
    norm is comparable to the jet sum everywhere.

    Hypotheses (verified): ||f||_Ck(I) <= 1; sup_J |f| <= delta; and
    ||f||_Ck(I) <= K inf_I sum_j |f^(j)|.  Conclusion:
    ||f||_Ck(I) <= C (K/|J|)^k delta with C = (k+2) * chain constant, valid
    for |J| <= delta^(1/k) via the chain bounds plus a mean-value point.
    """
    if k < 2:
        raise PreconditionError("stated for k >= 2")
    lo, hi = interval
    jlo, jhi = sub_interval
    if not (lo - 1e-12 <= jlo < jhi <= hi + 1e-12):
        raise PreconditionError("J must be a subinterval of I")
    jlen = jhi - jlo
    if jlen > min(delta ** (1.0 / k), 1.0) * (1.0 + 1e-12):
        raise PreconditionError(
            f"|J|={jlen:.3g} above delta^(1/k); constant derived for short J")
    _, norm_up = ck_norm(f, k, (lo, hi))
    if norm_up > 1.0 + 1e-9:
        raise PreconditionError(f"C^{k}(I) norm {norm_up:.6g} exceeds 1")
    if sup_abs(f.coeffs, jlo, jhi) > delta * (1.0 + 1e-9):
        raise PreconditionError("sup over J exceeds delta")
    inf_sum = inf_abs_jet_sum(f.coeffs, k, lo, hi)
    if norm_up > K * inf_sum * (1.0 + 1e-9):
        raise PreconditionError(
            f"norm {norm_up:.3g} exceeds K * inf jet sum = {K * inf_sum:.3g}")
    C = C if C is not None else (k + 2.0) * derivative_chain_constant(k)
    rhs = C * (K / jlen) ** k * delta
    return _finish("cinematic_norm", f"k={k} K={K:.3g} |J|={jlen:.3g}",
                   norm_up, rhs, C, {"inf_jet_sum": inf_sum})
