"""Command-line experiment runner: configs in, reproducible artifacts out.

Every run writes manifest.json (resolved config + hash + wall time),
results.csv (the determinism surface: byte-identical for identical config
and seed), report.json, and optional plots/*.svg.  Exit codes: 0 success,
1 lemma failure, 2 config/schema violation (message carries the field
path), 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import config as cfgmod
from . import reporting
from .config import ConfigError, ExperimentConfig
from .rectangles import GridCapError

EXIT_OK = 0
EXIT_LEMMA_FAIL = 1
EXIT_CONFIG = 2
EXIT_RESOURCE = 3


def _outdir(cfg: ExperimentConfig, cli_out):
    out = cli_out or cfg.out or f"runs/{cfg.kind}"
    os.makedirs(out, exist_ok=True)
    os.makedirs(os.path.join(out, "plots"), exist_ok=True)
    return out


def _load_cfg(args, kind: str) -> ExperimentConfig:
    if args.config:
        cfg = cfgmod.load(args.config)
        if cfg.kind != kind:
            raise ConfigError("kind", f"config is for {cfg.kind!r}, command is {kind!r}")
    else:
        doc = {"kind": kind, "params": {}}
        if args.seed is not None or kind in cfgmod.RANDOMIZED_KINDS:
            doc["seed"] = args.seed if args.seed is not None else 0
        cfg = cfgmod.validate(doc)
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def run_family(cfg, outdir, threads):
    from .family import (build_family, cinematic_check, circle_spec,
                         ellipse_spec, forbid_constant, moment_spec,
                         transversality_rank)
    from .poly import family_to_json

    p = cfg.params
    fam_kind = p.get("family", "moment")
    if fam_kind == "moment":
        m = int(p.get("m", 2))
        spec = moment_spec(m)
    elif fam_kind == "circle":
        spec = circle_spec()
    else:
        spec = ellipse_spec()
    grid = p.get("grid", [3] * spec.m)
    k = int(p.get("k", spec.m - 1))
    fam = build_family(spec, grid, seed=cfg.seed, k=k)
    c_val, dups = forbid_constant(fam, k)
    cine = cinematic_check(spec, int(p.get("samples", 200)), seed=cfg.seed)
    s = int(p.get("s", max(spec.m - 1, 1)))
    trans = transversality_rank(spec, s, int(p.get("samples", 200)), seed=cfg.seed)
    with open(os.path.join(outdir, "family.json"), "w") as fh:
        fh.write(family_to_json(list(fam), k, provenance=f"{fam_kind} seed={cfg.seed}"))
    from .poly import ck_norm

    rows = [(i, c.degree, repr(ck_norm(c, k)[1])) for i, c in enumerate(fam)]
    reporting.write_results_csv(os.path.join(outdir, "results.csv"),
                                ["curve", "degree", "ck_norm_upper"], rows)
    report = {"kind": "family", "family": fam_kind, "n_curves": len(fam),
              "rescale_factor": fam.rescale_factor,
              "forbid_constant": None if math.isinf(c_val) else c_val,
              "duplicate_pairs": dups,
              "cinematic_min_abs_det": cine["min_abs_det"],
              "transversality": {k_: v for k_, v in trans.items() if k_ != "argmin"},
              "pass": cine["min_abs_det"] > 0 and not dups,
              "summary": f"{len(fam)} curves, c={c_val:.4g}, min|det|={cine['min_abs_det']:.4g}"}
    return report, None


def run_rect_bound(cfg, outdir, threads):
    from .broadness import verify_rect_bound
    from .poly import PolyCurve, ck_norm
    from . import rng

    p = cfg.params
    deltas = [float(d) for d in p.get("deltas", [2.0 ** -6])]
    k = int(p["k"])
    mus = [int(m) for m in p.get("mus", [2])]
    n_curves = int(p.get("n_curves", 100))
    eps = float(p.get("eps", 0.3))
    eta = float(p.get("eta", 0.05))
    rows = []
    all_pass = True
    for d_i, delta in enumerate(deltas):
        curves = []
        for i in range(n_curves):
            g = rng.stream(cfg.seed, d_i, i)
            c = g.uniform(-1.0, 1.0, k + 1)
            _, up = ck_norm(PolyCurve(c), k)
            curves.append(PolyCurve(c / (up * 1.0000001) * g.uniform(0.2, 1.0)))
        reports = verify_rect_bound(curves, delta, k, eps, eta, mus)
        for rep in reports:
            all_pass &= rep["pass"]
            rows.append((repr(delta), rep["mu"], rep["n_curves"], rep["observed"],
                         repr(rep["bound"]), rep["pass"]))
    reporting.write_results_csv(os.path.join(outdir, "results.csv"),
                                ["delta", "mu", "n_curves", "observed", "bound", "pass"],
                                rows)
    report = {"kind": "rect-bound", "k": k, "eps": eps, "eta": eta,
              "pass": bool(all_pass),
              "summary": f"{len(rows)} instances, all within the bound: {all_pass}"}
    return report, None


def _integrand_from_params(p, delta):
    from .raster import GridFunction

    spec = p.get("integrand", {"shape": "box", "box": [[0.0, 1.0], [0.0, 1.0]],
                               "extent": [[-0.2, 1.2], [-0.2, 1.2]]})
    h = float(spec.get("h", delta / 4.0))
    if spec.get("shape", "box") == "box":
        box = spec.get("box", [[0.0, 1.0], [0.0, 1.0]])
        extent = spec.get("extent", [[-0.2, 1.2], [-0.2, 1.2]])
        return GridFunction.indicator_box(
            ((box[0][0], box[0][1]), (box[1][0], box[1][1])),
            ((extent[0][0], extent[0][1]), (extent[1][0], extent[1][1])), h)
    if spec["shape"] == "annulus":
        r0 = float(spec.get("radius", 1.0))
        w = float(spec.get("half_width", delta))
        pad = r0 + 2 * w + 0.1
        return GridFunction.from_callable(
            lambda x, y: 1.0 if abs(math.hypot(x, y) - r0) <= w else 0.0,
            ((-pad, pad), (-pad, pad)), h)
    raise ConfigError("params.integrand.shape", f"unknown shape {spec.get('shape')!r}")


def run_maximal(cfg, outdir, threads):
    from .maximal import cinematic_maximal, kakeya_maximal, wolff_maximal
    from .family import moment_spec

    p = cfg.params
    op = p.get("operator", "kakeya")
    delta = float(p.get("delta", 2.0 ** -4))
    f = _integrand_from_params(p, delta)
    richardson = bool(p.get("richardson", True))

    def profile(h_scale):
        h = min(f.h, delta / 4.0) * h_scale
        if op == "kakeya":
            n_dir = int(p.get("directions", max(int(math.pi / delta), 8)))
            dirs = np.linspace(0.0, math.pi, n_dir, endpoint=False)
            return kakeya_maximal(f, delta, dirs, h=h)
        if op == "wolff":
            n_r = int(p.get("radii", max(int(1.0 / delta), 8)))
            radii = np.linspace(1.0, 2.0, n_r)
            return wolff_maximal(f, delta, radii, h=h)
        if op == "cinematic":
            m = int(p.get("m", 2))
            s = int(p.get("s", m - 1))
            spec = moment_spec(m)
            nv = int(p.get("v_count", max(int(1.0 / delta), 8)))
            v_grid = np.linspace(0.0, 1.0, nv)[:, None]
            return cinematic_maximal(spec, f, delta, v_grid, s=s, h=h)
        raise ConfigError("params.operator", f"unknown operator {op!r}")

    prof = profile(1.0)
    err = np.full(len(prof.values), float("nan"))
    if richardson:
        finer = profile(0.5)
        err = np.abs(prof.values - finer.values)
    rows = [(repr(float(x)), repr(float(v)), repr(float(e)))
            for x, v, e in zip(prof.params, prof.values, err)]
    reporting.write_results_csv(os.path.join(outdir, "results.csv"),
                                ["parameter", "value", "quadrature_error"], rows)
    reporting.svg_line_plot(os.path.join(outdir, "plots", "profile.svg"),
                            [(op, prof.params, prof.values)],
                            "parameter", "maximal average", f"{op} profile, delta={delta}",
                            salt=reporting.config_hash(cfg.to_dict()))
    report = {"kind": "maximal", "operator": op, "delta": delta,
              "sup": prof.sup(), "quadrature": prof.quadrature,
              "max_richardson_error": (None if not richardson
                                       else float(np.nanmax(err))),
              "pass": True,
              "summary": f"{op} sup={prof.sup():.4g}"}
    return report, None


def run_knapp(cfg, outdir, threads):
    from .maximal import knapp_experiment

    p = cfg.params
    s = int(p.get("s", 1))
    ps = [float(q) for q in p.get("ps", [1.5, 3.0])]
    exps = p.get("delta_exponents", list(range(4, 11)))
    deltas = [2.0 ** -int(e) for e in exps]
    tables = knapp_experiment(s, ps, deltas)
    rows = []
    series = []
    for tab in tables:
        for r in tab["rows"]:
            rows.append((repr(tab["p"]), repr(r["delta"]), repr(r["ratio"]),
                         repr(r["m_norm"]), repr(r["f_norm"])))
        series.append((f"p={tab['p']}", [r["delta"] for r in tab["rows"]],
                       [r["ratio"] for r in tab["rows"]]))
    reporting.write_results_csv(os.path.join(outdir, "results.csv"),
                                ["p", "delta", "ratio", "m_norm", "f_norm"], rows)
    reporting.svg_line_plot(os.path.join(outdir, "plots", "knapp.svg"), series,
                            "delta", "operator ratio", f"Knapp ratios, s={s}",
                            loglog=True, salt=reporting.config_hash(cfg.to_dict()))
    report = {"kind": "knapp", "s": s,
              "slopes": {str(t["p"]): t["slope"] for t in tables},
              "pass": True,
              "summary": ", ".join(f"slope(p={t['p']})={t['slope']:.3f}" for t in tables)}
    return report, None


def run_sharpness(cfg, outdir, threads):
    from .maximal import sharpness_log_experiment

    p = cfg.params
    s = int(p.get("s", 1))
    exps = p.get("rho_exponents", list(range(4, 13)))
    rhos = [2.0 ** -int(e) for e in exps]
    res = sharpness_log_experiment(s, rhos)
    rows = [(repr(r["rho"]), repr(r["norm_power"]), repr(r["norm_closed_form"]),
             repr(r["line_integral"])) for r in res["rows"]]
    reporting.write_results_csv(os.path.join(outdir, "results.csv"),
                                ["rho", "norm_power", "norm_closed_form",
                                 "line_integral"], rows)
    reporting.svg_line_plot(
        os.path.join(outdir, "plots", "sharpness.svg"),
        [("line integral", [r["log_inv_rho"] for r in res["rows"]],
          [r["line_integral"] for r in res["rows"]])],
        "log(1/rho)", "integral along osculating curve", f"log law, s={s}",
        salt=reporting.config_hash(cfg.to_dict()))
    max_rel = max(abs(r["norm_power"] - r["norm_closed_form"]) / r["norm_closed_form"]
                  for r in res["rows"])
    report = {"kind": "sharpness", "s": s, "fit_r2": res["line_fit_r2"],
              "fit_slope": res["line_fit_slope"],
              "max_norm_rel_err": max_rel,
              "pass": bool(res["line_fit_r2"] >= 0.98 and max_rel <= 0.01),
              "summary": f"R2={res['line_fit_r2']:.4f}, norm err={max_rel:.2e}"}
    return report, None


def run_furstenberg(cfg, outdir, threads):
    from .furstenberg import furstenberg_check, random_instance, save_instance_bundle
    from .raster import dump_pgm

    p = cfg.params
    delta = float(p.get("delta", 2.0 ** -8))
    k = int(p.get("k", 2))
    pairs = [(float(a), float(b)) for a, b in p.get("pairs", [[0.8, 0.5]])]
    n_inst = int(p.get("instances", 3))
    eps = float(p.get("eps", 0.3))
    rows = []
    all_pass = True
    first = None
    for pi, (alpha, beta) in enumerate(pairs):
        for j in range(n_inst):
            inst = random_instance(delta, alpha, beta, k, seed=cfg.seed * 1000 + pi * 100 + j)
            rep = furstenberg_check(inst, eps)
            all_pass &= rep["pass"]
            rows.append((repr(alpha), repr(beta), cfg.seed * 1000 + pi * 100 + j,
                         repr(rep["union_area"]), repr(rep["bound"]),
                         rep["holder_ok"], rep["pass"]))
            if first is None:
                first = (inst, rep)
    reporting.write_results_csv(os.path.join(outdir, "results.csv"),
                                ["alpha", "beta", "seed", "union_area", "bound",
                                 "holder_ok", "pass"], rows)
    if first is not None:
        inst0, rep0 = first
        save_instance_bundle(inst0, os.path.join(outdir, "instance0"), report=rep0)
        dump_pgm(inst0.shadings, inst0.raster, os.path.join(outdir, "instance0.pgm"))
    report = {"kind": "furstenberg", "delta": delta, "k": k, "eps": eps,
              "pass": bool(all_pass),
              "summary": f"{len(rows)} instances, all pass: {all_pass}"}
    return report, None


def run_lemmas(cfg, outdir, threads, only=None, index=None):
    from .suites import run_lemma_suite, run_one, LEMMA_NAMES

    p = cfg.params
    names = p.get("names", list(LEMMA_NAMES))
    if only:
        names = [only]
    n = int(p.get("instances", 1000))
    if index is not None:
        rep = run_one(only or names[0], cfg.seed, index)
        reports, tally = [rep], {rep.lemma: {"pass": int(rep.passed),
                                             "fail": int(not rep.passed),
                                             "precondition": 0}}
    else:
        reports, tally = run_lemma_suite(names, n, seed=cfg.seed, threads=threads)
    rows = [(name, t["pass"], t["fail"], t["precondition"]) for name, t in
            sorted(tally.items())]
    reporting.write_results_csv(os.path.join(outdir, "results.csv"),
                                ["lemma", "pass", "fail", "precondition"], rows)
    reporting.write_junit_xml(os.path.join(outdir, "lemmas.xml"), "tangle-lemmas",
                              reports)
    failures = [r.to_dict() for r in reports if not r.passed]
    all_pass = not failures
    report = {"kind": "lemmas", "instances": n, "tally": tally,
              "failures": failures, "pass": all_pass,
              "summary": f"{sum(t['pass'] for t in tally.values())} pass, "
                         f"{len(failures)} fail"}
    return report, (EXIT_OK if all_pass else EXIT_LEMMA_FAIL)


def run_wongkew(cfg, outdir, threads):
    from .suites import run_wongkew_reference

    p = cfg.params
    samples = int(p.get("samples", 100_000))
    rho = float(p.get("rho", 0.01))
    C = float(p.get("C", 8.0))
    reports = run_wongkew_reference(samples=samples, seed=cfg.seed, rho=rho, C=C)
    rows = []
    all_pass = True
    for rep in reports:
        exact = rep.detail["exact_area"]
        ci = rep.detail["volume_ci_95"]
        within = abs(rep.lhs - exact) <= 3.0 / 1.96 * ci + 1e-12
        all_pass &= rep.passed and within
        rows.append((rep.instance, repr(rep.lhs), repr(exact), repr(ci),
                     repr(rep.rhs), rep.passed, within))
    reporting.write_results_csv(os.path.join(outdir, "results.csv"),
                                ["case", "estimate", "exact", "ci95", "bound",
                                 "under_bound", "matches_exact_3sigma"], rows)
    report = {"kind": "wongkew", "samples": samples, "rho": rho, "C": C,
              "pass": bool(all_pass),
              "summary": f"strip+annulus, pass: {all_pass}"}
    return report, None


RUNNERS = {
    "family": run_family,
    "rect-bound": run_rect_bound,
    "maximal": run_maximal,
    "knapp": run_knapp,
    "sharpness": run_sharpness,
    "furstenberg": run_furstenberg,
    "lemmas": run_lemmas,
    "wongkew": run_wongkew,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tangle",
        description="curve-tangency laboratory: experiments in, reports out")
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in RUNNERS:
        sp = sub.add_parser(kind)
        sp.add_argument("--config", help="TOML experiment config")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--threads", type=int, default=None)
        sp.add_argument("--out", default=None)
        if kind == "lemmas":
            sp.add_argument("--only", default=None, help="run one lemma suite")
            sp.add_argument("--index", type=int, default=None,
                            help="reproduce a single instance")
    rp = sub.add_parser("report")
    rp.add_argument("run_dirs", nargs="+")
    rp.add_argument("--out", default="summary.md")
    args = parser.parse_args(argv)

    if args.command == "report":
        if not args.run_dirs:
            print("report: no run directories given", file=sys.stderr)
            return EXIT_CONFIG
        text = reporting.markdown_report(args.run_dirs, args.out)
        sys.stdout.write(text)
        return EXIT_OK

    try:
        cfg = _load_cfg(args, args.command)
        threads = cfgmod.resolve_threads(cfg, args.threads)
    except ConfigError as exc:
        print(f"config error at {exc.path or '<root>'}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    outdir = _outdir(cfg, args.out)
    t0 = reporting.now()
    try:
        if args.command == "lemmas":
            report, code = run_lemmas(cfg, outdir, threads,
                                      only=getattr(args, "only", None),
                                      index=getattr(args, "index", None))
        else:
            report, code = RUNNERS[args.command](cfg, outdir, threads)
    except ConfigError as exc:
        print(f"config error at {exc.path or '<root>'}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (GridCapError, MemoryError) as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    wall = reporting.now() - t0
    reporting.write_manifest(outdir, cfg.to_dict(), wall, threads)
    reporting.write_report_json(outdir, report)
    print(json.dumps({"out": outdir, "pass": report.get("pass"),
                      "summary": report.get("summary", "")}))
    return code if code is not None else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
