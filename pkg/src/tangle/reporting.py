"""Run artifacts: manifest, RFC 4180 CSV, JSON/XML reports, SVG plots.

results.csv is the determinism surface: identical config and seed must
reproduce it byte for byte, so all floats are written with shortest
round-trip repr and row order is fixed by the producer.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import time
from xml.sax.saxutils import escape

TOOL_VERSION = "0.1.0"


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_results_csv(path: str, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def config_hash(config_dict: dict) -> str:
    blob = json.dumps(config_dict, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def write_manifest(outdir: str, config_dict: dict, wall_time_s: float,
                   threads: int, extra: dict = None):
    doc = {
        "tool": "tangle",
        "version": TOOL_VERSION,
        "config": config_dict,
        "config_hash": config_hash(config_dict),
        "threads": threads,
        "wall_time_s": wall_time_s,
    }
    if extra:
        doc.update(extra)
    with open(os.path.join(outdir, "manifest.json"), "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_report_json(outdir: str, report: dict, name: str = "report.json"):
    with open(os.path.join(outdir, name), "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    try:
        import numpy as np

        if isinstance(obj, (np.integer,)):
            return int(obj)
        if isinstance(obj, (np.floating,)):
            return float(obj)
        if isinstance(obj, np.ndarray):
            return obj.tolist()
    except ImportError:
        pass
    raise TypeError(f"not JSON serializable: {type(obj)}")


def write_junit_xml(path: str, suite_name: str, reports):
    """JUnit-style XML for lemma suite reports (LemmaReport objects)."""
    failures = sum(0 if r.passed else 1 for r in reports)
    buf = io.StringIO()
    buf.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    buf.write(f'<testsuite name="{escape(suite_name)}" tests="{len(reports)}" '
              f'failures="{failures}">\n')
    for i, r in enumerate(reports):
        name = escape(f"{r.lemma}[{i}] {r.instance}")
        buf.write(f'  <testcase classname="{escape(r.lemma)}" name="{name}"')
        if r.passed:
            buf.write("/>\n")
        else:
            msg = escape(f"lhs={r.lhs!r} rhs={r.rhs!r} repro: "
                         f"{r.detail.get('repro', 'n/a')}")
            buf.write(f'>\n    <failure message="{msg}"/>\n  </testcase>\n')
    buf.write("</testsuite>\n")
    with open(path, "w") as fh:
        fh.write(buf.getvalue())


def svg_line_plot(path: str, series, xlabel: str, ylabel: str, title: str,
                  loglog: bool = False, salt: str = "tangle"):
    """One SVG line plot; ``series`` is a list of (label, xs, ys)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = salt
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, xs, ys in series:
        ax.plot(xs, ys, marker="o", label=label)
    if loglog:
        ax.set_xscale("log", base=2)
        ax.set_yscale("log", base=2)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    if len(series) > 1:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def now() -> float:
    return time.time()


# anchors naming each checked inequality, printed in aggregate reports
INEQUALITY_ANCHORS = {
    "remez": "sup_I|P| <= (4|I|/|E|)^D sup_E|P|",
    "polya": "|{|P|<=lam}| <= 4(lam/2|a|)^(1/D)",
    "derivative_bound": "sup_I|f^(i)| <= K d |I|^-i",
    "long_rect": "|f| <= C max(d, T^-k) on the short window",
    "pigeonhole_rect": "witness fraction >= 1/(2 ceil 2A)",
    "gronwall_closeness": "sup|f-g| <= C e^(L|I|) rho",
    "cinematic_norm": "||f||_Ck <= C (K/|J|)^k d",
    "wongkew": "|B cap N_rho(Z)| <= C (deg Q)^n rho r^(n-1)",
    "rect-bound": "#R <= d^-eps (#F/mu)^((k+1)/k)",
    "cordoba": "||sum chi||_2 <= 4 sqrt(log 1/d) d #F",
    "knapp": "||M_d f||_p / ||f||_p slope vs p threshold",
    "sharpness": "||f||_{s+1}^{s+1} = log((1+rho)/rho); line integral ~ log(1/rho)",
    "furstenberg": "|E| >= d^(2-alpha-beta+eps)",
    "quasi-product": "|X| <= d^(2-alpha-q-2eta)",
}


def markdown_report(run_dirs, out_path: str):
    """Aggregate manifest+report pairs into one markdown summary."""
    sections = {}
    skipped = []
    for d in sorted(run_dirs):
        man_path = os.path.join(d, "manifest.json")
        rep_path = os.path.join(d, "report.json")
        if not os.path.exists(man_path):
            skipped.append(d)
            continue
        with open(man_path) as fh:
            man = json.load(fh)
        rep = {}
        if os.path.exists(rep_path):
            with open(rep_path) as fh:
                rep = json.load(fh)
        kind = man.get("config", {}).get("kind", "unknown")
        sections.setdefault(kind, []).append((d, man, rep))

    lines = ["# tangle experiment summary", ""]
    total_pass = total_fail = 0
    for kind in sorted(sections):
        lines.append(f"## {kind}")
        anchor = INEQUALITY_ANCHORS.get(kind)
        if anchor:
            lines.append(f"checked inequality: `{anchor}`")
        lines.append("")
        lines.append("| run | seed | pass | detail |")
        lines.append("|---|---|---|---|")
        for d, man, rep in sections[kind]:
            ok = rep.get("pass", rep.get("all_pass"))
            if ok is True:
                total_pass += 1
            elif ok is False:
                total_fail += 1
            detail = rep.get("summary", "")
            lines.append(f"| {os.path.basename(d.rstrip('/'))} "
                         f"| {man.get('config', {}).get('seed')} "
                         f"| {ok} | {detail} |")
        lines.append("")
    lines.append(f"## roll-up\n\npass: {total_pass}  fail: {total_fail}  "
                 f"skipped (no manifest): {len(skipped)}")
    if skipped:
        lines.append("")
        for d in skipped:
            lines.append(f"- skipped {d}: missing manifest.json")
    text = "\n".join(lines) + "\n"
    with open(out_path, "w") as fh:
        fh.write(text)
    return text
