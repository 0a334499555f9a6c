"""Command-line driver.

Subcommands:
    simulate <config>...   run the graph solver, write requested outputs
    field <config>...      vector-field SVG only (no run)
    verify <config>...     run + requested checks, CI-friendly exit code
    compare <config>...    graph solver vs front-tracking oracle (Hausdorff)

Every subcommand writes a JSON report into the output directory. The exit
status is nonzero iff any requested check fails or any run errors.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import analysis
from .ambient import hausdorff, run_ambient
from .chart import admissible_interval, to_ambient
from .config import build_initial, parse_config
from .curves import build_target
from .emit import emit_csv, emit_svg_evolution, emit_svg_field, write_report
from .errors import TargetFlowError
from .flow import SolverConfig, run
from .forcing import select_C


def _load_config(path):
    text = Path(path).read_text()
    cfg = parse_config(text)
    return cfg


def _setup(cfg):
    curve = build_target(cfg.curve, cfg.n)
    chart = admissible_interval(curve)
    override = None if cfg.C == "auto" else float(cfg.C)
    forcing = select_C(curve, chart, override=override)
    return curve, chart, forcing


def _barrier_bracket(cfg, r0, chart):
    """Default barrier constants: 1% beyond the initial range, with the
    off-sign branch padded to a small fraction of the data span."""
    lo = float(np.min(r0))
    hi = float(np.max(r0))
    span = max(hi, 0.0) - min(lo, 0.0)
    span = span if span > 0 else 1e-6
    r1 = 1.01 * lo if lo < 0 else -0.01 * span
    r2 = 1.01 * hi if hi > 0 else 0.01 * span
    r1 = cfg.check_param("barrier_r1", r1)
    r2 = cfg.check_param("barrier_r2", r2)
    if np.isfinite(chart.r_lo):
        r1 = max(r1, chart.band_lo)
    return float(r1), float(min(r2, chart.band_hi))


def _run_checks(cfg, curve, chart, forcing, trace, out_dir, run_id):
    results = []
    for name in cfg.checks:
        if name == "barrier":
            r1, r2 = _barrier_bracket(cfg, trace.r0, chart)
            results.append(analysis.barrier_check(
                trace, r1, r2, forcing.C, tol=cfg.check_param("barrier_tol", 1e-8)))
        elif name == "gradient_envelope":
            results.append(analysis.gradient_envelope_check(
                trace, forcing.C, forcing.eps0_eff,
                slack=cfg.check_param("gradient_slack", 1.05)))
        elif name == "second_derivative_envelope":
            results.append(analysis.second_derivative_envelope_check(
                trace, forcing.C, eps0_eff=forcing.eps0_eff,
                slack=cfg.check_param("second_slack", 1.10)))
        elif name == "higher_derivative_decay":
            _, verdict = analysis.higher_derivative_decay(trace)
            results.append(verdict)
        elif name == "oracle":
            dist = _compare_with_oracle(cfg, curve, chart, forcing)
            tol = cfg.check_param("oracle_tol", 5e-3)
            results.append(analysis.CheckResult(
                "oracle", dist <= tol, tol - dist,
                f"hausdorff {dist:.3e} vs tolerance {tol:.3e}"))
    return results


def _compare_with_oracle(cfg, curve, chart, forcing, t_end=None):
    r0 = build_initial(cfg.initial, curve)
    t_end = t_end if t_end is not None else cfg.t_end
    solver = SolverConfig(dt=cfg.dt, t_end=t_end, tol_stop=None,
                          snapshot_every=max(1, cfg.snapshot_every))
    trace = run(r0, curve, forcing, solver)
    r_final = trace.snapshots[-1][1]
    graph_pts = to_ambient(chart, curve.u, r_final)
    dt_amb = cfg.check_param("oracle_dt", trace.meta["dt"] / 10.0)
    start = to_ambient(chart, curve.u, r0)
    poly, _ = run_ambient(start, chart, forcing, dt_amb, t_end)
    return hausdorff(graph_pts, poly.points)


def _fit_rates(trace):
    rates, _ = analysis.higher_derivative_decay(trace)
    return {f"m{m}": rates[m] for m in sorted(rates)}


def _execute(cfg, run_id, out_dir, mode):
    entry = {"id": run_id, "meta": {}}
    try:
        curve, chart, forcing = _setup(cfg)
        entry["meta"] = {"curve": curve.spec.label(), "n": curve.n,
                         "C": forcing.C, "dt": cfg.dt if cfg.dt != "auto" else "auto",
                         "t_end": cfg.t_end}
        base = Path(out_dir) / run_id
        if mode == "field":
            emit_svg_field(curve, chart, forcing, Path(str(base) + ".field.svg"))
            return entry
        if mode == "compare":
            dist = _compare_with_oracle(cfg, curve, chart, forcing)
            entry["checks"] = [{"name": "oracle",
                                "pass": bool(dist <= cfg.check_param("oracle_tol", 5e-3)),
                                "margin": cfg.check_param("oracle_tol", 5e-3) - dist,
                                "detail": f"hausdorff {dist:.3e}"}]
            return entry

        r0 = build_initial(cfg.initial, curve)
        solver = SolverConfig(n=cfg.n, dt=cfg.dt, t_end=cfg.t_end,
                              snapshot_every=cfg.snapshot_every,
                              tol_stop=cfg.tol_stop)
        trace = run(r0, curve, forcing, solver)
        entry["meta"]["dt"] = trace.meta["dt"]
        entry["rates"] = _fit_rates(trace)
        if "csv" in cfg.outputs:
            emit_csv(trace, base)
        if "svg_field" in cfg.outputs:
            emit_svg_field(curve, chart, forcing, Path(str(base) + ".field.svg"))
        if "svg_evolution" in cfg.outputs:
            emit_svg_evolution(curve, trace, Path(str(base) + ".evolution.svg"))
        if mode == "verify":
            checks = _run_checks(cfg, curve, chart, forcing, trace, out_dir, run_id)
            entry["checks"] = [{"name": c.name, "pass": c.passed,
                                "margin": c.margin, "detail": c.detail}
                               for c in checks]
    except TargetFlowError as exc:
        entry["error"] = f"{type(exc).__name__}: {exc}"
    return entry


def run_batch(configs, out_dir=".", mode="verify", jobs=1):
    """Execute parsed (id, RunConfig) pairs; write report.json; return
    (exit_code, report). Per-run errors are recorded, not fatal."""
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(
                lambda item: _execute(item[1], item[0], out_dir, mode), configs))
    else:
        entries = [_execute(cfg, rid, out_dir, mode) for rid, cfg in configs]
    report = {"runs": entries}
    write_report(report, Path(out_dir) / "report.json")
    failed = any(
        ("error" in e) or any(not c["pass"] for c in e.get("checks", ()))
        for e in entries)
    return (1 if failed else 0), report


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="targetflow",
        description="Forced curve-shortening flow onto a prescribed target curve")
    parser.add_argument("--out-dir", default=None, help="output directory override")
    parser.add_argument("--seed", type=int, default=0,
                        help="RNG seed (reserved for fuzzed tests)")
    parser.add_argument("--jobs", type=int, default=1,
                        help="concurrent runs within a batch")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("simulate", "run the graph solver and write outputs"),
                       ("field", "emit the vector-field SVG only"),
                       ("verify", "run and execute the requested checks"),
                       ("compare", "graph solver vs front-tracking oracle")):
        p = sub.add_parser(name, help=text)
        p.add_argument("configs", nargs="+", help="YAML config file(s)")
    args = parser.parse_args(argv)

    items = []
    for path in args.configs:
        try:
            cfg = _load_config(path)
        except (OSError, TargetFlowError) as exc:
            print(f"error: {path}: {exc}", file=sys.stderr)
            return 2
        items.append((Path(path).stem, cfg))
    out_dir = args.out_dir or (items[0][1].out_dir if items else ".")
    code, report = run_batch(items, out_dir=out_dir, mode=args.command,
                             jobs=max(1, args.jobs))
    for entry in report["runs"]:
        status = "ERROR" if "error" in entry else "ok"
        for check in entry.get("checks", ()):
            status = "pass" if check["pass"] else "FAIL"
            print(f"{entry['id']}: {check['name']}: {status} ({check['detail']})")
        if "error" in entry:
            print(f"{entry['id']}: {entry['error']}")
        elif not entry.get("checks"):
            print(f"{entry['id']}: {status}")
    return code


if __name__ == "__main__":
    sys.exit(main())
