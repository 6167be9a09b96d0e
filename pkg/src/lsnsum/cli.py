"""Command-line driver: ``lsnsum {fit,compare,simulate,outage}``.

Exit codes: 0 ok, 2 input error, 3 numeric/fit failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .distributions import SkewNormalParams, lognormal_cdf, lsn_cdf
from .errors import LsnError
from .lsn_fit import FitResult, fit_fenton_wilkinson, fit_lsn
from .montecarlo import SampleSpec, empirical_cdf_at, horizontal_deviation_db, sample_sln
from .outage import difference_distribution, outage_curve
from .scenario import ScenarioError, load_network, load_scenario
from .special_fn import std_normal_quantile

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
GRID_POINTS = 400


def _fmt(x: float) -> str:
    return "" if x is None or not math.isfinite(x) else format(float(x), ".17g")


def _pscale(p: float) -> float | None:
    return float(std_normal_quantile(p)) if 0.0 < p < 1.0 else None


def fit_record(fit: FitResult) -> dict:
    p, pa = fit.params, fit.diagnostics
    return {
        "lambda": p.lam,
        "epsilon_db": p.epsilon_db,
        "omega_db": p.omega_db,
        "epsilon_nat": p.epsilon_nat,
        "omega_nat": p.omega_nat,
        "lambda0": fit.lambda0,
        "residual": fit.residual,
        "iterations": fit.iterations,
        "left_slope": pa.left_slope,
        "right_slope": pa.right_slope,
        "sum_b_tilde": pa.sum_b_tilde,
        "n_tilde": pa.n_tilde,
        "assumption_ok": pa.assumption_ok,
    }


def params_from_record(rec: dict) -> SkewNormalParams:
    """Rebuild the fitted parameters from a ``fit`` record (bit-exact via the natural fields)."""
    return SkewNormalParams(rec["lambda"], rec["epsilon_nat"], rec["omega_nat"])


def _apply_mc_overrides(spec: SampleSpec, args) -> SampleSpec:
    kw = {}
    if getattr(args, "seed", None) is not None:
        kw["seed"] = args.seed
    if getattr(args, "samples", None) is not None:
        kw["n_samples"] = args.samples
    if getattr(args, "streams", None) is not None:
        kw["n_streams"] = args.streams
    try:
        return replace(spec, **kw)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _emit_json(obj, out) -> None:
    text = json.dumps(obj, indent=2)
    if out is not None:
        Path(out).write_text(text + "\n")
    print(text)


def cmd_fit(args) -> int:
    sc = load_scenario(args.scenario)
    rec = fit_record(fit_lsn(sc.model()))
    rec["n"] = int(sc.means_db.size)
    _emit_json(rec, args.out)
    return EXIT_OK


def _grid_levels(levels) -> np.ndarray:
    base = np.arange(1, GRID_POINTS + 1) / (GRID_POINTS + 1)
    return np.unique(np.concatenate([base, np.asarray(levels, float)]))


def cmd_compare(args) -> int:
    sc = load_scenario(args.scenario)
    levels = args.levels if args.levels is not None else sc.levels
    spec = _apply_mc_overrides(sc.mc, args)
    model = sc.model()
    fit = fit_lsn(model)
    fw = fit_fenton_wilkinson(model)
    ecdf = sample_sln(model, spec, threads=args.threads)

    def cdf_lsn(x):
        return lsn_cdf(x, fit.params)

    def cdf_fw(x):
        return lognormal_cdf(x, fw)

    probs = _grid_levels(levels)
    k = np.clip(np.ceil(np.round(probs * ecdf.n, 9)).astype(np.int64), 1, ecdf.n)
    xs = np.unique(ecdf.sorted_values[k - 1])
    f_mc = np.atleast_1d(empirical_cdf_at(ecdf, xs))
    f_lsn = np.atleast_1d(cdf_lsn(xs))
    f_fw = np.atleast_1d(cdf_fw(xs))
    rows = [
        [_fmt(10.0 * math.log10(x)), _fmt(a), _fmt(b), _fmt(c),
         _fmt(_pscale(a)), _fmt(_pscale(b)), _fmt(_pscale(c))]
        for x, a, b, c in zip(xs, f_mc, f_lsn, f_fw)
    ]
    out = Path(args.out)
    _write_csv(out, ["x_db", "cdf_mc", "cdf_lsn", "cdf_fw", "pscale_mc", "pscale_lsn", "pscale_fw"], rows)

    dev_lsn = horizontal_deviation_db(cdf_lsn, ecdf, levels)
    dev_fw = horizontal_deviation_db(cdf_fw, ecdf, levels)
    report = {
        "levels": list(levels),
        "lsn_deviation_db": dev_lsn,
        "fw_deviation_db": dev_fw,
        "max_abs_lsn_db": max(abs(d) for d in dev_lsn),
        "max_abs_fw_db": max(abs(d) for d in dev_fw),
        "fit": fit_record(fit),
        "fenton_wilkinson": {"mu_db": fw.mu_db, "sigma_db": fw.sigma_db},
        "mc": {"samples": spec.n_samples, "seed": spec.seed, "streams": spec.n_streams},
    }
    report_path = Path(args.report) if args.report else out.with_suffix(".json")
    _emit_json(report, report_path)
    return EXIT_OK


def cmd_simulate(args) -> int:
    sc = load_scenario(args.scenario)
    spec = _apply_mc_overrides(sc.mc, args)
    levels = args.levels if args.levels is not None else sc.levels
    ecdf = sample_sln(sc.model(), spec, threads=args.threads)
    probs = _grid_levels(levels)
    k = np.clip(np.ceil(np.round(probs * ecdf.n, 9)).astype(np.int64), 1, ecdf.n)
    xs = np.unique(ecdf.sorted_values[k - 1])
    f = np.atleast_1d(empirical_cdf_at(ecdf, xs))
    rows = [[_fmt(10.0 * math.log10(x)), _fmt(p), _fmt(_pscale(p))] for x, p in zip(xs, f)]
    _write_csv(args.out, ["x_db", "cdf_mc", "pscale_mc"], rows)
    v = ecdf.sorted_values
    print(json.dumps({"n": ecdf.n, "mean": float(v.mean()), "variance": float(v.var(ddof=1)),
                      "min_db": 10 * math.log10(v[0]), "max_db": 10 * math.log10(v[-1])}, indent=2))
    return EXIT_OK


def _placement_path(out: Path, i: int, total: int) -> Path:
    return out if total == 1 else out.with_name(f"{out.stem}_{i}{out.suffix}")


def cmd_outage(args) -> int:
    net = load_network(args.network)
    spec = _apply_mc_overrides(net.mc, args)
    out = Path(args.out)
    summary = []
    for i, mob in enumerate(net.placements):
        curve = outage_curve(net.config, mob, net.delta_db, spec if args.mc else None, args.threads)
        header = ["delta_db", "p_analytic"] + (["p_mc"] if args.mc else [])
        rows = []
        for j, d in enumerate(curve.thresholds_db):
            row = [_fmt(d), _fmt(curve.analytic_p[j])]
            if args.mc:
                row.append(_fmt(curve.mc_p[j]))
            rows.append(row)
        path = _placement_path(out, i, len(net.placements))
        _write_csv(path, header, rows)
        item = {"path": str(path), "distance_km": mob.distance_km, "bearing_rad": mob.bearing_rad}
        if net.config.sigma_db > 0:
            diff = difference_distribution(net.config, mob)
            item["difference_sn_db"] = {"lambda": diff.lam, "epsilon_db": diff.epsilon_db,
                                        "omega_db": diff.omega_db}
        summary.append(item)
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def _levels_arg(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad level list {text!r}") from exc
    if not vals or not all(0.0 < v < 1.0 for v in vals):
        raise argparse.ArgumentTypeError("levels must be probabilities in (0, 1)")
    return vals


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lsnsum", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def mc_flags(p):
        p.add_argument("--seed", type=_u64)
        p.add_argument("--samples", type=_positive)
        p.add_argument("--streams", type=_positive, help="independent RNG streams (changes results)")
        p.add_argument("--threads", type=_positive, default=os.cpu_count() or 1,
                       help="worker threads (never changes results)")

    p = sub.add_parser("fit", help="fit LSN parameters to a scenario")
    p.add_argument("scenario")
    p.add_argument("--out", help="also write the JSON record here")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("compare", help="LSN and Fenton-Wilkinson vs Monte Carlo")
    p.add_argument("scenario")
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--report", help="JSON report path (default: CSV path with .json suffix)")
    p.add_argument("--levels", type=_levels_arg)
    mc_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("simulate", help="dump the Monte Carlo empirical cdf")
    p.add_argument("scenario")
    p.add_argument("--out", required=True)
    p.add_argument("--levels", type=_levels_arg)
    mc_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("outage", help="outage probability curves")
    p.add_argument("network")
    p.add_argument("--out", required=True)
    p.add_argument("--mc", action="store_true", help="add a Monte Carlo column")
    mc_flags(p)
    p.set_defaults(func=cmd_outage)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"lsnsum: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"lsnsum: cannot open {exc.filename}", file=sys.stderr)
        return EXIT_INPUT if exc.filename in (getattr(args, "scenario", None),
                                              getattr(args, "network", None)) else EXIT_IO
    except LsnError as exc:
        print(f"lsnsum: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"lsnsum: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
