"""Command-line interface: ``fdrkit {adjust,pi0,plot,simulate}``.

Exit codes: 0 success, 2 input or configuration error, 3 no usable
p-values after removing missing entries.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from .adjust import METHODS, AdjustmentMethod, p_fdr
from .core import SIDEDNESS, TIE_POLICIES, EmptyInputError, PValueSet
from .pi0 import DEFAULT_LAMBDA_GRID, Pi0Spec, get_pi0
from .plotting import PlotSpec, plot_data, render_svg
from .report import ResultsTable
from .sim import AlternativeSpec, compare_pi0_estimators

log = logging.getLogger("fdrkit")

EXIT_OK, EXIT_INPUT, EXIT_EMPTY = 0, 2, 3
_NA = {"", "NA", "na", "NaN", "nan"}
_ESTIMATORS = {"set": "set_value", "set-pi0": "set_value", "set_value": "set_value",
               "last-hist": "last_hist", "last.hist": "last_hist", "last_hist": "last_hist",
               "storey": "storey"}


class InputError(Exception):
    pass


def read_input(path: str, na_rm: bool = True) -> tuple[PValueSet, Optional[np.ndarray]]:
    """Read ``p`` (required), ``id`` and ``z`` (optional) columns from a CSV."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
            fields = rows[0].keys() if rows else []
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except (csv.Error, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: malformed CSV ({exc})") from exc
    if rows and "p" not in fields:
        raise InputError(f"{path}: no 'p' column")
    if not rows:
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
        if "p" not in header:
            raise InputError(f"{path}: no 'p' column")

    def num(row_no, key, text):
        text = (text or "").strip()
        if text in _NA:
            return math.nan
        try:
            return float(text)
        except ValueError:
            raise InputError(f"{path}: row {row_no}: {key}={text!r} is not numeric") from None

    p = np.array([num(i + 2, "p", r.get("p")) for i, r in enumerate(rows)], dtype=float)
    bad = ~np.isnan(p) & ((p < 0) | (p > 1))
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise InputError(f"{path}: row {i + 2}: p={p[i]!r} outside [0, 1]")
    ids = [r["id"] for r in rows] if rows and "id" in fields else None
    z = (np.array([num(i + 2, "z", r.get("z")) for i, r in enumerate(rows)], dtype=float)
         if rows and "z" in fields else None)

    if na_rm:
        keep = ~np.isnan(p)
        p = p[keep]
        ids = None if ids is None else [x for x, k in zip(ids, keep) if k]
        z = None if z is None else z[keep]
    pset = PValueSet(p, None if ids is None else tuple(ids))
    if pset.m == 0:
        raise EmptyInputError(f"{path}: no p-values after removing missing entries")
    return pset, z


def _breaks(text: str):
    if text == "scott":
        return "scott"
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"hist breaks must be an integer or 'scott', got {text!r}")


def _pi0_spec(args) -> Pi0Spec:
    mode = _ESTIMATORS[args.estim_method]
    grid = DEFAULT_LAMBDA_GRID
    if getattr(args, "lambda_grid", None):
        grid = tuple(float(v) for v in args.lambda_grid.split(","))
    return Pi0Spec(mode, args.set_pi0, args.hist_breaks, grid)


def _add_input(p: argparse.ArgumentParser):
    p.add_argument("input", help="CSV with a 'p' column and optional 'id' and 'z' columns")
    p.add_argument("--na-rm", dest="na_rm", action="store_true", default=True,
                   help="drop missing p-values (default)")
    p.add_argument("--no-na-rm", dest="na_rm", action="store_false",
                   help="keep missing rows in the output; they never count toward m")


def _add_pi0(p: argparse.ArgumentParser, estim_flag_alias: Optional[str] = None):
    flags = ["--estim-method"] + ([estim_flag_alias] if estim_flag_alias else [])
    p.add_argument(*flags, dest="estim_method", default="set", choices=sorted(_ESTIMATORS))
    value_flags = ["--set-pi0"] + (["--value"] if estim_flag_alias else [])
    p.add_argument(*value_flags, dest="set_pi0", type=float, default=1.0)
    p.add_argument("--hist-breaks", type=_breaks, default="scott")
    p.add_argument("--lambda-grid", help="comma-separated lambda values for Storey's method")


def _add_adjust(p: argparse.ArgumentParser):
    p.add_argument("--adjust-method", "--method", dest="method", default="BH",
                   help=f"one of {', '.join(METHODS)} (case-insensitive)")
    p.add_argument("--by-corr", choices=("positive", "negative"), default="positive")
    p.add_argument("--threshold", type=float, default=0.05)
    p.add_argument("--ties-method", choices=TIE_POLICIES, default="random")
    p.add_argument("--seed", type=int, default=0, help="seed for random tie breaking")
    p.add_argument("--default-odds", type=float, default=1.0,
                   help="pi1/pi0 odds used by the lower bound")
    p.add_argument("--zvalues", choices=SIDEDNESS, default="two.sided",
                   help="sidedness used to turn p-values into z-values")
    _add_pi0(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fdrkit", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("adjust", help="FDRs, adjusted p-values and reject flags")
    _add_input(a)
    _add_adjust(a)
    a.add_argument("--sort-results", action="store_true")
    a.add_argument("--just-fdr", action="store_true")
    a.add_argument("-o", "--output", help="output path (default: standard output)")
    a.add_argument("--format", choices=("csv", "json"), default="csv")
    a.add_argument("--display", action="store_true", help="round numbers to 3 decimals")

    q = sub.add_parser("pi0", help="estimate the null proportion")
    _add_input(q)
    _add_pi0(q, "--estimator")
    q.add_argument("--diagnostics", help="write bin heights or lambda-grid values to this CSV")

    pl = sub.add_parser("plot", help="plot data (.json) or a static chart (.svg)")
    _add_input(pl)
    _add_adjust(pl)
    pl.add_argument("--x-axis", choices=("rank", "zvalues"), default="rank")
    for name, what in (("raw-pvalues", "raw p-values"), ("adj-pvalues", "adjusted p-values"),
                       ("fdrs", "FDR estimates"), ("sig-line", "BH rejection line"),
                       ("adj-sig-line", "threshold line")):
        dest = name.replace("-", "_")
        pl.add_argument(f"--no-{name}", dest=dest, action="store_false", help=f"hide {what}")
    pl.add_argument("--xlim", type=float, nargs=2)
    pl.add_argument("--ylim", type=float, nargs=2, default=(0.0, 1.0))
    pl.add_argument("--title", default="")
    pl.add_argument("-o", "--output", required=True, help="path ending in .json or .svg")

    s = sub.add_parser("simulate", help="benchmark pi0 estimators on simulated data")
    s.add_argument("--config", help="JSON file with any of the options below")
    s.add_argument("--m", type=int, default=100)
    s.add_argument("--pi0-grid", default="0.5,0.8,1.0")
    s.add_argument("--alt", action="append",
                   help="uniform_low:MAX or normal_shift:MEAN:SD (repeatable)")
    s.add_argument("--estimators", default="last_hist,storey")
    s.add_argument("--reps", "-R", type=int, default=200)
    s.add_argument("--seed", type=int, default=0, help="master seed")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("-o", "--output", help="output CSV (default: standard output)")
    return parser


def _write(path: Optional[str], text: str):
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _results(args) -> ResultsTable:
    pset, z = read_input(args.input, args.na_rm)
    method = AdjustmentMethod(args.method, args.by_corr)
    result = p_fdr(pset, method, args.threshold, _pi0_spec(args), args.ties_method, args.seed,
                   just_fdr=getattr(args, "just_fdr", False))
    table = ResultsTable.from_result(result, args.default_odds, args.zvalues, z)
    return table.sorted_by_fdr() if getattr(args, "sort_results", False) else table


def cmd_adjust(args) -> int:
    table = _results(args)
    text = table.to_json() if args.format == "json" else table.to_csv(display=args.display)
    _write(args.output, text)
    print(f"m={table.m} rejected={table.n_rejected} pi0={table.pi0:.4f}",
          file=sys.stdout if args.output else sys.stderr)
    return EXIT_OK


def cmd_pi0(args) -> int:
    pset, _ = read_input(args.input, args.na_rm)
    est = get_pi0(pset, _pi0_spec(args))
    print(f"{est.value:.4f}")
    if args.diagnostics:
        d = est.diagnostics
        buf = []
        if "bin_heights" in d:
            b = d["bin_count"]
            buf.append("bin,lower,upper,count")
            buf += [f"{k + 1},{k / b!r},{(k + 1) / b!r},{c}" for k, c in enumerate(d["bin_heights"])]
        elif "raw_estimates" in d:
            buf.append("lambda,raw_estimate")
            buf += [f"{lam!r},{v!r}" for lam, v in zip(d["lambda_grid"], d["raw_estimates"])]
            buf.append(f"# spline_value_at_1={d['spline_value_at_1']!r}")
        else:
            buf.append("value")
            buf.append(repr(est.value))
        Path(args.diagnostics).write_text("\n".join(buf) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_plot(args) -> int:
    out = Path(args.output)
    if out.suffix not in (".json", ".svg"):
        raise InputError(f"plot output must end in .json or .svg, got {out.name}")
    table = _results(args)
    spec = PlotSpec(args.x_axis, args.raw_pvalues, args.adj_pvalues, args.fdrs, args.sig_line,
                    args.adj_sig_line, args.threshold,
                    tuple(args.xlim) if args.xlim else None, tuple(args.ylim), args.title)
    data = plot_data(table, spec)
    if out.suffix == ".json":
        out.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    else:
        out.write_text(render_svg(data), encoding="utf-8")
    return EXIT_OK


def _estimator_spec(item) -> Pi0Spec:
    if isinstance(item, dict):
        item = dict(item)
        item["mode"] = _ESTIMATORS.get(item.get("mode", ""), item.get("mode"))
        if "lambda_grid" in item:
            item["lambda_grid"] = tuple(item["lambda_grid"])
        return Pi0Spec(**item)
    if item not in _ESTIMATORS:
        raise ValueError(f"unknown estimator {item!r}")
    return Pi0Spec(_ESTIMATORS[item])


def _alt_spec(item) -> AlternativeSpec:
    return AlternativeSpec(**item) if isinstance(item, dict) else AlternativeSpec.parse(item)


def simulation_config(args) -> dict:
    cfg = {
        "m": args.m,
        "pi0_grid": [float(v) for v in args.pi0_grid.split(",")],
        "alts": args.alt or ["uniform_low:0.01"],
        "estimators": args.estimators.split(","),
        "R": args.reps,
        "master_seed": args.seed,
        "workers": args.workers,
    }
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot load config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise InputError("config must be a JSON object")
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    return cfg


def cmd_simulate(args) -> int:
    cfg = simulation_config(args)
    try:
        table = compare_pi0_estimators(
            int(cfg["m"]), [float(v) for v in cfg["pi0_grid"]],
            [_alt_spec(a) for a in cfg["alts"]], [_estimator_spec(e) for e in cfg["estimators"]],
            int(cfg["R"]), int(cfg["master_seed"]), int(cfg["workers"]))
    except (TypeError, ValueError, KeyError, IndexError) as exc:
        raise InputError(f"invalid simulation config: {exc}") from exc
    _write(args.output, table.to_csv())
    return EXIT_OK


COMMANDS = {"adjust": cmd_adjust, "pi0": cmd_pi0, "plot": cmd_plot, "simulate": cmd_simulate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except EmptyInputError as exc:
        log.error("%s", exc)
        return EXIT_EMPTY
    except (InputError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
