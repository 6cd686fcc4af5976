"""Command line entry point: ``modehunt {signatures,modes,tautstring,simulate}``.

Exit status is 0 on success, 1 for usage errors and 2 when the input cannot
be read or parsed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import harness
from .kolmsig import kolmogorov_signatures
from .persistence1d import persistence_signatures
from .signal import StepSignal, mode_count
from .stats import GaussianModel, MomentModel, confidence_band, mode_ci, mode_estimate, threshold
from .tautstring import taut_string

SCHEMA = 1
EXIT_USAGE = 1
EXIT_INPUT = 2


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- output


def dumps(obj) -> str:
    """JSON text with every float written to 17 significant digits."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        if math.isnan(x):
            return "null"
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


# ---------------------------------------------------------------- input


def _parse_float(text: str, where: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise InputError(f"{where}: not a number: {text!r}") from None
    if not math.isfinite(x):
        raise InputError(f"{where}: value must be finite, got {text!r}")
    return x


def parse_series(text: str, source: str = "<input>") -> np.ndarray:
    """Values from a JSON array or from CSV with one value or one ``t,value`` pair per line.

    With pairs, ``t`` must equal ``i/n`` to within 1e-9.
    """
    stripped = text.strip()
    if not stripped:
        raise InputError(f"{source}: empty input")
    if stripped.startswith("["):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise InputError(f"{source}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
        if not isinstance(data, list) or not data:
            raise InputError(f"{source}: expected a nonempty JSON array")
        vals = []
        for i, x in enumerate(data):
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise InputError(f"{source}: element {i} is not a number")
            vals.append(_parse_float(repr(x), f"{source}: element {i}"))
        return np.array(vals)

    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        cells = [c.strip() for c in row]
        if not cells or all(c == "" for c in cells):
            continue
        rows.append((lineno, cells))
    if not rows:
        raise InputError(f"{source}: no data rows")
    width = len(rows[0][1])
    if rows[0][1][-1].lower() == "value":
        header = [c.lower() for c in rows[0][1]]
        if header not in (["value"], ["t", "value"]):
            raise InputError(f"{source}: line {rows[0][0]}: unrecognised header {rows[0][1]}")
        rows = rows[1:]
        if not rows:
            raise InputError(f"{source}: no data rows")
    if width not in (1, 2):
        raise InputError(f"{source}: line {rows[0][0]}: expected 1 or 2 columns, got {width}")
    ts, vals = [], []
    for lineno, cells in rows:
        if len(cells) != width:
            raise InputError(f"{source}: line {lineno}: expected {width} columns, got {len(cells)}")
        where = f"{source}: line {lineno}"
        if width == 2:
            ts.append(_parse_float(cells[0], where))
        vals.append(_parse_float(cells[-1], where))
    n = len(vals)
    if width == 2:
        expect = np.arange(n) / n
        bad = np.flatnonzero(np.abs(np.array(ts) - expect) > 1e-9)
        if bad.size:
            i = int(bad[0])
            raise InputError(f"{source}: line {rows[i][0]}: t = {ts[i]!r} is not the grid point {i}/{n}")
    return np.array(vals)


def read_series(path: str) -> StepSignal:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    return StepSignal(parse_series(text, path))


# ---------------------------------------------------------------- commands


def cmd_signatures(args) -> dict:
    f = read_series(args.input)
    s = kolmogorov_signatures(f) if args.metric == "kolmogorov" else persistence_signatures(f)
    return {"schema": SCHEMA, "n": f.n, "metric": args.metric, "signatures": list(s.positives),
            "mode_count": mode_count(f)}


def _noise_model(args):
    gauss = args.sigma is not None
    moments = args.kappa is not None or args.v is not None
    if gauss == moments:
        raise UsageError("give exactly one noise specification: --sigma, or --kappa with --v")
    if gauss:
        return GaussianModel(args.sigma)
    if args.kappa is None or args.v is None:
        raise UsageError("--kappa and --v must be given together")
    return MomentModel(args.kappa, args.v)


def cmd_modes(args) -> dict:
    try:
        model = _noise_model(args)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not 0.0 < args.alpha < 1.0:
        raise UsageError("--alpha must lie in (0, 1)")
    if args.epsilon is not None and not args.epsilon > 0.0:
        raise UsageError("--epsilon must be positive")
    f = read_series(args.input)
    s = kolmogorov_signatures(f)
    t = threshold(f.n, args.alpha, model)
    rows, tail = confidence_band(s, t)
    out = {"schema": SCHEMA, "n": f.n, "alpha": args.alpha,
           "noise": ({"sigma": model.sigma} if isinstance(model, GaussianModel)
                     else {"kappa": model.kappa, "v": model.v}),
           "signatures": list(s.positives), "tau": t, "k_hat": mode_estimate(s, t),
           "band": rows.tolist(), "band_tail": list(tail), "mode_ci": None}
    if args.epsilon is not None:
        ci = mode_ci(s, args.alpha, args.epsilon, f.n, model)
        out["epsilon"] = args.epsilon
        out["mode_ci"] = {"l": ci.lower, "u": ci.upper if math.isinf(ci.upper) else int(ci.upper)}
    return out


def cmd_tautstring(args) -> dict | str:
    if not args.alpha >= 0.0:
        raise UsageError("--alpha must be non-negative")
    f = read_series(args.input)
    ts = taut_string(f, args.alpha)
    deriv = ts.derivative().values
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t_start", "t_end", "value", "derivative"])
        for i in range(f.n):
            w.writerow([format(i / f.n, ".17g"), format((i + 1) / f.n, ".17g"),
                        format(f.values[i], ".17g"), format(deriv[i], ".17g")])
        return buf.getvalue()
    return {"schema": SCHEMA, "n": f.n, "alpha": args.alpha, "knots": ts.knots.tolist(),
            "values": ts.values.tolist(), "contacts": ts.contacts.tolist(),
            "derivative": deriv.tolist(), "modes": mode_count(deriv)}


def cmd_simulate(args) -> dict:
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    if args.experiment == "table1":
        sizes = args.sizes or harness.TABLE1_SIZES
        report = harness.run_table1(args.reps, args.seed, sizes)
    elif args.experiment == "error-control":
        n = args.n or 1024
        f = harness.generate_signal(harness.Blocks(), n)
        report = harness.run_error_control(f, 5, harness.Gaussian(args.sigma), args.alpha,
                                           args.reps, args.seed)
    elif args.experiment == "detection":
        kw = {}
        if args.sizes:
            kw["spike_sizes"] = kw["plateau_sizes"] = args.sizes
        report = harness.run_detection_comparison(args.reps, args.seed, alpha=args.alpha, **kw)
    else:  # argparse restricts choices; kept for direct calls
        raise UsageError(f"unknown experiment {args.experiment!r}")
    payload = report.to_dict(timings=args.timings)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    json_path = out.with_suffix(".json")
    csv_path = out.with_suffix(".csv")
    json_path.write_text(dumps(payload) + "\n")
    csv_path.write_text(report.rows_csv())
    return {"schema": SCHEMA, "experiment": args.experiment, "json": str(json_path),
            "csv": str(csv_path), "summary": report.summary,
            "records": [{"n": r.n, **{k: v for k, v in r.config.items() if k in ("signal",)},
                         "metrics": r.metrics, "se": r.se} for r in report.records]}


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="modehunt", description="Mode counting with Kolmogorov and persistence signatures.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("signatures", help="signature sequence of a series")
    s.add_argument("input", help="CSV or JSON file, '-' for stdin")
    s.add_argument("--metric", choices=("kolmogorov", "sup"), default="kolmogorov")
    s.set_defaults(func=cmd_signatures)

    m = sub.add_parser("modes", help="thresholded mode count, confidence band and interval")
    m.add_argument("input")
    m.add_argument("--alpha", type=float, required=True)
    m.add_argument("--sigma", type=float, help="Gaussian noise standard deviation")
    m.add_argument("--kappa", type=float, help="moment parameter kappa")
    m.add_argument("--v", type=float, help="moment parameter v")
    m.add_argument("--epsilon", type=float, help="signature size for the mode-count interval")
    m.set_defaults(func=cmd_modes)

    t = sub.add_parser("tautstring", help="taut string and its derivative")
    t.add_argument("input")
    t.add_argument("--alpha", type=float, required=True)
    t.add_argument("--format", choices=("json", "csv"), default="json")
    t.set_defaults(func=cmd_tautstring)

    r = sub.add_parser("simulate", help="run a Monte Carlo experiment")
    r.add_argument("--experiment", choices=("table1", "error-control", "detection"), required=True)
    r.add_argument("--reps", type=int, default=100)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", required=True, help="output path stem; .json and .csv are written")
    r.add_argument("--alpha", type=float, default=0.1)
    r.add_argument("--n", type=int, help="sample size for error-control")
    r.add_argument("--sigma", type=float, default=0.5, help="noise level for error-control")
    r.add_argument("--sizes", type=int, nargs="+", help="override the n grid")
    r.add_argument("--timings", action="store_true", help="record wall-clock times (breaks bitwise reproducibility)")
    r.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
    except UsageError as exc:
        print(f"modehunt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"modehunt: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        # invalid input values surfaced by the library (e.g. empty series)
        print(f"modehunt: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(result if isinstance(result, str) else dumps(result) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
