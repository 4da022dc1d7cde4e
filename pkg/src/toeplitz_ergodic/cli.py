"""Command-line front end: n-sweeps, bounds, limiting traces and the oracle suite.

Exit codes: 0 ok, 2 usage or unknown spec, 3 numerical failure,
4 a checked inequality or identity failed (gap above bound, oracle failure).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass

from .ergodic import default_jobs, sweep, theorem1_bound, widom_trace
from .errors import ErgodicError, InputError, NumericalError, RegistryError
from .oracles import format_report, run_suite
from .symbols import BUILTIN_SYMBOLS, parse_symbol, range_bounds
from .testfunctions import BUILTIN_TESTFUNCTIONS, bound_constants, builtin_testfunction

log = logging.getLogger("toeplitz_ergodic")

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_VIOLATION = 0, 2, 3, 4

CSV_HEADER = ("n", "lhs", "rhs", "gap", "bound", "widom_estimate")
CONFIG_KEYS = ("symbol", "testfn", "n", "widom", "widom-tol", "out", "format", "jobs")


class UsageError(InputError):
    pass


def parse_n(value) -> list:
    """``"a:b[:step]"`` (inclusive), ``"1,2,5"``, an int, a list of ints, or a
    ``{"start", "stop", "step"}`` mapping from a config file."""
    if isinstance(value, bool):
        raise UsageError(f"bad n specification {value!r}")
    if isinstance(value, int):
        ns = [value]
    elif isinstance(value, (list, tuple)):
        ns = [_as_int(v) for v in value]
    elif isinstance(value, dict):
        ns = _inclusive_range(value.get("start", 1), value.get("stop"), value.get("step", 1))
    elif isinstance(value, str):
        text = value.strip()
        if ":" in text:
            parts = text.split(":")
            if len(parts) not in (2, 3):
                raise UsageError(f"bad n range {value!r}")
            ns = _inclusive_range(*parts)
        else:
            ns = [_as_int(v) for v in text.split(",") if v.strip()]
    else:
        raise UsageError(f"bad n specification {value!r}")
    if not ns or min(ns) < 1:
        raise UsageError("n list must be nonempty with every n >= 1")
    return sorted(set(ns))


def _as_int(v):
    try:
        out = int(str(v).strip())
    except ValueError:
        raise UsageError(f"not an integer: {v!r}") from None
    return out


def _inclusive_range(start, stop, step=1):
    if stop is None:
        raise UsageError("n range needs a stop value")
    start, stop, step = _as_int(start), _as_int(stop), _as_int(step)
    if step < 1 or stop < start:
        raise UsageError(f"empty n range {start}:{stop}:{step}")
    return list(range(start, stop + 1, step))


@dataclass(frozen=True)
class ExperimentConfig:
    symbol_spec: str
    testfn_spec: str
    n_list: tuple
    widom: bool = False
    widom_tol: float = 1e-6
    output_path: str = None
    output_format: str = "csv"
    jobs: int = 1

    def __post_init__(self):
        if not self.n_list or min(self.n_list) < 1:
            raise UsageError("n list must be nonempty with every n >= 1")
        if not self.widom_tol > 0:
            raise UsageError("widom-tol must be positive")
        if self.output_format not in ("csv", "json"):
            raise UsageError(f"format must be csv or json, got {self.output_format!r}")
        if self.jobs < 1:
            raise UsageError("jobs must be >= 1")


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    data = {k.replace("_", "-"): v for k, v in data.items()}
    unknown = sorted(set(data) - set(CONFIG_KEYS))
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    return data


def build_config(args) -> ExperimentConfig:
    """Merge the optional config file with flags; flags win."""
    merged = load_config(args.config) if args.config else {}
    for key in CONFIG_KEYS:
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            merged[key] = val
    for key in ("symbol", "testfn", "n"):
        if key not in merged:
            raise UsageError(f"missing required setting: {key}")
    jobs = merged.get("jobs")
    return ExperimentConfig(
        symbol_spec=str(merged["symbol"]),
        testfn_spec=str(merged["testfn"]),
        n_list=tuple(parse_n(merged["n"])),
        widom=bool(merged.get("widom", False)),
        widom_tol=float(merged.get("widom-tol", 1e-6)),
        output_path=merged.get("out"),
        output_format=merged.get("format", "csv"),
        jobs=default_jobs() if jobs is None else int(jobs),
    )


def _fmt(x):
    return "" if x is None else "%.17g" % x


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([r.n, _fmt(r.lhs), _fmt(r.rhs), _fmt(r.gap), _fmt(r.bound),
                    _fmt(r.widom_estimate)])
    return buf.getvalue()


def records_to_json(records, summary) -> str:
    rows = [{k: getattr(r, k) for k in CSV_HEADER} for r in records]
    return json.dumps({"records": rows, "summary": summary}, indent=2) + "\n"


def run_sweep(config: ExperimentConfig):
    f = parse_symbol(config.symbol_spec)
    G = builtin_testfunction(config.testfn_spec)
    return sweep(f, G, config.n_list, widom=config.widom, widom_tol=config.widom_tol,
                 jobs=config.jobs)


def _emit(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_sweep(args) -> int:
    config = build_config(args)
    records, summary = run_sweep(config)
    if config.output_format == "json":
        _emit(records_to_json(records, summary), config.output_path)
        if config.output_path:
            print(json.dumps(summary, indent=2))
    else:
        _emit(records_to_csv(records), config.output_path)
        stream = sys.stdout if config.output_path else sys.stderr
        print(json.dumps(summary, indent=2), file=stream)
    if summary["violations"]:
        log.error("gap exceeds bound at n = %s", summary["violations"])
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_bound(args) -> int:
    f = parse_symbol(args.symbol)
    G = builtin_testfunction(args.testfn)
    rep = theorem1_bound(f, G)
    rb = range_bounds(f)
    out = {"symbol": f.name, "testfn": G.name, "bound": rep.bound,
           "vertiii_sq": rep.vertiii_sq, "sup_norm": rep.sup_norm, "c1": rep.c1,
           "c2": rep.c2, "m": rb.m, "M": rb.M, "reliable": rep.reliable,
           "annotations": list(rep.annotations)}
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_widom(args) -> int:
    f = parse_symbol(args.symbol)
    G = builtin_testfunction(args.testfn)
    res = widom_trace(f, G, tol=args.widom_tol)
    print(json.dumps({"symbol": f.name, "testfn": G.name, "widom_trace": res.value,
                      "N": res.N, "history": res.history}, indent=2))
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_suite(args.filter)
    print(format_report(results))
    if not results:
        log.warning("no oracle matches %r", args.filter)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VIOLATION


def cmd_list(args) -> int:
    print("symbols:")
    for s in BUILTIN_SYMBOLS + ("file:<path>",):
        print("  " + s)
    print("test functions:")
    for spec in BUILTIN_TESTFUNCTIONS:
        line = "  " + spec
        if args.constants:
            c1, c2 = bound_constants(builtin_testfunction(spec))
            line += f"  c1={c1:.6g} c2={c2:.6g}"
        print(line)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="toeplitz-ergodic",
        description="Singular-value ergodic formula for Toeplitz matrices: sweeps, "
                    "explicit bounds, limiting traces and identity checks.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def spec_args(sp, required=True):
        sp.add_argument("--symbol", required=required, help="e.g. cos2, zeta2, file:f.txt")
        sp.add_argument("--testfn", required=required, help="e.g. bump:2,2.5,1")

    sp = sub.add_parser("sweep", help="gap and bound for a list of n")
    spec_args(sp, required=False)
    sp.add_argument("--n", help="start:stop[:step] (inclusive) or comma list")
    sp.add_argument("--widom", action="store_true", default=None,
                    help="also estimate the limiting trace")
    sp.add_argument("--widom-tol", type=float, dest="widom_tol")
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("csv", "json"))
    sp.add_argument("--jobs", type=int, help="worker threads (default: ERGODIC_JOBS or CPUs)")
    sp.add_argument("--config", help="JSON file with the same keys; flags override it")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("bound", help="the n-independent gap bound")
    spec_args(sp)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("widom", help="limiting value of the signed gap")
    spec_args(sp)
    sp.add_argument("--widom-tol", type=float, default=1e-6, dest="widom_tol")
    sp.set_defaults(func=cmd_widom)

    sp = sub.add_parser("verify", help="run the identity and inequality oracles")
    sp.add_argument("--filter", default="", help="substring of oracle names")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("list", help="registered symbols and test functions")
    sp.add_argument("--constants", action="store_true", help="show c1, c2 for each G")
    sp.set_defaults(func=cmd_list)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (RegistryError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ErgodicError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
