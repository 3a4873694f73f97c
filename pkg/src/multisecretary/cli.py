"""Command-line front end.

Subcommands: solve, curve, walk, mistakes, simulate, report. Data goes to
--out (or stdout); a one-line summary goes to stderr. Exit status is 0 on
success, 1 on usage or I/O errors and 2 on numeric failure or a violated
invariant.
"""
import argparse
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field

from . import __version__
from .bounds import (build_report, curve_to_csv, lower_bound, report_to_json,
                     resolve_k, upper_bound)
from .core_math import ConvergenceError
from .dp import solve_myopic, solve_optimal, tables_to_csv
from .simulate import SimConfig, estimate_regret, summary_to_json
from .walk import (expected_mistakes, forward_distribution, walk_table,
                   walk_to_csv)

SCHEMA_VERSION = 1
SUBCOMMANDS = ("solve", "curve", "walk", "mistakes", "simulate", "report")
DEFAULT_GRID = "16:4096:x2"
DEFAULT_FORMAT = {"simulate": "json", "report": "json"}


class UsageError(Exception):
    pass


@dataclass
class CliInvocation:
    subcommand: str
    options: dict = field(default_factory=dict)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_grid(text):
    """'a:b:xS' geometric, 'a:b:+d' arithmetic, or a comma list."""
    try:
        if ":" not in text:
            values = [int(v) for v in text.split(",") if v.strip()]
        else:
            lo, hi, step = text.split(":")
            lo, hi = int(lo), int(hi)
            if step.startswith("x"):
                mult = int(step[1:])
                if mult < 2 or lo < 1:
                    raise ValueError
                values, n = [], lo
                while n <= hi:
                    values.append(n)
                    n *= mult
            elif step.startswith("+"):
                d = int(step[1:])
                if d < 1:
                    raise ValueError
                values = list(range(lo, hi + 1, d))
            else:
                raise ValueError
    except ValueError:
        raise UsageError(f"--grid: cannot parse {text!r} (use a:b:xS, a:b:+d or a comma list)")
    if not values:
        raise UsageError(f"--grid: {text!r} is empty")
    return values


def _parse_k_rule(text):
    if text == "half":
        return "half"
    try:
        if "." in text:
            return float(text)
        return int(text)
    except ValueError:
        raise UsageError(f"--k: expected 'half', an integer or a ratio, got {text!r}")


def _parse_policy(text, allow_fixed):
    if text in ("optimal", "myopic"):
        return text, None
    if allow_fixed and text.startswith("fixed:"):
        try:
            theta = float(text.split(":", 1)[1])
        except ValueError:
            theta = math.nan
        if not 0.0 <= theta <= 1.0:
            raise UsageError(f"--policy: threshold in {text!r} must lie in [0, 1]")
        return "fixed", theta
    allowed = "optimal|myopic|fixed:<theta>" if allow_fixed else "optimal|myopic"
    raise UsageError(f"--policy: expected {allowed}, got {text!r}")


def _build_parser():
    parser = _Parser(prog="multisecretary", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)

    def add(name, help_text, *, n=False, k=False, policy=False, grid=False, sim=False):
        p = sub.add_parser(name, help=help_text)
        if n:
            p.add_argument("--n", type=int, required=True)
        if k:
            p.add_argument("--k", default="half")
        if policy:
            p.add_argument("--policy", default="optimal")
        if grid:
            p.add_argument("--grid", default=DEFAULT_GRID)
        if sim:
            p.add_argument("--replicates", type=int, default=10_000)
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--threads", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("csv", "json"), default=None)
        return p

    add("solve", "dump the DP table", n=True, k=True, policy=True)
    add("curve", "regret against n with both bounds", k=True, grid=True)
    add("walk", "moments of the open-positions walk", n=True, k=True, policy=True)
    add("mistakes", "expected hindsight mistakes per period", n=True, k=True, policy=True)
    add("simulate", "Monte Carlo regret estimate", n=True, k=True, policy=True, sim=True)
    add("report", "bounds report with growth fit", k=True, grid=True)
    return parser


def parse_args(argv):
    """Validate argv into a fully defaulted :class:`CliInvocation`.

    Raises :class:`UsageError` naming the offending flag.
    """
    ns = _build_parser().parse_args(list(argv))
    if ns.subcommand is None:
        raise UsageError(f"a subcommand is required: {', '.join(SUBCOMMANDS)}")
    opts = {k: v for k, v in vars(ns).items() if k != "subcommand"}
    cmd = ns.subcommand
    opts["format"] = opts["format"] or DEFAULT_FORMAT.get(cmd, "csv")

    if "grid" in opts:
        opts["grid"] = parse_grid(opts["grid"])
        rule = _parse_k_rule(opts["k"])
        try:
            for n in opts["grid"]:
                if n < 2:
                    raise ValueError(f"grid values must be at least 2, got {n}")
                resolve_k(n, rule)
        except ValueError as exc:
            raise UsageError(f"--k/--grid: {exc}")
        opts["k"] = rule
    else:
        n = opts["n"]
        if n < 1:
            raise UsageError(f"--n: must be positive, got {n}")
        if opts["k"] == "half":
            if n % 2:
                raise UsageError(f"--k half needs even --n, got {n}")
            k = n // 2
        else:
            try:
                k = int(opts["k"])
            except ValueError:
                raise UsageError(f"--k: expected an integer or 'half', got {opts['k']!r}")
        if k < 1 and cmd == "simulate":
            raise UsageError(f"--k: must be at least 1, got {k}")
        if k < 0 or k >= n:
            raise UsageError(f"--k: need 0 <= k < n, got k={k}, n={n}")
        opts["k"] = k
    if "policy" in opts:
        opts["policy"], opts["threshold"] = _parse_policy(opts["policy"], cmd == "simulate")
    if cmd == "simulate":
        if opts["replicates"] < 1:
            raise UsageError(f"--replicates: must be at least 1, got {opts['replicates']}")
        if not 0 <= opts["seed"] < 2**64:
            raise UsageError("--seed: must be an unsigned 64-bit integer")
        if opts["threads"] is not None and opts["threads"] < 1:
            raise UsageError("--threads: must be at least 1")
    return CliInvocation(cmd, opts)


def _solver(policy):
    return solve_optimal if policy == "optimal" else solve_myopic


def _bounds_text(n, k):
    lower = f"{lower_bound(n):.6g}" if (2 * k == n and n >= 16) else "n/a"
    return f"upper={upper_bound(n):.6g} lower={lower}"


def _header(kind):
    return f"# multisecretary {kind} schema_version={SCHEMA_VERSION}\n"


def _json(obj):
    return json.dumps({"schema_version": SCHEMA_VERSION, **obj}, indent=2, sort_keys=True)


def _table_violations(tables):
    out = []
    for t in tables.stored_rows():
        r, p = tables.r_row(t), tables.p_row(t)
        if (r < -1e-12).any():
            out.append(f"r >= 0 violated in row t={t}")
        if ((p < 0) | (p > 1)).any():
            out.append(f"0 <= p <= 1 violated in row t={t}")
    return out


def _run_solve(o):
    tables = _solver(o["policy"])(o["n"])
    n, k = o["n"], o["k"]
    if o["format"] == "csv":
        data = _header("dp_tables") + tables_to_csv(tables)
    else:
        states = [{"t": t, "w": w, "p": float(tables.p_row(t)[w]), "r": float(tables.r_row(t)[w])}
                  for t in tables.stored_rows() for w in range(t + 1)]
        data = _json({"kind": "dp_tables", "n_max": n, "policy": o["policy"], "states": states})
    summary = f"solve n={n} k={k} policy={o['policy']} regret={tables.regret(n, k):.10g} {_bounds_text(n, k)}"
    return data, summary, _table_violations(tables)


def _run_curve(o, as_report=False):
    report = build_report(o["grid"], o["k"])
    if as_report and o["format"] == "json":
        data = report_to_json(report)
    elif o["format"] == "csv":
        data = _header("curve") + curve_to_csv(report.curve)
    else:
        data = _json({"kind": "curve", "grid": report.curve.grid,
                      "entries": [asdict(e) for e in report.curve.entries]})
    last = report.curve.entries[-1]
    summary = (f"{'report' if as_report else 'curve'} points={len(report.curve.entries)} "
               f"last n={last.n} k={last.k} regret={last.regret_optimal:.10g} "
               f"{_bounds_text(last.n, last.k)}")
    if report.fitted_slope is not None:
        summary += f" slope={report.fitted_slope:.6g}"
    return data, summary, report.violations


def _walk_setup(o):
    tables = _solver(o["policy"])(o["n"])
    return tables, forward_distribution(tables, o["n"], o["k"])


def _run_walk(o):
    tables, dist = _walk_setup(o)
    rows = walk_table(dist, tables)
    if o["format"] == "csv":
        data = _header("walk") + walk_to_csv(rows)
    else:
        data = _json({"kind": "walk", "n": o["n"], "k": o["k"], "policy": o["policy"], "rows": rows})
    total = sum(r["mistake_probability"] for r in rows)
    summary = (f"walk n={o['n']} k={o['k']} policy={o['policy']} "
               f"regret={tables.regret(o['n'], o['k']):.10g} expected_mistakes={total:.10g}")
    return data, summary, []


def _run_mistakes(o):
    tables, dist = _walk_setup(o)
    stats = expected_mistakes(dist, tables)
    per = [(t, float(stats.per_period[t])) for t in range(o["n"], 0, -1)]
    if o["format"] == "csv":
        buf = io.StringIO()
        buf.write(_header("mistakes"))
        buf.write("t,mistake_probability\n")
        for t, v in per:
            buf.write(f"{t},{v!r}\n")
        data = buf.getvalue()
    else:
        data = _json({"kind": "mistakes", "n": o["n"], "k": o["k"], "policy": o["policy"],
                      "total": stats.total,
                      "per_period": [{"t": t, "mistake_probability": v} for t, v in per]})
    summary = f"mistakes n={o['n']} k={o['k']} policy={o['policy']} total={stats.total:.10g}"
    return data, summary, []


def _run_simulate(o):
    config = SimConfig(o["n"], o["k"], o["policy"], o["threshold"], o["replicates"], o["seed"])
    tables = None if config.policy == "fixed" else _solver(config.policy)(config.n)
    summary = estimate_regret(config, tables, threads=o["threads"])
    payload = summary_to_json(config, summary)
    if o["format"] == "json":
        data = payload
    else:
        d = json.loads(payload)
        cols = sorted(d)
        data = _header("simulation") + ",".join(cols) + "\n" + ",".join(
            "" if d[c] is None else (repr(d[c]) if isinstance(d[c], float) else str(d[c]))
            for c in cols) + "\n"
    line = (f"simulate n={o['n']} k={o['k']} policy={config.policy_label} "
            f"mean_regret={summary.mean_regret:.6g} std_error={summary.std_error:.3g}")
    if tables is not None:
        line += f" dp_regret={tables.regret(o['n'], o['k']):.6g}"
    return data, line, []


_HANDLERS = {
    "solve": _run_solve,
    "curve": _run_curve,
    "walk": _run_walk,
    "mistakes": _run_mistakes,
    "simulate": _run_simulate,
    "report": lambda o: _run_curve(o, as_report=True),
}


def execute(inv, stdout=None, stderr=None):
    """Run a parsed invocation; returns the process exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        data, summary, violations = _HANDLERS[inv.subcommand](inv.options)
    except ConvergenceError as exc:
        print(f"numeric failure: {exc}", file=stderr)
        return 2
    if not data.endswith("\n"):
        data += "\n"
    out = inv.options.get("out")
    try:
        if out:
            with open(out, "w", newline="") as fh:
                fh.write(data)
        else:
            stdout.write(data)
    except OSError as exc:
        print(f"cannot write output: {exc}", file=stderr)
        return 1
    print(summary, file=stderr)
    if violations:
        for v in violations:
            print(f"invariant violated: {v}", file=stderr)
        return 2
    return 0


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        inv = parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    return execute(inv)


if __name__ == "__main__":
    sys.exit(main())
