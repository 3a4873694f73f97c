"""Analytic regret bounds, regret sweeps over n, and growth-rate fits."""
import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .dp import solve_myopic, solve_optimal

__all__ = [
    "CurveEntry",
    "RegretCurve",
    "BoundsReport",
    "upper_bound",
    "lower_bound",
    "resolve_k",
    "sweep",
    "growth_fit",
    "find_violations",
    "build_report",
    "curve_to_csv",
    "curve_from_csv",
    "report_to_json",
    "report_from_json",
]

SCHEMA_VERSION = 1
CURVE_COLUMNS = ("n", "k", "regret_optimal", "regret_myopic", "upper_bound", "lower_bound")
# bound checks allow for rounding in the DP
BOUND_SLACK = 1e-12


def upper_bound(n):
    """log(n + 1) / 8, valid for every k."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return math.log(n + 1) / 8.0


def lower_bound(n):
    """log(n) / 16 - 1/4, proven only for k = n/2 and n >= 16."""
    if n < 16 or n % 2:
        raise ValueError(f"lower bound holds only for even n >= 16, got {n}")
    return math.log(n) / 16.0 - 0.25


@dataclass(frozen=True)
class CurveEntry:
    n: int
    k: int
    regret_optimal: float
    regret_myopic: float
    upper_bound: float
    lower_bound: float | None  # None where the bound is not asserted


@dataclass
class RegretCurve:
    entries: list = field(default_factory=list)
    grid: dict = field(default_factory=dict)


@dataclass
class BoundsReport:
    curve: RegretCurve
    fitted_slope: float | None
    fit_residual: float | None
    violations: list


def resolve_k(n, k_rule):
    """Positions for pool size n under ``k_rule``.

    ``"half"`` gives n/2 (n must be even), an int is a fixed k, and a float
    in (0, 1) is a ratio rounded to the nearest integer.
    """
    if k_rule == "half":
        if n % 2:
            raise ValueError(f"half rule needs even n, got {n}")
        k = n // 2
    elif isinstance(k_rule, (int, np.integer)) and not isinstance(k_rule, bool):
        k = int(k_rule)
    elif isinstance(k_rule, float) and 0.0 < k_rule < 1.0:
        k = int(round(k_rule * n))
    else:
        raise ValueError(f"unrecognised k rule {k_rule!r}")
    if not 1 <= k <= n - 1:
        raise ValueError(f"k rule {k_rule!r} gives k={k} outside [1, {n - 1}] for n={n}")
    return k


def _describe_rule(k_rule):
    if k_rule == "half":
        return {"kind": "half"}
    if isinstance(k_rule, float):
        return {"kind": "ratio", "value": k_rule}
    return {"kind": "fixed", "value": int(k_rule)}


def sweep(grid, k_rule="half"):
    """Exact optimal and myopic regret for each n in ``grid``.

    A single solve at max(grid) covers every smaller n, since state (n, k)
    of the larger problem is exactly the smaller problem.
    """
    grid = sorted({int(n) for n in grid})
    meta = {"values": grid, "k_rule": _describe_rule(k_rule)}
    if not grid:
        return RegretCurve([], meta)
    if grid[0] < 2:
        raise ValueError("grid values must be at least 2")
    ks = [resolve_k(n, k_rule) for n in grid]
    opt = solve_optimal(grid[-1], keep=grid)
    myo = solve_myopic(grid[-1], keep=grid)
    entries = []
    for n, k in zip(grid, ks):
        lower = lower_bound(n) if (2 * k == n and n >= 16) else None
        entries.append(CurveEntry(
            n=n, k=k,
            regret_optimal=opt.regret(n, k),
            regret_myopic=myo.regret(n, k),
            upper_bound=upper_bound(n),
            lower_bound=lower,
        ))
    return RegretCurve(entries, meta)


def growth_fit(curve):
    """Least-squares fit of optimal regret against log n.

    Returns ``(slope, max_abs_residual)``.
    """
    ns = np.array([e.n for e in curve.entries], dtype=np.float64)
    if np.unique(ns).size < 3:
        raise ValueError("growth fit needs at least three distinct n")
    y = np.array([e.regret_optimal for e in curve.entries])
    x = np.log(ns)
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - (slope * x + intercept)
    return float(slope), float(np.max(np.abs(resid)))


def find_violations(curve):
    """Names of any entries breaking 0 <= r_opt <= r_myopic, r_opt <= upper, r_opt >= lower."""
    out = []
    for e in curve.entries:
        tag = f"n={e.n},k={e.k}"
        if e.regret_optimal < -BOUND_SLACK:
            out.append(f"{tag}: negative optimal regret")
        if e.regret_optimal > e.regret_myopic + BOUND_SLACK:
            out.append(f"{tag}: optimal regret exceeds myopic regret")
        if e.regret_optimal > e.upper_bound + BOUND_SLACK:
            out.append(f"{tag}: upper bound violated")
        if e.lower_bound is not None and e.regret_optimal < e.lower_bound - BOUND_SLACK:
            out.append(f"{tag}: lower bound violated")
    return out


def build_report(grid, k_rule="half"):
    curve = sweep(grid, k_rule)
    if len({e.n for e in curve.entries}) >= 3:
        slope, resid = growth_fit(curve)
    else:
        slope = resid = None
    return BoundsReport(curve, slope, resid, find_violations(curve))


def _fmt(x):
    return "" if x is None else repr(float(x))


def curve_to_csv(curve, fh=None):
    sink = io.StringIO() if fh is None else fh
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(CURVE_COLUMNS)
    for e in curve.entries:
        writer.writerow([e.n, e.k, _fmt(e.regret_optimal), _fmt(e.regret_myopic),
                         _fmt(e.upper_bound), _fmt(e.lower_bound)])
    return sink.getvalue() if fh is None else None


def curve_from_csv(text):
    entries = []
    for rec in csv.DictReader(io.StringIO(text)):
        entries.append(CurveEntry(
            n=int(rec["n"]), k=int(rec["k"]),
            regret_optimal=float(rec["regret_optimal"]),
            regret_myopic=float(rec["regret_myopic"]),
            upper_bound=float(rec["upper_bound"]),
            lower_bound=float(rec["lower_bound"]) if rec["lower_bound"] else None,
        ))
    return RegretCurve(entries, {"values": [e.n for e in entries]})


def report_to_json(report, version=None):
    from . import __version__

    payload = {
        "schema_version": SCHEMA_VERSION,
        "artifact_version": version or __version__,
        "grid": report.curve.grid,
        "entries": [asdict(e) for e in report.curve.entries],
        "fit": {"regressor": "log(n)", "response": "regret_optimal",
                "slope": report.fitted_slope, "max_abs_residual": report.fit_residual},
        "violations": report.violations,
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def report_from_json(text):
    d = json.loads(text)
    curve = RegretCurve([CurveEntry(**e) for e in d["entries"]], d["grid"])
    return BoundsReport(curve, d["fit"]["slope"], d["fit"]["max_abs_residual"], d["violations"])
