"""Finite-horizon dynamic programming over states (t, w).

``t`` counts applicants still to be interviewed (including the current one)
and ``w`` counts open positions, so 0 <= w <= t. Tables are stored as flat
triangular arrays: row ``t`` occupies ``t + 1`` consecutive slots.

The primary solvers recurse on regret rather than value. Substituting
v = v* - r into the Bellman maximizer gives the optimal hire probability

    p[t, w] = clamp(w / t + r[t-1, w] - r[t-1, w-1], 0, 1)

so regrets of size O(log n) are never formed as differences of O(n) values.
"""
import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .core_math import myopic_regret, offline_value

__all__ = [
    "DpTables",
    "FULL_TABLE_LIMIT",
    "solve_optimal",
    "solve_myopic",
    "solve_value_direct",
    "tables_to_csv",
    "tables_from_csv",
]

FULL_TABLE_LIMIT = 2**13
POLICY_KINDS = ("optimal", "myopic")


def _tri(t):
    return t * (t + 1) // 2


@dataclass(frozen=True, eq=False)
class DpTables:
    """Regret / hire-probability tables for one policy.

    When ``rows`` is None every row 0..n_max is stored; otherwise only the
    listed rows were retained (streaming mode) and are packed in that order.
    """

    n_max: int
    policy_kind: str
    r: np.ndarray
    p: np.ndarray
    v: np.ndarray | None = None
    rows: tuple[int, ...] | None = None
    _offsets: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.rows is None:
            offsets = None
        else:
            offsets, pos = {}, 0
            for t in self.rows:
                offsets[t] = pos
                pos += t + 1
        object.__setattr__(self, "_offsets", offsets)
        for arr in (self.r, self.p, self.v):
            if arr is not None:
                arr.setflags(write=False)

    @property
    def full(self):
        return self.rows is None

    def has_row(self, t):
        if self.rows is None:
            return 0 <= t <= self.n_max
        return t in self._offsets

    def _slice(self, t):
        if not self.has_row(t):
            raise KeyError(f"row t={t} not stored (n_max={self.n_max}, rows={self.rows})")
        start = _tri(t) if self.rows is None else self._offsets[t]
        return slice(start, start + t + 1)

    def r_row(self, t):
        return self.r[self._slice(t)]

    def p_row(self, t):
        return self.p[self._slice(t)]

    def v_row(self, t):
        if self.v is None:
            raise KeyError("value table not computed for these tables")
        return self.v[self._slice(t)]

    def regret(self, t, w):
        _check_w(t, w)
        return float(self.r_row(t)[w])

    def hire_prob(self, t, w):
        _check_w(t, w)
        return float(self.p_row(t)[w])

    def stored_rows(self):
        return range(self.n_max + 1) if self.rows is None else self.rows


def _check_w(t, w):
    if not 0 <= w <= t:
        raise IndexError(f"need 0 <= w <= t, got t={t}, w={w}")


def _check_horizon(n_max):
    if int(n_max) != n_max or n_max < 1:
        raise ValueError(f"horizon must be a positive integer, got {n_max!r}")
    return int(n_max)


def _keep_set(n_max, keep):
    if keep is None:
        if n_max <= FULL_TABLE_LIMIT:
            return None
        keep = (n_max,)
    keep = tuple(sorted({int(t) for t in keep}))
    if keep and (keep[0] < 0 or keep[-1] > n_max):
        raise ValueError(f"retained rows must lie in [0, {n_max}]")
    return keep


class _RowStore:
    """Collects rows into a flat array, all rows or only a retained subset."""

    def __init__(self, n_max, keep, names):
        self.keep = keep
        size = _tri(n_max + 1) if keep is None else sum(t + 1 for t in keep)
        self.arrays = {name: np.zeros(size) for name in names}
        self._keep_set = None if keep is None else set(keep)
        self._pos = 0

    def put(self, t, **rows):
        if self._keep_set is not None and t not in self._keep_set:
            return
        start = _tri(t) if self.keep is None else self._pos
        for name, row in rows.items():
            self.arrays[name][start:start + t + 1] = row
        if self.keep is not None:
            self._pos += t + 1


def _regret_step(t, r_prev, p_interior):
    """Regret row t from row t - 1 given interior hire probabilities (w = 1..t-1)."""
    w = np.arange(1, t)
    r = np.zeros(t + 1)
    p = np.zeros(t + 1)
    p[t] = 1.0
    if t >= 2:
        p[1:t] = p_interior
        r[1:t] = (myopic_regret(t, w, p_interior)
                  + p_interior * r_prev[0:t - 1]
                  + (1.0 - p_interior) * r_prev[1:t])
    return r, p


def solve_optimal(n_max, keep=None):
    """Exact regret and hire probabilities of the optimal online policy.

    Parameters
    ----------
    n_max : int
        Largest number of applicants.
    keep : iterable of int, optional
        Rows to retain. Defaults to the full triangle for
        ``n_max <= 2**13`` and to the single row ``n_max`` above that;
        memory then stays O(n_max) apart from the retained rows.
    """
    n_max = _check_horizon(n_max)
    keep = _keep_set(n_max, keep)
    store = _RowStore(n_max, keep, ("r", "p"))
    r_prev = np.zeros(1)
    store.put(0, r=r_prev, p=np.zeros(1))
    for t in range(1, n_max + 1):
        w = np.arange(1, t)
        p_int = np.clip(w / t + r_prev[1:t] - r_prev[0:t - 1], 0.0, 1.0)
        r_prev, p = _regret_step(t, r_prev, p_int)
        store.put(t, r=r_prev, p=p)
    return DpTables(n_max, "optimal", store.arrays["r"], store.arrays["p"], rows=keep)


def solve_myopic(n_max, keep=None):
    """Regret of the policy that hires with probability w / t in every state."""
    n_max = _check_horizon(n_max)
    keep = _keep_set(n_max, keep)
    store = _RowStore(n_max, keep, ("r", "p"))
    r_prev = np.zeros(1)
    store.put(0, r=r_prev, p=np.zeros(1))
    for t in range(1, n_max + 1):
        p_int = np.arange(1, t) / t
        r_prev, p = _regret_step(t, r_prev, p_int)
        store.put(t, r=r_prev, p=p)
    return DpTables(n_max, "myopic", store.arrays["r"], store.arrays["p"], rows=keep)


def solve_value_direct(n_max, keep=None):
    """Value-space Bellman recursion, kept as an independent check.

    Hire probability 1 - (v[t-1, w] - v[t-1, w-1]) clipped to [0, 1];
    value p(1 - p/2) + p v[t-1, w-1] + (1 - p) v[t-1, w]. The returned
    ``r`` is offline_value - v.
    """
    n_max = _check_horizon(n_max)
    keep = _keep_set(n_max, keep)
    store = _RowStore(n_max, keep, ("r", "p", "v"))
    v_prev = np.zeros(1)
    store.put(0, r=np.zeros(1), p=np.zeros(1), v=v_prev)
    for t in range(1, n_max + 1):
        v = np.empty(t + 1)
        p = np.zeros(t + 1)
        v[0], v[t], p[t] = 0.0, t / 2.0, 1.0
        if t >= 2:
            lo, hi = v_prev[0:t - 1], v_prev[1:t]
            pw = np.clip(1.0 - (hi - lo), 0.0, 1.0)
            p[1:t] = pw
            v[1:t] = pw * (1.0 - 0.5 * pw) + pw * lo + (1.0 - pw) * hi
        r = offline_value(t, np.arange(t + 1)) - v
        store.put(t, r=r, p=p, v=v)
        v_prev = v
    a = store.arrays
    return DpTables(n_max, "optimal", a["r"], a["p"], v=a["v"], rows=keep)


def tables_to_csv(tables, fh=None):
    """Write one row per stored state in increasing (t, w) order.

    Returns the CSV text when ``fh`` is None.
    """
    sink = io.StringIO() if fh is None else fh
    writer = csv.writer(sink, lineterminator="\n")
    cols = ["t", "w", "p", "r"] + (["v"] if tables.v is not None else [])
    writer.writerow(cols)
    for t in tables.stored_rows():
        p, r = tables.p_row(t), tables.r_row(t)
        v = tables.v_row(t) if tables.v is not None else None
        for w in range(t + 1):
            row = [t, w, repr(float(p[w])), repr(float(r[w]))]
            if v is not None:
                row.append(repr(float(v[w])))
            writer.writerow(row)
    if fh is None:
        return sink.getvalue()
    return None


def tables_from_csv(text_or_fh, policy_kind="optimal"):
    """Inverse of :func:`tables_to_csv`."""
    fh = io.StringIO(text_or_fh) if isinstance(text_or_fh, str) else text_or_fh
    reader = csv.DictReader(fh)
    has_v = "v" in (reader.fieldnames or [])
    rows, r, p, v = [], [], [], []
    for rec in reader:
        t, w = int(rec["t"]), int(rec["w"])
        if w == 0:
            rows.append(t)
        r.append(float(rec["r"]))
        p.append(float(rec["p"]))
        if has_v:
            v.append(float(rec["v"]))
    n_max = rows[-1]
    full = rows == list(range(n_max + 1))
    return DpTables(
        n_max, policy_kind, np.array(r), np.array(p),
        v=np.array(v) if has_v else None,
        rows=None if full else tuple(rows),
    )
