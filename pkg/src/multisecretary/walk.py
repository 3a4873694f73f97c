"""Exact distribution of the open-positions walk w(t) under a policy table.

Starting from w(n) = k, one step hires with probability p[t, w] (w drops by
one) and otherwise leaves w unchanged. Probability vectors are pushed
forward exactly; nothing is sampled.
"""
import csv
import io
from dataclasses import dataclass

import numpy as np

from .core_math import cdf_integral, myopic_regret

__all__ = [
    "WalkDistribution",
    "MistakeStats",
    "forward_distribution",
    "walk_moments",
    "reference_variance",
    "step_covariance",
    "mistake_probability",
    "expected_mistakes",
    "expected_myopic_regret",
    "walk_table",
    "walk_to_csv",
]


@dataclass(frozen=True, eq=False)
class WalkDistribution:
    """``mass[t][w]`` = P(w(t) = w) for 0 <= w <= t <= n."""

    n: int
    k: int
    mass: tuple

    def at(self, t):
        return self.mass[t]

    def support(self, t):
        return max(0, self.k - (self.n - t)), min(t, self.k)


@dataclass(frozen=True, eq=False)
class MistakeStats:
    per_period: np.ndarray  # indexed by t; entry 0 is always 0
    total: float


def _check_rows(tables, n):
    if n > tables.n_max:
        raise ValueError(f"tables cover n <= {tables.n_max}, asked for n={n}")
    missing = [t for t in range(1, n + 1) if not tables.has_row(t)]
    if missing:
        raise ValueError(f"tables lack rows needed for the walk (first missing t={missing[0]})")


def forward_distribution(tables, n, k):
    """Push the point mass at (n, k) down to t = 0."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    _check_rows(tables, n)
    mass = [None] * (n + 1)
    cur = np.zeros(n + 1)
    cur[k] = 1.0
    mass[n] = cur
    for t in range(n, 0, -1):
        p = tables.p_row(t)
        nxt = cur[:t] * (1.0 - p[:t])
        nxt[:t] += cur[1:t + 1] * p[1:t + 1]
        # p[t, 0] = 0 and p[t, t] = 1, so no mass leaves the triangle
        mass[t - 1] = nxt
        cur = nxt
    for arr in mass:
        arr.setflags(write=False)
    return WalkDistribution(n, k, tuple(mass))


def walk_moments(dist):
    """Return arrays (mean, variance) of w(t), indexed by t = 0..n."""
    mean = np.empty(dist.n + 1)
    var = np.empty(dist.n + 1)
    for t, m in enumerate(dist.mass):
        w = np.arange(t + 1)
        mean[t] = m @ w
        var[t] = m @ (w - mean[t]) ** 2
    return mean, var


def reference_variance(n, t):
    """Variance (n - t)/4 of the walk that hires with probability 1/2 at every step."""
    if not 0 <= t <= n:
        raise ValueError(f"need 0 <= t <= n, got n={n}, t={t}")
    return (n - t) / 4.0


def _check_pair(dist, tables, t=None):
    if dist.n > tables.n_max:
        raise ValueError(f"walk horizon {dist.n} exceeds tables n_max={tables.n_max}")
    if t is not None and not 1 <= t <= dist.n:
        raise ValueError(f"need 1 <= t <= {dist.n}, got t={t}")


def step_covariance(dist, tables, t):
    """E[(1/2 - p[t, w(t)]) (w(t) - t/2)], the covariance of the step and the level.

    Equals cov(w(t-1) - w(t), w(t)) whenever E w(t) = t/2.
    """
    _check_pair(dist, tables, t)
    w = np.arange(t + 1)
    return float(dist.mass[t] @ ((0.5 - tables.p_row(t)) * (w - 0.5 * t)))


def mistake_probability(t, w, p):
    """Probability that the current decision disagrees with hindsight.

    With s the w-th largest of the other t - 1 applicants and F its CDF,
    rejecting when v > s has probability int_0^{1-p} F and hiring when
    v < s has probability int_{1-p}^1 (1 - F). Both use the closed-form
    integral of the incomplete beta function. Boundary states (w = 0 or
    w = t) return 0.
    """
    scalar = all(np.ndim(x) == 0 for x in (t, w, p))
    t, w, p = np.broadcast_arrays(np.asarray(t, dtype=np.int64),
                                  np.asarray(w, dtype=np.int64),
                                  np.asarray(p, dtype=np.float64))
    if np.any(np.isnan(p)) or np.any(p < 0.0) or np.any(p > 1.0):
        raise ValueError("hire probability must lie in [0, 1]")
    if np.any(w < 0) or np.any(w > t):
        raise ValueError("need 0 <= w <= t")
    out = np.zeros(t.shape)
    inner = (w > 0) & (w < t)
    if np.any(inner):
        ti, wi, pi = t[inner], w[inner], p[inner]
        a, b = (ti - wi).astype(np.float64), wi.astype(np.float64)
        y = 1.0 - pi
        below = cdf_integral(y, a, b)            # type II
        mean_s = a / ti                          # mu(t - 1, w) = (t - w) / t
        above = mean_s - y + below               # type I: int_y^1 (1 - F)
        out[inner] = np.clip(below + above, 0.0, 1.0)
    return float(out) if scalar else out


def _per_state(dist, tables, fn):
    _check_pair(dist, tables)
    n = dist.n
    ts = np.concatenate([np.full(t + 1, t) for t in range(1, n + 1)])
    ws = np.concatenate([np.arange(t + 1) for t in range(1, n + 1)])
    ps = np.concatenate([tables.p_row(t) for t in range(1, n + 1)])
    ms = np.concatenate([dist.mass[t] for t in range(1, n + 1)])
    vals = ms * fn(ts, ws, ps)
    per = np.zeros(n + 1)
    np.add.at(per, ts, vals)
    return per


def expected_mistakes(dist, tables):
    """Expected number of decisions that disagree with hindsight, per t and in total."""
    per = _per_state(dist, tables, mistake_probability)
    return MistakeStats(per_period=per, total=float(per.sum()))


def expected_myopic_regret(dist, tables):
    """E[m(t, w(t), p[t, w(t)])] for each t; these sum to the policy's regret."""
    return _per_state(dist, tables, myopic_regret)


def walk_table(dist, tables):
    """Columns t, mean, variance, variance_bound, covariance, mistake_probability.

    Rows run t = n down to 1.
    """
    mean, var = walk_moments(dist)
    mistakes = expected_mistakes(dist, tables).per_period
    rows = []
    for t in range(dist.n, 0, -1):
        rows.append({
            "t": t,
            "mean": float(mean[t]),
            "variance": float(var[t]),
            "variance_bound": reference_variance(dist.n, t),
            "covariance": step_covariance(dist, tables, t),
            "mistake_probability": float(mistakes[t]),
        })
    return rows


WALK_COLUMNS = ("t", "mean", "variance", "variance_bound", "covariance",
                "mistake_probability")


def walk_to_csv(rows, fh=None):
    sink = io.StringIO() if fh is None else fh
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(WALK_COLUMNS)
    for row in rows:
        writer.writerow([row["t"]] + [repr(float(row[c])) for c in WALK_COLUMNS[1:]])
    return sink.getvalue() if fh is None else None
