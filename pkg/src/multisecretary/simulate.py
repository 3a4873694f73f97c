"""Seeded Monte Carlo evaluation of threshold hiring policies.

Replicate ``i`` of a run with master seed ``s`` draws its valuations from a
Philox4x64 counter-based generator keyed by ``s`` with its counter starting
at ``i << 128``; a replicate's path therefore does not depend on how
replicates are batched or scheduled.
"""
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GENERATOR_VERSION",
    "SimConfig",
    "SimSummary",
    "sample_path",
    "sample_paths",
    "run_policy",
    "hindsight_value",
    "estimate_regret",
    "summary_to_json",
    "summary_from_json",
]

GENERATOR_VERSION = f"philox4x64-10/replicate-counter-v1/numpy-{np.__version__}"
CHUNK = 2048
_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class SimConfig:
    n: int
    k: int
    policy: str = "optimal"
    threshold: float | None = None
    replicates: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n, got n={self.n}, k={self.k}")
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if not 0 <= self.seed <= _SEED_MASK:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.policy == "fixed":
            if self.threshold is None or not 0.0 <= self.threshold <= 1.0:
                raise ValueError("fixed policy needs a threshold in [0, 1]")
        elif self.policy not in ("optimal", "myopic"):
            raise ValueError(f"unknown policy {self.policy!r}")

    @property
    def policy_label(self):
        return f"fixed:{self.threshold!r}" if self.policy == "fixed" else self.policy


@dataclass(frozen=True)
class SimSummary:
    mean_regret: float
    std_error: float  # nan when replicates == 1
    mean_hires: float
    mean_mistakes: float
    replicates: int


def _generator(seed, replicate):
    bitgen = np.random.Philox(key=seed & _SEED_MASK, counter=replicate << 128)
    return np.random.Generator(bitgen)


def sample_path(n, seed, replicate=0):
    """Valuations of one replicate, in interview order, each in [0, 1)."""
    if n < 1:
        raise ValueError("n must be positive")
    return _generator(seed, replicate).random(n)


def sample_paths(n, seed, start, stop):
    """Stack replicates ``start..stop-1`` into a (stop - start, n) array."""
    out = np.empty((stop - start, n))
    for row, i in enumerate(range(start, stop)):
        out[row] = _generator(seed, i).random(n)
    return out


def _thresholds(policy, tables, t, w):
    # hire iff valuation exceeds the returned threshold
    if isinstance(policy, str) and policy == "table":
        return 1.0 - tables.p_row(t)[w]
    return np.full(w.shape, float(policy))


def _run(paths, k, policy, tables):
    reps, n = paths.shape
    w = np.full(reps, k, dtype=np.int64)
    value = np.zeros(reps)
    mistakes = np.zeros(reps, dtype=np.int64)
    for j in range(n):
        t = n - j
        x = paths[:, j]
        thr = _thresholds(policy, tables, t, w)
        forced = w == t
        hire = (w > 0) & (forced | (x > thr))
        # x should be hired iff fewer than w of the remaining t - 1 beat it
        better_later = (paths[:, j + 1:] > x[:, None]).sum(axis=1)
        should = better_later < w
        decision = (w > 0) & ~forced
        mistakes += decision & (hire != should)
        value += np.where(hire, x, 0.0)
        w -= hire
    return value, w, mistakes


def run_policy(path, policy, k):
    """Run a threshold policy along one valuation sequence.

    ``policy`` is either a :class:`~multisecretary.dp.DpTables` (hire when
    the valuation exceeds 1 - p[t, w]) or a fixed threshold in [0, 1].
    States with w = t hire everyone left; w = 0 hires nobody.

    Returns ``(hired_mask, total_value)``.
    """
    path = np.asarray(path, dtype=np.float64)
    n = path.size
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= len(path), got k={k}, len={n}")
    tables = None
    if hasattr(policy, "p_row"):
        tables, policy = policy, "table"
    w = k
    hired = np.zeros(n, dtype=bool)
    for j, x in enumerate(path):
        t = n - j
        if w == 0:
            break
        thr = _thresholds(policy, tables, t, np.array([w]))[0]
        if w == t or x > thr:
            hired[j] = True
            w -= 1
    return hired, float(path[hired].sum())


def hindsight_value(path, k):
    """Sum of the k largest valuations."""
    path = np.asarray(path, dtype=np.float64)
    if not 0 <= k <= path.size:
        raise ValueError(f"need 0 <= k <= len(path), got k={k}, len={path.size}")
    if k == 0:
        return 0.0
    return float(np.partition(path, path.size - k)[path.size - k:].sum())


def _hindsight_rows(paths, k):
    n = paths.shape[1]
    return np.partition(paths, n - k, axis=1)[:, n - k:].sum(axis=1)


def _chunk(config, policy, tables, start, stop):
    paths = sample_paths(config.n, config.seed, start, stop)
    value, w_left, mistakes = _run(paths, config.k, policy, tables)
    regret = _hindsight_rows(paths, config.k) - value
    hires = config.k - w_left
    return regret, hires, mistakes


def estimate_regret(config, tables=None, threads=1):
    """Monte Carlo regret of ``config.policy`` with its standard error.

    Replicates are processed in fixed chunks that may run on several
    threads; per-replicate results are reassembled in replicate order before
    reduction, so the summary is bit-identical for any ``threads``.
    """
    if config.policy == "fixed":
        policy = config.threshold
    else:
        if tables is None:
            raise ValueError(f"{config.policy} policy needs DP tables")
        if tables.policy_kind != config.policy:
            raise ValueError(f"tables are for the {tables.policy_kind} policy, "
                             f"config asks for {config.policy}")
        if config.n > tables.n_max or not all(tables.has_row(t) for t in range(1, config.n + 1)):
            raise ValueError(f"tables do not cover n={config.n}")
        policy = "table"
    bounds = [(s, min(s + CHUNK, config.replicates))
              for s in range(0, config.replicates, CHUNK)]
    threads = max(1, int(threads or os.cpu_count() or 1))
    if threads == 1 or len(bounds) == 1:
        parts = [_chunk(config, policy, tables, s, e) for s, e in bounds]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda b: _chunk(config, policy, tables, *b), bounds))
    regret = np.concatenate([p[0] for p in parts])
    hires = np.concatenate([p[1] for p in parts])
    mistakes = np.concatenate([p[2] for p in parts])
    reps = config.replicates
    std_error = float(regret.std(ddof=1) / math.sqrt(reps)) if reps > 1 else math.nan
    return SimSummary(
        mean_regret=float(regret.mean()),
        std_error=std_error,
        mean_hires=float(hires.mean()),
        mean_mistakes=float(mistakes.mean()),
        replicates=reps,
    )


def summary_to_json(config, summary):
    """One JSON object describing the run; undefined std_error becomes null."""
    payload = {
        "schema_version": 1,
        "n": config.n,
        "k": config.k,
        "policy": config.policy_label,
        "replicates": summary.replicates,
        "seed": config.seed,
        "mean_regret": summary.mean_regret,
        "std_error": None if math.isnan(summary.std_error) else summary.std_error,
        "mean_hires": summary.mean_hires,
        "mean_mistakes": summary.mean_mistakes,
        "generator_version": GENERATOR_VERSION,
    }
    return json.dumps(payload, sort_keys=True)


def summary_from_json(text):
    d = json.loads(text)
    policy, threshold = d["policy"], None
    if policy.startswith("fixed:"):
        policy, threshold = "fixed", float(d["policy"].split(":", 1)[1])
    config = SimConfig(d["n"], d["k"], policy, threshold, d["replicates"], d["seed"])
    summary = SimSummary(
        mean_regret=d["mean_regret"],
        std_error=math.nan if d["std_error"] is None else d["std_error"],
        mean_hires=d["mean_hires"],
        mean_mistakes=d["mean_mistakes"],
        replicates=d["replicates"],
    )
    return config, summary
