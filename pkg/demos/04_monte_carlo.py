"""
Monte Carlo against the DP
==========================

Simulated valuation paths, scored against the hindsight top-k, give an
independent estimate of regret. Seeds are counter based, so results do not
depend on thread count.
"""

# %%
from multisecretary import solve_myopic, solve_optimal
from multisecretary.simulate import SimConfig, estimate_regret, summary_to_json

tables = {"optimal": solve_optimal(100), "myopic": solve_myopic(100)}

# %%
for n, k in [(10, 5), (100, 50)]:
    for policy, tab in tables.items():
        cfg = SimConfig(n, k, policy, replicates=100_000, seed=7)
        s = estimate_regret(cfg, tab)
        print(f"n={n:>3} k={k:>2} {policy:>7}: MC {s.mean_regret:.4f} +- {s.std_error:.4f}, "
              f"DP {tab.regret(n, k):.4f}, mistakes/path {s.mean_mistakes:.2f}")

# %%
# A fixed threshold ignores how many positions remain and pays for it
fixed = estimate_regret(SimConfig(100, 50, "fixed", 0.5, replicates=20_000, seed=1))
print("fixed threshold 0.5:", round(fixed.mean_regret, 4))
print(summary_to_json(SimConfig(100, 50, "fixed", 0.5, replicates=20_000, seed=1), fixed))
