"""
The open-positions walk and the number of mistakes
==================================================

The count of unfilled positions w(t) is a Markov chain driven by the
optimal hire probabilities. Its law is propagated exactly, so the mean,
variance and covariance claims can be checked to rounding error.
"""

# %%
import numpy as np

from multisecretary import solve_optimal
from multisecretary.walk import (expected_mistakes, expected_myopic_regret,
                                 forward_distribution, walk_table)

n = 64
tab = solve_optimal(4096)
dist = forward_distribution(tab, n, n // 2)

# %%
# Mean stays on t/2, variance stays under the fair-coin walk's (n - t)/4,
# and the step is negatively correlated with the level (mean reversion).
for row in walk_table(dist, tab)[::8]:
    print(f"t={row['t']:>3} mean={row['mean']:.3f} var={row['variance']:.3f} "
          f"bound={row['variance_bound']:.2f} cov={row['covariance']:+.4f} "
          f"P(mistake)={row['mistake_probability']:.4f}")

# %%
# Regret is the expected sum of one-step myopic regrets along the walk
per = expected_myopic_regret(dist, tab)
print("sum of myopic regrets:", per.sum(), " DP regret:", tab.regret(n, n // 2))

# %%
# Mistakes grow like sqrt(n) while regret grows like log(n): each mistake
# gets cheaper as n grows.
for m in (64, 256, 1024, 4096):
    total = expected_mistakes(forward_distribution(tab, m, m // 2), tab).total
    print(f"n={m:>5}: expected mistakes {total:7.3f}  (/sqrt(n) = {total / np.sqrt(m):.3f}), "
          f"regret {tab.regret(m, m // 2):.4f}")
