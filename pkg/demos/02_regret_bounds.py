"""
Logarithmic regret
==================

Exact optimal regret at k = n/2 for n = 16 .. 8192, next to the
log(n+1)/8 upper bound and the log(n)/16 - 1/4 lower bound. One DP solve
at the largest n serves every row.
"""

# %%
from multisecretary.bounds import build_report, curve_to_csv

report = build_report([2**i for i in range(4, 14)], "half")
print(curve_to_csv(report.curve))

# %%
# Regret grows by a nearly constant amount per doubling of n
entries = report.curve.entries
for a, b in zip(entries, entries[1:]):
    print(f"{a.n:>5} -> {b.n:>5}: +{b.regret_optimal - a.regret_optimal:.4f}")

# %%
print(f"fitted slope on log n: {report.fitted_slope:.4f} "
      f"(bounds imply it lies between 1/16 = 0.0625 and 1/8 = 0.125)")
print("violations:", report.violations or "none")

# %%
# Other ratios k/n: the upper bound still applies, the lower bound is not claimed
quarter = build_report([64, 256, 1024, 4096], 0.25)
for e in quarter.curve.entries:
    print(e.n, e.k, round(e.regret_optimal, 4), round(e.upper_bound, 4), e.lower_bound)
