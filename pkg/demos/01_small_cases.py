"""
Small problems by hand and by DP
================================

With two applicants and one position, the first applicant is hired when
his valuation beats 1/2. The DP tables reproduce the hand calculation and
then carry on to any horizon.
"""

# %%
from multisecretary import (offline_value, option_value, solve_myopic,
                            solve_optimal, solve_value_direct)

opt = solve_optimal(3)
myo = solve_myopic(3)
direct = solve_value_direct(3)

# %%
# Expected team value of the online policy vs the offline optimum
for n, k in [(2, 1), (3, 1), (3, 2)]:
    v = direct.v_row(n)[k]
    print(f"n={n} k={k}: online value {v:.6f}, offline {offline_value(n, k):.6f}, "
          f"regret {opt.regret(n, k):.6f}, hire prob {opt.hire_prob(n, k):.4f}")

# %%
# r(3,1) = 7/128 under the optimal policy; the myopic policy pays 1/18
print("r(3,1)  =", opt.regret(3, 1), "vs 7/128 =", 7 / 128)
print("rh(3,1) =", myo.regret(3, 1), "vs 1/18  =", 1 / 18)

# %%
# The value of one more applicant is the option of swapping out the
# current k-th best: k(k+1) / (2n(n+1)).
for n, k in [(2, 1), (3, 2), (10, 5)]:
    gain = offline_value(n, k) - offline_value(n - 1, k)
    print(f"n={n} k={k}: option value {option_value(n, k):.6f}, offline gain {gain:.6f}")
