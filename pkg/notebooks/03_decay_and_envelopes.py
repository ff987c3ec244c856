# %% [markdown]
# # Quadratic decay and ratio envelopes
#
# For zeta, log H_n decays like -n^2 log 2. The checker compares the
# ball-certified log H_n against -n^2 log(2 - epsilon) row by row.

# %%
from fractions import Fraction

from hankel_dirichlet.bounds import (asymptotic_constant, envelope_bound, factorial_bound_check,
                                     verify_quadratic_decay)
from hankel_dirichlet.hankel import hankel_det
from hankel_dirichlet.sequences import calibrate_ratio_bounds, ratio_limit_statistic, zeta, zeta_minus_1

# %%
rep = verify_quadratic_decay(zeta(), range(2, 11), 0, epsilon=Fraction(1, 10), max_bits=1024)
for row in rep.rows:
    print(row.n, f"{float(row.log_H.mid):10.4f}", f"{float(row.bound_rhs.mid):10.4f}", row.status)

# %% [markdown]
# Small n fails because the bound is asymptotic. The limiting constant of
# log H_n / n^2 depends only on the two smallest indices with nonzero
# coefficients.

# %%
print(float(asymptotic_constant(zeta()).mid), float(asymptotic_constant(zeta_minus_1()).mid))

# %% [markdown]
# Consecutive values satisfy h(k+1)/h(k) = 1 - O(2^-k). The normalized
# statistic below tends to 1.

# %%
for s in (10, 20, 40):
    print(s, float(ratio_limit_statistic(zeta(), s).mid))

# %% [markdown]
# Calibrating a ratio envelope yields an explicit upper bound for every
# determinant. The constant is fitted on a window and rounded up.

# %%
env = calibrate_ratio_bounds(zeta(), 2, 30)
print("c =", env.c, env.label)
for n in (2, 4, 6):
    print(n, float(hankel_det(zeta(), n, 0).value.mid), float(envelope_bound(env, zeta(), n, 0).mid))

# %% [markdown]
# The factorial sequence has a closed-form envelope.

# %%
for n in range(1, 6):
    chk = factorial_bound_check(n, 0)
    print(n, chk.H, chk.bound, chk.holds)
