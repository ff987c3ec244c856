# %% [markdown]
# # Heuristic asymptotic constants
#
# These are numerical reproductions, not certified claims. We fit the
# leading constant of H_n[zeta] after removing the predicted growth, and we
# compare ratios of neighboring determinants with their expansions in 1/n.

# %%
from hankel_dirichlet.bounds import first_expansion, monien_ratio_check, second_expansion, zagier_fit

# %%
fit = zagier_fit(range(8, 15))
for n, est in fit.A0_estimates:
    print(n, f"{float(est.mid):.8f}")
print("reference", float(fit.A0_reference))

# %% [markdown]
# The fitted constant settles near 0.6636, not at the reference value. The
# ratio of the first two coefficients matches e^(9/8)/sqrt(6) closely.

# %%
for n, est in fit.ratio_estimates:
    print(n, f"{float(est.mid):.7f}")
print("e^(9/8)/sqrt(6) =", float(fit.ratio_reference.mid))

# %%
print(float(first_expansion(10)), float(second_expansion(10)))
for row in monien_ratio_check(range(6, 11)):
    print(row.n, f"{row.first.residual:.3g}", f"{row.first_reindexed.residual:.3g}",
          f"{row.second_reindexed.residual:.3g}")
