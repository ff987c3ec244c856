# %% [markdown]
# # Rational values and the denominator ledger
#
# If every value h(k) is rational, then D_m = lcm(q_2, ..., q_m) clears the
# denominators and D^n H_n is an integer. For pow2, h(k) = 2^k/(2^k - 1).

# %%
from hankel_dirichlet.rationality import growth_verifier, integrality_grid, rational_values
from hankel_dirichlet.sequences import pow2

# %%
ledger = rational_values(pow2(), 0, 12)
print(ledger.q)
print(ledger.D)

# %%
grid = integrality_grid(pow2(), range(1, 5), range(0, 3))
for (n, r), v in grid.items():
    print(n, r, v)

# %% [markdown]
# D_m grows exponentially. With base 1.9 the inequality D_m > 1.9^m fails
# only at m = 2, and log D_m / m is not monotone.

# %%
rep = growth_verifier(rational_values(pow2(), 0, 16), "1.9")
for row in rep.rows:
    print(row.m, row.D, row.holds, f"{row.rate:.4f}")
print("eventually:", rep.eventually_holds, "monotone rate:", rep.rate_nondecreasing)
