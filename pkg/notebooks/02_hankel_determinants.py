# %% [markdown]
# # Hankel determinants with certified signs
#
# `hankel_det` computes det(h(i+j+r)) for a series h. Ball LU elimination
# is the default for irrational values; rational series go through exact
# fraction arithmetic. Precision is raised until the sign is certified.

# %%
from hankel_dirichlet.hankel import (HankelQuery, certify_positive, check_dodgson_identity,
                                     engines_agree, hankel_det)
from hankel_dirichlet.numerics import format_ball
from hankel_dirichlet.sequences import factorial_seq, geo2, pow2, zeta

# %%
for n in range(1, 9):
    d = hankel_det(zeta(), n, 0)
    print(n, d.sign.value, d.bits_used, format_ball(d.value)[0])

# %% [markdown]
# The determinants shrink roughly like 2^(-n^2). Exact engines give
# integers for the factorial sequence and exact zeros for a series with
# only two nonzero coefficients.

# %%
print([hankel_det(factorial_seq(), n, 0, engine="exact").exact for n in range(1, 6)])
print([hankel_det(geo2(), n, 0, engine="exact").sign.value for n in range(1, 6)])

# %% [markdown]
# Independent engines must agree: LU, Dodgson condensation and exact
# elimination give intersecting enclosures.

# %%
results = [hankel_det(pow2(), 4, 1, engine=e) for e in ("lu", "dodgson", "exact")]
print(engines_agree(results), results[2].exact)

# %% [markdown]
# The condensation identity H(n+1,r) H(n-1,r+2) = H(n,r) H(n,r+2) - H(n,r+1)^2
# holds to within the ball radius.

# %%
print(format_ball(check_dodgson_identity(zeta(), 4, 0)))

# %% [markdown]
# Positivity can also be certified without computing the determinant: it is
# a sum of nonnegative terms, and a single positive term suffices.

# %%
cert = certify_positive(HankelQuery(zeta(), 3, 0))
print(cert.status, cert.tuple, cert.term)
