# %% [markdown]
# # Ball arithmetic and Dirichlet series values
#
# Every number the library produces is a *ball*: a midpoint and a radius
# that together enclose the exact real value. This script shows the basic
# operations and how series values such as zeta(s) are enclosed.

# %%
from fractions import Fraction

from hankel_dirichlet.numerics import Ball, certify_sign, format_ball
from hankel_dirichlet.sequences import eval_series, get_series, minimal_indices, zeta_em

# %% [markdown]
# Exact rationals become zero-radius balls when they are dyadic, and tiny
# balls otherwise. Arithmetic keeps the enclosure property.

# %%
third = Ball.exact(Fraction(1, 3), 128)
x = (third * 3 - 1)
print(format_ball(x), certify_sign(x))

# %% [markdown]
# zeta(s) is evaluated by Euler-Maclaurin summation with a rigorous remainder
# bound. Raising the working precision tightens the radius.

# %%
for prec in (64, 128, 512):
    v = zeta_em(3, prec)
    print(prec, *format_ball(v))

# %% [markdown]
# Catalog series are looked up by name. `minimal_indices` reports the two
# smallest indices with a nonzero coefficient, which drive the decay rates.

# %%
for name in ("zeta", "zeta_minus_1", "pow2", "zeta_ap(2,1)"):
    spec = get_series(name)
    mi = minimal_indices(spec)
    print(f"{name:14s} h(4) = {format_ball(eval_series(spec, 4, 128))[0]:>22s}  N={mi.N} M={mi.M}")
