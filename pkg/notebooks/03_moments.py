# %% [markdown]
# # Moments of the fractional binomial count
#
# Raw moments are assembled from ordered gap sums, which makes n = 10^4
# cheap. Their ratio to the leading-order constants should approach one.

# %%
from fracbern import ProcessSpec, exact_raw_moments
from fracbern.stats import c_k, c_k_star, growth_exponent

H, c, lam, n = 0.8, 0.6, 0.1, 10_000
scale = n ** (2 * H - 1)
raw = exact_raw_moments(ProcessSpec.gbp2(H, c, lam, n), n, 3)
raw_star = exact_raw_moments(ProcessSpec.gbp2star(H, c), n, 3)
for k in (1, 2, 3):
    print(k, raw[k - 1] / (c_k(k, H, c, lam) * scale**k), raw_star[k - 1] / (c_k_star(k, H, c) * scale**k))

# %% [markdown]
# Variance growth for GBP-I in the three regimes. At H = 0.5 the
# logarithmic factor pushes the fitted exponent slightly above one.

# %%
from fracbern import exact_moment

ns = [2**j for j in range(7, 14)]
for p, H, c in [(0.1, 0.8, 0.3), (0.3, 0.5, 0.05), (0.1, 0.3, 0.2)]:
    spec = ProcessSpec.gbp1(p, H, c)
    slope, se = growth_exponent(ns, [exact_moment(spec, m, 2, central=True) for m in ns])
    print(f"H={H}: exponent {slope:.3f} +- {se:.3f}")
