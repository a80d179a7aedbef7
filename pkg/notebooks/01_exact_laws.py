# %% [markdown]
# # Exact pattern laws
#
# Every joint law here is a product over the gaps between successive ones.
# Pattern probabilities follow by inclusion-exclusion over the zeros, and
# for small windows the whole pattern distribution can be tabulated.

# %%
import numpy as np

from fracbern import ProcessSpec, all_pattern_probs, enumerate_pmf, pattern_prob

specs = {
    "gbp1": ProcessSpec.gbp1(0.1, 0.6, 0.2),
    "gbp1star": ProcessSpec.gbp1star(0.1, 0.6, 0.2),
    "gbp2": ProcessSpec.gbp2(0.8, 0.6, 0.1, 12),
    "gbp2star": ProcessSpec.gbp2star(0.8, 0.6),
}

# %% [markdown]
# A single pattern, then the full table of 2^12 probabilities.

# %%
for name, spec in specs.items():
    print(name, pattern_prob(spec, "100100000001"))

for name, spec in specs.items():
    probs = all_pattern_probs(spec, 12)
    print(f"{name:9s} sum={probs.sum():.15f} min={probs.min():.3e}")

# %% [markdown]
# Law of the count B_12. GBP-II keeps more mass at zero than GBP-II*
# because its first one is rare.

# %%
for name, spec in specs.items():
    pmf = enumerate_pmf(spec, 12)
    print(f"{name:9s} P(B=0)={pmf[0]:.4f} mean={pmf.moment(1):.4f}")
