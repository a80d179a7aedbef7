# %% [markdown]
# # Return times
#
# The gap between consecutive ones is a renewal law driven by the
# lag kernel. GBP-I has a finite mean return time 1/p and a survival tail
# of order k^(2H-3); GBP-II* has infinite mean and survival k^(1-2H).

# %%
from fracbern import Gbp1Params, interarrival_pmf_gbp1, interarrival_pmf_gbp2star, tail_index_fit

kmax = 100_000
for p in (0.1, 0.3, 0.6):
    t = interarrival_pmf_gbp1(Gbp1Params(p, 0.6, 0.2), kmax)
    print(f"p={p}: partial mean {t.partial_mean():.3f} vs 1/p = {1 / p:.3f}")

# %% [markdown]
# Log-log fit of the survival function between 100 and kmax.

# %%
for H, c in [(0.6, 0.2), (0.8, 0.3)]:
    fit = tail_index_fit(interarrival_pmf_gbp1(Gbp1Params(0.1, H, c), kmax), (100, kmax))
    print(f"GBP-I   H={H}: slope {fit.slope:.3f}, theory {fit.theory_slope:.3f}")
for H, c in [(0.6, 0.2), (0.8, 0.6)]:
    fit = tail_index_fit(interarrival_pmf_gbp2star(H, c, kmax), (100, kmax))
    print(f"GBP-II* H={H}: slope {fit.slope:.3f}, theory {fit.theory_slope:.3f}")
