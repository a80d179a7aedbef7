# %% [markdown]
# # Fractional Poisson limit
#
# Scaled by n^(2H-1), the GBP-II* count and the fractional Poisson count
# N(n) with mu = 2H-1 and nu = c Gamma(2H-1) share a Mittag-Leffler limit
# whose mgf is E_mu(nu t).

# %%
import numpy as np

from fracbern import FppParams, ProcessSpec, fpp_counts, mittag_leffler, sample_batch
from fracbern.stats import batch_median_mgf, common_edges, histogram, tv_distance

H, c, n, reps = 0.8, 0.6, 1000, 100_000
fp = FppParams.from_gbp2(H, c)
scale = n**fp.mu
b = sample_batch(ProcessSpec.gbp2star(H, c), n, reps, 1).counts / scale
f = fpp_counts(fp, float(n), reps, 2) / scale

grid = [0.1, 0.25, 0.5]
for t, mb, mf in zip(grid, batch_median_mgf(b, grid), batch_median_mgf(f, grid)):
    lim = mittag_leffler(fp.mu, fp.nu * t)
    print(f"t={t}: binomial {mb / lim:.4f}  poisson {mf / lim:.4f}")

# %%
edges = common_edges([b, f], 30)
print("TV between scaled histograms:", tv_distance(histogram(b, edges), histogram(f, edges)))
