# %% [markdown]
# # Sampling
#
# Paths are drawn gap by gap from the exact renewal tables. Seeds map to
# counter-based streams per chunk, so results do not depend on how many
# workers run.

# %%
import numpy as np

from fracbern import ProcessSpec, all_pattern_probs, sample_batch
from fracbern.stats import tv_distance

spec = ProcessSpec.gbp2star(0.8, 0.6)
batch = sample_batch(spec, 10, 200_000, seed=1, codes=True)
emp = np.bincount(batch.codes, minlength=1 << 10) / batch.reps
print("TV to exact:", tv_distance(emp, all_pattern_probs(spec, 10)))
print("censored final gaps:", batch.censored)

# %%
a = sample_batch(spec, 500, 50_000, seed=4).counts
b = sample_batch(spec, 500, 50_000, seed=4, workers=4).counts
print("identical across worker counts:", np.array_equal(a, b))
