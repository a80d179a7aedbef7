# %% [markdown]
# # Mittag-Leffler function
#
# E_mu(z) is summed as a power series with log-gamma coefficients. At
# mu = 1 it reduces to exp(z), and its Taylor coefficients give the
# moments of the second-family Mittag-Leffler law.

# %%
import math

from fracbern import mittag_leffler, mlf2_moment
from fracbern.mlf import mittag_leffler_eval

print(mittag_leffler(1.0, 2.0), math.exp(2.0))
print(mittag_leffler(0.5, 1.0))
r = mittag_leffler_eval(0.6, 20.0)
print(r)
print([round(mlf2_moment(0.6, 0.8, k), 4) for k in range(1, 5)])
