"""
Upper and lower densities of time sets
======================================

A time set is a boolean mask on a sampling grid.  Its density is the
fraction of ``[0, T]`` it occupies, and the upper and lower densities are
read off the tail of a ladder of checkpoints ``T_1 < ... < T_m``.
"""

import math

import numpy as np

from mincenter.density import (
    CheckpointPolicy,
    TimeSet,
    density,
    lower_density,
    scale,
    upper_density,
)
from mincenter.errors import UnsupportedOperationError

# The even integers up to 10^4 have density one half.
evens = TimeSet.evens(10_000)
print("evens: lower %.4f  upper %.4f" % (lower_density(evens), upper_density(evens)))

# The full estimate keeps the checkpoint ladder and the running averages.
est = density(evens, CheckpointPolicy("linear", 10, 0.5))
print("checkpoints", est.checkpoints[-3:], "values", np.round(est.values[-3:], 4))

# A continuous set: t mod 2 < 1, sampled every 0.01 up to t = 1000.
blocks = TimeSet.from_time_predicate(lambda t: np.mod(t, 2.0) < 1.0 - 1e-12, 0.01, 1000.0)
print("blocks: lower %.4f  upper %.4f" % (lower_density(blocks), upper_density(blocks)))

# The default ladder is dyadic, so its early checkpoints sit at T ~ 1-2 where
# a single block still weighs a lot.  Evenly spaced checkpoints avoid that.
linear = CheckpointPolicy("linear", 20, 0.5)
print("blocks, linear ladder: lower %.4f  upper %.4f" % (lower_density(blocks, linear), upper_density(blocks, linear)))

# Scaling time by tau > 0 keeps densities of continuous sets.
for tau in (0.5, 2.0, math.pi):
    s = scale(blocks, tau)
    print("  tau=%.4f  lower %.4f  upper %.4f" % (tau, lower_density(s, linear), upper_density(s, linear)))

# In discrete time the same operation makes no sense: halving the evens
# gives every integer.  The library refuses instead of returning 1.
try:
    scale(evens, 2)
except UnsupportedOperationError as exc:
    print("discrete scaling rejected:", exc)
