"""
Li-Yorke pairs and sensitivity near the center
==============================================

A pair is Li-Yorke when the distance between the two orbits comes
arbitrarily close to zero yet keeps returning above a positive level.
Rotations are isometries, so they never produce such pairs.
"""

import numpy as np

from mincenter.chaos import find_li_yorke_partner, is_li_yorke, pair_diagnostics, sensitivity_scan
from mincenter.mca import CellSet, estimate_mca
from mincenter.partition import BoxPartition
from mincenter.symbolic import parse_point, shadowing_point
from mincenter.systems import make_system, sample_orbit

# Two logistic orbits starting 1e-9 apart separate and come back together.
logistic = make_system("logistic")
d = pair_diagnostics(logistic, 0.3, 0.300000001, horizon=10**5)
print("logistic pair: liminf %.2e  limsup %.3f  Li-Yorke %s" % (d.liminf_pair, d.limsup_pair, is_li_yorke(d)))

# On the golden rotation every pair keeps its initial distance.
rotation = make_system("rotation")
rng = np.random.default_rng(0)
count = sum(is_li_yorke(pair_diagnostics(rotation, *rng.random(2), horizon=10**4)) for _ in range(100))
print("rotation: Li-Yorke pairs among 100 random pairs:", count)

# A sequence that shadows 01 for ever longer stretches has a Li-Yorke
# partner on the periodic orbit it keeps approaching.
shift = make_system("full-shift-sequence")
x = shadowing_point()
res = find_li_yorke_partner(shift, x, [parse_point("(01)"), parse_point("(10)")], horizon=10**5)
print("shadowing partner found:", res.found, "candidate", res.candidate)

# Sensitivity needs more than one orbit closure in the center.  With two
# fixed cells of the identity rotation nothing is sensitive and the constant
# is a quarter of the gap between the cells.
identity = make_system("rotation", alpha=0.0)
two = CellSet(BoxPartition.circle(64), [3, 20])
rep = sensitivity_scan(identity, two, seed=0)
print("two fixed cells: epsilon_hat %.6f (17/256 = %.6f)  no sensitivity %s" % (rep.epsilon_hat, 17 / 256, rep.no_sensitivity))

# For the logistic map the center is the whole interval.
orbit = sample_orbit(logistic, 0.3, horizon=10**5)
est = estimate_mca(orbit, BoxPartition.interval(0, 1, 64))
rep = sensitivity_scan(logistic, est, closure_seeds="centers+vertices", seed=0)
print("logistic: epsilon_hat %.4f  sensitive at every anchor %s" % (rep.epsilon_hat, rep.sensitive))
