"""
Recurrence tests along a sampled orbit
======================================

Returns to an epsilon-ball around the starting point are classified as
Poisson stable (returns keep happening), Birkhoff recurrent (gaps are
bounded) or quasi-weakly almost periodic (returns occur with positive
density).  The last property is checked against membership of the
starting cell in the estimated center.
"""

from mincenter.partition import BoxPartition
from mincenter.recurrence import birkhoff_recurrent_test, poisson_stable_test, prop42_crosscheck, qwap_test
from mincenter.symbolic import parse_point, sparse_ones
from mincenter.systems import make_system, sample_orbit

rotation = make_system("rotation")
orbit = sample_orbit(rotation, 0.0, horizon=10**5)
q = qwap_test(orbit, 0.05)
b = birkhoff_recurrent_test(orbit, 0.05, gap_bound=21)
print("golden rotation: poisson %s  birkhoff %s (max gap %g)  qwap %s (N=%s)"
      % (poisson_stable_test(orbit, 0.05), b.ok, b.max_gap, q.ok, q.N))

# A sequence with sparser and sparser ones returns near 000... forever,
# but the waiting times grow without bound.
shift = make_system("full-shift-sequence")
orbit = sample_orbit(shift, sparse_ones(), horizon=10**4)
print("sparse ones: poisson %s  birkhoff %s" % (poisson_stable_test(orbit, 0.5), birkhoff_recurrent_test(orbit, 0.5).ok))

# The starting cell lies in the center exactly when the start recurs with
# positive density.  Both a recurrent and a transient start agree.
cyl = BoxPartition.cylinders(8)
for label in ("(01)", "1(0)", "110(01)"):
    v = prop42_crosscheck(shift, parse_point(label), cyl)
    print(f"{label:<8}", v.describe())

v = prop42_crosscheck(make_system("linear-contraction"), 1.0, BoxPartition.interval(-1, 1, 64))
print("contraction from 1.0:", v.describe())
