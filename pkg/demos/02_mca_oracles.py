"""
Minimal centers of attraction on systems with known answers
===========================================================

For each system an orbit is sampled, the partition cells visited with
positive upper density are collected, and the result is checked for
attraction (the orbit stays near the cells with density one) and
minimality (no cell can be dropped).
"""

import numpy as np

from mincenter.mca import estimate_mca, verify_center, verify_minimality, check_invariance
from mincenter.partition import BoxPartition
from mincenter.symbolic import parse_point
from mincenter.systems import make_system, sample_orbit


def report(label, system, x0, partition, horizon=10**5, **kw):
    orbit = sample_orbit(system, x0, horizon=horizon)
    est = estimate_mca(orbit, partition, **kw)
    center = verify_center(orbit, est)
    minimal = verify_minimality(orbit, est)
    inv = check_invariance(system, est)
    print(
        f"{label:<28} cells={len(est):>3}  lower={center.estimate.lower:.4f}  "
        f"center={center.ok!s:<5} minimal={minimal.ok!s:<5} invariant={inv}"
    )
    return est


# Contraction x -> x/2 on [-1, 1]: everything collapses onto the fixed point 0.
est = report("contraction", make_system("linear-contraction"), 1.0, BoxPartition.interval(-1, 1, 65))
print("  cell", est.cells, "centre", est.cellset.centers().ravel())

# Rational rotations have periodic orbits: p cells, each with density 1/p.
circle = BoxPartition.circle(64)
for p in (2, 3, 5):
    est = report(f"rotation alpha=1/{p}", make_system("rotation", alpha=1 / p), 0.1, circle)
    print("  densities", np.round(est.densities, 4))

# The golden rotation is uniquely ergodic: all 64 arcs, each with mass 1/64.
est = report("golden rotation", make_system("rotation"), 0.0, circle, horizon=10**6)
print("  min/max density %.5f %.5f" % (est.densities.min(), est.densities.max()))

# A one-sided binary sequence 110(01): the transient 11 is forgotten and the
# center is the period-2 orbit, i.e. the depth-8 cylinders 01010101, 10101010.
cyl = BoxPartition.cylinders(8)
est = report("shift 110(01)", make_system("full-shift-sequence"), parse_point("110(01)"), cyl)
print("  words", ["".join(map(str, w)) for w in cyl.words(est.cells)])
