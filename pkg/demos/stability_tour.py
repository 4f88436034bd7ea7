"""Which relaxation systems have a well-behaved stiff limit?

Run: python demos/stability_tour.py

Three systems are compared. The Jin-Xin model with |b| < a satisfies the
subcharacteristic condition and every symbol exp(H t) stays bounded. Swapping
to |b| > a breaks it. The rotating oscillator ``osc3`` has an undamped fast
block, yet its symbols are all skew-Hermitian and nothing grows.
"""

import numpy as np

from relaxlab import block_decompose, family_scan, jinxin, kreiss_measure, osc3, yong_check
from relaxlab.model import candidate_symmetrizer

for system in (jinxin(1.0, 0.5), jinxin(1.0, 2.0), osc3()):
    dec = block_decompose(system)
    print(f"== {system.name}: slow block of size {system.n - dec.r}, fast block of size {dec.r}")
    yong = yong_check(system, candidate_symmetrizer(system), decomp=dec)
    print(f"   Yong conditions (i, ii, iii): {yong.condition_i}, {yong.condition_ii}, {yong.condition_iii}")
    for fam in ("F0", "F1", "F2"):
        rep = family_scan(system, dec, fam, directions=64)
        print(f"   {fam}: uniformly quasi-stable = {rep.all_quasi_stable}, worst sup ||exp(Ht)|| = {rep.worst_sup_semigroup:.4g}")
    K = kreiss_measure(np.asarray(dec.B))
    print(f"   Kreiss measurement of the fast block B: {K.value:.6g}")

# A defective eigenvalue on the imaginary axis is the archetype of failure:
# the measurement grows without bound as the grid approaches the axis.
est = kreiss_measure([[0.0, 1.0], [0.0, 0.0]])
print("\nJordan block at 0: level estimates", ", ".join(f"{v:.3g}" for v in est.levels), "-> divergent =", est.divergent)
