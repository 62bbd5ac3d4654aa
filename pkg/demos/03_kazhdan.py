"""Laplacians, spectral gaps, Kazhdan constants and the Kazhdan projection.

    PYTHONPATH=src python3 demos/03_kazhdan.py
"""

import math

import numpy as np

from gpdt import (adjoint, build_pair, expectation_law_check, generator_family, groupoid_from_group,
                  kazhdan_constant, kazhdan_projection, laplacian)
from gpdt.groups import cyclic_group, sl2_mod

for name, G in [("Z/3", groupoid_from_group(cyclic_group(3))),
                ("P2", build_pair(2)),
                ("Z/12", groupoid_from_group(cyclic_group(12))),
                ("SL(2,Z/5)", groupoid_from_group(sl2_mod(5)))]:
    fam = generator_family(G)
    cert = kazhdan_constant(G, fam, checks=20)
    print(f"{name:<10} lambda1={cert.gap:.6f} n={cert.n} c={cert.constant:.6f} "
          f"certified={cert.verified}")

n = 12
print(f"closed form for Z/{n}: 2 - 2cos(2pi/n) = {2 - 2 * math.cos(2 * math.pi / n):.6f}")

# the Kazhdan projection of a finite groupoid averages over each range fibre
P4 = build_pair(4)
p = kazhdan_projection(P4)
print("P4 projection coefficients:", np.unique(np.round(p.coeffs.real, 12)))
print("p is idempotent and self-adjoint:", (p @ p).allclose(p, 1e-9), adjoint(p).allclose(p, 1e-9))
rep = expectation_law_check(P4, p)
print(f"E(p)(x) = 1/|G_x| on every unit: max deviation {rep.max_deviation:.1e}")

delta = laplacian(P4, generator_family(P4)).element
print("p * Delta vanishes:", np.max(np.abs((p @ delta).coeffs)) < 1e-9)
