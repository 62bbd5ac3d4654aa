"""A first look at finite groupoids and their convolution algebras.

Builds the pair groupoid on three points, a cyclic group seen as a one-unit
groupoid, and an action groupoid, then exercises convolution, the adjoint,
the unit-restriction map Psi, the I-norm and the conditional expectation.

    PYTHONPATH=src python3 demos/01_groupoid_algebra.py
"""

import numpy as np

from gpdt import (AlgebraElement, adjoint, build_group, build_pair, build_transformation, conditional_expectation,
                  convolve, groupoid_from_group, i_norm, orbits, psi, validate)
from gpdt.groups import cyclic_group


def show(f):
    return {k: complex(v).real for k, v in f.to_dict().items()} or "0"


P3 = build_pair(3)
print(f"pair groupoid P3: {P3.n_arrows} arrows, {P3.n_units} units, {len(orbits(P3))} orbit")

# matrix units: delta_(0,1) * delta_(1,2) = delta_(0,2), any other product vanishes
a = AlgebraElement.delta(P3, P3.index((0, 1)))
b = AlgebraElement.delta(P3, P3.index((1, 2)))
print("delta(0,1) * delta(1,2) =", show(convolve(a, b)))
print("delta(1,2) * delta(0,1) =", show(convolve(b, a)))

# the algebra of P3 is M_3(C); the all-ones function is 3 times a projection
chi = AlgebraElement.indicator(P3)
print("chi * chi == 3 chi:", convolve(chi, chi).allclose(chi * 3))
print("Psi(chi) =", show(psi(chi)))

rng = np.random.default_rng(7)
f = AlgebraElement.random(P3, rng)
print(f"random f: ||f||_I = {i_norm(f):.4f}, E(f) supported on units: "
      f"{conditional_expectation(f).is_unit_supported()}")
print("adjoint is an involution:", adjoint(adjoint(f)).allclose(f))

Z6 = groupoid_from_group(cyclic_group(6))
print(f"Z/6 as a groupoid: {Z6.n_arrows} arrows, {Z6.n_units} unit")

S3 = build_group([[1, 0, 2], [1, 2, 0]])
A = build_transformation(S3, 3, S3.group.rows)
print(f"S3 acting on 3 points: {A.n_arrows} arrows, orbits {len(orbits(A))}")
print("validator diagnostics:", validate(A) or "none")
