"""Regular, trivial and GNS representations, constant vectors and invariant measures.

    PYTHONPATH=src python3 demos/02_representations.py
"""

import numpy as np

from gpdt import (AlgebraElement, KernelFunction, build_pair, canonical_family, check_negative_type,
                  constant_vectors, disjoint_union, gns_rep, groupoid_from_group, i_norm,
                  invariant_measures, regular_reps, schoenberg_transform, trivial_rep)
from gpdt.groups import cyclic_group
from gpdt.representations import induced_measure, star_homomorphism_defect
from gpdt.spectral import operator_norm

G = disjoint_union(build_pair(2), groupoid_from_group(cyclic_group(3)))
print(f"G = P2 + Z/3: {G.n_arrows} arrows, {G.n_units} units")

# one ergodic invariant probability measure per orbit
for m in invariant_measures(G):
    print("extreme invariant measure:", np.round(m.weights, 4))

reps = regular_reps(G) + [trivial_rep(G, m) for m in invariant_measures(G)]
F = KernelFunction(G, np.where(G.is_unit, 0.0, 1.0))     # 1 - [unit], negative type
print("F is of negative type:", check_negative_type(F).summary())
reps.append(gns_rep(G, schoenberg_transform(F, 0.5)))

rng = np.random.default_rng(1)
f = AlgebraElement.random(G, rng)
fam = canonical_family(G).members
print(f"{'kind':<10}{'dim':>5}{'*-hom defect':>15}{'||pi(f)||':>12}{'const dim':>11}")
for rep in reps:
    defect = max(star_homomorphism_defect(rep, rng, trials=5).values())
    C = constant_vectors(rep, fam)
    print(f"{rep.kind:<10}{rep.dim:>5}{defect:>15.1e}{operator_norm(rep.realize(f)):>12.4f}{C.shape[1]:>11}")
print(f"I-norm of f: {i_norm(f):.4f} (bounds every column above)")

# a constant vector of the trivial representation induces an invariant measure
rep = trivial_rep(G)
xi = constant_vectors(rep, fam)[:, 0]
print("measure induced by a constant vector:", np.round(induced_measure(rep, xi), 4))
