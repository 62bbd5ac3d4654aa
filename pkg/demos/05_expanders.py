"""Expander sequences and the coarse groupoid picture.

Random 3-regular graphs on growing vertex sets keep their spectral gap,
cycles do not.  Each graph Laplacian is written exactly, over the integers,
as a sum of terms v v* - Psi(v v*) attached to partial matchings, which is
what makes the coarse groupoid Laplacian a sum of bisection terms.

    PYTHONPATH=src python3 demos/05_expanders.py
"""

from gpdt import cycle_graph, random_regular_graph
from gpdt.coarse import expander_gap_profile, laplacian_decomposition

regular = [random_regular_graph(n, 3, seed=0x5EED + i) for i, n in enumerate((16, 32, 64, 128))]
cycles = [cycle_graph(n) for n in (16, 32, 64, 128)]

for title, graphs in [("random 3-regular", regular), ("cycles", cycles)]:
    print(title)
    for row in expander_gap_profile(graphs):
        print(f"  n={row.size:<4} gap {row.gap:.4f} running min {row.running_min:.4f}")

dec = laplacian_decomposition(regular[0])
print(f"n=16 regular graph: {dec.n_terms} matchings, integer residual {dec.residual}")
