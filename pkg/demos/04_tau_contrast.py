"""Property (tau) versus its failure on HLS groupoids, and the inexactness witness.

The ladder Z > 2Z > 4Z > ... has Cayley gaps that decay to zero, while the
congruence quotients SL(2, Z/p) keep a uniform gap.  On a finite HLS
truncation with N levels the Kazhdan projection has norm 1 on every fibre
above the boundary level and vanishes at the boundary, which is the witness
that the limit groupoid is not inner exact.

    PYTHONPATH=src python3 demos/04_tau_contrast.py
"""

from gpdt import build_hls_truncation, kazhdan_projection
from gpdt.kazhdan import hls_gap_profile, sl2_prime_profile, witness_profile

print("HLS(Z, 2^k Z), k = 1..10")
for row in hls_gap_profile("Z", [2 ** k for k in range(1, 11)]):
    print(f"  |Z/{row.size:<5}| gap {row.gap:.3e}")

print("SL(2, Z/p)")
for row in sl2_prime_profile((3, 5, 7, 11)):
    print(f"  p={row.fiber:<3} |G|={row.size:<5} gap {row.gap:.6f}")

hls = build_hls_truncation("Z", [2, 4, 8, 16, 32])
p = kazhdan_projection(hls.groupoid)
print("witness ||p|_(F_m)|| for m = 0..N:", witness_profile(hls, p))
