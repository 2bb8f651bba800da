"""Bending binds, twisting repels.

Three strips of half-width 1/2 with Dirichlet ends at |s| = L:

* flat and straight: the ground energy approaches E1 from above as L grows;
* bent in the surface (k != 0, sigma = 0): it drops below E1, a bound state;
* twisted (sigma != 0) with a small bend: it stays above E1.

Doubling L at a fixed step shows which way each value is heading.
"""
from ruledstrip import StripGeometry, first_mode_energy
from ruledstrip.geometry import FunctionSpec
from ruledstrip.spectrum import l_doubling

a = 0.5
E1 = first_mode_energy(a)
cases = {
    "flat": StripGeometry.from_k_sigma(a),
    "bent": StripGeometry.from_k_sigma(a, k=FunctionSpec.gaussian_bump(1.0, 0.0, 1.0)),
    "bent + twisted": StripGeometry.from_k_sigma(
        a, k=FunctionSpec.gaussian_bump(1.0, 0.0, 1.0), sigma=FunctionSpec.constant(1.0)),
}

print(f"E1 = {E1:.6f}\n")
print(f"{'strip':>15} {'L':>5} {'mu1 - E1':>12}  classification")
for name, geom in cases.items():
    for res in l_doubling(geom, L=6.0, n_s=299, n_t=40, levels=2):
        print(f"{name:>15} {res.L:5.0f} {res.gap:+12.5f}  {res.classify()}")
