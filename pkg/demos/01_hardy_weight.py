"""The Hardy weight of a locally twisted strip.

A twist bump sigma(s) lifts the transverse ground energy above E1 where it
is nonzero.  The lift lambda(s) is computed twice, once from the weighted
Sturm-Liouville problem and once from the equivalent Schrodinger form, and
the best Hardy certificate is then built from it.
"""
import numpy as np

from ruledstrip import StripGeometry, build_certificate, lambda_profile
from ruledstrip.geometry import FunctionSpec

geom = StripGeometry.from_k_sigma(0.5, sigma=FunctionSpec.gaussian_bump(1.0, 0.0, 1.0))

profile = lambda_profile(geom, -6.0, 6.0, 13, 2048)
print(f"{'s':>6} {'sigma':>9} {'lambda (SL)':>14} {'lambda (V)':>14} {'|diff|':>9}")
for r in profile:
    print(f"{r.s:6.1f} {float(geom.sigma(r.s)):9.5f} {r.lambda_sl:14.9f} "
          f"{r.lambda_schrodinger:14.9f} {r.discrepancy:9.1e}")

# lambda is even in sigma and vanishes where the twist does
lam = np.array([r.lambda_sl for r in profile])
print("\nmin lambda:", lam.min(), " lambda at |s|=6:", lam[0], lam[-1])

cert = build_certificate(geom)
print("\ncertificate:")
for key, value in cert.to_dict().items():
    print(f"  {key:>16}: {value}")
