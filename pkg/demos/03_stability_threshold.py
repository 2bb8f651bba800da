"""How much bending a twisted strip tolerates.

For sigma = 1 the global Hardy inequality holds with the certified
constant c.  A bend |k(s)| <= eps0 / (1 + s^2) perturbs the form by at
most the ratio bounds f_-(s) <= h/h0 <= f_+(s); the largest eps0 keeping
the resulting weight w positive everywhere is the stability threshold.

Two lower ratio bounds are available.  The sharper one divides the
deficit by 1 + a^2 sup sigma^2 and is valid when sigma is constant with
a |sigma| <= 1 (see sharp_bound_applies); the uniform one, 1 - a eps,
holds for every twist profile.  The last block
shows a bump twist where the sharper bound fails.
"""
import numpy as np

from ruledstrip import (
    CurvatureEnvelope,
    StripGeometry,
    build_certificate,
    eval_h,
    eval_h0,
    f_bounds,
    stability_threshold,
    stability_weight,
)
from ruledstrip.geometry import FunctionSpec

geom = StripGeometry.from_k_sigma(0.5, sigma=FunctionSpec.constant(1.0))
cert = build_certificate(geom)
print(f"c = {cert.c_bound:.6f} on I = {cert.interval}")

for bound in ("sharp", "uniform"):
    rep = stability_threshold(geom, cert, bound=bound)
    print(f"threshold eps0_max ({bound:>7} ratio bound): {rep.eps0_max:.6e}")

rep = stability_threshold(geom, cert)
env = CurvatureEnvelope(0.5 * rep.eps0_max)
s = np.array([0.0, 1.0, 3.0, 10.0, 100.0, 1e4])
print("\nweight at half the threshold:")
for si, wi in zip(s, stability_weight(geom, env, cert, s)):
    print(f"  s = {si:8.0f}   w = {wi: .3e}   (1+s^2) w = {wi * (1 + si**2): .4f}")

# the sharper lower bound needs sigma bounded away from zero
bump = StripGeometry.from_k_sigma(0.5, k=FunctionSpec.rational_decay(0.4),
                                  sigma=FunctionSpec.gaussian_bump(1.5, 0.0, 0.5))
env = CurvatureEnvelope(0.4)
S, T = np.meshgrid(np.linspace(-5, 5, 201), np.linspace(-0.499, 0.499, 41), indexing="ij")
ratio = eval_h(bump, S, T) / eval_h0(bump, S, T)
for bound in ("sharp", "uniform"):
    fm, _ = f_bounds(bump, env, S, bound)
    print(f"\n{bound:>7} bound: min(h/h0 - f_-) = {np.min(ratio - fm): .4f}")
