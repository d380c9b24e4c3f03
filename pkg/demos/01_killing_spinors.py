"""Killing spinors on the round 3-sphere and on warped hyperbolic charts."""

import numpy as np

from killing_lab import clifford, geometry, spinorfield, warped

# S^3 as SU(2) with a left-invariant frame: everything is exact algebra
s3 = geometry.su2()
rep = clifford.build_rep(3)
print("S^3 sectional curvature e_0,e_1:", geometry.curvature(s3).riemann[0, 1, 0, 1])

# solve nabla_k s = mu e_k . s for constant spinors, for a few values of mu
for mu in (0.5, -0.5, 0.6):
    basis = spinorfield.constant_killing_spinors(s3, rep, mu)
    print(f"mu = {mu:+.1f}: {basis.shape[1]} constant Killing spinors")

s = spinorfield.constant_killing_spinors(s3, rep, 0.5)[:, 0]
sigma = spinorfield.SpinorField(lambda x: s, rep, constant=True)
print("Killing residual, mu = 1/2:", spinorfield.killing_residual(s3, sigma, 0.5, [None])[0])
print("Killing residual, mu = 0.6:", spinorfield.killing_residual(s3, sigma, 0.6, [None])[0])

# hyperbolic space as a warped product e^{-4 nu t} dx^2 + dt^2, imaginary constant i nu
rng = np.random.default_rng(0)
for m in (2, 3):
    w = warped.build_warped(m, 0.5)
    ts = warped.build_type1_spinor(w)
    pts = w.chart.sample_points(rng, 10)
    res, fd = spinorfield.killing_residual(w.chart, ts.sigma, w.killing_constant(), pts)
    q = warped.q_sigma(w, ts.sigma, pts)
    print(f"fiber dim {m} ({ts.parity}): residual {res:.1e} (fd error {fd:.1e}), q_sigma {q.mean:.1e}")
    print("   |sigma|^2 - e^{-2 nu t}:", warped.length_residual(w, ts.sigma, pts))
    print("   d/dt . sigma - i sigma: ", warped.t_action_residual(w, ts.sigma, pts))

# growing instead of decaying in t is not a Killing spinor
bad = warped.build_type1_spinor(w, sign=-1.0)
print("wrong decay residual:", spinorfield.killing_residual(w.chart, bad.sigma, w.killing_constant(), pts)[0])
