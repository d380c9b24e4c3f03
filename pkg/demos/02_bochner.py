"""The Bochner formula for D D Phi(h) and the spectral gap on S^3."""

import numpy as np

from killing_lab import clifford, geometry, spinorfield, tensorfield as tf, warped

rng = np.random.default_rng(1)

# the divergence term is a scalar multiple of s; the Clifford-multiplied reading fails
rep = clifford.build_rep(4)
s = rng.standard_normal(rep.spinor_dim) + 0j
a = np.stack([tf.random_symmetric(rng, 4) for _ in range(4)])
print("divergence step, scalar reading:   ", spinorfield.divergence_term_check(rep, a, s, 0.5, "scalar"))
print("divergence step, Clifford reading: ", spinorfield.divergence_term_check(rep, a, s, 0.5, "clifford"))

# exact check on S^3 with constant (not necessarily TT) tensors
s3 = geometry.su2()
rep3 = clifford.build_rep(3)
s0 = spinorfield.constant_killing_spinors(s3, rep3, 0.5)[:, 0]
sigma = spinorfield.SpinorField(lambda x: s0, rep3, constant=True)
worst = max(spinorfield.bochner_residual(s3, tf.random_constant(rng, 3), sigma, 0.5, None).residual for _ in range(20))
print("Bochner residual on S^3, 20 tensors:", worst)

# finite differences on hyperbolic 4-space with polynomial tensors
h4 = warped.build_warped(3, 0.5)
ts = warped.build_type1_spinor(h4)
for x in h4.chart.sample_points(rng, 3):
    h = tf.random_polynomial(rng, 4, center=x)
    b = spinorfield.bochner_residual(h4.chart, h, ts.sigma, h4.killing_constant(), x)
    print(f"H^4 at {np.round(x, 2)}: relative residual {b.relative:.1e}")

# real Killing case: the integral identity reduces to a pointwise one
ens = [tf.random_constant(rng, 3, traceless=True) for _ in range(10)]
for h in ens[:3]:
    r = spinorfield.real_killing_identity(s3, h, sigma, 0.5)
    print(f"<Eh, h> = {r.lhs:+.6f}, right side {r.rhs:+.6f}")
rows = spinorfield.spectral_gap_report(s3, sigma, 0.5, ens)
print("smallest spectral gap over 10 TT tensors:", rows[0][1])
