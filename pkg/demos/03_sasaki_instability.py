"""Circle bundles over Kaehler-Einstein bases and an unstable Sasaki-Einstein metric."""

import numpy as np

from killing_lab import sasaki, tensorfield as tf

rng = np.random.default_rng(2)

# the Hopf bundle over S^2(4) is the round 3-sphere
hopf = sasaki.hopf()
pts = hopf.total_chart.sample_points(rng, 3)
print("Hopf: max |R - R(kappa=1)|:", sasaki.constant_curvature_check(hopf, pts)[0])
for name, (res, scale) in sasaki.axioms(hopf, pts).rows.items():
    print(f"   {name:22s} {res:.1e}")

# M^5 over S^2(6) x S^2(6): Einstein with constant 4
m5 = sasaki.m5()
pts = m5.total_chart.sample_points(rng, 3)
print("M5 Einstein residual:", sasaki.einstein_check(m5, pts)[0])

# the lifted Einstein operator against the base one
h = tf.random_polynomial(rng, 4, center=m5.project(pts[0]))
row = sasaki.einstein_operator_lift_values(m5, h, pts[0])
print(f"lifted {row.lifted:+.6f} = base {row.base:+.6f} + 4|h|^2 + 4<h o J, h> = {row.rhs:+.6f}")

# the product direction g_1/2 - g_2/2 lifts to a TT tensor with negative energy
cert = sasaki.instability_certificate(1, 1, rng=rng, samples=5)
print("certificate:", cert.verdict, "base", cert.base_value, "lifted", cert.lifted_value)
print("   numeric lifted values in", [cert.numeric["lifted_min"], cert.numeric["lifted_max"]])
for p1, p2 in [(1, 2), (2, 2), (3, 5)]:
    c = sasaki.instability_certificate(p1, p2, numeric=False)
    print(f"   CP^{p1} x CP^{p2}: lifted {c.lifted_value:+.4f}, Rayleigh quotient {c.rayleigh_quotient:+.4f}")
