import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from killing_lab import clifford, geometry, tensorfield as tf, warped
from killing_lab.spinorfield import (
    KillingConstant,
    SpinorField,
    bochner_residual,
    constant_killing_spinors,
    dirac_phi_rearrangement,
    divergence_term_check,
    killing_residual,
    phi_map,
    re_inner_phi,
    real_killing_identity,
    spectral_gap_report,
    spinor_curvature,
    t_action_norm,
)

seeds = st.integers(0, 2**31 - 1)


def test_killing_constant_kinds():
    assert KillingConstant.real(0.5).kind == "real"
    assert KillingConstant.imaginary(0.3).kind == "imaginary"
    assert KillingConstant.imaginary(0.3).value == 0.3j
    with pytest.raises(ValueError):
        KillingConstant(0.5 + 0.5j)


def test_s3_constant_killing_spinor_spaces():
    s3, rep = geometry.su2(), clifford.build_rep(3)
    plus = constant_killing_spinors(s3, rep, 0.5)
    assert plus.shape[1] == 2
    assert constant_killing_spinors(s3, rep, -0.5).shape[1] == 0
    assert constant_killing_spinors(s3, rep, 0.6).shape[1] == 0
    for s in plus.T:
        sigma = SpinorField(lambda x, s=s: s, rep, constant=True)
        res, err = killing_residual(s3, sigma, 0.5, [None])
        assert res <= 1e-12 and err == 0.0


def test_wrong_mu_fails(s3, s3_spinor):
    res, _ = killing_residual(s3, s3_spinor, 0.6, [None])
    assert res > 0.05


def test_constant_spinors_need_exact_backend():
    with pytest.raises(ValueError, match="exact"):
        constant_killing_spinors(geometry.round_sphere(3), clifford.build_rep(3), 0.5)


def test_representation_dimension_checked():
    with pytest.raises(ValueError):
        SpinorField(lambda x: np.zeros(2), clifford.build_rep(2), backend=geometry.su2())


def test_spinor_curvature_s3_exact(s3, s3_spinor):
    for i in range(3):
        for j in range(3):
            assert spinor_curvature(s3, s3_spinor, i, j, None).residual < 1e-13


def test_spinor_curvature_chart_generic_spinor(rng):
    chart = geometry.round_sphere(3)
    rep = clifford.build_rep(3)
    a = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    sigma = SpinorField(lambda x: a[0] + x @ a[1:], rep)
    x = chart.sample_points(rng, 1)[0]
    riem = geometry.curvature(chart, x).riemann
    for i, j in [(0, 1), (1, 2), (0, 2)]:
        sc = spinor_curvature(chart, sigma, i, j, x, riemann=riem)
        assert sc.residual < 1e-5 * (1 + np.linalg.norm(sc.rhs))


@given(seeds, st.integers(2, 6))
@settings(max_examples=40, deadline=None)
def test_phi_pairing(seed, n):
    r = np.random.default_rng(seed)
    rep = clifford.build_rep(n)
    s = r.standard_normal(rep.spinor_dim) + 1j * r.standard_normal(rep.spinor_dim)
    h, h2 = tf.random_symmetric(r, n), tf.random_symmetric(r, n)
    value, residual = re_inner_phi(h, h2, s, rep)
    assert residual <= 1e-12 * (1 + abs(value))
    assert phi_map(h, s, rep).shape == (n, rep.spinor_dim)


@given(seeds, st.integers(2, 6), st.floats(-2, 2))
@settings(max_examples=40, deadline=None)
def test_divergence_term_scalar_reading(seed, n, mu):
    r = np.random.default_rng(seed)
    rep = clifford.build_rep(n)
    s = r.standard_normal(rep.spinor_dim) + 1j * r.standard_normal(rep.spinor_dim)
    a = np.stack([tf.random_symmetric(r, n) for _ in range(n)])
    assert divergence_term_check(rep, a, s, mu, "scalar") < 1e-11 * (1 + abs(mu)) * np.abs(a).max() * np.linalg.norm(s) * n**2


def test_divergence_term_clifford_reading_fails(rng):
    rep = clifford.build_rep(3)
    s = rng.standard_normal(2) + 0j
    a = np.stack([tf.random_symmetric(rng, 3) for _ in range(3)])
    assert divergence_term_check(rep, a, s, 0.5, "clifford") > 0.1
    with pytest.raises(ValueError):
        divergence_term_check(rep, a, s, 0.5, "other")


def test_bochner_s3_exact_including_non_tt(s3, s3_spinor, rng):
    for traceless in (False, True):
        for _ in range(10):
            b = bochner_residual(s3, tf.random_constant(rng, 3, traceless), s3_spinor, 0.5, None)
            assert b.residual <= 1e-10
    b = bochner_residual(s3, tf.metric_field(3), s3_spinor, 0.5, None)
    assert np.linalg.norm(b.terms["trace"]) > 1.0 and b.residual <= 1e-10


def test_bochner_clifford_variant_fails_on_warped_chart(h4, rng):
    # constant fields on S^3 are divergence-free, so the two readings only separate on a chart
    sigma = warped.build_type1_spinor(h4).sigma
    x = h4.chart.sample_points(rng, 1)[0]
    h = tf.random_polynomial(rng, 4, center=x)
    b = bochner_residual(h4.chart, h, sigma, h4.killing_constant(), x, "clifford")
    assert b.relative > 1e-2


def test_bochner_exercises_divergence_on_warped_chart(h4, rng):
    sigma = warped.build_type1_spinor(h4).sigma
    x = h4.chart.sample_points(rng, 1)[0]
    b = bochner_residual(h4.chart, tf.random_polynomial(rng, 4, center=x), sigma, h4.killing_constant(), x)
    assert np.linalg.norm(b.terms["divergence"]) > 1e-2
    assert b.relative <= 1e-5


def test_dirac_phi_rearrangement(s3, s3_spinor, h4, rng):
    assert dirac_phi_rearrangement(s3, tf.random_constant(rng, 3), s3_spinor, 0.5, None) < 1e-12
    sigma = warped.build_type1_spinor(h4).sigma
    x = h4.chart.sample_points(rng, 1)[0]
    h = tf.random_polynomial(rng, 4, center=x)
    assert dirac_phi_rearrangement(h4.chart, h, sigma, h4.killing_constant(), x) < 1e-6


def test_t_action_preserves_norm(h4, rng):
    ts = warped.build_type1_spinor(h4)
    for x in h4.chart.sample_points(rng, 5):
        assert t_action_norm(tf.random_symmetric(rng, 4), ts.sigma(x), h4.t_index, ts.rep) < 1e-12


@given(seeds)
@settings(max_examples=20, deadline=None)
def test_real_killing_identity_on_s3(seed):
    r = np.random.default_rng(seed)
    s3, rep = geometry.su2(), clifford.build_rep(3)
    s = constant_killing_spinors(s3, rep, 0.5)[:, 0]
    sigma = SpinorField(lambda x: s, rep, constant=True)
    out = real_killing_identity(s3, tf.random_constant(r, 3, traceless=True), sigma, 0.5)
    assert out.residual <= 1e-10 * max(1.0, abs(out.lhs))
    assert out.imag_mu_dirac_phi <= 1e-10


def test_real_killing_identity_rejects_bad_input(s3, s3_spinor, rng):
    with pytest.raises(ValueError):
        real_killing_identity(s3, tf.random_constant(rng, 3), s3_spinor, 0.5j)
    with pytest.raises(ValueError):
        real_killing_identity(geometry.round_sphere(3), tf.random_constant(rng, 3), s3_spinor, 0.5)


def test_spectral_gap_nonnegative_on_s3(s3, s3_spinor, rng):
    ens = [tf.random_constant(rng, 3, traceless=True) for _ in range(20)]
    rows = spectral_gap_report(s3, s3_spinor, 0.5, ens)
    assert len(rows) == 20
    assert [r[1] for r in rows] == sorted(r[1] for r in rows)
    assert min(r[1] for r in rows) >= -1e-9


@pytest.mark.parametrize("n", [2, 3])
def test_divergence_term_symbolic(n):
    """Exact small-n derivation of the divergence step with symbolic a, s and mu."""
    sp = pytest.importorskip("sympy")
    rep = clifford.build_rep(n)
    gam = [sp.Matrix(g.tolist()).applyfunc(sp.nsimplify) for g in rep.gammas]
    mu = sp.Symbol("mu")
    s = sp.Matrix(sp.symbols(f"s0:{rep.spinor_dim}"))
    a = {}
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                a[k, i, j] = a[k, j, i] = sp.Symbol(f"a_{k}{i}{j}")
    for j in range(n):
        lhs = -2 * mu * sum((a[k, i, j] * gam[i] * gam[k] * s for k in range(n) for i in range(n)), sp.zeros(rep.spinor_dim, 1))
        div_j = -sum(a[i, i, j] for i in range(n))
        ek_phi = sum((gam[k] * a[k, i, j] * gam[i] * s for k in range(n) for i in range(n)), sp.zeros(rep.spinor_dim, 1))
        scalar = -4 * mu * div_j * s + 2 * mu * ek_phi
        cliff = -4 * mu * div_j * gam[j] * s + 2 * mu * ek_phi
        assert sp.expand(lhs - scalar) == sp.zeros(rep.spinor_dim, 1)
        assert sp.expand(lhs - cliff) != sp.zeros(rep.spinor_dim, 1)
