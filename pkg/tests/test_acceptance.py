"""The ten acceptance criteria, each at its stated tolerance and runtime budget.

Every test appends one PASS/FAIL line to the acceptance summary printed at
the end of the pytest run, then asserts.
"""

import json
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from killing_lab import catalog, clifford, geometry, harness, sasaki, spinorfield, tensorfield as tf, warped

WARPED = [(m, nu) for m in (2, 3) for nu in (0.3, 0.5)]


def _record(number, title, checks, elapsed, budget=None):
    """checks: list of (label, value, ok)."""
    ok = all(c[2] for c in checks) and (budget is None or elapsed < budget)
    worst = ", ".join(f"{label}={value:.2e}" for label, value, _ in checks)
    timing = f"{elapsed:.1f}s" + (f" < {budget:g}s" if budget is not None else "")
    line = f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title}: {worst} ({timing})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    failed = [c[0] for c in checks if not c[2]]
    assert not failed, f"criterion {number} failed: {failed}"
    assert budget is None or elapsed < budget, f"criterion {number} exceeded its {budget} s budget ({elapsed:.1f} s)"


@pytest.fixture
def prng():
    return harness.make_rng(20240611)


def test_01_clifford(prng):
    start = time.perf_counter()
    rel = coef = 0.0
    for n in range(1, 10):
        rep = clifford.build_rep(n)
        rel = max(rel, clifford.relation_residual(rep))
        for i in range(n):
            s = prng.standard_normal(rep.spinor_dim) + 1j * prng.standard_normal(rep.spinor_dim)
            gi_s = rep.gammas[i] @ s
            sand = sum(g @ (rep.gammas[i] @ (g @ s)) for g in rep.gammas)
            fitted = (np.vdot(gi_s, sand) / np.vdot(gi_s, gi_s)).real
            coef = max(coef, abs(fitted - (n - 2)), clifford.sandwich_identity_check(rep, s, i))
    elapsed = time.perf_counter() - start
    _record(1, "Clifford relations and sandwich coefficient n-2, n=1..9",
            [("relations", rel, rel <= 1e-13), ("coefficient", coef, coef <= 1e-12)], elapsed, 1.0)


def test_02_curvature(prng):
    start = time.perf_counter()
    oracle = einstein = scal = 0.0
    fd = 0.0
    for sid in sorted(catalog.CATALOG):
        sp = catalog.build_space(sid)
        pts = [None] if sp.backend.exact else sp.backend.sample_points(prng, 2)
        for x in pts:
            cd = geometry.curvature(sp.backend, x)
            fd = max(fd, cd.fd_error)
            if sp.sectional is not None:
                oracle = max(oracle, float(np.abs(cd.riemann - geometry.constant_curvature_tensor(sp.dim, sp.sectional)).max()))
            einstein = max(einstein, float(np.abs(cd.ricci - sp.einstein * np.eye(sp.dim)).max()))
            if sp.killing is not None and sp.killing != 0:
                n = sp.dim
                expected = (4 * n * (n - 1) * complex(sp.killing) ** 2).real
                scal = max(scal, abs(cd.scalar - expected) / abs(expected))
    elapsed = time.perf_counter() - start
    _record(2, "curvature oracles on the catalog, R = 4n(n-1)mu^2",
            [("sectional", oracle, oracle <= 1e-6), ("einstein", einstein, einstein <= 1e-6),
             ("scalar_rel", scal, scal <= 1e-6), ("fd", fd, fd <= 1e-6)], elapsed, 30.0)


def test_03_killing_spinors(prng, s3, s3_spinor):
    start = time.perf_counter()
    s3_res, _ = spinorfield.killing_residual(s3, s3_spinor, 0.5, [None])
    w_res = 0.0
    controls = []
    for m, nu in WARPED:
        w = warped.build_warped(m, nu)
        pts = w.chart.sample_points(prng, 10)
        res, err = spinorfield.killing_residual(w.chart, warped.build_type1_spinor(w).sigma, w.killing_constant(), pts)
        w_res = max(w_res, res, err)
        controls.append(spinorfield.killing_residual(w.chart, warped.build_type1_spinor(w, sign=-1.0).sigma, w.killing_constant(), pts)[0])
        controls.append(spinorfield.killing_residual(w.chart, warped.build_type1_spinor(w).sigma, -1j * nu, pts)[0])
    controls.append(spinorfield.killing_residual(s3, s3_spinor, 0.6, [None])[0])
    controls.append(spinorfield.killing_residual(s3, s3_spinor, -0.5, [None])[0])
    weakest = min(controls)
    elapsed = time.perf_counter() - start
    _record(3, "Killing spinors on S3 and warped type-I, negative controls",
            [("S3", s3_res, s3_res <= 1e-12), ("warped", w_res, w_res <= 1e-7),
             ("weakest_control", weakest, weakest > 1e-3)], elapsed)


def test_04_type1_structure(prng):
    from killing_lab.numdiff import fd_error_tracking

    start = time.perf_counter()
    q = f = t = orth = 0.0
    for m, nu in WARPED:
        w = warped.build_warped(m, nu)
        sigma = warped.build_type1_spinor(w).sigma
        pts = w.chart.sample_points(prng, 20)
        with fd_error_tracking() as est:
            qs = warped.q_sigma(w, sigma, pts)
        q = max(q, abs(qs.mean), qs.spread, est.value)
        f = max(f, warped.length_residual(w, sigma, pts))
        t = max(t, warped.t_action_residual(w, sigma, pts))
        orth = max(orth, warped.orthogonality_check(sigma, pts))
    elapsed = time.perf_counter() - start
    _record(4, "type-I structure at 20 samples",
            [("q_sigma", q, q <= 1e-8), ("length", f, f <= 1e-9), ("t_action", t, t <= 1e-8),
             ("orthogonality", orth, orth <= 1e-8)], elapsed)


def test_05_bochner(prng, s3, s3_spinor, h4):
    start = time.perf_counter()
    div_scalar = div_cliff = 0.0
    for n in range(2, 6):
        rep = clifford.build_rep(n)
        for _ in range(5):
            s = prng.standard_normal(rep.spinor_dim) + 1j * prng.standard_normal(rep.spinor_dim)
            a = np.stack([tf.random_symmetric(prng, n) for _ in range(n)])
            div_scalar = max(div_scalar, spinorfield.divergence_term_check(rep, a, s, 0.7, "scalar"))
            div_cliff = max(div_cliff, spinorfield.divergence_term_check(rep, a, s, 0.7, "clifford"))
    s3_res = 0.0
    for i in range(20):
        h = tf.random_constant(prng, 3, traceless=(i % 2 == 1))
        s3_res = max(s3_res, spinorfield.bochner_residual(s3, h, s3_spinor, 0.5, None).residual)
    sigma = warped.build_type1_spinor(h4).sigma
    h4_rel = div_norm = 0.0
    for x in h4.chart.sample_points(prng, 10):
        b = spinorfield.bochner_residual(h4.chart, tf.random_polynomial(prng, 4, center=x), sigma, h4.killing_constant(), x)
        h4_rel = max(h4_rel, b.relative)
        div_norm = max(div_norm, float(np.linalg.norm(b.terms["divergence"])))
    elapsed = time.perf_counter() - start
    _record(5, "Bochner formula (scalar divergence term)",
            [("div_algebra", div_scalar, div_scalar <= 1e-11), ("div_clifford_rejected", div_cliff, div_cliff > 1e-2),
             ("S3", s3_res, s3_res <= 1e-10), ("H4_rel", h4_rel, h4_rel <= 1e-5),
             ("H4_div_term", div_norm, div_norm > 1e-3)], elapsed)


def test_06_pairing_and_t_action(prng, s3_spinor):
    start = time.perf_counter()
    pair = tact = 0.0
    for m, nu in WARPED:
        w = warped.build_warped(m, nu)
        ts = warped.build_type1_spinor(w)
        for x in w.chart.sample_points(prng, 20):
            s = ts.sigma(x)
            for _ in range(20):
                h, h2 = tf.random_symmetric(prng, w.dim), tf.random_symmetric(prng, w.dim)
                pair = max(pair, spinorfield.re_inner_phi(h, h2, s, ts.rep)[1])
                tact = max(tact, spinorfield.t_action_norm(h, s, w.t_index, ts.rep))
    real = 0.0
    s = s3_spinor(None)
    for _ in range(20):
        h, h2 = tf.random_symmetric(prng, 3), tf.random_symmetric(prng, 3)
        real = max(real, spinorfield.re_inner_phi(h, h2, s, s3_spinor.rep)[1])
    elapsed = time.perf_counter() - start
    _record(6, "Phi pairing and t-action norm (warped), real pairing (S3)",
            [("pairing", pair, pair <= 1e-8), ("t_action", tact, tact <= 1e-8), ("S3_pairing", real, real <= 1e-12)], elapsed)


def test_07_real_killing_identity(prng, s3, s3_spinor):
    start = time.perf_counter()
    res = imag = 0.0
    for _ in range(20):
        h = tf.random_constant(prng, 3, traceless=True)
        assert tf.tt_report(s3, h, [None]).transverse
        r = spinorfield.real_killing_identity(s3, h, s3_spinor, 0.5)
        # constant integrands: both integrals are value x vol(S^3)
        lhs = harness.homogeneous_integral(s3, r.lhs) / s3.volume
        rhs = harness.homogeneous_integral(s3, r.rhs) / s3.volume
        res = max(res, abs(lhs - rhs))
        imag = max(imag, r.imag_mu_dirac_phi)
    ens = [tf.random_constant(prng, 3, traceless=True) for _ in range(20)]
    low = min(row[1] for row in spinorfield.spectral_gap_report(s3, s3_spinor, 0.5, ens))
    elapsed = time.perf_counter() - start
    _record(7, "integral identity on S3 by homogeneous reduction, spectral gap",
            [("identity", res, res <= 1e-10), ("imaginary", imag, imag <= 1e-10), ("min_gap", low, low >= -1e-9)], elapsed)


def test_08_sasaki(prng, hopf_bundle, m5_bundle):
    start = time.perf_counter()
    ax = lift = lift_rel = 0.0
    fd = 0.0
    for b in (hopf_bundle, m5_bundle):
        pts = b.total_chart.sample_points(prng, 3)
        t = sasaki.axioms(b, pts)
        ax = max(ax, t.worst(relative=True))
        t = sasaki.horizontal_lift_check(b, pts, prng)
        lift = max(lift, t.worst(relative=True))
        fd = max(fd, t.fd_error)
        for x in pts:
            h = tf.random_polynomial(prng, b.base.dim, center=b.project(x))
            for check in (sasaki.rough_laplacian_lift_check, sasaki.curvature_lift_check, sasaki.einstein_operator_lift_check):
                t = check(b, h, [x])
                lift_rel = max(lift_rel, t.worst(relative=True))
                fd = max(fd, t.fd_error)
    hopf_k, hopf_fd = sasaki.constant_curvature_check(hopf_bundle, hopf_bundle.total_chart.sample_points(prng, 3), 1.0)
    elapsed = time.perf_counter() - start
    _record(8, "Sasaki axioms and lift formulas on Hopf and M5",
            [("axioms", ax, ax <= 1e-8), ("horizontal_lift", lift, lift <= 1e-6), ("lift_formulas_rel", lift_rel, lift_rel <= 1e-5),
             ("hopf_round", hopf_k, hopf_k <= 1e-6), ("fd", max(fd, hopf_fd), max(fd, hopf_fd) <= 1e-5)], elapsed, 300.0)


def test_09_instability_certificate(prng, m5_bundle):
    start = time.perf_counter()
    cert = sasaki.instability_certificate(1, 1, points=m5_bundle.total_chart.sample_points(prng, 20))
    h = sasaki.product_direction(m5_bundle)
    pts = m5_bundle.total_chart.sample_points(prng, 5)
    tt = sasaki.lift_tt_report(m5_bundle, h, pts)
    xi_div = max(abs(sasaki.xi_divergence(m5_bundle, h, x)) for x in pts)
    elapsed = time.perf_counter() - start
    rel = cert.numeric["lifted_max_rel_dev"]
    _record(9, "instability certificate for p1 = p2 = 1",
            [("base+12", abs(cert.base_value + 12), cert.base_value == -12.0),
             ("lifted+4", abs(cert.lifted_value + 4), cert.lifted_value == -4.0),
             ("numeric_rel", rel, rel <= 1e-4 and cert.numeric["samples"] == 20),
             ("trace", tt.max_trace, tt.max_trace <= 1e-10),
             ("divergence", max(tt.max_divergence, xi_div), max(tt.max_divergence, xi_div) <= 1e-6),
             ("unstable", 0.0, cert.verdict == "UNSTABLE")], elapsed)


def test_10_harness(default_report):
    start = time.perf_counter()
    first = harness.emit_report(default_report)
    second = harness.emit_report(harness.run_suite("default"))
    neg = harness.run_suite("negative-control")
    harness.validate_report(json.loads(first))
    elapsed = time.perf_counter() - start
    identical = first.encode() == second.encode()
    _record(10, "deterministic reports, negative control",
            [("byte_identical", 0.0 if identical else 1.0, identical),
             ("default_non_pass", default_report.summary["total"] - default_report.summary["pass"], default_report.exit_code == 0),
             ("negative_failures", len(neg.failed()), neg.failed() == ["killing-S3-wrong-mu"])], elapsed)
