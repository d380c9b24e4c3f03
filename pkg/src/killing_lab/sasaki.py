"""Regular Sasaki structures on circle bundles over Kaehler bases, in one local trivialization.

A Kaehler base is given on a chart by its metric G, the complex structure J
(multiplication by i in complex coordinates z = x + i y) and a potential A
with dA = 2 Omega, Omega = G(., J .).  The total space has coordinates
(x, theta), contact form eta = d theta + A and metric pi^* G + eta (x) eta.
Its frame is the horizontal lift of the base frame followed by xi = d/d theta.

Two-form conventions: ``d`` of a 1-form is the full antisymmetrized
derivative (dA)_ab = d_a A_b - d_b A_a.  The axiom g(X, phi Y) = d eta(X, Y)
holds with the half convention d eta(X, Y) = 1/2 (d_a eta_b - d_b eta_a) X^a Y^b;
:func:`axioms` evaluates it that way.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag

from .geometry import ChartPatch, constant_curvature_tensor, curvature, verify_einstein
from .numdiff import fd_error_tracking
from .tensorfield import (
    SymTensorField,
    TTReport,
    covariant_gradient,
    curvature_action,
    divergence,
    einstein_operator,
    product_unstable_direction,
    rough_laplacian,
    second_covariant,
    tt_report,
)

BASE_NAMES = ("S2", "S2xS2", "CP2")
MAX_NUMERIC_P = 3


# --- Kaehler bases ----------------------------------------------------------


@dataclass
class KaehlerBase:
    name: str
    k: float
    chart: ChartPatch = field(repr=False)
    complex_structure: np.ndarray = field(repr=False)  # J d_b = sum_a J[a, b] d_a
    potential: object = field(repr=False)
    factors: tuple = ()

    @property
    def dim(self) -> int:
        return self.chart.dim

    @property
    def p(self) -> int:
        return self.dim // 2

    def J(self, x=None) -> np.ndarray:
        return self.complex_structure

    def omega_coord(self, x) -> np.ndarray:
        """Omega_ab = G(d_a, J d_b)."""
        return self.chart.metric(np.asarray(x, dtype=float)) @ self.complex_structure

    def J_frame(self, x) -> np.ndarray:
        """Frame components: J_frame[a, i] is the e_a-component of J e_i (also Omega(e_a, e_i))."""
        e = self.chart.frame(x)
        return np.linalg.solve(e, self.complex_structure @ e)


def _fubini_study(n: int, k: float, lower=-1.0, upper=1.0):
    """Scaled Fubini-Study data on C^n, real coordinates (x_1..x_n, y_1..y_n), Ric = k G."""
    s = 2.0 * (n + 1) / k
    t = np.hstack([np.eye(n), 1j * np.eye(n)])

    def metric(x):
        z = x[:n] + 1j * x[n:]
        r = 1.0 + float(np.vdot(z, z).real)
        herm = np.eye(n) / r - np.outer(z.conj(), z) / r**2
        return s * np.real(t.T @ herm @ t.conj())

    def potential(x):
        xs, ys = x[:n], x[n:]
        r = 1.0 + float(xs @ xs + ys @ ys)
        return s * np.concatenate([ys, -xs]) / r

    jc = np.block([[np.zeros((n, n)), -np.eye(n)], [np.eye(n), np.zeros((n, n))]])
    chart = ChartPatch(dim=2 * n, lower=lower * np.ones(2 * n), upper=upper * np.ones(2 * n), metric=metric)
    return chart, jc, potential


def complex_projective(n: int, k: float) -> KaehlerBase:
    """CP^n with the Fubini-Study metric scaled to Ric = k G; n = 1 is the round S^2 of curvature k."""
    if n < 1:
        raise ValueError("complex dimension must be positive")
    if not k > 0:
        raise ValueError(f"Einstein constant must be positive, got {k!r}")
    chart, jc, pot = _fubini_study(n, k)
    name = f"S2({k:g})" if n == 1 else f"CP{n}({k:g})"
    chart.label = name
    return KaehlerBase(name, float(k), chart, jc, pot, (2 * n,))


def product_base(b1: KaehlerBase, b2: KaehlerBase) -> KaehlerBase:
    """Riemannian product; Kaehler-Einstein when both factors share the Einstein constant."""
    if abs(b1.k - b2.k) > 1e-12:
        raise ValueError(f"factors have different Einstein constants {b1.k} and {b2.k}")
    d1 = b1.dim
    c1, c2 = b1.chart, b2.chart

    def metric(x):
        return block_diag(c1.metric(x[:d1]), c2.metric(x[d1:]))

    def potential(x):
        return np.concatenate([b1.potential(x[:d1]), b2.potential(x[d1:])])

    name = f"{b1.name.split('(')[0]}x{b2.name.split('(')[0]}({b1.k:g})"
    chart = ChartPatch(
        dim=d1 + b2.dim,
        lower=np.concatenate([c1.lower, c2.lower]),
        upper=np.concatenate([c1.upper, c2.upper]),
        metric=metric,
        label=name,
    )
    jc = block_diag(b1.complex_structure, b2.complex_structure)
    return KaehlerBase(name, b1.k, chart, jc, potential, b1.factors + b2.factors)


def build_base(name: str, k: float | None = None) -> KaehlerBase:
    """Catalog base by name: "S2", "S2xS2" or "CP2", with Einstein constant k (or "S2(6)" style)."""
    m = re.fullmatch(r"\s*([A-Za-z0-9]+)\s*(?:\(\s*([-+0-9.eE]+)\s*\))?\s*", str(name))
    if m is None or m.group(1) not in BASE_NAMES:
        raise ValueError(f"unknown Kaehler base {name!r}; known: {', '.join(BASE_NAMES)}")
    key = m.group(1)
    if m.group(2) is not None:
        parsed = float(m.group(2))
        if k is not None and abs(parsed - float(k)) > 0:
            raise ValueError(f"conflicting Einstein constants {parsed} and {k}")
        k = parsed
    if k is None:
        raise ValueError("an Einstein constant k is required")
    if key == "S2":
        return complex_projective(1, k)
    if key == "CP2":
        return complex_projective(2, k)
    return product_base(complex_projective(1, k), complex_projective(1, k))


@dataclass
class BaseInvariants:
    j_squared: float
    j_orthogonal: float
    d_omega: float
    dA_minus_2omega: float
    einstein: float
    fd_error: float

    def passed(self, alg_tol=1e-10, fd_tol=1e-6) -> bool:
        return (
            self.j_squared <= alg_tol
            and self.j_orthogonal <= alg_tol
            and self.d_omega <= fd_tol
            and self.dA_minus_2omega <= fd_tol
            and self.einstein <= fd_tol
        )


def _exterior_1form(chart, form, x):
    """Full convention (d form)_ab = d_a form_b - d_b form_a."""
    d = np.stack([chart.coordinate_derivative(form, x, a) for a in range(chart.dim)])
    return d - d.T


def base_invariants(base: KaehlerBase, points) -> BaseInvariants:
    jc = base.complex_structure
    n = base.dim
    jsq = float(np.abs(jc @ jc + np.eye(n)).max())
    jorth = dom = dadiff = 0.0
    with fd_error_tracking() as est:
        for x in points:
            g = base.chart.metric(x)
            jorth = max(jorth, float(np.abs(jc.T @ g @ jc - g).max()))
            dO = np.stack([base.chart.coordinate_derivative(base.omega_coord, x, a) for a in range(n)])
            cyc = dO + np.transpose(dO, (1, 2, 0)) + np.transpose(dO, (2, 0, 1))
            dom = max(dom, float(np.abs(cyc).max()))
            dA = _exterior_1form(base.chart, base.potential, x)
            dadiff = max(dadiff, float(np.abs(dA - 2 * base.omega_coord(x)).max()))
        ein, _ = verify_einstein(base.chart, points, base.k)
    return BaseInvariants(jsq, jorth, dom, dadiff, ein, est.value)


# --- the circle bundle --------------------------------------------------------


@dataclass
class SasakiBundle:
    base: KaehlerBase
    total_chart: ChartPatch = field(repr=False)

    @property
    def dim(self) -> int:
        return self.total_chart.dim

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def xi_index(self) -> int:
        return self.dim - 1

    @property
    def einstein_constant(self) -> float:
        return self.base.k - 2.0

    def project(self, x) -> np.ndarray:
        return np.asarray(x, dtype=float)[: self.base.dim]

    def eta(self, x) -> np.ndarray:
        return np.append(self.base.potential(self.project(x)), 1.0)

    def xi(self, x=None) -> np.ndarray:
        v = np.zeros(self.dim)
        v[-1] = 1.0
        return v

    def lift_vector(self, x, v) -> np.ndarray:
        """Horizontal lift of the base coordinate vector v at pi(x)."""
        v = np.asarray(v, dtype=float)
        return np.append(v, -self.base.potential(self.project(x)) @ v)

    def phi(self, x) -> np.ndarray:
        """Coordinate matrix of phi X = lift(J pi_* X)."""
        d = self.base.dim
        jc = self.base.complex_structure
        a = self.base.potential(self.project(x))
        out = np.zeros((self.dim, self.dim))
        out[:d, :d] = jc
        out[d, :d] = -a @ jc
        return out

    def metric(self, x) -> np.ndarray:
        return self.total_chart.metric(x)

    def phi_frame(self, x) -> np.ndarray:
        e = self.total_chart.frame(x)
        return np.linalg.solve(e, self.phi(x) @ e)


def build_total(base: KaehlerBase, theta_half_width: float = 1.0) -> SasakiBundle:
    if base.potential is None:
        raise ValueError("the base has no potential for its Kaehler form on this chart")
    d = base.dim
    bc = base.chart

    def metric(x):
        y = x[:d]
        a = base.potential(y)
        g = np.empty((d + 1, d + 1))
        g[:d, :d] = bc.metric(y) + np.outer(a, a)
        g[:d, d] = g[d, :d] = a
        g[d, d] = 1.0
        return g

    def frame(x):
        y = x[:d]
        eb = bc.frame(y)
        e = np.zeros((d + 1, d + 1))
        e[:d, :d] = eb
        e[d, :d] = -base.potential(y) @ eb
        e[d, d] = 1.0
        return e

    chart = ChartPatch(
        dim=d + 1,
        lower=np.append(bc.lower, -theta_half_width),
        upper=np.append(bc.upper, theta_half_width),
        metric=metric,
        label=f"circle bundle over {base.name}",
        frame_fn=frame,
    )
    return SasakiBundle(base, chart)


def hopf() -> SasakiBundle:
    return build_total(build_base("S2", 4))


def m5() -> SasakiBundle:
    return build_total(build_base("S2xS2", 6))


# --- structure checks ---------------------------------------------------------


@dataclass
class CheckTable:
    """Named residuals with the size of the compared quantities and the FD error."""

    rows: dict = field(default_factory=dict)
    fd_error: float = 0.0

    def add(self, name, residual, scale=1.0):
        old = self.rows.get(name, (0.0, 0.0))
        self.rows[name] = (max(old[0], float(residual)), max(old[1], float(scale)))

    def residual(self, name) -> float:
        return self.rows[name][0]

    def relative(self, name) -> float:
        res, scale = self.rows[name]
        return res / max(scale, 1.0)

    def worst(self, relative=False) -> float:
        vals = [self.relative(n) if relative else self.residual(n) for n in self.rows]
        return max(vals, default=0.0)

    def as_dict(self) -> dict:
        return {n: {"residual": r, "scale": s} for n, (r, s) in sorted(self.rows.items())}


def axioms(bundle: SasakiBundle, points) -> CheckTable:
    """Sasaki axioms (1)-(5), the consequences phi xi = 0, eta o phi = 0, nabla_X xi = -phi X,
    and the curvature form d eta = 2 pi^* Omega.

    Axiom (1) is reported as | |Pf| - 2^p | where Pf is the Pfaffian of d eta
    on the horizontal frame; d eta = 2 Omega there and Omega has Pfaffian +-1
    in an orthonormal frame, so a small residual certifies nondegeneracy.
    """
    tab = CheckTable()
    chart = bundle.total_chart
    d = bundle.base.dim
    xi_i = bundle.xi_index
    with fd_error_tracking() as est:
        for x in points:
            g = bundle.metric(x)
            eta = bundle.eta(x)
            xi = bundle.xi(x)
            phi = bundle.phi(x)
            e = chart.frame(x)
            deta = _exterior_1form(chart, bundle.eta, x)  # full convention
            deta_h = e.T @ deta @ e
            pf = np.sqrt(abs(np.linalg.det(deta_h[:d, :d])))
            tab.add("axiom1_volume", abs(pf - 2.0**bundle.p), 2.0**bundle.p)
            tab.add("axiom2_eta_xi", abs(eta @ xi - 1.0))
            tab.add("axiom3_phi_squared", np.abs(phi @ phi + np.eye(bundle.dim) - np.outer(xi, eta)).max())
            tab.add("axiom4_phi_metric", np.abs(phi.T @ g @ phi - g + np.outer(eta, eta)).max(), np.abs(g).max())
            tab.add("axiom5_contact", np.abs(g @ phi - 0.5 * deta).max(), np.abs(g @ phi).max())
            tab.add("phi_xi", np.abs(phi @ xi).max())
            tab.add("eta_phi", np.abs(eta @ phi).max())
            omega = np.zeros((bundle.dim, bundle.dim))
            omega[:d, :d] = bundle.base.omega_coord(bundle.project(x))
            tab.add("d_eta_2_omega", np.abs(deta - 2 * omega).max(), np.abs(deta).max())
            conn = chart.connection(x)
            phif = bundle.phi_frame(x)
            # g(nabla_{e_k} xi, e_j) = -g(phi e_k, e_j)
            tab.add("nabla_xi_minus_phi", np.abs(conn[:, xi_i, :] + phif.T).max())
            tab.add("xi_killing", np.abs(conn[:, xi_i, :] + conn[:, xi_i, :].T).max())
    tab.fd_error = est.value
    return tab


def reeb_curvature_check(bundle: SasakiBundle, points) -> CheckTable:
    """R(X, xi) Y = -g(xi, Y) X + g(X, Y) xi in frame components."""
    tab = CheckTable()
    n = bundle.dim
    s = bundle.xi_index
    delta = np.eye(n)
    expected = -np.einsum("k,il->ikl", delta[s], delta) + np.einsum("ik,l->ikl", delta, delta[s])
    with fd_error_tracking() as est:
        for x in points:
            riem = curvature(bundle.total_chart, x).riemann
            tab.add("curvature_xi", np.abs(riem[:, s, :, :] - expected).max(), 1.0)
    tab.fd_error = est.value
    return tab


def einstein_check(bundle: SasakiBundle, points):
    return verify_einstein(bundle.total_chart, points, bundle.einstein_constant)


def constant_curvature_check(bundle: SasakiBundle, points, kappa: float = 1.0):
    ref = constant_curvature_tensor(bundle.dim, kappa)
    worst = 0.0
    with fd_error_tracking() as est:
        for x in points:
            worst = max(worst, float(np.abs(curvature(bundle.total_chart, x).riemann - ref).max()))
    return worst, est.value


# --- vector fields and lifts -------------------------------------------------------


def random_base_vector_field(rng, dim: int, degree: int = 1):
    """Base-frame components that are random polynomials of degree <= 2 in the base coordinates."""
    c0 = rng.standard_normal(dim)
    c1 = rng.standard_normal((dim, dim)) if degree >= 1 else np.zeros((dim, dim))
    c2 = rng.standard_normal((dim, dim, dim)) * 0.5 if degree >= 2 else np.zeros((dim, dim, dim))

    def comps(y):
        y = np.asarray(y, dtype=float)[:dim]
        return c0 + c1 @ y + np.einsum("iab,a,b->i", c2, y, y)

    return comps


def _frame_derivative_of_vector(backend, comps, x, k):
    """nabla_{e_k} V in frame components, V given by frame components."""
    conn = backend.connection(x)
    return backend.derivative(comps, x, k) + comps(x) @ conn[k]


def horizontal_lift_check(bundle: SasakiBundle, points, rng, n_fields: int = 2) -> CheckTable:
    """Horizontal-lift calculus: [xi, X~] = 0, nabla_X~ Y~ = lift(nabla_X Y) - Omega(X, Y) xi,
    nabla_xi X~ = nabla_X~ xi = -phi X~ and nabla_xi xi = 0, for random base fields."""
    tab = CheckTable()
    base = bundle.base
    d = base.dim
    s = bundle.xi_index
    tc, bc = bundle.total_chart, base.chart
    fields = [random_base_vector_field(rng, d, 2) for _ in range(2 * n_fields)]
    with fd_error_tracking() as est:
        for x in points:
            y = bundle.project(x)
            conn = tc.connection(x)
            struct = tc.structure(x)
            jf = base.J_frame(y)
            tab.add("nabla_xi_xi", np.abs(conn[s, s, :]).max())
            for a_f, b_f in zip(fields[::2], fields[1::2]):

                def lift_a(z, f=a_f):
                    return np.append(f(z[:d]), 0.0)

                def lift_b(z, f=b_f):
                    return np.append(f(z[:d]), 0.0)

                a, b = a_f(y), b_f(y)
                # [xi, X~] via the frame: xi(a) X~ + a_i [xi, X~_i]
                bracket = tc.derivative(lift_a, x, s) + lift_a(x) @ struct[s]
                tab.add("bracket_xi_lift", np.abs(bracket).max())
                lhs = sum(a[k] * _frame_derivative_of_vector(tc, lift_b, x, k) for k in range(d))
                base_cov = sum(a[k] * _frame_derivative_of_vector(bc, b_f, y, k) for k in range(d))
                rhs = np.append(base_cov, -(a @ jf @ b))
                tab.add("horizontal_connection", np.abs(lhs - rhs).max(), np.abs(rhs).max())
                phi_a = np.append(jf @ a, 0.0)
                along_xi = _frame_derivative_of_vector(tc, lift_a, x, s)
                xi_along = a @ conn[:d, s, :]
                tab.add("nabla_xi_lift", np.abs(along_xi + phi_a).max(), np.abs(phi_a).max())
                tab.add("nabla_lift_xi", np.abs(xi_along + phi_a).max(), np.abs(phi_a).max())
    tab.fd_error = est.value
    return tab


@dataclass
class LiftedTensor:
    base_field: SymTensorField = field(repr=False)
    total_field: SymTensorField = field(repr=False)


def lift_tensor(bundle: SasakiBundle, h) -> LiftedTensor:
    """h~ = pi^* h: base-frame components padded with zeros in the xi slots."""
    d = bundle.base.dim

    def comps(x):
        out = np.zeros((d + 1, d + 1))
        out[:d, :d] = h(np.asarray(x)[:d])
        return out

    return LiftedTensor(h, SymTensorField(comps, constant=False, label=f"lift({getattr(h, 'label', 'h')})"))


def h_circ_j(hval, jf) -> np.ndarray:
    """(h o J)_ij = h(J e_i, J e_j)."""
    return jf.T @ hval @ jf


def trace_hj(hval, jf) -> float:
    """tr_G h(J ., .) = sum_k h(J e_k, e_k)."""
    return float(np.trace(jf.T @ hval))


def _horizontal_rough_parts(backend, fld, x, ks):
    """sum over k in ks of nabla_k nabla_k F and of nabla_{nabla_k e_k} F."""
    conn = backend.connection(x)
    grad = covariant_gradient(backend, fld, x)
    second = sum(second_covariant(backend, fld, x, k) for k in ks)
    along = sum(np.tensordot(conn[k, k], grad, axes=1) for k in ks)
    return second, along


def rough_laplacian_lift_check(bundle: SasakiBundle, h, points) -> CheckTable:
    tab = CheckTable()
    base = bundle.base
    d = base.dim
    s = bundle.xi_index
    tc, bc = bundle.total_chart, base.chart
    lifted = lift_tensor(bundle, h).total_field
    hk = list(range(d))
    with fd_error_tracking() as est:
        for x in points:
            y = bundle.project(x)
            hv = h(y)
            jf = base.J_frame(y)
            hjj = h_circ_j(hv, jf)
            sec_t, along_t = _horizontal_rough_parts(tc, lifted, x, hk)
            sec_b, along_b = _horizontal_rough_parts(bc, h, y, hk)
            r1 = sec_b - 2 * hv
            tab.add("horizontal_second", np.abs(sec_t[:d, :d] - r1).max(), np.abs(r1).max())
            tab.add("horizontal_connection_term", np.abs(along_t[:d, :d] - along_b).max(), np.abs(along_b).max())
            xx = second_covariant(tc, lifted, x, s)
            r3 = -2 * hv + 2 * hjj
            tab.add("vertical_second", np.abs(xx[:d, :d] - r3).max(), np.abs(r3).max())
            lap_t = rough_laplacian(tc, lifted, x)
            r4 = rough_laplacian(bc, h, y) + 4 * hv - 2 * hjj
            tab.add("rough_laplacian", np.abs(lap_t[:d, :d] - r4).max(), np.abs(r4).max())
    tab.fd_error = est.value
    return tab


def horizontal_curvature_expected(riem_base, omega) -> np.ndarray:
    """R^G - 2 O_XY O_ZW - O_XZ O_YW + O_XW O_YZ, all arguments horizontal."""
    return (
        riem_base
        - 2 * np.einsum("ij,kl->ijkl", omega, omega)
        - np.einsum("ik,jl->ijkl", omega, omega)
        + np.einsum("il,jk->ijkl", omega, omega)
    )


def curvature_lift_check(bundle: SasakiBundle, h, points) -> CheckTable:
    tab = CheckTable()
    base = bundle.base
    d = base.dim
    s = bundle.xi_index
    with fd_error_tracking() as est:
        for x in points:
            y = bundle.project(x)
            cg = curvature(bundle.total_chart, x)
            cb = curvature(base.chart, y)
            jf = base.J_frame(y)
            om = jf  # Omega(e_i, e_j) in frame components
            exp_h = horizontal_curvature_expected(cb.riemann, om)
            tab.add("horizontal_curvature", np.abs(cg.riemann[:d, :d, :d, :d] - exp_h).max(), np.abs(exp_h).max())
            mixed = cg.riemann[:d, s, :d, s]
            tab.add("mixed_curvature", np.abs(mixed - np.eye(d)).max(), 1.0)
            exp_ric = cb.ricci - 2 * np.eye(d)
            tab.add("ricci", np.abs(cg.ricci[:d, :d] - exp_ric).max(), np.abs(exp_ric).max())
            hv = h(y)
            ht = np.zeros((d + 1, d + 1))
            ht[:d, :d] = hv
            lhs = curvature_action(cg.riemann, ht)[:d, :d]
            rhs = curvature_action(cb.riemann, hv) - 3 * h_circ_j(hv, jf) - om * trace_hj(hv, jf)
            tab.add("curvature_action", np.abs(lhs - rhs).max(), np.abs(rhs).max())
            tab.add("trace_hJ", abs(trace_hj(hv, jf)), np.abs(hv).max())
    tab.fd_error = est.value
    return tab


@dataclass
class LiftRow:
    lifted: float
    base: float
    hh: float
    hjh: float
    rhs: float
    residual: float


def einstein_operator_lift_values(bundle: SasakiBundle, h, x) -> LiftRow:
    base = bundle.base
    y = bundle.project(x)
    lifted = lift_tensor(bundle, h).total_field
    ht = lifted(x)
    lhs = float(np.sum(einstein_operator(bundle.total_chart, lifted, x) * ht))
    hv = h(y)
    bval = float(np.sum(einstein_operator(base.chart, h, y) * hv))
    hh = float(np.sum(hv * hv))
    hjh = float(np.sum(h_circ_j(hv, base.J_frame(y)) * hv))
    rhs = bval + 4 * hh + 4 * hjh
    return LiftRow(lhs, bval, hh, hjh, rhs, abs(lhs - rhs))


def einstein_operator_lift_check(bundle: SasakiBundle, h, points) -> CheckTable:
    tab = CheckTable()
    with fd_error_tracking() as est:
        for x in points:
            row = einstein_operator_lift_values(bundle, h, x)
            tab.add("einstein_relation", row.residual, max(abs(row.lifted), abs(row.rhs)))
            tab.add("hJ_bound_violation", max(0.0, row.hjh - row.hh), row.hh)
    tab.fd_error = est.value
    return tab


def xi_divergence(bundle: SasakiBundle, h, x) -> float:
    """(delta_g h~)(xi) at x."""
    lifted = lift_tensor(bundle, h).total_field
    return float(divergence(bundle.total_chart, lifted, x)[bundle.xi_index])


def lift_tt_report(bundle: SasakiBundle, h, points, div_tol: float = 1e-6) -> TTReport:
    """TT report of h~ after checking that h is TT on the base."""
    base_rep = tt_report(bundle.base.chart, h, [bundle.project(x) for x in points], div_tol=div_tol)
    if not (base_rep.traceless and base_rep.transverse):
        raise ValueError(
            f"base field is not traceless-transverse (max |tr| {base_rep.max_trace:.3e}, "
            f"max |div| {base_rep.max_divergence:.3e})"
        )
    return tt_report(bundle.total_chart, lift_tensor(bundle, h).total_field, points, div_tol=div_tol)


def product_direction(bundle: SasakiBundle) -> SymTensorField:
    """G_1 / (2 p_1) - G_2 / (2 p_2) on a product base."""
    f = bundle.base.factors
    if len(f) != 2:
        raise ValueError(f"base {bundle.base.name} is not a product of two factors")
    return product_unstable_direction(bundle.base.chart, f[0], f[1])


# --- the certificate ----------------------------------------------------------


def certificate_formulas(p1: int, p2: int) -> dict:
    inv = 1.0 / p1 + 1.0 / p2
    hh = 1.0 / (2 * p1) + 1.0 / (2 * p2)
    base_value = -2.0 * (p1 + p2 + 1) * inv
    lifted_value = -2.0 * (p1 + p2 - 1) * inv
    return {
        "base_value": base_value,
        "lifted_value": lifted_value,
        "h_norm2": hh,
        "hJ_h": hh,
        "rayleigh_quotient": lifted_value / hh,
        "base_below_minus_8": base_value < -8 * hh,
    }


@dataclass
class InstabilityCertificate:
    p1: int
    p2: int
    base_value: float
    lifted_value: float
    h_norm2: float
    rayleigh_quotient: float
    base_below_minus_8: bool
    verdict: str
    numeric: dict | None = None
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "p1": self.p1,
            "p2": self.p2,
            "base_value": self.base_value,
            "lifted_value": self.lifted_value,
            "h_norm2": self.h_norm2,
            "rayleigh_quotient": self.rayleigh_quotient,
            "base_below_minus_8": self.base_below_minus_8,
            "verdict": self.verdict,
            "numeric": self.numeric,
            "note": self.note,
        }


def bundle_for_product(p1: int, p2: int) -> SasakiBundle:
    k = 2.0 * (p1 + p2) + 2.0
    return build_total(product_base(complex_projective(p1, k), complex_projective(p2, k)))


def instability_certificate(p1: int, p2: int, points=None, rng=None, samples: int = 4, numeric: bool = True) -> InstabilityCertificate:
    """Closed-form values for the lifted product direction, with a pointwise numerical cross-check.

    The numerical part builds the bundle over CP^p1 x CP^p2 (CP^1 = S^2) with
    Einstein constant 2 (p1 + p2) + 2 and evaluates the lifted quadratic form
    at sample points; it is available for p1 + p2 <= MAX_NUMERIC_P, larger
    pairs return the formula values only.
    """
    if int(p1) != p1 or int(p2) != p2 or p1 < 1 or p2 < 1:
        raise ValueError(f"p1 and p2 must be positive integers, got ({p1}, {p2})")
    p1, p2 = int(p1), int(p2)
    f = certificate_formulas(p1, p2)
    verdict = "UNSTABLE" if f["lifted_value"] < 0 else "INCONCLUSIVE"
    cert = InstabilityCertificate(
        p1, p2, f["base_value"], f["lifted_value"], f["h_norm2"], f["rayleigh_quotient"], f["base_below_minus_8"], verdict
    )
    if not numeric:
        return cert
    if p1 + p2 > MAX_NUMERIC_P:
        cert.note = f"numerical cross-check available for p1 + p2 <= {MAX_NUMERIC_P} only"
        return cert
    bundle = bundle_for_product(p1, p2)
    h = product_direction(bundle)
    if points is None:
        rng = np.random.default_rng(0) if rng is None else rng
        points = bundle.total_chart.sample_points(rng, samples)
    rows = []
    with fd_error_tracking() as est:
        for x in points:
            rows.append(einstein_operator_lift_values(bundle, h, x))
    lifted = np.array([r.lifted for r in rows])
    base_vals = np.array([r.base for r in rows])
    hh = np.array([r.hh for r in rows])
    cert.numeric = {
        "samples": len(rows),
        "lifted_min": float(lifted.min()),
        "lifted_max": float(lifted.max()),
        "base_min": float(base_vals.min()),
        "base_max": float(base_vals.max()),
        "h_norm2_max_dev": float(np.abs(hh - f["h_norm2"]).max()),
        "lifted_max_rel_dev": float(np.abs(lifted - f["lifted_value"]).max() / abs(f["lifted_value"])),
        "fd_error": est.value,
    }
    return cert
