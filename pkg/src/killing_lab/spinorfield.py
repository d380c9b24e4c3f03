"""Spinor fields, the spin connection, Killing spinors and the Bochner formula.

Spinor components are taken in the lift of the backend's orthonormal frame;
the spin connection along e_k is ``e_k(s) + 1/4 sum_ij conn[k, i, j] g_i g_j s``.
A spinor-valued 1-form is an array ``psi[j, a]`` (form index j, spinor index a),
and the Hermitian product on it is ``sum_j <psi^j, phi^j>``, linear in the
first argument.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .clifford import CliffordRep
from .geometry import Backend, curvature
from .numdiff import fd_error_tracking
from .tensorfield import (
    _check_field,
    covariant_derivative,
    covariant_gradient,
    divergence,
    einstein_operator,
    spin_matrix,
)


def herm(a, b) -> complex:
    """<a, b> summed over all axes, linear in a."""
    return complex(np.vdot(np.asarray(b), np.asarray(a)))


@dataclass(frozen=True)
class KillingConstant:
    value: complex

    def __post_init__(self):
        v = complex(self.value)
        if v.real != 0 and v.imag != 0:
            raise ValueError(f"a Killing constant is real or purely imaginary, got {v}")
        object.__setattr__(self, "value", v)

    @classmethod
    def real(cls, mu: float) -> "KillingConstant":
        return cls(complex(mu, 0.0))

    @classmethod
    def imaginary(cls, nu: float) -> "KillingConstant":
        return cls(complex(0.0, nu))

    @property
    def kind(self) -> str:
        return "imaginary" if self.value.imag != 0 else "real"


def _mu(mu) -> complex:
    return mu.value if isinstance(mu, KillingConstant) else complex(mu)


@dataclass
class SpinorField:
    value: Callable = field(repr=False)
    rep: CliffordRep = field(repr=False)
    constant: bool = False
    label: str = "sigma"
    backend: Backend | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.backend is not None and self.backend.dim != self.rep.dim:
            raise ValueError(f"Clifford representation of dimension {self.rep.dim} on a {self.backend.dim}-manifold")

    def __call__(self, x):
        return np.asarray(self.value(x), dtype=complex)


@dataclass
class SpinorOneForm:
    value: Callable = field(repr=False)
    constant: bool = False
    label: str = "psi"

    def __call__(self, x):
        return np.asarray(self.value(x), dtype=complex)


def _check_dims(backend, rep):
    if rep.dim != backend.dim:
        raise ValueError(f"Clifford representation of dimension {rep.dim} on a {backend.dim}-manifold")


def spin_covariant_derivative(backend: Backend, sigma: SpinorField, k: int, x):
    _check_dims(backend, sigma.rep)
    return covariant_derivative(backend, sigma, x, k, rank=0, rep=sigma.rep)


def killing_residual(backend: Backend, sigma: SpinorField, mu, points):
    """max over points and k of || nabla_k sigma - mu e_k . sigma ||, with the FD error estimate."""
    m = _mu(mu)
    worst = 0.0
    with fd_error_tracking() as est:
        for x in points:
            s = sigma(x)
            for k in range(backend.dim):
                r = spin_covariant_derivative(backend, sigma, k, x) - m * (sigma.rep.gammas[k] @ s)
                worst = max(worst, float(np.linalg.norm(r)))
    return worst, est.value


def constant_killing_spinors(backend: Backend, rep: CliffordRep, mu, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (columns) of constant spinors with nabla_k s = mu g_k s for all k.

    Solves the stacked linear system rather than assuming a convention.
    """
    _check_dims(backend, rep)
    if not backend.exact:
        raise ValueError("constant Killing spinors are solved for on exact (homogeneous) backends only")
    m = _mu(mu)
    conn = backend.connection(None)
    system = np.vstack([spin_matrix(conn[k], rep) - m * rep.gammas[k] for k in range(backend.dim)])
    _, svals, vh = np.linalg.svd(system)
    svals = np.concatenate([svals, np.zeros(vh.shape[0] - len(svals))])
    return vh[svals < tol].conj().T


class _SpinorDerivativeField:
    def __init__(self, backend, sigma, k):
        self.backend, self.sigma, self.k = backend, sigma, k
        self.constant = sigma.constant

    def __call__(self, y):
        return covariant_derivative(self.backend, self.sigma, y, self.k, rank=0, rep=self.sigma.rep)


@dataclass
class SpinorCurvature:
    lhs: np.ndarray
    rhs: np.ndarray
    residual: float


def spinor_curvature(backend: Backend, sigma: SpinorField, i: int, j: int, x, riemann=None) -> SpinorCurvature:
    """Both sides of R^S_{e_i e_j} s = 1/4 R(e_i, e_j, e_a, e_b) e_a e_b s, computed independently.

    The left side applies the curvature convention
    ``R_XY = -nabla_X nabla_Y + nabla_Y nabla_X + nabla_[X,Y]`` to the spin
    connection; the right side contracts the Riemann tensor.
    """
    rep = sigma.rep
    _check_dims(backend, rep)
    _check_field(backend, sigma)
    di = _SpinorDerivativeField(backend, sigma, i)
    dj = _SpinorDerivativeField(backend, sigma, j)
    c = backend.structure(x)
    lhs = -covariant_derivative(backend, dj, x, i, rank=0, rep=rep) + covariant_derivative(backend, di, x, j, rank=0, rep=rep)
    for m in range(backend.dim):
        if c[i, j, m] != 0:
            lhs = lhs + c[i, j, m] * covariant_derivative(backend, sigma, x, m, rank=0, rep=rep)
    if riemann is None:
        riemann = curvature(backend, x).riemann
    g = np.stack(rep.gammas)
    op = 0.25 * np.einsum("ab,apq,bqr->pr", riemann[i, j], g, g)
    rhs = op @ sigma(x)
    return SpinorCurvature(lhs, rhs, float(np.linalg.norm(lhs - rhs)))


def phi_map(hval, s, rep: CliffordRep) -> np.ndarray:
    """Phi(h)^j = sum_i h_ij e_i . s."""
    gs = np.stack([g @ s for g in rep.gammas])  # gs[i] = e_i . s
    return np.einsum("ij,ia->ja", np.asarray(hval), gs)


def phi_field(h, sigma: SpinorField) -> SpinorOneForm:
    return SpinorOneForm(
        lambda y: phi_map(h(y), sigma(y), sigma.rep),
        constant=getattr(h, "constant", False) and sigma.constant,
        label=f"Phi({getattr(h, 'label', 'h')})",
    )


def re_inner_phi(hval, h2val, s, rep: CliffordRep):
    """Re <Phi(h), Phi(h2)> and its residual against <h, h2> |s|^2."""
    value = herm(phi_map(hval, s, rep), phi_map(h2val, s, rep)).real
    f = float(np.vdot(s, s).real)
    expected = float(np.sum(np.asarray(hval) * np.asarray(h2val))) * f
    return value, abs(value - expected)


def twisted_dirac(backend: Backend, psi, x, rep: CliffordRep):
    """(D psi)^j = sum_k e_k . (nabla_{e_k} psi)^j with the tensor-product connection."""
    _check_dims(backend, rep)
    grad = covariant_gradient(backend, psi, x, rank=1, rep=rep)  # grad[k, j, a]
    return np.einsum("kab,kjb->ja", np.stack(rep.gammas), grad)


class DiracField:
    """The section y -> D psi (y)."""

    def __init__(self, backend, psi, rep):
        self.backend, self.psi, self.rep = backend, psi, rep
        self.constant = getattr(psi, "constant", False)

    def __call__(self, y):
        return twisted_dirac(self.backend, self.psi, y, self.rep)


@dataclass
class BochnerTerms:
    lhs: np.ndarray
    rhs: np.ndarray
    residual: float
    relative: float
    terms: dict = field(default_factory=dict, repr=False)


def bochner_residual(backend: Backend, h, sigma: SpinorField, mu, x, divergence_variant: str = "scalar") -> BochnerTerms:
    """Compare D D Phi(h) with the right-hand side of the Bochner formula at x.

    RHS = Phi((nabla^* nabla - 2 R) h) + n (n - 2) mu^2 Phi(h) + 2 mu D Phi(h)
          + 4 mu^2 (tr h) e_j . s (x) e^j - 4 mu (delta h)_j s (x) e^j.

    ``divergence_variant="clifford"`` replaces the last term by
    ``-4 mu (delta h)_j e_j . s (x) e^j``; it exists only to show that this
    reading fails (see :func:`divergence_term_check`).
    """
    rep = sigma.rep
    _check_dims(backend, rep)
    _check_field(backend, h)
    m = _mu(mu)
    n = backend.dim
    psi = phi_field(h, sigma)
    dpsi = DiracField(backend, psi, rep)
    lhs = twisted_dirac(backend, dpsi, x, rep)

    s = sigma(x)
    hx = h(x)
    gs = np.stack([g @ s for g in rep.gammas])
    ein = einstein_operator(backend, h, x)
    div = divergence(backend, h, x)
    terms = {
        "phi_einstein": phi_map(ein, s, rep),
        "phi_h": n * (n - 2) * m**2 * phi_map(hx, s, rep),
        "dirac": 2 * m * dpsi(x),
        "trace": 4 * m**2 * np.trace(hx) * gs,
    }
    if divergence_variant == "scalar":
        terms["divergence"] = -4 * m * np.outer(div, s)
    elif divergence_variant == "clifford":
        terms["divergence"] = -4 * m * div[:, None] * gs
    else:
        raise ValueError(f"unknown divergence variant {divergence_variant!r}")
    rhs = sum(terms.values())
    res = float(np.linalg.norm(lhs - rhs))
    scale = max(float(np.linalg.norm(lhs)), float(np.linalg.norm(rhs)), 1e-300)
    return BochnerTerms(lhs, rhs, res, res / scale, terms)


def divergence_term_check(rep: CliffordRep, grad_h, s, mu, variant: str = "scalar") -> float:
    """Pure Clifford-algebra check of the divergence step in the Bochner derivation.

    With a_kij = (nabla_k h)_ij symmetric in (i, j), compare
    ``-2 mu a_kij e_i e_k s (x) e^j`` against
    ``-4 mu (delta h)_j [s | e_j . s] (x) e^j + 2 mu e_k . Phi(a_k)``,
    where (delta h)_j = -a_iij.  Only the scalar reading holds identically.
    """
    a = np.asarray(grad_h, dtype=float)
    n = rep.dim
    m = complex(mu)
    g = np.stack(rep.gammas)
    lhs = -2 * m * np.einsum("kij,ipq,kqr,r->jp", a, g, g, s)
    div = -np.einsum("iij->j", a)
    ek_phi = np.einsum("kpq,kjq->jp", g, np.stack([phi_map(a[k], s, rep) for k in range(n)]))
    if variant == "scalar":
        dterm = np.outer(div, s)
    elif variant == "clifford":
        dterm = div[:, None] * (g @ s)
    else:
        raise ValueError(f"unknown divergence variant {variant!r}")
    rhs = -4 * m * dterm + 2 * m * ek_phi
    return float(np.linalg.norm(lhs - rhs))


def dirac_phi_rearrangement(backend: Backend, h, sigma: SpinorField, mu, x) -> float:
    """Residual of e_k . Phi(nabla_k h) = D Phi(h) - (n - 2) mu Phi(h)."""
    rep = sigma.rep
    m = _mu(mu)
    s = sigma(x)
    grad = covariant_gradient(backend, h, x, rank=2)
    lhs = sum(np.einsum("ab,jb->ja", rep.gammas[k], phi_map(grad[k], s, rep)) for k in range(backend.dim))
    rhs = twisted_dirac(backend, phi_field(h, sigma), x, rep) - (backend.dim - 2) * m * phi_map(h(x), s, rep)
    return float(np.linalg.norm(lhs - rhs))


def t_action_norm(hval, s, t_index: int, rep: CliffordRep) -> float:
    """| ||e_t . Phi(h)|| - ||Phi(h)|| | for the unit vector e_t."""
    phi = phi_map(hval, s, rep)
    acted = phi @ rep.gammas[t_index].T
    return abs(float(np.linalg.norm(acted)) - float(np.linalg.norm(phi)))


@dataclass
class RealKillingIdentity:
    lhs: float
    rhs: float
    residual: float
    imag_mu_dirac_phi: float
    dirac_norm2: float
    dirac_phi: complex


def real_killing_identity(backend: Backend, h, sigma: SpinorField, mu) -> RealKillingIdentity:
    """Homogeneous reduction of the real-Killing integral identity.

    For left-invariant data every integrand is constant, so the identity
    <(nabla^* nabla - 2R) h, h> = |D Phi|^2 - 2 mu <D Phi, Phi> - n (n - 2) mu^2 <h, h>
    is checked pointwise.  sigma must have unit length.
    """
    if not backend.exact:
        raise ValueError("the homogeneous reduction needs an exact (homogeneous) backend")
    if not (getattr(h, "constant", False) and sigma.constant):
        raise ValueError("non-constant fields are not supported on the homogeneous reduction")
    m = _mu(mu)
    if m.imag != 0:
        raise ValueError("real Killing constant required")
    m = m.real
    x = np.zeros(backend.dim)
    n = backend.dim
    hx = h(x)
    lhs = float(np.sum(einstein_operator(backend, h, x) * hx))
    psi = phi_field(h, sigma)
    phi = psi(x)
    dphi = twisted_dirac(backend, psi, x, sigma.rep)
    dn2 = herm(dphi, dphi).real
    dp = herm(dphi, phi)
    rhs = dn2 - 2 * m * dp.real - n * (n - 2) * m**2 * float(np.sum(hx * hx))
    return RealKillingIdentity(lhs, rhs, abs(lhs - rhs), abs((m * dp).imag), dn2, dp)


def spectral_gap_report(backend: Backend, sigma: SpinorField, mu, ensemble) -> list:
    """Rows (index, <(D - mu)^2 Phi(h), Phi(h)> - (n - 1)^2 mu^2 <h, h>, <h, h>), sorted by value.

    (D - mu)^2 is applied directly: on left-invariant data D is a Hermitian
    matrix on the constant sections.
    """
    if not backend.exact:
        raise ValueError("the spectral gap report runs on an exact (homogeneous) backend")
    m = _mu(mu).real
    n = backend.dim
    x = np.zeros(n)
    rows = []
    for idx, h in enumerate(ensemble):
        psi = phi_field(h, sigma)
        dpsi = DiracField(backend, psi, sigma.rep)
        phi = psi(x)
        d1 = dpsi(x)
        d2 = twisted_dirac(backend, dpsi, x, sigma.rep)
        shifted = d2 - 2 * m * d1 + m**2 * phi
        hh = float(np.sum(h(x) ** 2))
        gap = herm(shifted, phi).real - (n - 1) ** 2 * m**2 * hh
        rows.append((idx, gap, hh))
    rows.sort(key=lambda r: (r[1], r[0]))
    return rows
