"""Warped products (R^m x R, e^{-4 nu t} dx^2 + dt^2) and their type-I imaginary Killing spinors.

The fiber is flat, so its parallel spinors are constant vectors.  The
t-direction gamma is the last generator of the total representation: for
even m it is i times the fiber volume element, for odd m the spinor bundle
doubles and the two fiber modules are glued by the hat isomorphism.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .clifford import CliffordRep, build_rep, hat_isomorphism, volume_element
from .geometry import ChartPatch, constant_curvature_tensor, curvature, warped_flat
from .numdiff import fd_error_tracking
from .spinorfield import KillingConstant, SpinorField, SpinorOneForm, herm, phi_field, twisted_dirac


@dataclass
class WarpedProduct:
    fiber_dim: int
    nu: float
    chart: ChartPatch = field(repr=False)

    @property
    def dim(self) -> int:
        return self.fiber_dim + 1

    @property
    def t_index(self) -> int:
        return self.fiber_dim

    @property
    def sectional_curvature(self) -> float:
        return -4.0 * self.nu**2

    @property
    def einstein_constant(self) -> float:
        return self.sectional_curvature * self.fiber_dim

    def killing_constant(self) -> KillingConstant:
        return KillingConstant.imaginary(self.nu)

    def length_function(self, x) -> float:
        return float(np.exp(-2.0 * self.nu * np.asarray(x)[self.t_index]))


def build_warped(fiber_dim: int, nu: float, half_width: float = 1.0) -> WarpedProduct:
    if not isinstance(fiber_dim, (int, np.integer)) or fiber_dim < 1:
        raise ValueError(f"fiber dimension must be a positive integer, got {fiber_dim!r}")
    if not nu > 0:
        raise ValueError(f"nu must be positive, got {nu!r}")
    return WarpedProduct(int(fiber_dim), float(nu), warped_flat(int(fiber_dim), float(nu), half_width))


def total_representation(fiber_dim: int):
    """Total Cl(m + 1) generators (fiber generators first, t last) and the fiber embedding data.

    Returns (rep, embed, admissible): embed maps a fiber spinor psi to the
    constant part of the type-I spinor, and the columns of admissible span
    the fiber spinors allowed in the construction.
    """
    m = fiber_dim
    fib = build_rep(m)
    if m % 2 == 0:
        vol = volume_element(fib)
        gammas = list(fib.gammas) + [1j * vol.matrix]
        rep = CliffordRep.from_gammas(gammas)
        plus = vol.eigenbasis(+1)
        if plus.shape[1] == 0:
            raise RuntimeError("empty +1 eigenspace of the fiber volume element")

        def embed(psi):
            return np.asarray(psi, dtype=complex)

        return rep, embed, plus
    hat = hat_isomorphism(fib)
    mat = hat.matrix
    inv = np.linalg.inv(mat)
    nsp = fib.spinor_dim
    z = np.zeros((nsp, nsp))
    gammas = [np.block([[g, z], [z, g2]]) for g, g2 in zip(fib.gammas, hat.second_gammas)]
    gammas.append(1j * np.block([[z, inv], [mat, z]]))
    rep = CliffordRep.from_gammas(gammas)

    def embed(psi):
        psi = np.asarray(psi, dtype=complex)
        return np.concatenate([psi, mat @ psi]) / np.sqrt(2.0)

    return rep, embed, np.eye(nsp, dtype=complex)


@dataclass
class TypeOneSpinor:
    psi: np.ndarray
    parity: str  # "even" or "odd" fiber dimension
    sigma: SpinorField = field(repr=False)
    warped: WarpedProduct = field(repr=False)

    @property
    def rep(self) -> CliffordRep:
        return self.sigma.rep


def build_type1_spinor(w: WarpedProduct, psi=None, sign: float = 1.0) -> TypeOneSpinor:
    """sigma = e^{-nu t} (embedded psi), normalised so that <sigma, sigma> = e^{-2 nu t}.

    ``psi`` defaults to the first admissible basis vector; ``sign=-1``
    produces the decay e^{+nu t} (used only as a negative control).
    """
    rep, embed, admissible = total_representation(w.fiber_dim)
    if psi is None:
        psi = admissible[:, 0]
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (admissible.shape[0],):
        raise ValueError(f"fiber spinor must have length {admissible.shape[0]}")
    # project onto the admissible subspace (the +1 eigenspace for even fibers)
    psi = admissible @ (admissible.conj().T @ psi)
    norm = np.linalg.norm(psi)
    if norm < 1e-12:
        raise ValueError("fiber spinor has no component in the admissible eigenspace")
    base = embed(psi / norm)
    t = w.t_index
    nu = w.nu * sign

    def value(x):
        return np.exp(-nu * np.asarray(x)[t]) * base

    sigma = SpinorField(value, rep, label="type_one", backend=w.chart)
    return TypeOneSpinor(psi / norm, "even" if w.fiber_dim % 2 == 0 else "odd", sigma, w)


def length(sigma, x) -> float:
    s = sigma(x)
    return float(np.vdot(s, s).real)


@dataclass
class QSigma:
    mean: float
    spread: float
    values: np.ndarray = field(repr=False)


def q_sigma(w: WarpedProduct, sigma, points) -> QSigma:
    """q = f^2 - |grad f|^2 / (4 nu^2) at each point, f = <sigma, sigma>."""
    chart = w.chart
    vals = []
    for x in points:
        f = length(sigma, x)
        grad = np.array([chart.derivative(lambda y: length(sigma, y), x, k) for k in range(w.dim)])
        vals.append(f * f - float(grad @ grad) / (4 * w.nu**2))
    vals = np.array(vals)
    return QSigma(float(vals.mean()), float(vals.max() - vals.min()), vals)


def orthogonality_check(sigma, points) -> float:
    """max |Re <e_i s, e_j s> - delta_ij f|."""
    rep = sigma.rep
    worst = 0.0
    for x in points:
        s = sigma(x)
        f = float(np.vdot(s, s).real)
        gs = np.stack([g @ s for g in rep.gammas])
        gram = (gs.conj() @ gs.T).real
        worst = max(worst, float(np.abs(gram - f * np.eye(rep.dim)).max()))
    return worst


def t_action_residual(w: WarpedProduct, sigma, points) -> float:
    """max || d/dt . sigma - i sigma ||."""
    g = sigma.rep.gammas[w.t_index]
    return max(float(np.linalg.norm(g @ sigma(x) - 1j * sigma(x))) for x in points)


def length_residual(w: WarpedProduct, sigma, points) -> float:
    return max(abs(length(sigma, x) - w.length_function(x)) for x in points)


def cauchy_step(ts: TypeOneSpinor, dphi, phi) -> tuple:
    """Both sides of Re<D Phi, 2 nu d/dt . Phi> >= -(|D Phi|^2 + 4 nu^2 |Phi|^2) / 2 at one point."""
    w = ts.warped
    g = ts.rep.gammas[w.t_index]
    lhs = herm(dphi, 2 * w.nu * (np.asarray(phi) @ g.T)).real
    rhs = -0.5 * (herm(dphi, dphi).real + 4 * w.nu**2 * herm(phi, phi).real)
    return lhs, rhs


def leibniz_check(w: WarpedProduct, h, ts: TypeOneSpinor, x) -> float:
    """Residual of D(Phi / f) = (D Phi + 2 nu d/dt . Phi) / f for the type-I length f."""
    rep = ts.rep
    psi = phi_field(h, ts.sigma)
    scaled = SpinorOneForm(lambda y: psi(y) / w.length_function(y))
    lhs = twisted_dirac(w.chart, scaled, x, rep)
    g = rep.gammas[w.t_index]
    rhs = (twisted_dirac(w.chart, psi, x, rep) + 2 * w.nu * psi(x) @ g.T) / w.length_function(x)
    return float(np.linalg.norm(lhs - rhs))


def curvature_check(w: WarpedProduct, points) -> tuple:
    """max deviation of the Riemann tensor from constant curvature -4 nu^2, with the FD error."""
    ref = constant_curvature_tensor(w.dim, w.sectional_curvature)
    worst = 0.0
    with fd_error_tracking() as est:
        for x in points:
            worst = max(worst, float(np.abs(curvature(w.chart, x).riemann - ref).max()))
    return worst, est.value
