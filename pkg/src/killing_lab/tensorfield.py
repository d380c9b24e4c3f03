"""Symmetric 2-tensor calculus in orthonormal-frame components.

Fields are callables ``x -> components`` where the components are taken in
the backend's orthonormal frame at x.  Covariant derivatives combine the
backend's directional derivative of the components with algebraic
connection terms; on a homogeneous backend the first part vanishes and
everything is exact.

The same machinery handles sections with extra spinor indices
(see :mod:`killing_lab.spinorfield`): a value with ``rank`` frame slots is
an array of shape ``(n,) * rank`` optionally followed by one spinor axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import Backend, ChartPatch, curvature
from .numdiff import fd_error_tracking


@dataclass
class SymTensorField:
    components: Callable = field(repr=False)
    constant: bool = False
    label: str = "h"

    def __call__(self, x):
        return np.asarray(self.components(x))


def spin_matrix(conn_k, rep) -> np.ndarray:
    """1/4 sum_ij conn_k[i, j] gamma_i gamma_j: the spin connection along one frame vector."""
    g = np.stack(rep.gammas)
    return 0.25 * np.einsum("ij,iab,jbc->ac", conn_k, g, g)


def connection_action(conn_k, value, rank: int, rep=None):
    """Algebraic part of nabla_{e_k} for a section with `rank` covector slots."""
    value = np.asarray(value)
    out = np.zeros(value.shape, dtype=np.result_type(value, float))
    for slot in range(rank):
        # -Gamma_{k a}^m T_{..m..} with `a` in the given slot
        moved = np.moveaxis(value, slot, 0)
        term = np.tensordot(conn_k, moved, axes=([1], [0]))
        out = out - np.moveaxis(term, 0, slot)
    if rep is not None:
        out = out + value @ spin_matrix(conn_k, rep).T
    return out


def _check_field(backend, fld):
    if backend.exact and not getattr(fld, "constant", True):
        raise ValueError("homogeneous backends support constant-component fields only")


def covariant_derivative(backend: Backend, fld, x, k: int, rank: int = 2, rep=None):
    """(nabla_{e_k} F)(x) in frame components."""
    _check_field(backend, fld)
    conn = backend.connection(x)
    return backend.derivative(fld, x, k) + connection_action(conn[k], fld(x), rank, rep)


def covariant_gradient(backend: Backend, fld, x, rank: int = 2, rep=None):
    """Stack of nabla_{e_k} F for k = 0..n-1."""
    return np.stack([covariant_derivative(backend, fld, x, k, rank, rep) for k in range(backend.dim)])


class _Derived:
    """Field y -> nabla_{e_k} F (y), itself a section of the same kind."""

    def __init__(self, backend, fld, k, rank, rep):
        self.backend, self.fld, self.k, self.rank, self.rep = backend, fld, k, rank, rep
        self.constant = getattr(fld, "constant", True)

    def __call__(self, y):
        return covariant_derivative(self.backend, self.fld, y, self.k, self.rank, self.rep)


def second_covariant(backend: Backend, fld, x, k: int, rank: int = 2, rep=None):
    """nabla_{e_k}(nabla_{e_k} F): the composition along the frame field, not the Hessian."""
    return covariant_derivative(backend, _Derived(backend, fld, k, rank, rep), x, k, rank, rep)


def rough_laplacian(backend: Backend, fld, x, rank: int = 2, rep=None):
    """nabla^* nabla F = -sum_k (nabla_k nabla_k F - nabla_{nabla_k e_k} F)."""
    conn = backend.connection(x)
    grad = covariant_gradient(backend, fld, x, rank, rep)
    out = np.zeros_like(grad[0])
    for k in range(backend.dim):
        out = out - second_covariant(backend, fld, x, k, rank, rep)
        out = out + np.tensordot(conn[k, k], grad, axes=1)
    return out


def trace(h, x=None) -> float:
    val = h(x) if callable(h) else np.asarray(h)
    return float(np.trace(val))


def divergence(backend: Backend, h, x):
    """(delta h)_j = -sum_i (nabla_{e_i} h)_{ij}."""
    grad = covariant_gradient(backend, h, x, rank=2)
    return -np.einsum("iij->j", grad)


def curvature_action(riemann, hval) -> np.ndarray:
    """(R h)_ij = R_ikjl h_kl."""
    return np.einsum("ikjl,kl->ij", riemann, hval)


def einstein_operator(backend: Backend, h, x, riemann=None):
    """nabla^* nabla h - 2 R h at x."""
    if riemann is None:
        riemann = curvature(backend, x).riemann
    return rough_laplacian(backend, h, x) - 2 * curvature_action(riemann, h(x))


def lichnerowicz_shift(einstein_value, hval, k: float):
    """Lichnerowicz Laplacian from the Einstein operator on a space with Ric = k g."""
    return np.asarray(einstein_value) + 2 * k * np.asarray(hval)


def inner(a, b) -> float:
    return float(np.real(np.sum(np.asarray(a) * np.conj(np.asarray(b)))))


# --- field families -------------------------------------------------------


def metric_field(n: int) -> SymTensorField:
    return SymTensorField(lambda x: np.eye(n), constant=True, label="metric")


def constant_field(mat, label="constant") -> SymTensorField:
    mat = np.array(mat, dtype=float)
    if np.abs(mat - mat.T).max() > 0:
        raise ValueError("symmetric tensor field needs a symmetric matrix")
    return SymTensorField(lambda x: mat, constant=True, label=label)


def random_symmetric(rng, n: int, traceless: bool = False) -> np.ndarray:
    a = rng.standard_normal((n, n))
    a = 0.5 * (a + a.T)
    if traceless:
        a -= np.trace(a) / n * np.eye(n)
    return a


def random_constant(rng, n: int, traceless: bool = False) -> SymTensorField:
    return constant_field(random_symmetric(rng, n, traceless), label="random_constant_traceless" if traceless else "random_constant")


def random_polynomial(rng, n: int, degree: int = 2, center=None, dim: int | None = None) -> SymTensorField:
    """Symmetric components that are random polynomials (total degree <= 2) in the coordinates.

    ``dim`` is the number of coordinates if it differs from the frame dimension n.
    """
    if degree not in (0, 1, 2):
        raise ValueError("polynomial degree must be 0, 1 or 2")
    d = n if dim is None else dim
    c0 = random_symmetric(rng, n)
    c1 = np.stack([random_symmetric(rng, n) for _ in range(d)]) if degree >= 1 else np.zeros((d, n, n))
    c2 = np.stack([[random_symmetric(rng, n) for _ in range(d)] for _ in range(d)]) if degree >= 2 else np.zeros((d, d, n, n))
    c2 = 0.5 * (c2 + np.transpose(c2, (1, 0, 2, 3))) * 0.5
    ctr = np.zeros(d) if center is None else np.asarray(center, dtype=float)

    def comps(x):
        y = np.asarray(x, dtype=float)[:d] - ctr
        return c0 + np.tensordot(y, c1, axes=1) + np.einsum("a,b,abij->ij", y, y, c2)

    return SymTensorField(comps, constant=False, label=f"random_polynomial(deg={degree})")


def product_unstable_direction(backend: Backend, n1: int, n2: int) -> SymTensorField:
    """g1 / n1 - g2 / n2 in a frame adapted to a product of dimensions n1 + n2."""
    if backend.dim != n1 + n2:
        raise ValueError(f"backend of dimension {backend.dim} is not a product of dimensions {n1} and {n2}")
    if getattr(backend, "factors", None) is not None and tuple(backend.factors) != (n1, n2):
        raise ValueError(f"backend factors {backend.factors} do not match ({n1}, {n2})")
    diag = np.concatenate([np.full(n1, 1.0 / n1), np.full(n2, -1.0 / n2)])
    return SymTensorField(lambda x: np.diag(diag), constant=True, label=f"product_direction({n1},{n2})")


@dataclass
class TTReport:
    max_trace: float
    max_divergence: float
    traceless: bool
    transverse: bool
    fd_error: float = 0.0


def tt_report(backend: Backend, h, points, trace_tol: float = 1e-10, div_tol: float = 1e-6) -> TTReport:
    mtr = mdiv = 0.0
    with fd_error_tracking() as est:
        for x in points:
            mtr = max(mtr, abs(trace(h, x)))
            mdiv = max(mdiv, float(np.abs(divergence(backend, h, x)).max()))
    return TTReport(mtr, mdiv, mtr <= trace_tol, mdiv <= div_tol, est.value)


def is_chart(backend) -> bool:
    return isinstance(backend, ChartPatch)
