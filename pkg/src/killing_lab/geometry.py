"""Manifold backends and frame-level connection and curvature.

Two backends share one interface:

* :class:`ChartPatch` -- a coordinate box with a closed-form metric; the
  orthonormal frame is the metric Gram-Schmidt of the coordinate basis (or a
  supplied frame function) and all derivatives are finite differences.
* :class:`HomogeneousFrame` -- a Lie algebra with structure constants in an
  orthonormal left-invariant frame; only constant-component fields are
  allowed and everything reduces to exact algebra.

Conventions, used throughout the package:

* ``conn[k, i, j] = g(nabla_{e_k} e_i, e_j)`` (antisymmetric in i, j),
* ``struct[i, j, k]`` are the structure functions ``[e_i, e_j] = struct[i, j, k] e_k``,
* the curvature operator is ``R_XY = -nabla_X nabla_Y + nabla_Y nabla_X + nabla_[X,Y]``
  and ``riemann[i, j, k, l] = g(R_{e_i e_j} e_k, e_l)``, so that
  ``riemann[i, j, i, j]`` is the sectional curvature of the plane (e_i, e_j),
* ``ricci[j, l] = sum_i riemann[i, j, i, l]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import solve_triangular

from .numdiff import directional_derivative, fd_error_tracking

_CACHE_LIMIT = 20000


class Backend:
    """Common surface of chart and homogeneous backends."""

    dim: int
    label: str
    exact: bool

    def connection(self, x) -> np.ndarray:
        raise NotImplementedError

    def structure(self, x) -> np.ndarray:
        raise NotImplementedError

    def derivative(self, f: Callable, x, k: int):
        """e_k(f) at x, for f returning frame components."""
        raise NotImplementedError

    def sample_points(self, rng, count: int) -> np.ndarray:
        raise NotImplementedError


def _connection_from_structure(c):
    # Koszul formula in an orthonormal frame
    return 0.5 * (c - np.einsum("jki->ijk", c) + np.einsum("kij->ijk", c))


def levi_civita3():
    eps = np.zeros((3, 3, 3))
    for (i, j, k), s in {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1, (0, 2, 1): -1, (2, 1, 0): -1, (1, 0, 2): -1}.items():
        eps[i, j, k] = s
    return eps


@dataclass
class ChartPatch(Backend):
    dim: int
    lower: np.ndarray
    upper: np.ndarray
    metric: Callable = field(repr=False)
    fd_step: float = 1e-3
    label: str = "chart"
    frame_fn: Callable | None = field(default=None, repr=False)
    margin: float = 0.1
    exact: bool = False

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        self._conn_cache = {}

    def contains(self, x) -> bool:
        x = np.asarray(x)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def _check_point(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"point must have shape ({self.dim},), got {x.shape}")
        if not self.contains(x):
            raise ValueError(f"point {x} lies outside the chart domain of {self.label}")
        return x

    def frame(self, x) -> np.ndarray:
        """Columns are the orthonormal frame vectors in coordinates."""
        x = np.asarray(x, dtype=float)
        if self.frame_fn is not None:
            return np.asarray(self.frame_fn(x), dtype=float)
        g = self.metric(x)
        try:
            low = np.linalg.cholesky(g)
        except np.linalg.LinAlgError as exc:
            raise ValueError(f"metric of {self.label} is not positive definite at {x}") from exc
        # E = L^{-T}: upper triangular, so e_1 || d_1, e_2 in span(d_1, d_2), ...
        return solve_triangular(low, np.eye(self.dim), lower=True).T

    def derivative(self, f, x, k):
        e = self.frame(x)[:, k]
        return directional_derivative(f, x, e, self.fd_step)

    def coordinate_derivative(self, f, x, a):
        v = np.zeros(self.dim)
        v[a] = 1.0
        return directional_derivative(f, x, v, self.fd_step)

    def structure(self, x):
        e = self.frame(x)
        de = np.stack([self.derivative(self.frame, x, i) for i in range(self.dim)])
        # [e_i, e_j] in coordinates: (D_{e_i} E)[:, j] - (D_{e_j} E)[:, i]
        br = np.einsum("ibj->ijb", de) - np.einsum("jbi->ijb", de)
        return np.einsum("kb,ijb->ijk", np.linalg.inv(e), br)

    def connection(self, x):
        key = np.asarray(x, dtype=float).tobytes()
        hit = self._conn_cache.get(key)
        if hit is not None:
            from .numdiff import record_error

            record_error(hit[1])
            return hit[0]
        with fd_error_tracking() as est:
            conn = _connection_from_structure(self.structure(x))
        if len(self._conn_cache) > _CACHE_LIMIT:
            self._conn_cache.clear()
        self._conn_cache[key] = (conn, est.value)
        return conn

    def sample_points(self, rng, count):
        span = self.upper - self.lower
        lo = self.lower + self.margin * span
        hi = self.upper - self.margin * span
        return lo + (hi - lo) * rng.random((count, self.dim))


@dataclass
class HomogeneousFrame(Backend):
    """Left-invariant orthonormal frame on a unimodular Lie group."""

    structure_constants: np.ndarray
    label: str = "homogeneous"
    volume: float | None = None
    exact: bool = True

    def __post_init__(self):
        c = np.asarray(self.structure_constants, dtype=float)
        if c.ndim != 3 or len(set(c.shape)) != 1:
            raise ValueError("structure constants must have shape (n, n, n)")
        if np.abs(c + np.transpose(c, (1, 0, 2))).max() > 1e-14:
            raise ValueError("structure constants must satisfy c_ij^k = -c_ji^k")
        self.structure_constants = c
        self.dim = c.shape[0]
        self._conn = _connection_from_structure(c)

    def jacobi_residual(self) -> float:
        c = self.structure_constants
        jac = (
            np.einsum("ijm,mkl->ijkl", c, c)
            + np.einsum("jkm,mil->ijkl", c, c)
            + np.einsum("kim,mjl->ijkl", c, c)
        )
        return float(np.abs(jac).max())

    def structure(self, x=None):
        return self.structure_constants

    def connection(self, x=None):
        return self._conn

    def derivative(self, f, x, k):
        # only left-invariant (constant-component) fields live on this backend
        return np.zeros_like(np.asarray(f(x)))

    def sample_points(self, rng, count):
        # points are placeholders: every quantity is left-invariant
        return np.zeros((count, self.dim))


@dataclass
class FrameData:
    frame: np.ndarray
    first: np.ndarray  # first[a] = d_a E
    second: np.ndarray  # second[a, b] = d_a d_b E


def orthonormal_frame(chart: ChartPatch, x) -> FrameData:
    """Frame at x with its first and second coordinate derivatives."""
    x = chart._check_point(x)
    e = chart.frame(x)
    first = np.stack([chart.coordinate_derivative(chart.frame, x, a) for a in range(chart.dim)])

    def d_frame(a):
        return lambda y: chart.coordinate_derivative(chart.frame, y, a)

    second = np.stack(
        [np.stack([chart.coordinate_derivative(d_frame(b), x, a) for b in range(chart.dim)]) for a in range(chart.dim)]
    )
    return FrameData(frame=e, first=first, second=second)


@dataclass
class FrameConnection:
    omega: np.ndarray  # omega[k, i, j] = g(nabla_{e_k} e_i, e_j)
    backend: str
    fd_error: float = 0.0

    def antisymmetry_residual(self) -> float:
        return float(np.abs(self.omega + np.transpose(self.omega, (0, 2, 1))).max())


def frame_connection(backend: Backend, x=None) -> FrameConnection:
    if isinstance(backend, ChartPatch):
        x = backend._check_point(x)
    with fd_error_tracking() as est:
        conn = backend.connection(x)
    return FrameConnection(omega=conn, backend=backend.label, fd_error=est.value)


def torsion_residual(backend: Backend, x=None) -> float:
    """max |nabla_i e_j - nabla_j e_i - [e_i, e_j]| in frame components."""
    conn = backend.connection(x)
    c = backend.structure(x)
    return float(np.abs(conn - np.transpose(conn, (1, 0, 2)) - c).max())


def christoffel_symbols(chart: ChartPatch, x) -> np.ndarray:
    """Coordinate Christoffel symbols gamma[b, a, c] = Gamma^b_{ac} from metric derivatives."""
    g = chart.metric(x)
    dg = np.stack([chart.coordinate_derivative(chart.metric, x, a) for a in range(chart.dim)])
    ginv = np.linalg.inv(g)
    # lowered: Gamma_{d a c} = 1/2 (d_a g_dc + d_c g_da - d_d g_ac)
    low = 0.5 * (np.einsum("adc->dac", dg) + np.einsum("cda->dac", dg) - dg)
    return np.einsum("bd,dac->bac", ginv, low)


def connection_via_christoffel(chart: ChartPatch, x) -> np.ndarray:
    """Frame connection from coordinate Christoffels; independent of the Koszul route."""
    x = np.asarray(x, dtype=float)
    e = chart.frame(x)
    gam = christoffel_symbols(chart, x)
    de = np.stack([chart.coordinate_derivative(chart.frame, x, a) for a in range(chart.dim)])
    # nabla_{e_i} e_j = E_ai (d_a E_bj + Gamma^b_ac E_cj) d_b
    vec = np.einsum("ai,abj->ijb", e, de) + np.einsum("ai,bac,cj->ijb", e, gam, e)
    return np.einsum("kb,ijb->ijk", np.linalg.inv(e), vec)


@dataclass
class CurvatureData:
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float
    at_point: np.ndarray | None
    fd_error: float = 0.0


def riemann_tensor(backend: Backend, x=None) -> np.ndarray:
    conn = backend.connection(x)
    c = backend.structure(x)
    if backend.exact:
        dconn = np.zeros((backend.dim,) + conn.shape)
    else:
        dconn = np.stack([backend.derivative(backend.connection, x, i) for i in range(backend.dim)])
    # standard-sign R(e_i, e_j) e_k, component along e_p
    rstd = (
        dconn
        - np.transpose(dconn, (1, 0, 2, 3))
        + np.einsum("jkm,imp->ijkp", conn, conn)
        - np.einsum("ikm,jmp->ijkp", conn, conn)
        - np.einsum("ijm,mkp->ijkp", c, conn)
    )
    return -rstd


def curvature(backend: Backend, x=None) -> CurvatureData:
    if isinstance(backend, ChartPatch):
        x = backend._check_point(x)
    with fd_error_tracking() as est:
        riem = riemann_tensor(backend, x)
    ric = np.einsum("ijil->jl", riem)
    return CurvatureData(
        riemann=riem, ricci=ric, scalar=float(np.trace(ric)), at_point=None if x is None else np.array(x), fd_error=est.value
    )


def constant_curvature_tensor(n: int, kappa: float) -> np.ndarray:
    d = np.eye(n)
    return kappa * (np.einsum("ik,jl->ijkl", d, d) - np.einsum("il,jk->ijkl", d, d))


def riemann_symmetry_residual(riem) -> float:
    return float(
        max(
            np.abs(riem + np.transpose(riem, (1, 0, 2, 3))).max(),
            np.abs(riem + np.transpose(riem, (0, 1, 3, 2))).max(),
            np.abs(riem - np.transpose(riem, (2, 3, 0, 1))).max(),
        )
    )


def bianchi_residual(riem) -> float:
    """First Bianchi identity R_ijkl + R_jkil + R_kijl = 0."""
    cyc = riem + np.transpose(riem, (2, 0, 1, 3)) + np.transpose(riem, (1, 2, 0, 3))
    return float(np.abs(cyc).max())


def verify_einstein(backend: Backend, points, k: float):
    """Max over points of ||Ric - k g|| (frame components), with the FD error estimate."""
    worst = 0.0
    with fd_error_tracking() as est:
        for x in points:
            ric = curvature(backend, x).ricci
            worst = max(worst, float(np.abs(ric - k * np.eye(backend.dim)).max()))
    return worst, est.value


# --- catalog constructors -------------------------------------------------


def euclidean(n: int, half_width: float = 1.0) -> ChartPatch:
    return ChartPatch(
        dim=n,
        lower=-half_width * np.ones(n),
        upper=half_width * np.ones(n),
        metric=lambda x: np.eye(len(x)),
        label=f"R{n}",
    )


def round_sphere(n: int, radius: float = 1.0, half_width: float = 1.0) -> ChartPatch:
    """Stereographic chart of the round n-sphere, g = 4 r^2 / (1 + |x|^2)^2 dx^2."""

    def metric(x):
        return (2 * radius / (1 + x @ x)) ** 2 * np.eye(len(x))

    return ChartPatch(
        dim=n,
        lower=-half_width * np.ones(n),
        upper=half_width * np.ones(n),
        metric=metric,
        label=f"S{n}(r={radius:g})",
    )


def warped_flat(fiber_dim: int, nu: float, half_width: float = 1.0) -> ChartPatch:
    """e^{-4 nu t} dx^2 + dt^2 on R^{fiber_dim} x R, coordinates (x_1, ..., x_m, t)."""
    if fiber_dim < 1 or nu <= 0:
        raise ValueError("warped product needs fiber_dim >= 1 and nu > 0")
    n = fiber_dim + 1

    def metric(x):
        g = np.exp(-4 * nu * x[-1]) * np.eye(n)
        g[-1, -1] = 1.0
        return g

    return ChartPatch(
        dim=n,
        lower=-half_width * np.ones(n),
        upper=half_width * np.ones(n),
        metric=metric,
        label=f"warped(m={fiber_dim},nu={nu:g})",
    )


def su2(radius: float = 1.0) -> HomogeneousFrame:
    """SU(2) = S^3 of the given radius: [e_i, e_j] = (2 / r) eps_ijk e_k."""
    return HomogeneousFrame(
        structure_constants=2.0 / radius * levi_civita3(),
        label=f"S3-homogeneous(r={radius:g})",
        volume=2 * np.pi**2 * radius**3,
    )


def abelian(n: int) -> HomogeneousFrame:
    return HomogeneousFrame(structure_constants=np.zeros((n, n, n)), label=f"flat-torus{n}")
