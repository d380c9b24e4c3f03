"""Complex Clifford algebra representations with the convention e.e = -|e|^2.

Generators are built by recursive doubling (Jordan-Wigner style tensor
products of Pauli matrices), so every entry lies in {0, +-1, +-i} and the
defining relations hold up to rounding only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

MAX_DIM = 12

_I2 = np.eye(2, dtype=complex)
_S1 = np.array([[0, 1], [1, 0]], dtype=complex)
_S2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
_S3 = np.array([[1, 0], [0, -1]], dtype=complex)


def _kron_all(mats):
    return reduce(np.kron, mats, np.eye(1, dtype=complex))


@dataclass(frozen=True)
class CliffordRep:
    """Irreducible complex representation of Cl(n) on C^N, N = 2^(n // 2)."""

    dim: int
    gammas: tuple = field(repr=False)

    @property
    def spinor_dim(self) -> int:
        return self.gammas[0].shape[0]

    @classmethod
    def from_gammas(cls, gammas, atol: float = 1e-12) -> "CliffordRep":
        """Wrap explicit generator matrices after checking the Clifford relations."""
        gammas = tuple(np.array(g, dtype=complex) for g in gammas)
        for g in gammas:
            g.setflags(write=False)
        rep = cls(dim=len(gammas), gammas=gammas)
        res = relation_residual(rep)
        if res > atol:
            raise ValueError(
                f"generators violate g_i g_j + g_j g_i = -2 delta_ij (residual {res:.3e}); "
                "the e.e = +|e|^2 convention is not supported"
            )
        return rep

    def vector(self, v) -> np.ndarray:
        """The matrix sum_i v_i gamma_i."""
        v = np.asarray(v)
        if v.shape != (self.dim,):
            raise ValueError(f"expected a vector of length {self.dim}, got shape {v.shape}")
        return np.tensordot(v, np.stack(self.gammas), axes=1)


def build_rep(n: int) -> CliffordRep:
    """Build the standard representation of Cl(n) (complexified), 1 <= n <= 12.

    For even n = 2m the generators are
    ``s3 x ... x s3 x (i s1 | i s2) x 1 x ... x 1``; for odd n one more
    generator proportional to ``i s3 x ... x s3`` is appended, with its sign
    fixed so that the normalized volume element acts as +1.
    """
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_DIM:
        raise ValueError(f"Clifford dimension must be an integer in [1, {MAX_DIM}], got {n!r}")
    m = n // 2
    gammas = []
    for j in range(m):
        left = [_S3] * j
        right = [_I2] * (m - j - 1)
        gammas.append(_kron_all(left + [1j * _S1] + right))
        gammas.append(_kron_all(left + [1j * _S2] + right))
    if n % 2:
        last = 1j * _kron_all([_S3] * m)
        gammas.append(last)
        # odd n: the volume element is central, so it is +-Id; pick +Id
        vol = _volume_matrix(gammas, n)
        if np.real(vol[0, 0]) < 0:
            gammas[-1] = -last
    return CliffordRep.from_gammas(gammas)


def relation_residual(rep: CliffordRep) -> float:
    """max_ij || g_i g_j + g_j g_i + 2 delta_ij Id ||."""
    eye = np.eye(rep.spinor_dim)
    worst = 0.0
    for i, gi in enumerate(rep.gammas):
        for j, gj in enumerate(rep.gammas):
            r = gi @ gj + gj @ gi + (2.0 * eye if i == j else 0.0)
            worst = max(worst, float(np.abs(r).max()))
    return worst


def unitarity_residual(rep: CliffordRep) -> float:
    """max_i of ||g_i^H + g_i|| and ||g_i^H g_i - Id||."""
    eye = np.eye(rep.spinor_dim)
    worst = 0.0
    for g in rep.gammas:
        worst = max(worst, float(np.abs(g.conj().T + g).max()), float(np.abs(g.conj().T @ g - eye).max()))
    return worst


def clifford_mult(rep: CliffordRep, v, s) -> np.ndarray:
    """Clifford product v . s = (sum_i v_i gamma_i) s."""
    s = np.asarray(s, dtype=complex)
    if s.shape[-1] != rep.spinor_dim:
        raise ValueError(f"spinor has length {s.shape[-1]}, representation needs {rep.spinor_dim}")
    return rep.vector(v) @ s


def sandwich_identity_check(rep: CliffordRep, s, i: int) -> float:
    """Residual of sum_l g_l g_i g_l s = (n - 2) g_i s."""
    if not 0 <= i < rep.dim:
        raise IndexError(f"generator index {i} out of range for dimension {rep.dim}")
    s = np.asarray(s, dtype=complex)
    if s.shape != (rep.spinor_dim,):
        raise ValueError("spinor dimension mismatch")
    gi = rep.gammas[i]
    lhs = sum(g @ (gi @ (g @ s)) for g in rep.gammas)
    return float(np.linalg.norm(lhs - (rep.dim - 2) * (gi @ s)))


@dataclass(frozen=True)
class VolumeElement:
    matrix: np.ndarray = field(repr=False)
    parity_exponent: int

    def projectors(self):
        """Eigenprojectors (P+, P-) onto the +1 and -1 eigenspaces."""
        eye = np.eye(self.matrix.shape[0])
        return 0.5 * (eye + self.matrix), 0.5 * (eye - self.matrix)

    def eigenbasis(self, sign: int = 1) -> np.ndarray:
        """Orthonormal basis (columns) of the +1 (sign=1) or -1 eigenspace."""
        p = self.projectors()[0 if sign > 0 else 1]
        u, svals, _ = np.linalg.svd(p)
        return u[:, svals > 0.5]


def _volume_matrix(gammas, n):
    k = (n + 1) // 2
    prod = reduce(np.matmul, gammas)
    return (1j ** k) * prod


def volume_element(rep: CliffordRep) -> VolumeElement:
    """Normalized complex volume element i^k g_1...g_n with k = (n + 1) // 2.

    This power of i makes the square the identity in every dimension; the
    exponent is stored so callers can convert to other normalizations.
    """
    k = (rep.dim + 1) // 2
    mat = _volume_matrix(rep.gammas, rep.dim)
    return VolumeElement(matrix=mat, parity_exponent=k)


@dataclass(frozen=True)
class HatIsomorphism:
    """Identification of the two inequivalent Cl(n) modules for odd n.

    For odd n the complexified Clifford algebra splits into two matrix
    blocks; the second module is the first composed with the parity
    automorphism, i.e. vectors act by ``-gamma_i``.  ``matrix`` is the
    intertwiner of the even parts (the spin representations), obtained by
    solving ``M g_i g_j = g_i g_j M`` and ``M g_i = -(-g_i) M``.
    """

    rep: CliffordRep
    matrix: np.ndarray = field(repr=False)

    @property
    def second_gammas(self):
        return tuple(-g for g in self.rep.gammas)

    def __call__(self, s) -> np.ndarray:
        return self.matrix @ np.asarray(s, dtype=complex)

    def anticommutation_residual(self) -> float:
        """max_i || hat(g_i s) + g'_i hat(s) || as operators, g'_i the second-module action."""
        return max(
            float(np.abs(self.matrix @ g + g2 @ self.matrix).max())
            for g, g2 in zip(self.rep.gammas, self.second_gammas)
        )

    def involution_residual(self) -> float:
        eye = np.eye(self.matrix.shape[0])
        return float(np.abs(self.matrix @ self.matrix - eye).max())


def hat_isomorphism(rep: CliffordRep) -> HatIsomorphism:
    """Solve for the spin-module isomorphism between the two Cl(n) blocks, n odd."""
    if rep.dim % 2 == 0:
        raise ValueError("the hat isomorphism exists only for odd n")
    nsp = rep.spinor_dim
    eye = np.eye(nsp)
    # vec(M A) = (A^T x I) vec(M),  vec(B M) = (I x B) vec(M)  (column-major).
    # The stacked system is tall, so work with its Gram matrix sum_i K_i^H K_i,
    # K_i = g_i^T x I + I x g'_i, expanded term by term.
    gram = np.zeros((nsp * nsp, nsp * nsp), dtype=complex)
    for g, g2 in zip(rep.gammas, (-g for g in rep.gammas)):
        gram += np.kron(g.conj() @ g.T, eye) + np.kron(eye, g2.conj().T @ g2)
        gram += np.kron(g.conj(), g2) + np.kron(g.T, g2.conj().T)
    evals, evecs = np.linalg.eigh(gram)
    null = evecs[:, evals < 1e-10].T
    if null.shape[0] != 1:
        raise RuntimeError(f"intertwiner space has dimension {null.shape[0]}, expected 1")
    m = null[0].reshape(nsp, nsp, order="F")
    # fix the scale and phase so that M^2 = Id with M[0, 0] real positive
    m = m / np.sqrt(np.trace(m @ m) / nsp)
    m = m * np.exp(-1j * np.angle(m[0, 0]))
    return HatIsomorphism(rep=rep, matrix=m)
