"""Dense complex linear algebra for small quantum systems.

Operators are plain complex numpy arrays; states get thin validated wrappers
(DensityMatrix, PureState). Hermiticity and unit trace are enforced to 1e-12,
and eigenvalues may dip to -1e-10 before a state is rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import numpy.linalg as npl
import scipy.linalg

HERM_TOL = 1e-12
TRACE_TOL = 1e-12
EIG_FLOOR = -1e-10
EIG_RESIDUAL_TOL = 1e-10


def dag(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conjugate(np.transpose(a))


def hermitianize(a: np.ndarray) -> np.ndarray:
    """Project onto the Hermitian part, (A + A^dag) / 2."""
    return (a + dag(a)) / 2


def herm_defect(a: np.ndarray) -> float:
    """Largest entrywise deviation from A = A^dag."""
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - dag(a))))


def _as_square(a, name: str = "matrix") -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    return m


class DensityMatrix:
    """A validated quantum state: Hermitian, unit trace, positive semidefinite."""

    def __init__(self, matrix) -> None:
        m = _as_square(matrix, "density matrix")
        defect = herm_defect(m)
        if defect > HERM_TOL:
            raise ValueError(f"density matrix departs from Hermitian by {defect:.3e}")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace {tr} is not 1 within {TRACE_TOL}")
        lo = float(npl.eigvalsh(hermitianize(m))[0])
        if lo < EIG_FLOOR:
            raise ValueError(f"density matrix has eigenvalue {lo:.3e} below {EIG_FLOOR}")
        self.dim: int = m.shape[0]
        self.matrix: np.ndarray = m

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim})"


class PureState:
    """A validated unit-norm state vector."""

    def __init__(self, amplitudes) -> None:
        v = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if v.size == 0:
            raise ValueError("state vector is empty")
        norm = float(npl.norm(v))
        if abs(norm - 1.0) > HERM_TOL:
            raise ValueError(f"state vector norm {norm} is not 1 within {HERM_TOL}")
        self.dim: int = v.size
        self.amplitudes: np.ndarray = v

    def projector(self) -> DensityMatrix:
        """Rank-one density matrix |v><v|."""
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def __repr__(self) -> str:
        return f"PureState(dim={self.dim})"


@dataclass(frozen=True)
class HermitianEig:
    """Ascending real eigenvalues and the matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermitian_eig(a, tol: float = HERM_TOL) -> HermitianEig:
    """Spectral decomposition of a Hermitian matrix, eigenvalues ascending."""
    m = _as_square(a)
    defect = herm_defect(m)
    if defect > tol:
        raise ValueError(f"matrix departs from Hermitian by {defect:.3e}")
    w, v = npl.eigh(hermitianize(m))
    return HermitianEig(eigenvalues=w, eigenvectors=v)


def kron(a, b) -> np.ndarray:
    """Kronecker product with the left factor on the slow index."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(m, dims, keep) -> np.ndarray:
    """Trace out every tensor factor not listed in keep, preserving factor order.

    dims lists the factor dimensions of the square matrix m; keep is an
    iterable of factor positions (0-based) to retain.
    """
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    mat = _as_square(m)
    if mat.shape != (total, total):
        raise ValueError(f"matrix shape {mat.shape} does not match dims {dims}")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"keep {keep} out of range for {len(dims)} factors")
    n = len(dims)
    t = mat.reshape(dims + dims)
    row = list(range(n))
    # traced factors share one index between row and column sides
    col = [n + i if i in keep else i for i in range(n)]
    out = [i for i in keep] + [n + i for i in keep]
    kept_dim = int(np.prod([dims[i] for i in keep])) if keep else 1
    return np.einsum(t, row + col, out).reshape(kept_dim, kept_dim)


def swap_operator(d: int) -> np.ndarray:
    """The d^2 x d^2 unitary sending x (x) y to y (x) x."""
    if d < 1:
        raise ValueError("dimension must be positive")
    s = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            s[i * d + j, j * d + i] = 1.0
    return s


def matrix_exp(a) -> np.ndarray:
    """Matrix exponential of a square complex matrix."""
    return scipy.linalg.expm(_as_square(a))


def herm_exp(h, factor: complex = 1.0) -> np.ndarray:
    """exp(factor * H) for Hermitian H, via the spectral decomposition."""
    eig = hermitian_eig(h)
    v = eig.eigenvectors
    return (v * np.exp(factor * eig.eigenvalues)) @ dag(v)


def trace_norm(a) -> float:
    """Sum of singular values; for Hermitian input, the sum of |eigenvalues|."""
    m = _as_square(a)
    if herm_defect(m) <= HERM_TOL:
        w = npl.eigvalsh(hermitianize(m))
        return float(np.sum(np.abs(w)))
    return float(np.sum(npl.svd(m, compute_uv=False)))


def _state_matrix(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    if isinstance(rho, PureState):
        return rho.projector().matrix
    return _as_square(rho, "state")


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of the difference, clamped to [0, 1]."""
    a = _state_matrix(rho)
    b = _state_matrix(sigma)
    if a.shape != b.shape:
        raise ValueError(f"state shapes differ: {a.shape} vs {b.shape}")
    return float(min(max(0.5 * trace_norm(a - b), 0.0), 1.0))


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = npl.eigh(hermitianize(m))
    w = np.maximum(w, 0.0)
    return (v * np.sqrt(w)) @ dag(v)


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ||sqrt(rho) sqrt(sigma)||_1^2, clamped to [0, 1]."""
    a = _state_matrix(rho)
    b = _state_matrix(sigma)
    if a.shape != b.shape:
        raise ValueError(f"state shapes differ: {a.shape} vs {b.shape}")
    f = trace_norm(_psd_sqrt(a) @ _psd_sqrt(b)) ** 2
    return float(min(max(f, 0.0), 1.0))


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def complex_ginibre(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Matrix of iid standard complex Gaussians."""
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / math.sqrt(2.0)


def random_density(d: int, seed=0) -> DensityMatrix:
    """Full-rank-almost-surely random state G G^dag / tr, G complex Gaussian."""
    rng = _rng(seed)
    g = complex_ginibre(d, d, rng)
    m = g @ dag(g)
    return DensityMatrix(m / np.trace(m))


def random_pure(d: int, seed=0) -> PureState:
    """Haar-random unit vector."""
    rng = _rng(seed)
    v = complex_ginibre(d, 1, rng).reshape(-1)
    return PureState(v / npl.norm(v))


def random_unitary(d: int, seed=0) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    rng = _rng(seed)
    q, r = npl.qr(complex_ginibre(d, d, rng))
    ph = np.diag(r).copy()
    ph /= np.abs(ph)
    return q * ph
