"""Quantum channels and Hermitian-preserving maps as superoperator matrices.

Column-stacking convention throughout: vec(X) stacks the columns of X, so
vec(A X B) = (B^T (x) A) vec(X). A map from a d_in-dimensional system to a
d_out-dimensional one is stored as the (d_out^2, d_in^2) matrix acting on
vec'ed inputs. The Choi matrix is indexed input-first:
J = sum_ij |i><j| (x) map(|i><j|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np
import numpy.linalg as npl

from .linalg import (
    DensityMatrix,
    dag,
    herm_defect,
    hermitianize,
    _as_square,
    _rng,
)

TP_TOL = 1e-9
CHOI_EIG_FLOOR = -1e-8
CHOI_MARGINAL_TOL = 1e-8
CHOI_HERM_TOL = 1e-10
UNITARY_TOL = 1e-9
KRAUS_COMPLETENESS_TOL = 1e-9
CIRCLE_TOL = 1e-12

# ==================================================================
# vec / unvec
# ==================================================================


def vec(x) -> np.ndarray:
    """Stack the columns of a matrix into one vector."""
    return np.asarray(x, dtype=complex).reshape(-1, order="F")


def unvec(v, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Inverse of vec; defaults to a square matrix."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    if rows is None:
        rows = math.isqrt(v.size)
        cols = rows
    if cols is None:
        cols = v.size // rows
    if rows * cols != v.size:
        raise ValueError(f"cannot reshape length {v.size} into ({rows}, {cols})")
    return v.reshape((rows, cols), order="F")


def _superop_dims(s: np.ndarray) -> tuple[int, int]:
    out2, in2 = s.shape
    d_out = math.isqrt(out2)
    d_in = math.isqrt(in2)
    if d_out * d_out != out2 or d_in * d_in != in2:
        raise ValueError(f"superoperator shape {s.shape} is not (square, square)")
    return d_in, d_out


def _choi_from_superop(s: np.ndarray, d_in: int, d_out: int) -> np.ndarray:
    # J[(k,i),(l,j)] = S[(j,i),(l,k)] under column stacking
    r = s.reshape(d_out, d_out, d_in, d_in)
    return r.transpose(3, 1, 2, 0).reshape(d_in * d_out, d_in * d_out)


class HermitianPreservingMap:
    """A linear map whose Choi matrix is Hermitian (within 1e-10)."""

    def __init__(self, superop) -> None:
        s = np.asarray(superop, dtype=complex)
        d_in, d_out = _superop_dims(s)
        j = _choi_from_superop(s, d_in, d_out)
        defect = herm_defect(j)
        if defect > CHOI_HERM_TOL:
            raise ValueError(f"Choi matrix departs from Hermitian by {defect:.3e}")
        self.in_dim: int = d_in
        self.out_dim: int = d_out
        self.superop: np.ndarray = s

    def __repr__(self) -> str:
        return f"{type(self).__name__}(in_dim={self.in_dim}, out_dim={self.out_dim})"


class Channel(HermitianPreservingMap):
    """A completely positive trace-preserving map.

    Construction checks trace preservation, positivity of the Choi matrix
    down to an eigenvalue floor of -1e-8, and the Choi marginal condition
    (partial trace over the output equals the input identity).
    """

    def __init__(self, superop) -> None:
        super().__init__(superop)
        s = self.superop
        d_in, d_out = self.in_dim, self.out_dim
        tp = dag(s) @ vec(np.eye(d_out)) - vec(np.eye(d_in))
        if np.max(np.abs(tp)) > TP_TOL:
            raise ValueError(f"map is not trace preserving, defect {np.max(np.abs(tp)):.3e}")
        j = _choi_from_superop(s, d_in, d_out)
        lo = float(npl.eigvalsh(hermitianize(j))[0])
        if lo < CHOI_EIG_FLOOR:
            raise ValueError(f"Choi matrix has eigenvalue {lo:.3e} below {CHOI_EIG_FLOOR}")
        from .linalg import partial_trace

        marg = partial_trace(j, [d_in, d_out], keep=[0])
        if np.max(np.abs(marg - np.eye(d_in))) > CHOI_MARGINAL_TOL:
            raise ValueError("Choi marginal over the output is not the identity")


@dataclass(frozen=True)
class DiamondEstimate:
    """Result of a diamond-norm computation.

    value is exact for kind 'exact_unitary_pair' and a certified lower bound
    for kind 'ascent_lower_bound'.
    """

    value: float
    kind: str
    restarts_used: int
    converged: bool


# ==================================================================
# constructors
# ==================================================================


def identity_channel(d: int) -> Channel:
    return Channel(np.eye(d * d, dtype=complex))


def channel_from_unitary(u) -> Channel:
    """Conjugation rho -> U rho U^dag."""
    m = _as_square(u, "unitary")
    if np.max(np.abs(dag(m) @ m - np.eye(m.shape[0]))) > UNITARY_TOL:
        raise ValueError("matrix is not unitary within 1e-9")
    return Channel(np.kron(m.conj(), m))


def channel_from_kraus(ks) -> Channel:
    """Channel sum_k K rho K^dag from a complete Kraus family."""
    ks = [np.asarray(k, dtype=complex) for k in ks]
    if not ks:
        raise ValueError("empty Kraus family")
    shape = ks[0].shape
    if any(k.shape != shape for k in ks):
        raise ValueError("Kraus operators must share one shape")
    comp = sum(dag(k) @ k for k in ks)
    if np.max(np.abs(comp - np.eye(shape[1]))) > KRAUS_COMPLETENESS_TOL:
        raise ValueError("Kraus family is not complete within 1e-9")
    s = sum(np.kron(k.conj(), k) for k in ks)
    return Channel(s)


def append_state_channel(state, d_sys: int) -> Channel:
    """Channel rho -> rho (x) state, appending a fixed fresh register.

    state may be a unit vector (pure) or a density matrix (mixed).
    """
    st = np.asarray(state, dtype=complex)
    eye = np.eye(d_sys)
    if st.ndim == 1:
        if abs(npl.norm(st) - 1.0) > 1e-12:
            raise ValueError("appended pure state must be normalized")
        return channel_from_kraus([np.kron(eye, st.reshape(-1, 1))])
    rho = DensityMatrix(st)
    w, v = npl.eigh(hermitianize(rho.matrix))
    ks = [
        math.sqrt(wk) * np.kron(eye, v[:, k].reshape(-1, 1))
        for k, wk in enumerate(w)
        if wk > 0.0
    ]
    return channel_from_kraus(ks)


def trace_out_channel(dims, keep) -> Channel:
    """Partial trace over the factors not in keep, as a channel."""
    dims = [int(d) for d in dims]
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"keep {keep} out of range for {len(dims)} factors")
    traced = [i for i in range(len(dims)) if i not in keep]
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    d_total = int(np.prod(dims))
    ks = []
    for jdx in np.ndindex(*(dims[i] for i in traced)):
        k = np.zeros((d_keep, d_total), dtype=complex)
        for kdx in np.ndindex(*(dims[i] for i in keep)):
            full = [0] * len(dims)
            for pos, i in enumerate(keep):
                full[i] = kdx[pos]
            for pos, i in enumerate(traced):
                full[i] = jdx[pos]
            row = int(np.ravel_multi_index(kdx, [dims[i] for i in keep])) if keep else 0
            col = int(np.ravel_multi_index(full, dims))
            k[row, col] = 1.0
        ks.append(k)
    return channel_from_kraus(ks)


# ==================================================================
# combinators
# ==================================================================


def apply(c: HermitianPreservingMap, rho):
    """Apply a map to a state; DensityMatrix in gives DensityMatrix out."""
    x = rho.matrix if isinstance(rho, DensityMatrix) else _as_square(rho, "input")
    if x.shape != (c.in_dim, c.in_dim):
        raise ValueError(f"input shape {x.shape} does not match in_dim {c.in_dim}")
    out = unvec(c.superop @ vec(x), c.out_dim, c.out_dim)
    if isinstance(rho, DensityMatrix):
        return DensityMatrix(out)
    return out


def compose(after: Channel, first: Channel) -> Channel:
    """The channel 'after' applied to the output of 'first'."""
    if after.in_dim != first.out_dim:
        raise ValueError("channel dimensions do not chain")
    return Channel(after.superop @ first.superop)


def power(c: Channel, n: int) -> Channel:
    """n-fold self-composition of an endomorphic channel."""
    if c.in_dim != c.out_dim:
        raise ValueError("only endomorphic channels can be powered")
    if n < 0 or n != int(n):
        raise ValueError("power must be a nonnegative integer")
    return Channel(npl.matrix_power(c.superop, int(n)))


def tensor(a: Channel, b: Channel) -> Channel:
    """Tensor product channel, a on the left factor."""
    ta = a.superop.reshape(a.out_dim, a.out_dim, a.in_dim, a.in_dim)
    tb = b.superop.reshape(b.out_dim, b.out_dim, b.in_dim, b.in_dim)
    e = np.einsum("JILK,jilk->JjIiLlKk", ta, tb)
    d_out = a.out_dim * b.out_dim
    d_in = a.in_dim * b.in_dim
    return Channel(e.reshape(d_out * d_out, d_in * d_in))


def extend_with_reference(c: Channel, ref_dim: int) -> Channel:
    """id_ref (x) c, with the untouched reference on the left factor."""
    return tensor(identity_channel(ref_dim), c)


def difference(a: HermitianPreservingMap, b: HermitianPreservingMap) -> HermitianPreservingMap:
    """The Hermitian-preserving map a - b."""
    if (a.in_dim, a.out_dim) != (b.in_dim, b.out_dim):
        raise ValueError("maps must share dimensions")
    return HermitianPreservingMap(a.superop - b.superop)


def choi(c: HermitianPreservingMap) -> np.ndarray:
    """Choi matrix sum_ij |i><j| (x) map(|i><j|), input factor first."""
    return _choi_from_superop(c.superop, c.in_dim, c.out_dim)


# ==================================================================
# diamond-norm machinery
# ==================================================================


def _apply_extended(superop: np.ndarray, x: np.ndarray, ref_dim: int, d_in: int, d_out: int) -> np.ndarray:
    """(id_ref (x) map)(x) without materializing the extended superoperator."""
    r = ref_dim
    x4 = x.reshape(r, d_in, r, d_in)
    # columns indexed by the map's input pair, rows by the reference pair
    z = x4.transpose(3, 1, 0, 2).reshape(d_in * d_in, r * r)
    w = superop @ z
    return w.reshape(d_out, d_out, r, r).transpose(2, 1, 3, 0).reshape(r * d_out, r * d_out)


def diamond_lower_ascent(
    m: HermitianPreservingMap,
    restarts: int = 32,
    tol: float = 1e-10,
    seed=0,
    max_iters: int = 500,
) -> DiamondEstimate:
    """Certified lower bound on half the diamond norm of an endomorphic map.

    Maximizes f(psi) = (1/2) || (id (x) m)(|psi><psi|) ||_1 over pure inputs
    on a reference of the same dimension, by alternating ascent: the trace
    norm's optimal observable sgn(H(psi)) is frozen, then psi is reoptimized
    as the top eigenvector of the Hermitian part of (id (x) m^adj)(sgn(H)).
    Each half-step is an exact argmax, so the objective never decreases, and
    every iterate is a feasible input: the best value seen is a true lower
    bound regardless of convergence.
    """
    if m.in_dim != m.out_dim:
        raise ValueError("ascent needs an endomorphic map")
    if restarts < 1:
        raise ValueError("restarts must be positive")
    d = m.in_dim
    s = m.superop
    sadj = dag(s)
    rng = _rng(seed)
    best = -1.0
    best_converged = False
    for _ in range(restarts):
        psi = rng.standard_normal(d * d) + 1j * rng.standard_normal(d * d)
        psi /= npl.norm(psi)
        prev = -np.inf
        converged = False
        restart_best = 0.0
        for _ in range(max_iters):
            h = hermitianize(_apply_extended(s, np.outer(psi, psi.conj()), d, d, d))
            w, v = npl.eigh(h)
            obj = 0.5 * float(np.sum(np.abs(w)))
            restart_best = max(restart_best, obj)
            if obj - prev < tol:
                converged = True
                break
            prev = obj
            wsgn = (v * np.sign(w)) @ dag(v)
            a = hermitianize(_apply_extended(sadj, wsgn, d, d, d))
            _, avec = npl.eigh(a)
            psi = avec[:, -1]
        if restart_best > best:
            best = restart_best
            best_converged = converged
    return DiamondEstimate(
        value=max(best, 0.0),
        kind="ascent_lower_bound",
        restarts_used=restarts,
        converged=best_converged,
    )


def hull_min_distance(points) -> float:
    """Distance from the origin to the convex hull of points on the unit circle.

    Zero when the points' angular spread reaches pi (the hull then contains
    the origin); otherwise the nearest hull point lies on the chord closing
    the arc, at distance cos(spread / 2).
    """
    pts = np.asarray(points, dtype=complex).reshape(-1)
    if pts.size == 0:
        raise ValueError("need at least one point")
    if np.max(np.abs(np.abs(pts) - 1.0)) > CIRCLE_TOL:
        raise ValueError("points must lie on the unit circle within 1e-12")
    ang = np.sort(np.angle(pts))
    wrap = ang[0] + 2.0 * np.pi - ang[-1]
    max_gap = wrap if ang.size == 1 else max(float(np.max(np.diff(ang))), wrap)
    spread = 2.0 * np.pi - max_gap
    if spread >= np.pi:
        return 0.0
    return float(np.cos(spread / 2.0))


def _product_phase_points(phases: np.ndarray, m: int) -> np.ndarray:
    d = phases.size
    if d == 2:
        k = np.arange(m + 1)
        sums = k * phases[0] + (m - k) * phases[1]
        return np.exp(1j * sums)
    if math.comb(d + m - 1, m) > 2_000_000:
        raise ValueError("tensor power m too large to enumerate eigenphase sums")
    sums = [sum(c) for c in combinations_with_replacement(phases, m)]
    return np.exp(1j * np.asarray(sums))


def unitary_pair_diamond(u, v, m: int = 1) -> DiamondEstimate:
    """Exact half diamond distance between the m-fold tensor powers of two
    unitary conjugations, sqrt(1 - dist^2) with dist the distance from the
    origin to the hull of e^{i (sum of m eigenphases of v^dag u)}."""
    um = _as_square(u, "unitary")
    vm = _as_square(v, "unitary")
    if um.shape != vm.shape:
        raise ValueError("unitaries must share a dimension")
    for name, w in (("u", um), ("v", vm)):
        if np.max(np.abs(dag(w) @ w - np.eye(w.shape[0]))) > UNITARY_TOL:
            raise ValueError(f"{name} is not unitary within 1e-9")
    if m < 1 or m != int(m):
        raise ValueError("tensor power m must be a positive integer")
    phases = np.angle(npl.eigvals(dag(vm) @ um))
    dist = hull_min_distance(_product_phase_points(phases, int(m)))
    val = math.sqrt(max(0.0, 1.0 - dist * dist))
    return DiamondEstimate(value=val, kind="exact_unitary_pair", restarts_used=0, converged=True)
