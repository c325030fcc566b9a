"""Eigenvalue readout for a qubit program state via controlled evolution.

Making the partial-swap program state |1><1| (x) rho turns the step into a
controlled-e^{-i rho t}: control |0> sees the identity, control |1> kicks
back the phase. A register of T control qubits run at doubling times
t_j = 2 pi 2^{j-1} followed by a discrete Fourier readout concentrates on
the binary expansion of each eigenvalue of rho, with weight equal to that
same eigenvalue.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import numpy.linalg as npl

from . import dme
from .channels import Channel
from .linalg import DensityMatrix, dag, herm_exp, hermitian_eig, _rng

STEP_BOUND_COEFF = 1.5 + 4.0 / math.pi**2
_HYP_FUZZ = 1e-12


@dataclass(frozen=True)
class ControlQubit:
    """Bloch vector (x, y, z) of the control qubit, inside the unit ball."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        r2 = self.x * self.x + self.y * self.y + self.z * self.z
        if r2 > 1.0 + 1e-12:
            raise ValueError(f"Bloch vector has norm {math.sqrt(r2)} > 1")

    def matrix(self) -> np.ndarray:
        return 0.5 * np.array(
            [[1.0 + self.z, self.x - 1j * self.y], [self.x + 1j * self.y, 1.0 - self.z]]
        )


@dataclass(frozen=True)
class QpcaInstance:
    """A qubit program state rho read out with T register qubits, each
    controlled evolution realized by m partial-swap steps."""

    rho: DensityMatrix
    T: int
    m: int
    eigenvalues: np.ndarray = field(init=False, repr=False)
    eigenvectors: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.rho.dim != 2:
            raise ValueError("program state must be a qubit")
        if self.T != int(self.T) or not 1 <= self.T <= 6:
            raise ValueError(f"register size must lie in 1..6, got {self.T}")
        if self.m != int(self.m) or self.m < 1:
            raise ValueError("steps per application must be a positive integer")
        eig = hermitian_eig(self.rho.matrix)
        resid = np.max(
            np.abs(self.rho.matrix @ eig.eigenvectors - eig.eigenvectors * eig.eigenvalues)
        )
        if resid > 1e-10:
            raise AssertionError(f"spectral residual {resid:.3e}")
        object.__setattr__(self, "eigenvalues", eig.eigenvalues)
        object.__setattr__(self, "eigenvectors", eig.eigenvectors)


def controlled_program(rho: DensityMatrix) -> DensityMatrix:
    """The two-qubit program state |1><1| (x) rho."""
    return DensityMatrix(np.kron(np.diag([0.0, 1.0]), rho.matrix))


def controlled_dme_step(rho: DensityMatrix, delta: float) -> Channel:
    """One partial-swap step with program |1><1| (x) rho; 0 <= delta < 1."""
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"step length must satisfy 0 <= delta < 1, got {delta}")
    return Channel(dme.step_superop(controlled_program(rho).matrix, delta))


def _controlled_step_kraus(rho: DensityMatrix, delta: float) -> list[np.ndarray]:
    # the register schedule drives delta up to pi/2, past the public guard
    if not 0.0 <= delta <= math.pi / 2.0 + _HYP_FUZZ:
        raise ValueError(f"register schedule uses 0 <= delta <= pi/2, got {delta}")
    return dme.dme_step_kraus(controlled_program(rho), delta)


def controlled_dme_closed_form(
    gamma: ControlQubit, r: float, t: float, n: int
) -> DensityMatrix:
    """Exact output of n controlled steps on gamma (x) chi for an eigenstate
    chi of rho with eigenvalue r, written in the basis where chi = |0>.

    The coherence picks up cos^n(t/n)(cos(t/n) + i r sin(t/n))^n, the
    population leaks to |1><1| (x) diag(r, 1-r) at rate 1 - cos^{2n}(t/n).
    """
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"eigenvalue must lie in [0, 1], got {r}")
    if t < 0:
        raise ValueError("time must be nonnegative")
    if n != int(n) or n < 1:
        raise ValueError("step count must be a positive integer")
    if not n > t:
        raise ValueError(f"closed form is stated for n > t, got n={n}, t={t}")
    delta = t / n
    c = math.cos(delta)
    c2n = c ** (2 * n)
    coherence = (c * (c + 1j * r * math.sin(delta))) ** n
    off = (gamma.x - 1j * gamma.y) * coherence
    block = 0.5 * np.array(
        [[c2n * (1.0 + gamma.z), off], [np.conj(off), c2n * (1.0 - gamma.z)]]
    )
    chi = np.diag([1.0, 0.0]).astype(complex)
    rho_in_chi_basis = np.diag([r, 1.0 - r]).astype(complex)
    out = np.kron(block, chi) + (1.0 - c2n) * np.kron(np.diag([0.0, 1.0]), rho_in_chi_basis)
    return DensityMatrix(out)


def qpca_step_error(r: float, t: float, n: int) -> float:
    """Exact trace distance between n controlled steps and the ideal
    controlled phase on the worst coherent control |+>, for an eigenstate
    of eigenvalue r; stated for n >= 2t/pi."""
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"eigenvalue must lie in [0, 1], got {r}")
    if t < 0:
        raise ValueError("time must be nonnegative")
    if n != int(n) or n < 1:
        raise ValueError("step count must be a positive integer")
    if n < 2.0 * t / math.pi - _HYP_FUZZ:
        raise ValueError(f"error form is stated for n >= 2t/pi = {2 * t / math.pi}, got n={n}")
    delta = t / n
    c = math.cos(delta)
    c2n = c ** (2 * n)
    coherence_gap = (c * (c + 1j * r * math.sin(delta))) ** n - np.exp(1j * r * t)
    b = 0.5 * np.array(
        [
            [c2n - 1.0, coherence_gap],
            [np.conj(coherence_gap), (1.0 - 2.0 * r) * (c2n - 1.0)],
        ]
    )
    w = npl.eigvalsh(b)
    return 0.5 * float(np.sum(np.abs(w))) + 0.5 * (1.0 - r) * (1.0 - c2n)


def qpca_step_bound(t: float, n: int) -> float:
    """Step-error bound (3/2 + 4/pi^2) t^2 / n, valid for n >= 2t/pi."""
    if t < 0:
        raise ValueError("time must be nonnegative")
    if n != int(n) or n < 1:
        raise ValueError("step count must be a positive integer")
    if n < 2.0 * t / math.pi - _HYP_FUZZ:
        raise ValueError(f"bound needs n >= 2t/pi = {2 * t / math.pi}, got n={n}")
    return STEP_BOUND_COEFF * t * t / n


def qpca_total_bound(t: float, n: int) -> float:
    """Whole-schedule error bound (2/3)(t (t + 4 pi) / n) log2(t), t > 1."""
    if t <= 1.0:
        raise ValueError(f"total bound needs t > 1, got {t}")
    if n != int(n) or n < 1:
        raise ValueError("step count must be a positive integer")
    return (2.0 / 3.0) * (t * (t + 4.0 * math.pi) / n) * math.log2(t)


def qpca_schedule_error(rho: DensityMatrix, T: int, m: int) -> float:
    """Eigenvalue-weighted exact error summed over the doubling schedule:
    sum_i r_i sum_j step_error(r_i, 2 pi 2^{j-1}, m)."""
    if T != int(T) or not 1 <= T <= 6:
        raise ValueError(f"register size must lie in 1..6, got {T}")
    t_last = 2.0 * math.pi * 2 ** (T - 1)
    if m < 2.0 * t_last / math.pi - _HYP_FUZZ:
        raise ValueError(f"schedule needs m >= 2 t_T / pi = {2 * t_last / math.pi}, got m={m}")
    eig = hermitian_eig(rho.matrix)
    total = 0.0
    for r in eig.eigenvalues:
        r = float(min(max(r, 0.0), 1.0))
        for j in range(1, T + 1):
            total += r * qpca_step_error(r, 2.0 * math.pi * 2 ** (j - 1), m)
    return total


def _apply_pair_kraus(state: np.ndarray, ks: list[np.ndarray], pa: int, pb: int, nax: int) -> np.ndarray:
    """sum_K (K on axes pa,pb) state (K^dag on the matching column axes)."""
    out = np.zeros_like(state)
    for k in ks:
        k4 = k.reshape(2, 2, 2, 2)
        tmp = np.tensordot(k4, state, axes=([2, 3], [pa, pb]))
        tmp = np.moveaxis(tmp, [0, 1], [pa, pb])
        tmp = np.tensordot(tmp, k4.conj(), axes=([nax + pa, nax + pb], [2, 3]))
        tmp = np.moveaxis(tmp, [-2, -1], [nax + pa, nax + pb])
        out = out + tmp
    return out


def qpca_distribution(inst: QpcaInstance, ideal: bool = False) -> np.ndarray:
    """Exact readout distribution over the 2^T register outcomes.

    ideal=True replaces each block of m partial-swap steps by the exact
    controlled unitary.
    """
    T, m = inst.T, inst.m
    big = 2**T
    nax = T + 1
    reg = np.full(big, big**-0.5, dtype=complex)
    state = np.kron(np.outer(reg, reg.conj()), inst.rho.matrix)
    state = state.reshape((2,) * (2 * nax))
    for j in range(1, T + 1):
        tj = 2.0 * math.pi * 2 ** (j - 1)
        axis = T - j
        if ideal:
            u = herm_exp(inst.rho.matrix, -1j * tj)
            cu = np.block(
                [[np.eye(2, dtype=complex), np.zeros((2, 2))], [np.zeros((2, 2)), u]]
            )
            state = _apply_pair_kraus(state, [cu], axis, T, nax)
        else:
            ks = _controlled_step_kraus(inst.rho, tj / m)
            for _ in range(m):
                state = _apply_pair_kraus(state, ks, axis, T, nax)
    state = state.reshape(2 * big, 2 * big)
    y = np.arange(big)
    fourier = np.exp(2j * np.pi * np.outer(y, y) / big) / math.sqrt(big)
    full = np.kron(fourier, np.eye(2))
    state = full @ state @ dag(full)
    probs = np.real(np.diagonal(state)).reshape(big, 2).sum(axis=1)
    probs = np.clip(probs, 0.0, None)
    total = probs.sum()
    if abs(total - 1.0) > 1e-9:
        raise AssertionError(f"readout probabilities sum to {total}")
    return probs / total


def run_qpca(inst: QpcaInstance, shots: int = 4096, seed=0, ideal: bool = False) -> dict[str, int]:
    """Sample the readout distribution; keys are register outcomes as T-bit
    strings (most significant qubit first), values are counts."""
    if shots < 1 or shots != int(shots):
        raise ValueError("shots must be a positive integer")
    probs = qpca_distribution(inst, ideal=ideal)
    rng = _rng(seed)
    counts = rng.multinomial(int(shots), probs)
    width = inst.T
    return {format(y, f"0{width}b"): int(c) for y, c in enumerate(counts) if c > 0}
