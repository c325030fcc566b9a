"""Hamiltonian simulation from copies of a program state.

The target unitary is rho -> e^{-i sigma t} rho e^{i sigma t} where the
Hamiltonian is itself a density matrix sigma. One step of length delta
couples the system to a fresh copy of sigma through a partial swap
e^{-i delta SWAP} and discards the copy:

    step(rho) = cos^2(delta) rho - i (sin(2 delta)/2) [sigma, rho]
                + sin^2(delta) tr(rho) sigma.

n such steps with delta = t/n approach the target at diamond-norm rate
4 t^2 / n for n > t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import numpy.linalg as npl

from .channels import (
    Channel,
    DiamondEstimate,
    append_state_channel,
    channel_from_unitary,
    compose,
    diamond_lower_ascent,
    difference,
    extend_with_reference,
    power,
    trace_out_channel,
    vec,
)
from .linalg import (
    DensityMatrix,
    dag,
    herm_exp,
    hermitianize,
    matrix_exp,
    swap_operator,
    trace_norm,
)


@dataclass(frozen=True)
class DmeSchedule:
    """Total time t divided into n equal steps of length delta = t / n.

    The step-count hypothesis n > t is enforced strictly, so delta < 1.
    """

    t: float
    n: int

    def __post_init__(self) -> None:
        if self.t < 0:
            raise ValueError("time must be nonnegative")
        if self.n != int(self.n) or self.n < 1:
            raise ValueError("step count must be a positive integer")
        if not self.n > self.t:
            raise ValueError(f"schedule needs n > t, got n={self.n}, t={self.t}")

    @property
    def delta(self) -> float:
        return self.t / self.n


def ideal_unitary_channel(sigma: DensityMatrix, t: float) -> Channel:
    """Conjugation by e^{-i sigma t}."""
    return channel_from_unitary(herm_exp(sigma.matrix, -1j * t))


def step_superop(sigma_matrix: np.ndarray, delta: float) -> np.ndarray:
    """Raw superoperator of one partial-swap step, valid for any delta."""
    sm = np.asarray(sigma_matrix, dtype=complex)
    d = sm.shape[0]
    eye = np.eye(d)
    c2 = math.cos(delta) ** 2
    s2 = math.sin(2.0 * delta) / 2.0
    sn2 = math.sin(delta) ** 2
    commutator_part = np.kron(eye, sm) - np.kron(sm.T, eye)
    return (
        c2 * np.eye(d * d)
        - 1j * s2 * commutator_part
        + sn2 * np.outer(vec(sm), vec(eye))
    )


def dme_step_channel(sigma: DensityMatrix, delta: float) -> Channel:
    """One partial-swap step as a channel; requires 0 <= delta < 1."""
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"step length must satisfy 0 <= delta < 1, got {delta}")
    return Channel(step_superop(sigma.matrix, delta))


def dme_step_kraus(sigma: DensityMatrix, delta: float) -> list[np.ndarray]:
    """Kraus family of one step, from the spectral decomposition of sigma.

    For sigma = sum_k s_k |k><k| the operators are
    K_{jk} = sqrt(s_k) (cos(delta) delta_{jk} I - i sin(delta) |k><j|).
    """
    w, v = npl.eigh(hermitianize(sigma.matrix))
    d = sigma.dim
    c = math.cos(delta)
    s = math.sin(delta)
    ks = []
    for k in range(d):
        if w[k] <= 0.0:
            continue
        root = math.sqrt(w[k])
        vk = v[:, k].reshape(-1, 1)
        for j in range(d):
            vj = v[:, j].reshape(-1, 1)
            op = -1j * s * (vk @ dag(vj))
            if j == k:
                op = op + c * np.eye(d)
            ks.append(root * op)
    return ks


def dme_step_channel_swap(sigma: DensityMatrix, delta: float) -> Channel:
    """The same step built the long way: append sigma, conjugate by
    e^{-i delta SWAP}, trace out the copy."""
    d = sigma.dim
    u = matrix_exp(-1j * delta * swap_operator(d))
    return compose(
        trace_out_channel([d, d], keep=[0]),
        compose(channel_from_unitary(u), append_state_channel(sigma.matrix, d)),
    )


def dme_channel(sigma: DensityMatrix, sched: DmeSchedule) -> Channel:
    """n-step approximation of the target unitary channel."""
    return power(dme_step_channel(sigma, sched.delta), sched.n)


def dme_error_estimate(
    sigma: DensityMatrix,
    sched: DmeSchedule,
    restarts: int = 32,
    tol: float = 1e-10,
    seed=0,
) -> DiamondEstimate:
    """Certified lower bound on half the diamond distance between the ideal
    unitary channel and the n-step approximation."""
    diff = difference(ideal_unitary_channel(sigma, sched.t), dme_channel(sigma, sched))
    return diamond_lower_ascent(diff, restarts=restarts, tol=tol, seed=seed)


def dme_bound(t: float, n: int) -> float:
    """Diamond-distance bound 4 t^2 / n for the n-step approximation, n > t."""
    if t < 0:
        raise ValueError("time must be nonnegative")
    if n != int(n) or n < 1:
        raise ValueError("step count must be a positive integer")
    if not n > t:
        raise ValueError(f"bound needs n > t, got n={n}, t={t}")
    return 4.0 * t * t / n


def dme_sample_bound(t: float, eps: float) -> int:
    """Copies of sigma sufficient for accuracy eps: ceil(4 t^2 / eps)."""
    if t < 0:
        raise ValueError("time must be nonnegative")
    if not 0.0 < eps <= 1.0:
        raise ValueError("accuracy must lie in (0, 1]")
    return int(math.ceil(4.0 * t * t / eps))


def single_step_defect(sigma: DensityMatrix, rho_rs: DensityMatrix, delta: float) -> float:
    """Unnormalized trace-norm defect of one step on a reference-extended input.

    rho_rs lives on reference (x) system, both of sigma's dimension. The
    defect is bounded by 8 delta^2 for delta in [0, 1).
    """
    d = sigma.dim
    if rho_rs.dim != d * d:
        raise ValueError(f"extended input must have dimension {d * d}, got {rho_rs.dim}")
    ideal = extend_with_reference(ideal_unitary_channel(sigma, delta), d)
    step = extend_with_reference(dme_step_channel(sigma, delta), d)
    out = (ideal.superop - step.superop) @ vec(rho_rs.matrix)
    return trace_norm(out.reshape((d * d, d * d), order="F"))
