"""Lindbladian simulation from copies of a program state.

A single jump operator L with unit Frobenius norm generates

    gen(rho) = L rho L^dag - (1/2) {L^dag L, rho},

and is encoded in the pure program state |psi_L> = (L (x) I) |Gamma| with
|Gamma> = sum_i |i>|i>. One step of length delta adjoins a fresh copy of
psi_L on registers 2 and 3, evolves the three registers under the lifted
generator of M = (1/sqrt d)(I_1 (x) |Gamma><Gamma|_23)(SWAP_12 (x) I_3),
and traces registers 2 and 3 back out. n steps with delta = t/n approach
e^{t gen} at diamond-norm rate 3 t^2 d^2 / n for n > 2 d t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import numpy.linalg as npl
import scipy.linalg

from .channels import (
    Channel,
    DiamondEstimate,
    HermitianPreservingMap,
    append_state_channel,
    compose,
    diamond_lower_ascent,
    difference,
    power,
    trace_out_channel,
)
from .linalg import (
    PureState,
    complex_ginibre,
    dag,
    swap_operator,
    _as_square,
    _rng,
)

NORM_TOL = 1e-12
DEFAULT_DIM_CAP = 3


@dataclass(frozen=True)
class LindbladSpec:
    """A single jump operator on dimension d, Frobenius-normalized to 1."""

    d: int
    l: np.ndarray

    def __post_init__(self) -> None:
        m = _as_square(self.l, "jump operator")
        if m.shape != (self.d, self.d):
            raise ValueError(f"jump operator shape {m.shape} does not match d={self.d}")
        norm = float(npl.norm(m))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"jump operator norm {norm} is not 1 within {NORM_TOL}")
        object.__setattr__(self, "l", m)


def random_lindblad(d: int, seed=0) -> LindbladSpec:
    """Frobenius-normalized complex Gaussian jump operator."""
    rng = _rng(seed)
    g = complex_ginibre(d, d, rng)
    return LindbladSpec(d=d, l=g / npl.norm(g))


def _check_dim(d: int, allow_large: bool) -> None:
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if d > DEFAULT_DIM_CAP and not allow_large:
        raise ValueError(
            f"d={d} exceeds the default cap {DEFAULT_DIM_CAP}; the three-register "
            "superoperator grows as d^6, pass allow_large=True to proceed"
        )


def program_state(spec: LindbladSpec) -> PureState:
    """|psi_L> = (L (x) I)|Gamma>, whose amplitudes are the entries of L
    in row-major order."""
    return PureState(spec.l.reshape(-1))


def _dissipator_superop(l: np.ndarray) -> np.ndarray:
    d = l.shape[0]
    eye = np.eye(d)
    ldl = dag(l) @ l
    return (
        np.kron(l.conj(), l)
        - 0.5 * np.kron(ldl.T, eye)
        - 0.5 * np.kron(eye, ldl)
    )


def lindbladian_superop(spec: LindbladSpec) -> HermitianPreservingMap:
    """The generator L rho L^dag - (1/2){L^dag L, rho} as a superoperator."""
    return HermitianPreservingMap(_dissipator_superop(spec.l))


def ideal_lindblad_channel(spec: LindbladSpec, t: float) -> Channel:
    """The semigroup element e^{t gen}."""
    if t < 0:
        raise ValueError("time must be nonnegative")
    return Channel(scipy.linalg.expm(t * _dissipator_superop(spec.l)))


def m_operator(d: int, allow_large: bool = False) -> np.ndarray:
    """The fixed three-register coupling
    M = (1/sqrt d)(I_1 (x) |Gamma><Gamma|_23)(SWAP_12 (x) I_3)."""
    _check_dim(d, allow_large)
    gamma = np.zeros(d * d, dtype=complex)
    for i in range(d):
        gamma[i * d + i] = 1.0
    proj = np.outer(gamma, gamma)
    left = np.kron(np.eye(d), proj) / math.sqrt(d)
    right = np.kron(swap_operator(d), np.eye(d))
    return left @ right


def m_lindbladian_superop(d: int, allow_large: bool = False) -> HermitianPreservingMap:
    """The lifted generator on three registers, with M as jump operator."""
    m = m_operator(d, allow_large=allow_large)
    return HermitianPreservingMap(_dissipator_superop(m))


# one matrix exponential per distinct (d, delta); inserts are atomic
_STEP_EXP_CACHE: dict[tuple[int, str], np.ndarray] = {}


def _step_exp_superop(d: int, delta: float, allow_large: bool) -> np.ndarray:
    key = (d, float(delta).hex())
    hit = _STEP_EXP_CACHE.get(key)
    if hit is None:
        gen = m_lindbladian_superop(d, allow_large=allow_large).superop
        hit = scipy.linalg.expm(delta * gen)
        _STEP_EXP_CACHE[key] = hit
    return hit


def wml_step_channel(spec: LindbladSpec, delta: float, allow_large: bool = False) -> Channel:
    """One step: adjoin psi_L, run the lifted semigroup for delta, trace back.

    Requires 0 <= delta < 1/(2d), the range on which the step error is
    second order.
    """
    d = spec.d
    _check_dim(d, allow_large)
    if not 0.0 <= delta < 1.0 / (2.0 * d):
        raise ValueError(f"step length must satisfy 0 <= delta < 1/(2d) = {1.0 / (2 * d)}, got {delta}")
    adjoin = append_state_channel(program_state(spec).amplitudes, d)
    lifted = Channel(_step_exp_superop(d, delta, allow_large))
    discard = trace_out_channel([d, d, d], keep=[0])
    return compose(discard, compose(lifted, adjoin))


def wml_channel(spec: LindbladSpec, sched, allow_large: bool = False) -> Channel:
    """n-step approximation of e^{t gen}; requires n > 2 d t."""
    _require_steps(sched.t, sched.n, spec.d)
    return power(wml_step_channel(spec, sched.delta, allow_large=allow_large), sched.n)


def _require_steps(t: float, n: int, d: int) -> None:
    if not n > 2 * d * t:
        raise ValueError(f"schedule needs n > 2 d t = {2 * d * t}, got n={n}")


def wml_error_estimate(
    spec: LindbladSpec,
    sched,
    restarts: int = 32,
    tol: float = 1e-10,
    seed=0,
    allow_large: bool = False,
) -> DiamondEstimate:
    """Certified lower bound on half the diamond distance between the ideal
    semigroup element and the n-step approximation."""
    diff = difference(
        ideal_lindblad_channel(spec, sched.t),
        wml_channel(spec, sched, allow_large=allow_large),
    )
    return diamond_lower_ascent(diff, restarts=restarts, tol=tol, seed=seed)


def wml_bound(t: float, n: int, d: int) -> float:
    """Diamond-distance bound 3 t^2 d^2 / n for the n-step approximation."""
    if t < 0:
        raise ValueError("time must be nonnegative")
    if n != int(n) or n < 1:
        raise ValueError("step count must be a positive integer")
    if d < 2:
        raise ValueError("dimension must be at least 2")
    _require_steps(t, n, d)
    return 3.0 * t * t * d * d / n


def wml_sample_bound(t: float, eps: float, d: int) -> int:
    """Copies of psi_L sufficient for accuracy eps: ceil(3 d^2 t^2 / eps)."""
    if t < 0:
        raise ValueError("time must be nonnegative")
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if not 0.0 < eps <= 1.0:
        raise ValueError("accuracy must lie in (0, 1]")
    return int(math.ceil(3.0 * d * d * t * t / eps))


def lindbladian_diamond_estimate(
    spec: LindbladSpec, restarts: int = 8, tol: float = 1e-8, seed=0
) -> DiamondEstimate:
    """Ascent estimate of half the diamond norm of the generator itself."""
    return diamond_lower_ascent(lindbladian_superop(spec), restarts=restarts, tol=tol, seed=seed)


def m_diamond_estimate(
    d: int, restarts: int = 2, tol: float = 1e-8, seed=0, allow_large: bool = False
) -> DiamondEstimate:
    """Ascent estimate of half the diamond norm of the lifted generator."""
    return diamond_lower_ascent(
        m_lindbladian_superop(d, allow_large=allow_large), restarts=restarts, tol=tol, seed=seed
    )


def superop_diamond_ceilings(
    spec: LindbladSpec,
    restarts: int = 8,
    m_restarts: int = 2,
    tol: float = 1e-8,
    seed=0,
    allow_large: bool = False,
) -> tuple[float, float]:
    """Unnormalized diamond-norm estimates (generator, lifted generator).

    The estimates are certified from below by ascent and must respect the
    analytic ceilings 2 and 2d respectively.
    """
    gen = 2.0 * lindbladian_diamond_estimate(spec, restarts=restarts, tol=tol, seed=seed).value
    lifted = 2.0 * m_diamond_estimate(
        spec.d, restarts=m_restarts, tol=tol, seed=seed, allow_large=allow_large
    ).value
    if gen > 2.0 + 1e-6:
        raise AssertionError(f"generator diamond estimate {gen} exceeds ceiling 2")
    if lifted > 2.0 * spec.d + 1e-6:
        raise AssertionError(f"lifted generator diamond estimate {lifted} exceeds ceiling {2 * spec.d}")
    return gen, lifted
