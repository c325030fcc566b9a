"""Sample-complexity lower bounds via distinguishability arguments.

Hamiltonian side: two Bloch-ball program states that are hard to tell apart
from few copies generate evolutions that become perfectly distinguishable
after m* tensor-power applications, forcing n = Omega(t^2 / eps) copies.
Lindblad side: the same argument run on diagonal-phase jump operators and a
GHZ probe state. Both theorem-level constants are re-derived here from the
explicit schedules so that sweeps can compare claim against construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import unitary_pair_diamond
from .linalg import DensityMatrix, herm_exp
from .wml import LindbladSpec

HAMILTONIAN_LB_CONSTANT = 0.032
LINDBLAD_LB_CONSTANT = 1e-4
# the explicit schedule supports the larger constant 1.8e-4; the headline
# value above is what sweeps assert
LINDBLAD_LB_SCHEDULE_CONSTANT = 1.8e-4
GHZ_MAX_QUBITS = 12
_CEIL_FUZZ = 1e-12

_PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


# ==================================================================
# Hamiltonian pair construction
# ==================================================================


@dataclass(frozen=True)
class QubitPairConstruction:
    """Two qubit program states of Bloch radii r and r_prime whose axes meet
    at angle arccos(dot), evolved for time t."""

    r: float
    r_prime: float
    dot: float
    t: float

    def __post_init__(self) -> None:
        for name, v in (("r", self.r), ("r_prime", self.r_prime)):
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {v}")
        if not -1.0 <= self.dot <= 1.0:
            raise ValueError(f"axis overlap must lie in [-1, 1], got {self.dot}")
        if self.t <= 0:
            raise ValueError("time must be positive")
        if self.r == self.r_prime and self.dot == 1.0:
            raise ValueError("the two program states coincide")


def bloch_pair(c: QubitPairConstruction) -> tuple[DensityMatrix, DensityMatrix]:
    """The two program states; the first axis is z, the second is tilted by
    arccos(dot) in the x-z plane."""
    sin_b = math.sqrt(max(0.0, 1.0 - c.dot * c.dot))
    rho = 0.5 * (np.eye(2) + c.r * _PAULI_Z)
    sig = 0.5 * (np.eye(2) + c.r_prime * (sin_b * _PAULI_X + c.dot * _PAULI_Z))
    return DensityMatrix(rho), DensityMatrix(sig)


def construction_unitaries(c: QubitPairConstruction) -> tuple[np.ndarray, np.ndarray]:
    """e^{-i rho t} and e^{-i sigma t} with the pair embedded in a qutrit.

    Each program state occupies the top-left 2x2 block of a 3-dimensional
    space, leaving a fixed eigenvalue 1 in both unitaries. That extra point
    on the unit circle keeps the eigenvalue hull of the relative unitary
    closing around the origin even when the relative phase exceeds pi/2, so
    ceil(pi/(2 r t)) parallel queries suffice for every r and t.
    """
    rho, sig = bloch_pair(c)

    def embed(m: np.ndarray) -> np.ndarray:
        out = np.zeros((3, 3), dtype=complex)
        out[:2, :2] = m
        return out

    return (
        herm_exp(embed(rho.matrix), -1j * c.t),
        herm_exp(embed(sig.matrix), -1j * c.t),
    )


def theta(c: QubitPairConstruction) -> float:
    """Relative rotation angle of the two evolutions, reduced to [0, pi]:
    cos(theta) = cos(rt/2)cos(r't/2) + sin(rt/2)sin(r't/2)(n.n')."""
    a = c.r * c.t / 2.0
    b = c.r_prime * c.t / 2.0
    val = math.cos(a) * math.cos(b) + math.sin(a) * math.sin(b) * c.dot
    return math.acos(min(1.0, max(-1.0, val)))


def pair_fidelity(c: QubitPairConstruction) -> float:
    """Closed-form qubit fidelity
    (1/2)(1 + r r' (n.n') + sqrt((1-r^2)(1-r'^2)))."""
    root = math.sqrt(max(0.0, (1.0 - c.r * c.r) * (1.0 - c.r_prime * c.r_prime)))
    f = 0.5 * (1.0 + c.r * c.r_prime * c.dot + root)
    return min(max(f, 0.0), 1.0)


def m_star(r: float, t: float) -> int:
    """Tensor powers needed for perfect distinguishability of the antipodal
    equal-radius pair: ceil(pi / (2 r t))."""
    if not 0.0 < r <= 1.0:
        raise ValueError(f"radius must lie in (0, 1], got {r}")
    if t <= 0:
        raise ValueError("time must be positive")
    return int(math.ceil(math.pi / (2.0 * r * t) - _CEIL_FUZZ))


def m_star_bruteforce(c: QubitPairConstruction, m_max: int = 10_000) -> int:
    """Smallest m at which the exact tensor-power diamond distance reaches 1."""
    u, v = construction_unitaries(c)
    for m in range(1, m_max + 1):
        if unitary_pair_diamond(u, v, m).value >= 1.0 - 1e-9:
            return m
    raise ValueError(f"no m <= {m_max} reaches perfect distinguishability")


def hamiltonian_lb_lemma(m_star_val: int, eps: float, fid: float) -> float:
    """Copies needed to tell the pair apart at accuracy eps:
    -ln(4 m eps (1 - m eps)) / (m (-ln fid)), valid for m eps <= 1/2."""
    if m_star_val < 1 or m_star_val != int(m_star_val):
        raise ValueError("m must be a positive integer")
    if eps <= 0:
        raise ValueError("accuracy must be positive")
    if m_star_val * eps > 0.5:
        raise ValueError(f"lemma needs m eps <= 1/2, got {m_star_val * eps}")
    if not 0.0 < fid < 1.0:
        raise ValueError(f"fidelity must lie strictly in (0, 1), got {fid}")
    y = m_star_val * eps
    return -math.log(4.0 * y * (1.0 - y)) / (m_star_val * (-math.log(fid)))


def hamiltonian_lb_window(t: float, eps: float) -> bool:
    """Validity window of the Hamiltonian lower bound:
    0 < eps < min(9t/(100 pi), 1/10)."""
    return t > 0 and 0.0 < eps < min(9.0 * t / (100.0 * math.pi), 0.1)


def hamiltonian_lb_theorem(t: float, eps: float) -> float:
    """Claimed copy lower bound 0.032 t^2 / eps inside the validity window."""
    if not hamiltonian_lb_window(t, eps):
        raise ValueError(
            f"(t, eps) = ({t}, {eps}) outside the window 0 < eps < min(9t/(100 pi), 1/10)"
        )
    return HAMILTONIAN_LB_CONSTANT * t * t / eps


@dataclass(frozen=True)
class HamiltonianScheduleBound:
    """The explicit schedule behind the Hamiltonian lower bound: z copies of
    the antipodal pair at radius r = pi/(2 z t), with fidelity fid."""

    value: float
    z: int
    r: float
    fid: float


def hamiltonian_lb_schedule(t: float, eps: float) -> HamiltonianScheduleBound:
    """Evaluate the explicit pair schedule; its value dominates the claimed
    0.032 t^2 / eps everywhere in the window."""
    if not hamiltonian_lb_window(t, eps):
        raise ValueError(
            f"(t, eps) = ({t}, {eps}) outside the window 0 < eps < min(9t/(100 pi), 1/10)"
        )
    y0 = 0.19 - eps
    z = int(math.ceil(y0 / eps - _CEIL_FUZZ))
    y = z * eps
    if not 0.09 <= y <= 0.19:
        raise AssertionError(f"schedule landed outside [0.09, 0.19]: z eps = {y}")
    r = math.pi / (2.0 * z * t)
    if r > 1.0:
        raise AssertionError(f"schedule radius {r} left the Bloch ball")
    fid = 1.0 - r * r
    return HamiltonianScheduleBound(
        value=hamiltonian_lb_lemma(z, eps, fid), z=z, r=r, fid=fid
    )


# ==================================================================
# Lindblad pair construction
# ==================================================================


def l_phi(phi: float) -> LindbladSpec:
    """Diagonal-phase jump operator diag(1, e^{i phi}) / sqrt 2."""
    return LindbladSpec(d=2, l=np.diag([1.0, np.exp(1j * phi)]) / math.sqrt(2.0))


def ghz_state(m: int) -> DensityMatrix:
    """m-qubit GHZ probe (|0...0> + |1...1>)/sqrt 2 as a density matrix."""
    if m < 1 or m != int(m):
        raise ValueError("qubit count must be a positive integer")
    if m > GHZ_MAX_QUBITS:
        raise ValueError(f"m={m} exceeds the cap {GHZ_MAX_QUBITS} (state is 2^m dimensional)")
    v = np.zeros(2**m, dtype=complex)
    v[0] = 1.0 / math.sqrt(2.0)
    v[-1] = 1.0 / math.sqrt(2.0)
    return DensityMatrix(np.outer(v, v.conj()))


def ghz_distance_closed_form(m: int, t: float, phi: float) -> float:
    """Trace distance between the GHZ probe and its image under m parallel
    copies of the L_phi semigroup at time t."""
    if m < 1 or m != int(m):
        raise ValueError("qubit count must be a positive integer")
    if t < 0:
        raise ValueError("time must be nonnegative")
    decay = m * t * (1.0 - math.cos(phi))
    osc = 0.5 * m * t * math.sin(phi)
    inner = 1.0 + math.exp(-decay) - 2.0 * math.exp(-decay / 2.0) * math.cos(osc)
    return 0.5 * math.sqrt(max(0.0, inner))


def nu_m_lower(m: int, t: float) -> float:
    """With the phase chosen so sin(phi) = 2 pi/(m t) (needs m t >= 2 pi), the
    GHZ distance equals (1/2)(1 + e^{-(m t / 2)(1 - cos phi)}) >= 1/2."""
    if m < 1 or m != int(m):
        raise ValueError("qubit count must be a positive integer")
    if m * t < 2.0 * math.pi:
        raise ValueError(f"phase choice needs m t >= 2 pi, got {m * t}")
    phi = math.asin(2.0 * math.pi / (m * t))
    return 0.5 * (1.0 + math.exp(-0.5 * m * t * (1.0 - math.cos(phi))))


def program_fidelity_l_phi(phi: float) -> float:
    """Fidelity between the program states of L_phi and L_0: (1 + cos phi)/2."""
    return (1.0 + math.cos(phi)) / 2.0


def lindblad_lb_lemma(nu_m: float, m: int, eps: float, fid: float) -> float:
    """Copies needed to tell the programs apart:
    -ln(1 - (nu - 2 m eps)^2) / (m (-ln fid)), valid for nu >= 2 m eps."""
    if m < 1 or m != int(m):
        raise ValueError("m must be a positive integer")
    if eps <= 0:
        raise ValueError("accuracy must be positive")
    if not 0.0 <= nu_m <= 1.0:
        raise ValueError(f"distance must lie in [0, 1], got {nu_m}")
    if nu_m < 2.0 * m * eps:
        raise ValueError(f"lemma needs nu >= 2 m eps, got nu={nu_m}, 2 m eps={2 * m * eps}")
    if not 0.0 < fid < 1.0:
        raise ValueError(f"fidelity must lie strictly in (0, 1), got {fid}")
    gap = nu_m - 2.0 * m * eps
    return -math.log(1.0 - gap * gap) / (m * (-math.log(fid)))


def lindblad_lb_window(t: float, eps: float) -> bool:
    """Validity window of the Lindblad lower bound:
    0 < eps <= min(0.039, 0.013 t)."""
    return t > 0 and 0.0 < eps <= min(0.039, 0.013 * t)


def lindblad_lb_theorem(t: float, eps: float) -> float:
    """Claimed copy lower bound 1e-4 t^2 / eps inside the validity window."""
    if not lindblad_lb_window(t, eps):
        raise ValueError(
            f"(t, eps) = ({t}, {eps}) outside the window 0 < eps <= min(0.039, 0.013 t)"
        )
    return LINDBLAD_LB_CONSTANT * t * t / eps


def alpha_star_search(grid_step: float = 1e-4) -> tuple[float, float]:
    """Maximize f(alpha) = (alpha/2)(-ln(1 - (1/2 - 2 alpha)^2)) over the
    schedule parameter; the optimum sits near alpha = 0.08, value 0.0049."""
    if grid_step <= 0:
        raise ValueError("grid step must be positive")
    alphas = np.arange(grid_step, 0.25, grid_step)
    gaps = 0.5 - 2.0 * alphas
    vals = 0.5 * alphas * (-np.log1p(-(gaps * gaps)))
    k = int(np.argmax(vals))
    return float(alphas[k]), float(vals[k])


@dataclass(frozen=True)
class LindbladScheduleBound:
    """The explicit GHZ schedule behind the Lindblad lower bound: m parallel
    copies with phase phi, probe distance nu, program fidelity fid."""

    value: float
    m: int
    phi: float
    nu: float
    fid: float


def lindblad_lb_schedule(t: float, eps: float, alpha: float = 0.08) -> LindbladScheduleBound:
    """Evaluate the explicit GHZ schedule; its value dominates the claimed
    1e-4 t^2 / eps everywhere in the window where the schedule is defined."""
    if not lindblad_lb_window(t, eps):
        raise ValueError(
            f"(t, eps) = ({t}, {eps}) outside the window 0 < eps <= min(0.039, 0.013 t)"
        )
    m = int(math.floor(alpha / eps))
    if m < 1:
        raise ValueError(f"schedule needs eps <= alpha = {alpha}")
    if m * t < 2.0 * math.pi:
        raise ValueError(f"schedule needs m t >= 2 pi, got {m * t}")
    nu = nu_m_lower(m, t)
    phi = math.asin(2.0 * math.pi / (m * t))
    fid = program_fidelity_l_phi(phi)
    return LindbladScheduleBound(
        value=lindblad_lb_lemma(nu, m, eps, fid), m=m, phi=phi, nu=nu, fid=fid
    )


# ==================================================================
# budget split for general generators
# ==================================================================


@dataclass(frozen=True)
class GeneralLindbladBudget:
    """Hamiltonian coefficients c_j and jump-operator norms for a generator
    written as sum_j c_j H_j + dissipators."""

    c_coeffs: tuple
    l_norms: tuple

    def __post_init__(self) -> None:
        cs = tuple(float(c) for c in self.c_coeffs)
        ls = tuple(float(x) for x in self.l_norms)
        if any(x < 0 for x in ls):
            raise ValueError("jump-operator norms must be nonnegative")
        if not cs and not ls:
            raise ValueError("budget needs at least one term")
        if all(c == 0 for c in cs) and all(x == 0 for x in ls):
            raise ValueError("budget needs at least one nonzero term")
        object.__setattr__(self, "c_coeffs", cs)
        object.__setattr__(self, "l_norms", ls)


def budget_c(b: GeneralLindbladBudget) -> float:
    """Total cost rate c = sum |c_j| + sum ||L_k||^2."""
    return float(sum(abs(c) for c in b.c_coeffs) + sum(x * x for x in b.l_norms))


def classify_case(b: GeneralLindbladBudget) -> str:
    """Pigeonhole split of the budget: at least one of the positive
    Hamiltonian part, negative Hamiltonian part, or dissipative part carries
    a third of c. Ties break in that order."""
    pos = sum(c for c in b.c_coeffs if c > 0)
    neg = sum(-c for c in b.c_coeffs if c < 0)
    diss = sum(x * x for x in b.l_norms)
    third = (pos + neg + diss) / 3.0
    if pos >= third:
        return "positive_hamiltonian"
    if neg >= third:
        return "negative_hamiltonian"
    if diss >= third:
        return "dissipative"
    raise AssertionError("pigeonhole failed; budget arithmetic is inconsistent")
