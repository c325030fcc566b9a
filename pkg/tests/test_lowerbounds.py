import math

import numpy as np
import pytest

from sbqsim import channels as ch
from sbqsim import linalg as la
from sbqsim import lowerbounds as lb
from sbqsim import wml


def test_construction_validation():
    lb.QubitPairConstruction(r=0.5, r_prime=1.0, dot=0.0, t=1.0)
    with pytest.raises(ValueError):
        lb.QubitPairConstruction(r=0.0, r_prime=1.0, dot=0.0, t=1.0)
    with pytest.raises(ValueError):
        lb.QubitPairConstruction(r=1.5, r_prime=1.0, dot=0.0, t=1.0)
    with pytest.raises(ValueError):
        lb.QubitPairConstruction(r=0.5, r_prime=0.5, dot=2.0, t=1.0)
    with pytest.raises(ValueError):
        lb.QubitPairConstruction(r=0.5, r_prime=0.5, dot=0.0, t=0.0)
    with pytest.raises(ValueError):
        # identical Bloch vectors give identical unitaries
        lb.QubitPairConstruction(r=0.5, r_prime=0.5, dot=1.0, t=1.0)


def test_theta_matches_trace_overlap():
    # relative rotation half-angle: cos(theta) = Re tr(u^dag v) / 2, taken on
    # the 2x2 block that carries the pair (the qutrit embedding adds a fixed
    # +1 to the full trace)
    for r, rp, dot, t in [
        (1.0, 1.0, 0.0, 1.0),
        (0.5, 0.25, -0.5, 2.0),
        (0.75, 1.0, 0.3, 0.7),
        (1.0, 1.0, -1.0, 0.5),
    ]:
        c = lb.QubitPairConstruction(r=r, r_prime=rp, dot=dot, t=t)
        u, v = lb.construction_unitaries(c)
        rel = la.dag(u) @ v
        assert u.shape == (3, 3) and v.shape == (3, 3)
        assert abs(rel[2, 2] - 1.0) < 1e-12
        assert np.max(np.abs(rel[2, :2])) < 1e-12
        assert np.max(np.abs(rel[:2, 2])) < 1e-12
        expect = float(np.real(np.trace(rel[:2, :2]))) / 2.0
        assert abs(math.cos(lb.theta(c)) - expect) < 1e-12


def test_pair_fidelity_matches_matrix_fidelity():
    rng = np.random.default_rng(0)
    for _ in range(100):
        r, rp = rng.uniform(0.01, 1.0, size=2)
        dot = rng.uniform(-0.999, 0.999)
        c = lb.QubitPairConstruction(r=float(r), r_prime=float(rp), dot=float(dot), t=1.0)
        a, b = lb.bloch_pair(c)
        assert abs(lb.pair_fidelity(c) - la.fidelity(a, b)) < 1e-12


def test_m_star_formula_matches_bruteforce():
    for r, t in [(1.0, 1.0), (0.5, 2.0), (0.25, math.pi), (1.0, 0.5)]:
        c = lb.QubitPairConstruction(r=r, r_prime=r, dot=-1.0, t=t)
        assert lb.m_star(r, t) == lb.m_star_bruteforce(c)


def test_hamiltonian_lemma_frozen_value():
    got = lb.hamiltonian_lb_lemma(1, 0.1, 0.75)
    expect = -math.log(4 * 0.1 * 0.9) / (1 * -math.log(0.75))
    assert abs(got - expect) < 1e-12
    with pytest.raises(ValueError):
        lb.hamiltonian_lb_lemma(2, 0.3, 0.75)  # m * eps > 1/2
    with pytest.raises(ValueError):
        lb.hamiltonian_lb_lemma(1, 0.1, 1.0)


def test_hamiltonian_window():
    assert lb.hamiltonian_lb_window(10.0, 0.05)
    assert not lb.hamiltonian_lb_window(10.0, 0.5)
    assert not lb.hamiltonian_lb_window(0.1, 0.01)  # eps >= 9t/(100 pi)


def test_hamiltonian_theorem_and_schedule_domination():
    for t in (5.0, 10.0, 50.0):
        for eps in (0.01, 0.05):
            thm = lb.hamiltonian_lb_theorem(t, eps)
            assert abs(thm - 0.032 * t * t / eps) < 1e-9
            sched = lb.hamiltonian_lb_schedule(t, eps)
            assert sched.value >= thm
            assert 0.09 <= sched.z * eps <= 0.19
            assert sched.r <= 1.0


def test_hamiltonian_theorem_rejects_outside_window():
    with pytest.raises(ValueError):
        lb.hamiltonian_lb_theorem(10.0, 0.5)
    with pytest.raises(ValueError):
        lb.hamiltonian_lb_schedule(0.1, 0.01)


def test_log_over_square_constant():
    # -ln(1 - x^2)/x^2 stays below 1.151 on (0, 1/2]
    xs = np.linspace(1e-3, 0.5, 500)
    vals = -np.log1p(-(xs * xs)) / (xs * xs)
    assert float(vals.max()) <= 1.151


def _lifted_jump(l, m, site):
    op = np.eye(1, dtype=complex)
    for j in range(m):
        op = np.kron(op, l if j == site else np.eye(2, dtype=complex))
    return op


def test_ghz_closed_form_matches_simulation():
    # direct 2^m-dimensional master-equation simulation as the oracle
    for m in (1, 2, 3):
        for t in (math.pi, 2 * math.pi):
            for phi in (math.pi / 4, math.pi / 2, math.pi):
                l = lb.l_phi(phi).l
                gen = sum(
                    wml._dissipator_superop(_lifted_jump(l, m, j)) for j in range(m)
                )
                rho = lb.ghz_state(m)
                out = ch.unvec(la.matrix_exp(t * gen) @ ch.vec(rho.matrix), 2**m)
                dist = la.trace_distance(la.DensityMatrix(out), rho)
                closed = lb.ghz_distance_closed_form(m, t, phi)
                assert abs(dist - closed) < 1e-8


def test_ghz_state_cap():
    with pytest.raises(ValueError):
        lb.ghz_state(13)


def test_nu_m_lower():
    assert lb.nu_m_lower(4, 2.0) >= 0.5  # m t = 8 >= 2 pi
    with pytest.raises(ValueError):
        lb.nu_m_lower(2, 1.0)  # m t < 2 pi


def test_lindblad_lemma_values_and_domain():
    val = lb.lindblad_lb_lemma(0.8, 2, 0.1, 0.9)
    expect = -math.log(1 - (0.8 - 0.4) ** 2) / (2 * -math.log(0.9))
    assert abs(val - expect) < 1e-12
    with pytest.raises(ValueError):
        lb.lindblad_lb_lemma(0.6, 4, 0.1, 0.9)  # nu < 2 m eps
    with pytest.raises(ValueError):
        lb.lindblad_lb_lemma(0.8, 2, 0.1, 1.0)


def test_alpha_star_search():
    alpha, value = lb.alpha_star_search()
    assert abs(alpha - 0.08) < 0.01
    assert abs(value - 0.0049) < 5e-4


def test_lindblad_theorem_and_schedule_domination():
    for t in (200.0, 1000.0):
        for eps in (0.01, 0.039):
            thm = lb.lindblad_lb_theorem(t, eps)
            assert abs(thm - lb.LINDBLAD_LB_CONSTANT * t * t / eps) < 1e-9
            sched = lb.lindblad_lb_schedule(t, eps)
            assert sched.value >= thm
            assert sched.value >= lb.LINDBLAD_LB_SCHEDULE_CONSTANT * t * t / eps


def test_lindblad_schedule_needs_feasible_m():
    # inside the window but with m t just below 2 pi
    with pytest.raises(ValueError):
        lb.lindblad_lb_schedule(3.1, 0.039)
    with pytest.raises(ValueError):
        lb.lindblad_lb_theorem(0.1, 0.039)  # outside the window entirely


def test_program_fidelity_matches_matrix_fidelity():
    for phi in (0.3, 1.0, math.pi / 2):
        a = wml.program_state(lb.l_phi(phi)).projector()
        b = wml.program_state(lb.l_phi(0.0)).projector()
        assert abs(lb.program_fidelity_l_phi(phi) - la.fidelity(a, b)) < 1e-12


def test_budget_and_classification():
    b = lb.GeneralLindbladBudget(c_coeffs=(1.0, -0.5), l_norms=(0.5,))
    assert abs(lb.budget_c(b) - (1.5 + 0.25)) < 1e-12
    assert (
        lb.classify_case(lb.GeneralLindbladBudget(c_coeffs=(1.0, -1.0), l_norms=()))
        == "positive_hamiltonian"
    )
    assert (
        lb.classify_case(lb.GeneralLindbladBudget(c_coeffs=(-1.0,), l_norms=()))
        == "negative_hamiltonian"
    )
    assert (
        lb.classify_case(lb.GeneralLindbladBudget(c_coeffs=(0.5,), l_norms=(1.2,)))
        == "dissipative"
    )
    with pytest.raises(ValueError):
        lb.GeneralLindbladBudget(c_coeffs=(), l_norms=())
    with pytest.raises(ValueError):
        lb.GeneralLindbladBudget(c_coeffs=(1.0,), l_norms=(-0.1,))
