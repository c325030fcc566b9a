import math

import numpy as np
import pytest

from sbqsim import channels as ch
from sbqsim import linalg as la
from sbqsim import qpca


def _tv(p, q):
    return 0.5 * float(np.sum(np.abs(np.asarray(p) - np.asarray(q))))


def test_control_qubit_validation():
    c = qpca.ControlQubit(x=0.6, y=0.0, z=0.8)
    m = c.matrix()
    assert abs(np.trace(m) - 1.0) < 1e-12
    assert np.max(np.abs(m - la.dag(m))) < 1e-15
    with pytest.raises(ValueError):
        qpca.ControlQubit(x=1.0, y=1.0, z=0.0)  # outside the ball


def test_instance_validation():
    rho = la.random_density(2, seed=0)
    inst = qpca.QpcaInstance(rho=rho, T=2, m=8)
    assert inst.eigenvalues.shape == (2,)
    with pytest.raises(ValueError):
        qpca.QpcaInstance(rho=rho, T=0, m=8)
    with pytest.raises(ValueError):
        qpca.QpcaInstance(rho=rho, T=7, m=8)
    with pytest.raises(ValueError):
        qpca.QpcaInstance(rho=rho, T=2, m=0)
    with pytest.raises(ValueError):
        qpca.QpcaInstance(rho=la.random_density(3, seed=0), T=2, m=8)


def test_controlled_step_guard_ranges():
    rho = la.random_density(2, seed=1)
    with pytest.raises(ValueError):
        qpca.controlled_dme_step(rho, 1.0)  # public guard is [0, 1)
    # internal path accepts up to pi/2 for the register schedule
    ks = qpca._controlled_step_kraus(rho, 1.2)
    acc = sum(la.dag(k) @ k for k in ks)
    assert np.max(np.abs(acc - np.eye(4))) < 1e-12
    with pytest.raises(ValueError):
        qpca._controlled_step_kraus(rho, math.pi / 2 + 1e-6)


def test_closed_form_zero_time():
    gamma = qpca.ControlQubit(x=0.6, y=-0.2, z=0.5)
    out = qpca.controlled_dme_closed_form(gamma, 0.7, 0.0, 5)
    expect = np.kron(gamma.matrix(), np.diag([1.0, 0.0]))
    assert np.max(np.abs(out.matrix - expect)) < 1e-15


def test_closed_form_matches_step_simulation():
    # evolve gamma (x) chi through n controlled steps with chi the eigenvalue-r
    # eigenstate of rho = diag(r, 1-r), and compare against the closed form
    gamma = qpca.ControlQubit(x=0.6, y=-0.2, z=0.5)
    chi = np.diag([1.0, 0.0]).astype(complex)
    for r in (0.0, 0.25, 0.6, 1.0):
        rho = la.DensityMatrix(np.diag([r, 1.0 - r]))
        for t in (math.pi / 2, math.pi):
            for n in (16, 64):
                ks = qpca._controlled_step_kraus(rho, t / n)
                mat = np.kron(gamma.matrix(), chi)
                for _ in range(n):
                    mat = sum(k @ mat @ la.dag(k) for k in ks)
                closed = qpca.controlled_dme_closed_form(gamma, r, t, n)
                assert np.max(np.abs(mat - closed.matrix)) < 1e-10


def test_closed_form_domain():
    gamma = qpca.ControlQubit(x=0.0, y=0.0, z=1.0)
    with pytest.raises(ValueError):
        qpca.controlled_dme_closed_form(gamma, 1.5, 1.0, 10)
    with pytest.raises(ValueError):
        qpca.controlled_dme_closed_form(gamma, 0.5, 5.0, 5)  # needs n > t


def test_step_error_matches_direct_channel_distance():
    chi = np.diag([1.0, 0.0]).astype(complex)
    plus = qpca.ControlQubit(x=1.0, y=0.0, z=0.0)
    for r in (0.25, 0.6):
        for t in (1.0, 2.0):
            n = 32
            got = qpca.qpca_step_error(r, t, n)
            rho = la.DensityMatrix(np.diag([r, 1.0 - r]))
            step = ch.channel_from_kraus(qpca._controlled_step_kraus(rho, t / n))
            approx = ch.power(step, n)
            u = np.kron(np.diag([1.0, 0.0]), np.eye(2)) + np.kron(
                np.diag([0.0, 1.0]), np.diag(np.exp(-1j * t * np.array([r, 1.0 - r])))
            )
            ideal = ch.channel_from_unitary(u.astype(complex))
            inp = la.DensityMatrix(np.kron(plus.matrix(), chi))
            direct = la.trace_distance(ch.apply(approx, inp), ch.apply(ideal, inp))
            assert abs(got - direct) < 1e-12


def test_step_bound_coefficient_value():
    assert abs(qpca.STEP_BOUND_COEFF - 1.9053) < 1e-4


def test_step_error_below_bound():
    for r in (0.0, 0.25, 0.6, 1.0):
        for t in (1.0, 2.0, math.pi):
            for n in (8, 32):
                assert qpca.qpca_step_error(r, t, n) <= qpca.qpca_step_bound(t, n) + 1e-12


def test_step_forms_require_enough_steps():
    with pytest.raises(ValueError):
        qpca.qpca_step_error(0.5, 10.0, 6)  # n < 2t/pi
    with pytest.raises(ValueError):
        qpca.qpca_step_bound(10.0, 6)


def test_total_bound_formula_and_domain():
    t, n = 4.0, 1000
    expect = (2.0 / 3.0) * (t * (t + 4.0 * math.pi) / n) * math.log2(t)
    assert abs(qpca.qpca_total_bound(t, n) - expect) < 1e-12
    with pytest.raises(ValueError):
        qpca.qpca_total_bound(1.0, 100)  # needs t > 1


def test_schedule_requires_enough_steps():
    rho = la.random_density(2, seed=2)
    with pytest.raises(ValueError):
        qpca.qpca_schedule_error(rho, T=2, m=7)  # m >= 2 t_T / pi = 8
    qpca.qpca_schedule_error(rho, T=2, m=8)


def test_schedule_error_below_total_bound():
    rho = la.random_density(2, seed=3)
    t_total = 2.0 * math.pi * (2**2 - 1)  # T = 2 doubling schedule
    for m in (8, 16):
        err = qpca.qpca_schedule_error(rho, T=2, m=m)
        assert err <= qpca.qpca_total_bound(t_total, 2 * m)


def test_ideal_distribution_dyadic_exact():
    rho = la.DensityMatrix(np.diag([0.75, 0.25]))
    inst = qpca.QpcaInstance(rho=rho, T=2, m=8)
    probs = qpca.qpca_distribution(inst, ideal=True)
    # eigenvalue 0.75 sits at register value 3 ("11"), 0.25 at 1 ("01")
    expect = np.array([0.0, 0.25, 0.0, 0.75])
    assert np.max(np.abs(probs - expect)) < 1e-12


def test_run_qpca_deterministic_and_normalized():
    rho = la.DensityMatrix(np.diag([0.75, 0.25]))
    inst = qpca.QpcaInstance(rho=rho, T=2, m=8)
    a = qpca.run_qpca(inst, shots=512, seed=5)
    b = qpca.run_qpca(inst, shots=512, seed=5)
    assert a == b
    assert sum(a.values()) == 512
    assert all(len(k) == 2 for k in a)


def test_sampled_ideal_close_to_exact():
    rho = la.DensityMatrix(np.diag([0.75, 0.25]))
    inst = qpca.QpcaInstance(rho=rho, T=2, m=8)
    exact = qpca.qpca_distribution(inst, ideal=True)
    shots = 4096
    counts = qpca.run_qpca(inst, shots=shots, seed=0, ideal=True)
    emp = np.zeros_like(exact)
    for key, c in counts.items():
        emp[int(key, 2)] = c / shots
    sigma = sum(math.sqrt(p * (1 - p) / shots) for p in exact)
    assert _tv(emp, exact) <= 3 * sigma


def test_dme_mode_approaches_ideal_with_more_copies():
    rho = la.DensityMatrix(np.diag([0.75, 0.25]))
    tvs = []
    for m in (8, 16, 32):
        inst = qpca.QpcaInstance(rho=rho, T=2, m=m)
        approx = qpca.qpca_distribution(inst, ideal=False)
        exact = qpca.qpca_distribution(inst, ideal=True)
        tvs.append(_tv(approx, exact))
    assert tvs[0] >= tvs[1] >= tvs[2]
