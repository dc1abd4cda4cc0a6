import numpy as np
import pytest
from scipy.integrate import solve_ivp

from qcmd import (ClassicalPoint, classical_hamiltonian, flow_T, flow_V,
                  get_potential, jacobian_of_flow, reference_flow,
                  stormer_verlet_run, stormer_verlet_step)
from qcmd.experiments import fit_loglog


def as_array(p: ClassicalPoint) -> np.ndarray:
    return np.array([p.x, p.xi, p.y, p.v], dtype=float)


def high_order_oracle(p: ClassicalPoint, t: float, V) -> ClassicalPoint:
    """Independent adaptive high-order integration of the limit ODEs."""

    def rhs(_, z):
        x, xi, y, v = z
        return [xi, -V.grad_x(x, y), v, -V.grad_y(x, y)]

    sol = solve_ivp(rhs, (0.0, t), as_array(p), method="DOP853",
                    rtol=1e-12, atol=1e-13, dense_output=False)
    return ClassicalPoint(*sol.y[:, -1])


class TestHamiltonian:
    def test_origin(self):
        V = get_potential("sin_x2_y2")
        assert classical_hamiltonian(ClassicalPoint(0, 0, 0, 0), V) == 0.0

    def test_free_momenta(self):
        V = get_potential("zero")
        assert classical_hamiltonian(ClassicalPoint(0, 1, 0, 1), V) == 1.0

    def test_positions_only(self):
        V = get_potential("sin_x2_y2")
        got = classical_hamiltonian(ClassicalPoint(1, 0, 1, 0), V)
        assert got == pytest.approx(np.sin(2.0), abs=1e-15)


class TestSubFlows:
    def test_flow_T_dt_zero(self):
        p = ClassicalPoint(0.1, 0.2, 0.3, 0.4)
        q = flow_T(p, 0.0)
        assert as_array(q).tolist() == as_array(p).tolist()

    def test_flow_T_linear_flight(self):
        q = flow_T(ClassicalPoint(0, 1, 0, 2), 0.5)
        assert as_array(q).tolist() == [0.5, 1, 1, 2]

    def test_flow_T_group_property(self):
        p = ClassicalPoint(0.3, -1.2, 0.7, 0.9)
        a = flow_T(flow_T(p, 0.3), 0.45)
        b = flow_T(p, 0.75)
        assert np.abs(as_array(a) - as_array(b)).max() <= 1e-15

    def test_flow_V_zero_identity(self):
        p = ClassicalPoint(0.3, -1.2, 0.7, 0.9)
        q = flow_V(p, 0.6, get_potential("zero"))
        assert np.array_equal(as_array(q), as_array(p))

    def test_flow_V_harmonic_kick(self):
        q = flow_V(ClassicalPoint(1.0, 0.0, 0.5, 0.2), 1.0, get_potential("harmonic"))
        assert q.xi == -1.0 and q.x == 1.0

    def test_flow_V_sign_flip_inverts(self):
        V = get_potential("sin_x2_y2")
        p = ClassicalPoint(0.3, -1.2, 0.7, 0.9)
        q = flow_V(flow_V(p, 0.6, V), -0.6, V)
        assert np.abs(as_array(q) - as_array(p)).max() <= 1e-15

    def test_subflow_energy_conservation(self):
        # flow_T conserves the momenta energy, flow_V conserves V(x, y)
        V = get_potential("sin_x2_y2")
        p = ClassicalPoint(0.3, -1.2, 0.7, 0.9)
        q = flow_T(p, 0.8)
        assert q.xi**2 + q.v**2 == p.xi**2 + p.v**2
        r = flow_V(p, 0.8, V)
        assert V.value(r.x, r.y) == V.value(p.x, p.y)


class TestStormerVerlet:
    def test_zero_potential_is_free_flight(self):
        p = ClassicalPoint(0.3, -1.2, 0.7, 0.9)
        a = stormer_verlet_step(p, 0.25, get_potential("zero"))
        b = flow_T(p, 0.25)
        assert np.array_equal(as_array(a), as_array(b))

    def test_harmonic_one_step_hand_expansion(self):
        dt = 0.1
        q = stormer_verlet_step(ClassicalPoint(1, 0, 0, 0), dt, get_potential("harmonic"))
        assert q.x == pytest.approx(1 - dt**2 / 2, abs=1e-15)
        assert q.xi == pytest.approx(-dt * (1 - dt**2 / 4), abs=1e-15)

    def test_run_matches_composed_steps(self):
        V = get_potential("sin_x2_y2")
        p = ClassicalPoint(0.3, -1.2, 0.7, 0.9)
        q = p
        for _ in range(50):
            q = stormer_verlet_step(q, 0.02, V)
        r = stormer_verlet_run(p, 0.02, 50, V)
        assert np.abs(as_array(q) - as_array(r)).max() <= 1e-14

    def test_long_run_energy_bounded(self):
        # symplectic near-conservation: no secular energy growth over 1e4 steps
        V = get_potential("harmonic")
        p = ClassicalPoint(1.0, 0.0, 0.0, 0.0)
        e0 = classical_hamiltonian(p, V)
        dt = 0.01
        worst = 0.0
        q = p
        for _ in range(100):
            q = stormer_verlet_run(q, dt, 100, V)
            worst = max(worst, abs(classical_hamiltonian(q, V) - e0))
        assert worst <= 1.0 * dt**2

    def test_second_order_convergence_to_reference(self):
        V = get_potential("sin_x2_y2")
        probes = [ClassicalPoint(-1.0, 2.0, 1.0, 0.0),
                  ClassicalPoint(0.4, -0.7, 0.2, 1.1),
                  ClassicalPoint(1.5, 0.3, -0.8, -0.5)]
        T = 0.5
        dts = [T / 16, T / 32, T / 64, T / 128, T / 256]
        errs = []
        for dt in dts:
            worst = 0.0
            for p in probes:
                exact = reference_flow(p, T, V)
                approx = stormer_verlet_run(p, dt, round(T / dt), V)
                worst = max(worst, np.abs(as_array(approx) - as_array(exact)).max())
            errs.append(worst)
        fit = fit_loglog(dts, errs)
        assert 1.8 <= fit.slope <= 2.2

    def test_vectorized_over_ensembles(self, rng):
        V = get_potential("sin_x2_y2")
        xs = rng.uniform(-1, 1, size=32)
        p = ClassicalPoint(xs, 0.2 * xs, np.full(32, 0.5), np.zeros(32))
        q = stormer_verlet_run(p, 0.01, 20, V)
        lone = stormer_verlet_run(
            ClassicalPoint(xs[7], 0.2 * xs[7], 0.5, 0.0), 0.01, 20, V)
        assert q.x[7] == lone.x and q.v[7] == lone.v


class TestReferenceFlow:
    def test_zero_potential_any_resolution(self):
        p = ClassicalPoint(0.3, -1.2, 0.7, 0.9)
        q = reference_flow(p, 2.0, get_potential("zero"), n_fine=1)
        assert np.abs(as_array(q) - as_array(flow_T(p, 2.0))).max() <= 1e-14

    def test_energy_conservation_harmonic(self):
        V = get_potential("harmonic")
        p = ClassicalPoint(1.0, 0.0, -0.5, 0.3)
        q = reference_flow(p, 0.5, V, n_fine=50_000)
        assert abs(classical_hamiltonian(q, V) - classical_hamiltonian(p, V)) <= 1e-8

    def test_against_high_order_oracle(self, rng):
        V = get_potential("sin_x2_y2")
        for _ in range(10):
            p = ClassicalPoint(*rng.uniform(-1.5, 1.5, size=4))
            got = reference_flow(p, 0.5, V, n_fine=50_000)
            want = high_order_oracle(p, 0.5, V)
            assert np.abs(as_array(got) - as_array(want)).max() <= 1e-7


class TestJacobian:
    def test_zero_steps_identity(self):
        V = get_potential("sin_x2_y2")
        J = jacobian_of_flow(ClassicalPoint(0.3, -1.2, 0.7, 0.9), 0.1, 0, V)
        assert np.abs(J - np.eye(4)).max() <= 1e-9

    def test_free_flight_shear(self):
        V = get_potential("zero")
        dt = 0.37
        J = jacobian_of_flow(ClassicalPoint(0.3, -1.2, 0.7, 0.9), dt, 1, V)
        want = np.eye(4)
        want[0, 1] = dt
        want[2, 3] = dt
        assert np.abs(J - want).max() <= 1e-9

    def test_symplectic_determinant(self, rng):
        V = get_potential("harmonic")
        for _ in range(3):
            p = ClassicalPoint(*rng.uniform(-1, 1, size=4))
            J = jacobian_of_flow(p, 0.02, 100, V)
            assert abs(np.linalg.det(J) - 1.0) <= 1e-6
