import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import naive_H, naive_rhs
from conformal_flow import core
from conformal_flow.core import AmplitudeState
from conformal_flow.errors import TailOverflow
from conformal_flow.families import ground_state, pair_state, residual_norm


def rand_alpha(seed, N):
    rng = np.random.default_rng(seed)
    return rng.standard_normal(N) + 1j * rng.standard_normal(N)


seeds = st.integers(0, 2**32 - 1)
sizes = st.integers(1, 10)


class TestInteractionCoeff:
    @pytest.mark.parametrize("idx, want", [((0, 0, 0, 0), 1), ((2, 3, 1, 4), 2), ((5, 5, 5, 5), 6)])
    def test_values(self, idx, want):
        assert core.interaction_coeff(*idx) == want


class TestAmplitudeState:
    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            AmplitudeState(np.array([1.0, np.nan]))

    def test_frozen_copy(self):
        a = np.ones(3, dtype=complex)
        s = AmplitudeState(a)
        a[0] = 5
        assert s.alpha[0] == 1 and len(s) == 3
        with pytest.raises(ValueError):
            s.alpha[0] = 2


class TestFlowRHS:
    def test_origin(self):
        assert np.all(core.flow_rhs(np.zeros(6, dtype=complex)) == 0)

    def test_single_mode_rate(self):
        rhs = core.flow_rhs(np.eye(8)[0].astype(complex))
        assert rhs[0] == -1j and np.all(rhs[1:] == 0)

    def test_matches_triple_loop_n8(self):
        a = rand_alpha(7, 8)
        assert np.max(np.abs(core.flow_rhs(a) - naive_rhs(a))) <= 1e-14 * np.max(np.abs(naive_rhs(a)))

    @settings(max_examples=25, deadline=None)
    @given(seeds, sizes)
    def test_brute_force_equivalence(self, seed, N):
        a = rand_alpha(seed, N)
        ref = naive_rhs(a)
        assert np.max(np.abs(core.flow_rhs(a) - ref)) <= 1e-13 * max(1.0, np.max(np.abs(ref)))

    @settings(max_examples=15, deadline=None)
    @given(seeds, sizes)
    def test_conjugation(self, seed, N):
        a = rand_alpha(seed, N)
        assert np.allclose(np.conj(core.flow_rhs(a)), -core.flow_rhs(np.conj(a)), rtol=0, atol=1e-13)

    def test_real_input_uses_real_path(self):
        A = ground_state(0.3, N=16).A
        assert np.allclose(core.cubic_term(A), core.cubic_term(A.astype(complex)).real, atol=1e-15)


class TestConserved:
    def test_single_mode(self):
        c = core.conserved(np.eye(5)[0])
        assert (c.H, c.Q, c.E, c.Z) == (1.0, 1.0, 1.0, 0)

    def test_ground_state_saturates_bound(self):
        A = ground_state(0.5, N=64).A
        assert abs(core.hamiltonian(A) - core.charge(A) ** 2) <= 1e-12

    def test_H_matches_quadruple_loop(self):
        a = rand_alpha(3, 8)
        ref = naive_H(a)
        assert abs(ref.imag) < 1e-12
        assert abs(core.hamiltonian(a) - ref.real) <= 1e-13 * abs(ref)

    @settings(max_examples=25, deadline=None)
    @given(seeds, sizes)
    def test_inequalities(self, seed, N):
        c = core.conserved(rand_alpha(seed, N))
        assert c.Q >= 0 and c.E >= c.Q * (1 - 1e-15)
        assert c.H <= c.Q**2 * (1 + 1e-12)


class TestSymmetries:
    def test_zero_phase_is_identity(self):
        a = rand_alpha(1, 6)
        assert np.array_equal(core.apply_global_phase(a, 0.0).alpha, a)

    def test_local_phase_pi(self):
        out = core.apply_local_phase(np.ones(3), np.pi).alpha
        assert np.allclose(out, [1, -1, 1], atol=1e-15)

    def test_scaling_maps_stationary_to_stationary(self):
        s = pair_state(0.2, 1.0, +1)
        assert residual_norm(s.scaled(1.7)) <= 1e-10

    @settings(max_examples=20, deadline=None)
    @given(seeds, sizes, st.floats(-7, 7), st.floats(-7, 7))
    def test_phase_invariance(self, seed, N, theta, phi):
        a = rand_alpha(seed, N)
        c0 = core.conserved(a)
        for b in (core.apply_global_phase(a, theta), core.apply_local_phase(a, phi)):
            c = core.conserved(b)
            assert c.Q == pytest.approx(c0.Q, rel=1e-13)
            assert c.E == pytest.approx(c0.E, rel=1e-13)
            assert abs(c.Z) == pytest.approx(abs(c0.Z), rel=1e-12, abs=1e-13)
            assert c.H == pytest.approx(c0.H, rel=1e-12)

    @settings(max_examples=15, deadline=None)
    @given(seeds, sizes, st.floats(0.1, 3.0))
    def test_scaling_laws(self, seed, N, c):
        a = rand_alpha(seed, N)
        c0, c1 = core.conserved(a), core.conserved(core.apply_scaling(a, c))
        assert c1.H == pytest.approx(c**4 * c0.H, rel=1e-12)
        assert c1.Q == pytest.approx(c**2 * c0.Q, rel=1e-13)
        assert c1.E == pytest.approx(c**2 * c0.E, rel=1e-13)


class TestOperatorD:
    def test_delta0(self):
        # row n = 1 gives 1 * alpha_0; row n = 0 only sees alpha_1
        assert np.array_equal(core.apply_D(np.eye(5)[0]), np.eye(5)[1])

    def test_e1(self):
        assert np.array_equal(core.apply_D(np.eye(5)[1]).real, [-2, 0, 2, 0, 0])

    def test_matrix_agrees(self):
        a = rand_alpha(4, 9)
        assert np.allclose(core.d_operator(9) @ a, core.apply_D(a), atol=1e-14)

    def test_orbit_is_ground_state(self):
        s = 0.3
        out = core.apply_expD(np.eye(64)[0], s).alpha
        n = np.arange(64)
        assert np.max(np.abs(out - np.tanh(s) ** n / np.cosh(s) ** 2)) <= 1e-8

    def test_zero_parameter(self):
        a = rand_alpha(2, 8)
        assert np.array_equal(core.apply_expD(a, 0.0).alpha, a)

    @pytest.mark.parametrize("s", [-0.5, 0.2, 0.5])
    def test_charge_preserved(self, s):
        a = np.zeros(128, dtype=complex)
        a[:16] = core.random_state(16, np.random.default_rng(5)).alpha
        assert abs(core.charge(core.apply_expD(a, s).alpha) - core.charge(a)) <= 1e-8

    def test_tail_overflow(self):
        with pytest.raises(TailOverflow):
            core.apply_expD(np.eye(8)[0], 1.5)

    def test_bound_on_s(self):
        with pytest.raises(ValueError):
            core.apply_expD(np.eye(8)[0], 3.0)
