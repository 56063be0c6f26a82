import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import shadowspec as ss
from _helpers import random_hyperbolic, random_invertible

W_HI = 2.0 * math.sqrt(2.0)
W_LO = 1.0 / W_HI

ONE_DIM_DOUBLE = ss.DenseOperator([[2.0]])


class TestGeneratePseudoOrbit:
    def test_zero_delta_is_exact_trajectory(self):
        a = ss.diagonal([2.0, 0.5])
        x0 = np.array([1.0, 1.0], dtype=complex)
        orbit = ss.generate_pseudo_orbit(a, x0, 0.0, (-5, 5), rng_seed=0)
        for n in range(-5, 6):
            expected = np.array([2.0 ** n, 0.5 ** n]) * x0
            assert np.allclose(orbit.state(n), expected, atol=1e-12)
        assert all(v == 0.0 for v in orbit.defect_norms())

    def test_defect_norms_sit_on_the_sphere(self):
        a = ss.diagonal([2.0, 0.5])
        orbit = ss.generate_pseudo_orbit(a, np.zeros(2, dtype=complex), 1e-3, (-10, 10), rng_seed=1)
        for norm in orbit.defect_norms():
            assert norm == pytest.approx(1e-3, rel=1e-9)

    def test_ball_sampling_stays_inside(self):
        a = ss.diagonal([2.0, 0.5])
        orbit = ss.generate_pseudo_orbit(
            a, np.zeros(2, dtype=complex), 1e-3, (-10, 10), rng_seed=1, on_sphere=False
        )
        assert all(norm <= 1e-3 for norm in orbit.defect_norms())

    def test_same_seed_reproduces_bit_for_bit(self):
        a = ss.diagonal([2.0, 0.5])
        first = ss.generate_pseudo_orbit(a, np.ones(2, dtype=complex), 1e-3, (-8, 8), rng_seed=9)
        second = ss.generate_pseudo_orbit(a, np.ones(2, dtype=complex), 1e-3, (-8, 8), rng_seed=9)
        for n in range(-8, 9):
            assert np.array_equal(first.state(n), second.state(n))

    def test_shift_orbit_states_are_supported_vectors(self):
        t = ss.ShiftOperator("forward", W_HI, W_LO, 0)
        orbit = ss.generate_pseudo_orbit(t, ss.basis_vector(0), 1e-3, (-4, 4), rng_seed=2)
        assert all(isinstance(s, ss.SupportedVector) for s in orbit.states)
        assert max(orbit.defect_norms()) <= 1e-3 * (1 + 1e-9)

    def test_window_must_straddle_zero(self):
        with pytest.raises(ValueError):
            ss.generate_pseudo_orbit(ONE_DIM_DOUBLE, np.zeros(1, dtype=complex), 0.0, (2, 5), 0)


class TestOrbitFromDefects:
    def test_geometric_sum_forward(self):
        # y_{n+1} = 2 y_n + delta from y_0 = 0  ->  y_n = delta (2^n - 1)
        delta = 1e-3
        defects = [np.array([delta + 0j])] * 10
        orbit = ss.orbit_from_defects(ONE_DIM_DOUBLE, np.zeros(1, dtype=complex), defects, (0, 10))
        for n in range(0, 11):
            assert orbit.state(n)[0] == pytest.approx(delta * (2.0 ** n - 1.0), abs=1e-15)

    def test_shift_orbit_honors_defect_identity(self):
        t = ss.ShiftOperator("forward", W_HI, W_LO, 0)
        defects = [ss.basis_vector(n, 1e-3) for n in range(-2, 2)]
        orbit = ss.orbit_from_defects(t, ss.basis_vector(0), defects, (-2, 2))
        for n in range(-2, 2):
            gap = orbit.state(n + 1) - ss.apply(t, orbit.state(n))
            assert (gap - orbit.defect(n)).norm() < 1e-15


class TestConstructShadow:
    def test_one_dim_constant_defect_closed_form(self):
        # T = 2, B = 0: x_n = -sum_{k>=1} 2^{-k} delta = -delta once the
        # geometric tail has converged (window long enough), so the anchor is
        # y_0 - x_0 = +delta and the sup distance is exactly delta
        delta = 1e-3
        defects = [np.array([delta + 0j])] * 50
        orbit = ss.orbit_from_defects(ONE_DIM_DOUBLE, np.zeros(1, dtype=complex), defects, (0, 50))
        res = ss.construct_shadow(ONE_DIM_DOUBLE, ss.DenseOperator([[0.0]]), orbit)
        assert res.anchor[0] == pytest.approx(delta, abs=1e-12)
        assert res.epsilon_achieved == pytest.approx(delta, abs=1e-12)
        assert res.recurrence_residual < 1e-10
        assert res.epsilon_achieved <= res.epsilon_bound

    def test_zero_delta_gives_zero_correction(self):
        a = ss.diagonal([2.0, 0.5])
        orbit = ss.generate_pseudo_orbit(a, np.array([1.0, 1.0 + 0j]), 0.0, (-6, 6), rng_seed=0)
        res = ss.construct_shadow(a, ss.riesz_projector(a), orbit)
        assert res.epsilon_achieved < 1e-12
        assert res.epsilon_bound == 0.0

    def test_recurrence_residual_oracle_diag(self):
        a = ss.diagonal([2.0, 0.5])
        b = ss.diagonal([0.0, 1.0])
        orbit = ss.generate_pseudo_orbit(a, np.zeros(2, dtype=complex), 1e-3, (-20, 20), rng_seed=5)
        res = ss.construct_shadow(a, b, orbit)
        assert res.recurrence_residual < 1e-10
        assert res.epsilon_achieved <= res.epsilon_bound
        assert res.r_plus == pytest.approx(0.5, abs=1e-12)
        assert res.r_minus == pytest.approx(0.5, abs=1e-12)

    def test_trajectory_definition_of_epsilon(self):
        # recompute sup_n ||y_n - A^n anchor|| independently from the result
        a = ss.diagonal([2.0, 0.5])
        orbit = ss.generate_pseudo_orbit(a, np.zeros(2, dtype=complex), 1e-3, (-10, 10), rng_seed=6)
        res = ss.construct_shadow(a, ss.riesz_projector(a), orbit)
        worst = 0.0
        for n in range(-10, 11):
            power = np.diag([2.0 ** n, 0.5 ** n]).astype(complex)
            worst = max(worst, float(np.linalg.norm(orbit.state(n) - power @ res.anchor)))
        assert worst == pytest.approx(res.epsilon_achieved, abs=1e-10)

    def test_identity_splitting_rejected(self):
        orbit = ss.generate_pseudo_orbit(
            ss.identity(2), np.zeros(2, dtype=complex), 1e-3, (-3, 3), rng_seed=0
        )
        with pytest.raises(ss.DecayCertificateError) as err:
            ss.construct_shadow(ss.identity(2), ss.identity(2), orbit)
        assert err.value.r_plus >= 1.0

    @given(st.integers(0, 10**6))
    @settings(max_examples=20, deadline=None)
    def test_bound_and_residual_hold_generically(self, seed):
        rng = np.random.default_rng(seed)
        a, _ = random_hyperbolic(rng, int(rng.integers(2, 5)))
        orbit = ss.generate_pseudo_orbit(
            a, np.zeros(a.dim, dtype=complex), 1e-3, (-15, 15), rng_seed=seed
        )
        res = ss.construct_shadow(a, ss.riesz_projector(a), orbit)
        assert res.recurrence_residual < 1e-9
        assert res.epsilon_achieved <= res.epsilon_bound


class TestShadowOracle:
    def test_exact_trajectory_recovers_anchor(self):
        a = ss.diagonal([2.0, 0.5])
        x0 = np.array([0.3, -0.7 + 0.2j])
        orbit = ss.generate_pseudo_orbit(a, x0, 0.0, (-15, 15), rng_seed=0)
        oracle = ss.shadow_oracle_lsq(a, orbit)
        assert oracle.epsilon_achieved < 1e-9
        assert np.allclose(oracle.best_anchor, x0, atol=1e-9)

    def test_oracle_never_beaten_by_construction(self):
        rng = np.random.default_rng(77)
        for _ in range(5):
            a, _ = random_hyperbolic(rng, 3)
            orbit = ss.generate_pseudo_orbit(
                a, np.zeros(3, dtype=complex), 1e-3, (-12, 12), rng_seed=int(rng.integers(1e6))
            )
            res = ss.construct_shadow(a, ss.riesz_projector(a), orbit)
            oracle = ss.shadow_oracle_lsq(a, orbit)
            assert oracle.epsilon_achieved <= res.epsilon_achieved + 1e-8

    def test_identity_accumulates_linear_error(self):
        # constant defect on T = I gives states n*delta; the best constant
        # trajectory is the mean, so the sup distance is exactly N*delta
        delta = 1e-3
        n = 10
        defects = [np.array([delta + 0j])] * (2 * n)
        orbit = ss.orbit_from_defects(ss.identity(1), np.zeros(1, dtype=complex), defects, (-n, n))
        oracle = ss.shadow_oracle_lsq(ss.identity(1), orbit)
        assert oracle.epsilon_achieved == pytest.approx(n * delta, rel=1e-9)

    def test_shift_oracle_matches_dense_oracle_on_window(self):
        # dual path: the chain-wise closed form against a brute-force dense
        # least squares on materialized windows
        t = ss.ShiftOperator("forward", W_HI, W_LO, 0)
        n = 3
        orbit = ss.generate_pseudo_orbit(t, ss.basis_vector(0), 1e-3, (-n, n), rng_seed=4)
        oracle = ss.shadow_oracle_lsq(t, orbit)

        half = 10
        blocks, targets = [], []
        for k in range(-n, n + 1):
            blk = np.eye(2 * half + 1, dtype=complex)
            win = ss.materialize(t, half).entries
            inv = np.linalg.pinv(win)  # window is singular only at the boundary
            for _ in range(abs(k)):
                blk = (win if k > 0 else inv) @ blk
            blocks.append(blk)
            targets.append(orbit.state(k).to_window_array(half))
        sol, *_ = np.linalg.lstsq(np.vstack(blocks), np.concatenate(targets), rcond=None)
        eps_dense = max(
            float(np.linalg.norm(y - blk @ sol)) for y, blk in zip(targets, blocks)
        )
        assert oracle.epsilon_achieved == pytest.approx(eps_dense, rel=1e-6, abs=1e-9)


class TestWindowedOperator:
    def test_one_dim_stencil(self):
        mat = ss.windowed_operator(ONE_DIM_DOUBLE, "script-S", 1)
        assert np.array_equal(mat.real, np.array([[-2.0, 1.0, 0.0], [0.0, -2.0, 1.0]]))
        assert np.all(mat.imag == 0)

    def test_reflection_exchanges_the_two_kinds(self):
        # reversing block rows and block columns of the backward-adjoint
        # stencil of A yields the forward stencil of A*
        rng = np.random.default_rng(13)
        a = random_invertible(rng, 3)
        n, d = 4, 3
        b_mat = ss.windowed_operator(a, "script-B", n)
        s_of_adj = ss.windowed_operator(ss.adjoint(a), "script-S", n)
        blocks = b_mat.reshape(2 * n, d, 2 * n + 1, d)
        reflected = blocks[::-1, :, ::-1, :].reshape(2 * n * d, (2 * n + 1) * d)
        assert np.max(np.abs(reflected - s_of_adj)) < 1e-14

    def test_interior_stencil_has_structural_kernel(self):
        # back-substituting from a free last block solves every interior row,
        # which is why the bounded-below probe must use the padded compression
        a = ss.diagonal([2.0, 0.5])
        n = 3
        mat = ss.windowed_operator(a, "script-B", n)
        astar = a.entries.conj().T
        x = [None] * (2 * n + 1)
        x[-1] = np.array([1.0, 1.0], dtype=complex)
        for j in range(2 * n - 1, -1, -1):
            x[j] = astar @ x[j + 1]
        vec = np.concatenate(x)
        assert np.linalg.norm(mat @ vec) < 1e-12 * np.linalg.norm(vec)

    def test_probe_bounded_below_for_hyperbolic_diagonal(self):
        gains = [ss.window_probe(ss.diagonal([2.0, 0.5]), "script-B", n).gain for n in (5, 10, 20)]
        assert all(g > 0.45 for g in gains)
        assert gains[0] >= gains[1] >= gains[2]  # compression over growing windows

    def test_probe_decays_like_one_over_n_for_identity(self):
        gains = [ss.window_probe(ss.identity(2), "script-B", n).gain for n in (5, 10, 20)]
        assert gains[1] / gains[0] == pytest.approx(0.5, abs=0.1)
        assert gains[2] / gains[1] == pytest.approx(0.5, abs=0.1)

    def test_script_s_probe_positive_for_hyperbolic(self):
        probe = ss.window_probe(ss.diagonal([2.0, 0.5]), "script-S", 8)
        assert probe.gain > 0.4
        assert probe.norm_model == "l2 surrogate"

    def test_shift_probe_runs(self):
        t = ss.ShiftOperator("forward", W_HI, W_LO, 0)
        probe = ss.window_probe(t, "script-B", 3, 8)
        assert probe.gain >= 0.0


class TestBGain:
    def test_identity_operator_q_two(self):
        res = ss.bgain_test_sequence(ss.identity(1), np.array([1.0 + 0j]), 2.0)
        assert res.gain_identity == pytest.approx(2.0 / 3.0, abs=1e-12)
        assert res.gain_measured == pytest.approx(2.0 / 3.0, abs=1e-10)

    def test_scalar_double_q_1_1(self):
        # (|1/1.1 - 2| * 1.1 + |1.1 - 2|) / 2.1 == 1 exactly
        res = ss.bgain_test_sequence(ONE_DIM_DOUBLE, np.array([1.0 + 0j]), 1.1)
        assert res.gain_identity == pytest.approx(1.0, abs=1e-12)
        assert res.gain_measured == pytest.approx(1.0, abs=1e-9)

    def test_brute_force_series_oracle(self):
        # independent truncation, summed straight from the definition
        a = ss.DenseOperator([[1.3, 0.2], [0.0, 0.7]])
        x = np.array([0.8, -0.6 + 0.1j])
        q = 1.4
        res = ss.bgain_test_sequence(a, x, q)
        a_star = ss.adjoint(a)
        n = 140
        y = {m: (q ** m if m < 0 else q ** (-m)) * x for m in range(-n, n + 1)}
        total = 0.0
        for m in range(-n, n + 2):
            prev = y.get(m - 1, np.zeros(2, dtype=complex))
            cur = y.get(m, np.zeros(2, dtype=complex))
            total += float(np.linalg.norm(prev - ss.apply(a_star, cur)))
        norm1 = sum(float(np.linalg.norm(v)) for v in y.values())
        assert res.gain_measured == pytest.approx(total / norm1, abs=1e-10)
        assert res.gain_measured == pytest.approx(res.gain_identity, abs=1e-8)

    def test_near_eigenvector_of_adjoint_pins_gain_down(self):
        t = ss.ShiftOperator("forward", W_HI, W_LO, 0)
        s = ss.adjoint(t)
        x = ss.shift_eigenvector(s, 1.0, radius=25)
        res = ss.bgain_test_sequence(t, x, 1.01)
        assert res.gain_measured < 0.1
        assert res.gain_measured == pytest.approx(res.gain_identity, abs=1e-8)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            ss.bgain_test_sequence(ss.identity(1), np.array([1.0 + 0j]), 1.0)
        with pytest.raises(ValueError):
            ss.bgain_test_sequence(ss.identity(1), np.array([0.0 + 0j]), 1.5)

    @given(st.integers(0, 10**6), st.floats(1.05, 2.0))
    @settings(max_examples=30, deadline=None)
    def test_measured_matches_identity_generically(self, seed, q):
        rng = np.random.default_rng(seed)
        dim = int(rng.integers(1, 5))
        a = random_invertible(rng, dim)
        x = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        assume(np.linalg.norm(x) > 1e-3)
        res = ss.bgain_test_sequence(a, x, q)
        assert res.gain_measured == pytest.approx(res.gain_identity, abs=1e-8)


class TestRotateOrbit:
    def test_lambda_one_is_identity(self):
        a = ss.diagonal([2.0, 0.5])
        orbit = ss.generate_pseudo_orbit(a, np.ones(2, dtype=complex), 1e-3, (-4, 4), rng_seed=3)
        rotated = ss.rotate_orbit(orbit, 1.0)
        for n in range(-4, 5):
            assert np.array_equal(rotated.state(n), orbit.state(n))

    def test_alternating_signs_preserve_defect_norms_exactly(self):
        a = ss.diagonal([2.0, 0.5])
        orbit = ss.generate_pseudo_orbit(a, np.ones(2, dtype=complex), 1e-3, (-4, 4), rng_seed=3)
        rotated = ss.rotate_orbit(orbit, -1.0)
        for z, w in zip(orbit.defects, rotated.defects):
            assert np.linalg.norm(z) == pytest.approx(np.linalg.norm(w), abs=1e-15)

    def test_roundtrip_through_rotated_operator(self):
        # orbit of rotate(A, lam), unrotated by lam^{-1}, is a pseudo-orbit of
        # A with the same per-step defect norms
        lam = np.exp(0.6j)
        rng = np.random.default_rng(23)
        a = random_invertible(rng, 3)
        rotated_op = ss.rotate(a, lam)
        orbit = ss.generate_pseudo_orbit(
            rotated_op, np.ones(3, dtype=complex), 1e-3, (-6, 6), rng_seed=8
        )
        back = ss.rotate_orbit(orbit, 1.0 / lam)
        for n in range(-6, 6):
            defect = back.state(n + 1) - ss.apply(a, back.state(n))
            assert np.linalg.norm(defect) == pytest.approx(
                np.linalg.norm(orbit.defect(n)), abs=1e-12
            )

    def test_rejects_non_unimodular(self):
        a = ss.diagonal([2.0])
        orbit = ss.generate_pseudo_orbit(a, np.ones(1, dtype=complex), 0.0, (0, 2), rng_seed=0)
        with pytest.raises(ss.NotUnimodularError):
            ss.rotate_orbit(orbit, 0.5)
