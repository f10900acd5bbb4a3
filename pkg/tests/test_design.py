import numpy as np
import pytest

from kite import (
    InvalidArgumentError,
    NumericalDegeneracyError,
    init_design,
    log_det_increment,
    quad_form,
    rank_one_update,
)


def direct_inverse(dim, beta, updates):
    V = beta * np.eye(dim)
    for x in updates:
        V += np.outer(x, x)
    return np.linalg.inv(V)


class TestInitDesign:
    def test_identity_scaling(self):
        state = init_design(2, 2.0)
        np.testing.assert_allclose(state.inv, [[0.5, 0.0], [0.0, 0.5]])
        assert state.count == 0

    def test_one_dim(self):
        state = init_design(1, 1.0)
        np.testing.assert_allclose(state.inv, [[1.0]])

    def test_default_beta(self):
        state = init_design(3, 0.02)
        np.testing.assert_allclose(state.inv, 50.0 * np.eye(3))

    @pytest.mark.parametrize("dim,beta", [(0, 1.0), (-1, 1.0), (2, 0.0), (2, -0.5), (2, np.nan)])
    def test_invalid(self, dim, beta):
        with pytest.raises(InvalidArgumentError):
            init_design(dim, beta)


class TestQuadForm:
    def test_fresh_diagonal(self):
        state = init_design(2, 2.0)
        e1 = np.array([1.0, 0.0])
        assert quad_form(state, e1, e1) == pytest.approx(0.5)

    def test_orthogonal(self):
        state = init_design(2, 1.0)
        assert quad_form(state, np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0

    def test_after_update_matches_direct(self):
        # V = I + e1 e1^T = diag(2, 1), so e1^T V^{-1} e1 = 0.5
        state = init_design(2, 1.0)
        e1 = np.array([1.0, 0.0])
        rank_one_update(state, e1)
        expected = float(e1 @ direct_inverse(2, 1.0, [e1]) @ e1)
        assert expected == pytest.approx(0.5)
        assert quad_form(state, e1, e1) == pytest.approx(expected, abs=1e-12)

    def test_symmetric_in_arguments(self):
        rng = np.random.default_rng(3)
        state = init_design(6, 0.5)
        for _ in range(4):
            rank_one_update(state, rng.standard_normal(6))
        for _ in range(20):
            a = rng.standard_normal(6)
            b = rng.standard_normal(6)
            assert quad_form(state, a, b) == pytest.approx(
                quad_form(state, b, a), abs=1e-12
            )

    def test_dimension_mismatch(self):
        state = init_design(3, 1.0)
        with pytest.raises(InvalidArgumentError):
            quad_form(state, np.ones(2), np.ones(3))

    def test_lost_positive_definiteness_is_reported(self):
        # a corrupted inverse must raise rather than clamp
        state = init_design(2, 1.0)
        state.inv = np.array([[-1.0, 0.0], [0.0, 1.0]])
        e1 = np.array([1.0, 0.0])
        with pytest.raises(NumericalDegeneracyError):
            quad_form(state, e1, e1)
        with pytest.raises(NumericalDegeneracyError):
            rank_one_update(state, np.array([2.0, 0.0]))


class TestRankOneUpdate:
    def test_e1_update(self):
        state = init_design(2, 1.0)
        rank_one_update(state, np.array([1.0, 0.0]))
        np.testing.assert_allclose(state.inv, [[0.5, 0.0], [0.0, 1.0]], atol=1e-15)
        assert state.count == 1

    def test_zero_vector_is_noop(self):
        state = init_design(4, 0.7)
        before = state.inv.copy()
        rank_one_update(state, np.zeros(4))
        np.testing.assert_array_equal(state.inv, before)

    def test_matches_direct_inverse(self):
        rng = np.random.default_rng(11)
        state = init_design(8, 0.5)
        updates = [rng.uniform(-10, 10, 8) for _ in range(20)]
        for x in updates:
            rank_one_update(state, x)
        direct = direct_inverse(8, 0.5, updates)
        err = np.linalg.norm(state.inv - direct) / np.linalg.norm(direct)
        assert err <= 1e-8

    def test_non_finite_rejected(self):
        state = init_design(2, 1.0)
        with pytest.raises(InvalidArgumentError):
            rank_one_update(state, np.array([1.0, np.inf]))

    def test_dimension_mismatch(self):
        state = init_design(2, 1.0)
        with pytest.raises(InvalidArgumentError):
            rank_one_update(state, np.ones(3))


class TestLogDetIncrement:
    def test_unit_vector(self):
        state = init_design(2, 1.0)
        assert log_det_increment(state, np.array([1.0, 0.0])) == pytest.approx(
            np.log(2.0), abs=1e-12
        )

    def test_zero_vector(self):
        state = init_design(3, 2.0)
        assert log_det_increment(state, np.zeros(3)) == 0.0

    def test_matches_direct_determinant(self):
        rng = np.random.default_rng(5)
        state = init_design(5, 1.0)
        updates = [rng.standard_normal(5) for _ in range(7)]
        for u in updates:
            rank_one_update(state, u)
        V = np.eye(5) + sum(np.outer(u, u) for u in updates)
        for _ in range(10):
            x = rng.standard_normal(5)
            expected = np.linalg.slogdet(V + np.outer(x, x))[1] - np.linalg.slogdet(V)[1]
            assert log_det_increment(state, x) == pytest.approx(expected, abs=1e-9)

    def test_non_negative(self):
        rng = np.random.default_rng(6)
        state = init_design(4, 0.02)
        for _ in range(30):
            x = rng.standard_normal(4)
            assert log_det_increment(state, x) >= 0.0
            rank_one_update(state, x)


class TestInvariants:
    @pytest.mark.parametrize("beta", [0.02, 1.0, 10.0])
    def test_incremental_vs_direct(self, beta):
        rng = np.random.default_rng(17)
        d = 16
        state = init_design(d, beta)
        updates = [rng.uniform(-10, 10, d) for _ in range(60)]
        for x in updates:
            rank_one_update(state, x)
        direct = direct_inverse(d, beta, updates)
        err = np.linalg.norm(state.inv - direct) / np.linalg.norm(direct)
        assert err <= 1e-8

    def test_query_form_monotone_under_updates(self):
        # -z^T V^{-1} z is non-decreasing as updates accumulate
        rng = np.random.default_rng(23)
        state = init_design(6, 0.5)
        probes = [rng.standard_normal(6) for _ in range(5)]
        prev = [quad_form(state, z, z) for z in probes]
        for _ in range(25):
            rank_one_update(state, rng.standard_normal(6))
            cur = [quad_form(state, z, z) for z in probes]
            for p, c in zip(prev, cur):
                assert c <= p + 1e-12
            prev = cur

    def test_diminishing_log_det_increment(self):
        # increment of a fixed x after more updates never exceeds the
        # increment after a subset of them
        rng = np.random.default_rng(29)
        d = 5
        for _ in range(10):
            x = rng.standard_normal(d)
            updates = [rng.standard_normal(d) for _ in range(8)]
            small = init_design(d, 1.0)
            for u in updates[:3]:
                rank_one_update(small, u)
            large = init_design(d, 1.0)
            for u in updates:
                rank_one_update(large, u)
            assert log_det_increment(large, x) <= log_det_increment(small, x) + 1e-10

    def test_symmetry_enforced(self):
        rng = np.random.default_rng(31)
        state = init_design(10, 0.02)
        for _ in range(200):
            rank_one_update(state, rng.standard_normal(10))
        assert np.max(np.abs(state.inv - state.inv.T)) <= 1e-10
