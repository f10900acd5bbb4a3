import numpy as np
import pytest

from kite import (
    EmbeddingBank,
    InvalidArgumentError,
    KernelSpec,
    extend_kernel_state,
    format_kernel_spec,
    init_design,
    init_kernel_state,
    kernel_eval,
    kernel_matrix,
    parse_kernel_spec,
    quad_form,
    rank_one_update,
    residual_kernel,
)


class TestKernelEval:
    def test_gaussian_zero_distance(self):
        spec = KernelSpec("gaussian", sigma=1.0)
        x = np.array([0.3, -2.0, 1.5])
        assert kernel_eval(spec, x, x) == 1.0

    def test_polynomial_formula(self):
        spec = KernelSpec("polynomial", c=1.0, m=3)
        assert kernel_eval(spec, np.array([1.0, 1.0]), np.array([1.0, 0.0])) == 8.0

    def test_linear_dot(self):
        assert kernel_eval(KernelSpec("linear"), np.array([2.0, 3.0]), np.array([4.0, -1.0])) == 5.0

    def test_symmetry_and_gaussian_range(self):
        rng = np.random.default_rng(0)
        for spec in (KernelSpec("linear"), KernelSpec("polynomial", c=0.5, m=2), KernelSpec("gaussian", sigma=2.0)):
            for _ in range(25):
                x = rng.standard_normal(4)
                y = rng.standard_normal(4)
                kxy = kernel_eval(spec, x, y)
                assert kxy == pytest.approx(kernel_eval(spec, y, x), abs=1e-12)
                if spec.kind == "gaussian":
                    assert 0.0 < kxy <= 1.0

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            kernel_eval(KernelSpec("linear"), np.ones(2), np.ones(3))

    def test_matrix_matches_eval(self):
        rng = np.random.default_rng(1)
        X = rng.standard_normal((6, 3))
        Y = rng.standard_normal((4, 3))
        for spec in (KernelSpec("linear"), KernelSpec("polynomial"), KernelSpec("gaussian", sigma=0.7)):
            K = kernel_matrix(spec, X, Y)
            for i in range(6):
                for j in range(4):
                    assert K[i, j] == pytest.approx(kernel_eval(spec, X[i], Y[j]), abs=1e-12)


class TestSpecParsing:
    def test_round_trips(self):
        for spec in (
            KernelSpec("linear"),
            KernelSpec("polynomial", c=2.5, m=4),
            KernelSpec("gaussian", sigma=0.25),
        ):
            assert parse_kernel_spec(format_kernel_spec(spec)) == spec

    def test_explicit_forms(self):
        assert parse_kernel_spec("linear") == KernelSpec("linear")
        assert parse_kernel_spec("poly:c=1.0,m=3") == KernelSpec("polynomial", c=1.0, m=3)
        assert parse_kernel_spec("rbf:sigma=1.5") == KernelSpec("gaussian", sigma=1.5)

    def test_defaults(self):
        assert parse_kernel_spec("poly") == KernelSpec("polynomial", c=1.0, m=3)
        assert parse_kernel_spec("rbf") == KernelSpec("gaussian", sigma=1.0)

    @pytest.mark.parametrize(
        "text",
        ["quadratic", "poly:m=x", "rbf:sigma=-1", "poly:degree=3", "linear:c=1", "rbf:sigma"],
    )
    def test_bad_specs(self, text):
        with pytest.raises(InvalidArgumentError):
            parse_kernel_spec(text)

    def test_invalid_parameters(self):
        with pytest.raises(InvalidArgumentError):
            KernelSpec("gaussian", sigma=0.0)
        with pytest.raises(InvalidArgumentError):
            KernelSpec("polynomial", m=0)
        with pytest.raises(InvalidArgumentError):
            KernelSpec("cubic")


class TestKernelState:
    def test_init_empty(self):
        state = init_kernel_state(KernelSpec("gaussian", sigma=1.0), 0.02)
        assert state.size == 0
        state = init_kernel_state(KernelSpec("linear"), 1.0)
        assert state.size == 0

    def test_init_invalid_beta(self):
        with pytest.raises(InvalidArgumentError):
            init_kernel_state(KernelSpec("linear"), 0.0)

    def test_empty_residual_is_kernel(self):
        rng = np.random.default_rng(2)
        bank = EmbeddingBank(rng.standard_normal((5, 3)))
        for spec in (KernelSpec("linear"), KernelSpec("gaussian", sigma=1.0)):
            state = init_kernel_state(spec, 1.0)
            a = rng.standard_normal(3)
            b = rng.standard_normal(3)
            assert residual_kernel(state, bank, a, b) == pytest.approx(
                kernel_eval(spec, a, b), abs=1e-12
            )

    def test_single_element_projection(self):
        # S = {e1}, linear, beta=1: K_S+beta*I = [2], so k_S(e1,e1) = 1 - 1/2
        bank = EmbeddingBank(np.array([[1.0, 0.0], [0.0, 1.0]]))
        state = init_kernel_state(KernelSpec("linear"), 1.0)
        extend_kernel_state(state, bank, 0)
        e1 = np.array([1.0, 0.0])
        assert residual_kernel(state, bank, e1, e1) == pytest.approx(0.5, abs=1e-12)

    def test_residual_matches_dense_inverse(self):
        rng = np.random.default_rng(3)
        bank = EmbeddingBank(rng.standard_normal((30, 6)))
        spec = KernelSpec("gaussian", sigma=1.2)
        beta = 0.5
        state = init_kernel_state(spec, beta)
        sel = [4, 9, 0, 17, 22, 11, 28, 3, 15, 26]
        for idx in sel:
            extend_kernel_state(state, bank, idx)
        K = kernel_matrix(spec, bank.vectors[sel])
        Kinv = np.linalg.inv(K + beta * np.eye(len(sel)))
        for _ in range(15):
            a = rng.standard_normal(6)
            b = rng.standard_normal(6)
            ka = kernel_matrix(spec, bank.vectors[sel], a[None, :])[:, 0]
            kb = kernel_matrix(spec, bank.vectors[sel], b[None, :])[:, 0]
            expected = kernel_eval(spec, a, b) - ka @ Kinv @ kb
            assert residual_kernel(state, bank, a, b) == pytest.approx(
                expected, abs=1e-8
            )

    def test_extend_single(self):
        bank = EmbeddingBank(np.array([[1.0, 0.0], [0.0, 1.0]]))
        state = init_kernel_state(KernelSpec("linear"), 1.0)
        extend_kernel_state(state, bank, 0)
        np.testing.assert_allclose(state.chol, [[np.sqrt(2.0)]])

    def test_extend_orthogonal(self):
        bank = EmbeddingBank(np.array([[1.0, 0.0], [0.0, 1.0]]))
        state = init_kernel_state(KernelSpec("linear"), 1.0)
        extend_kernel_state(state, bank, 0)
        extend_kernel_state(state, bank, 1)
        np.testing.assert_allclose(state.chol, np.sqrt(2.0) * np.eye(2), atol=1e-15)

    def test_thirty_extensions_reconstruct_gram(self):
        rng = np.random.default_rng(4)
        bank = EmbeddingBank(rng.standard_normal((40, 5)))
        spec = KernelSpec("gaussian", sigma=1.0)
        beta = 0.02
        state = init_kernel_state(spec, beta)
        order = list(rng.permutation(40)[:30])
        for idx in order:
            extend_kernel_state(state, bank, idx)
        target = kernel_matrix(spec, bank.vectors[order]) + beta * np.eye(30)
        recon = state.chol @ state.chol.T
        err = np.linalg.norm(recon - target) / np.linalg.norm(target)
        assert err <= 1e-8
        assert np.all(np.diag(state.chol) > 0)

    def test_extend_duplicate_rejected(self):
        bank = EmbeddingBank(np.eye(3))
        state = init_kernel_state(KernelSpec("linear"), 1.0)
        extend_kernel_state(state, bank, 1)
        with pytest.raises(InvalidArgumentError):
            extend_kernel_state(state, bank, 1)

    def test_residual_self_shrinks_as_set_grows(self):
        rng = np.random.default_rng(5)
        bank = EmbeddingBank(rng.standard_normal((20, 4)))
        spec = KernelSpec("gaussian", sigma=1.0)
        state = init_kernel_state(spec, 0.1)
        probes = [rng.standard_normal(4) for _ in range(5)]
        prev = [residual_kernel(state, bank, p, p) for p in probes]
        for idx in range(12):
            extend_kernel_state(state, bank, idx)
            cur = [residual_kernel(state, bank, p, p) for p in probes]
            for before, after in zip(prev, cur):
                assert after <= before + 1e-10
            prev = cur


class TestOperatorIdentities:
    @pytest.mark.parametrize("beta", [0.1, 1.0, 10.0])
    def test_both_identities(self, beta):
        rng = np.random.default_rng(7)
        for _ in range(20):
            m = int(rng.integers(1, 21))
            d = int(rng.integers(1, 21))
            A = rng.standard_normal((m, d))
            left = np.linalg.inv(A.T @ A + beta * np.eye(d)) @ A.T
            right = A.T @ np.linalg.inv(A @ A.T + beta * np.eye(m))
            assert np.linalg.norm(left - right) <= 1e-10
            lhs = np.eye(d) - A.T @ np.linalg.inv(A @ A.T + beta * np.eye(m)) @ A
            rhs = beta * np.linalg.inv(A.T @ A + beta * np.eye(d))
            assert np.linalg.norm(lhs - rhs) <= 1e-10


class TestFeatureSpaceEquivalence:
    def test_linear_kernel_matches_design_path(self):
        # (1/beta)*k_S(x,x) must equal x^T V_S^{-1} x when the kernel is linear
        rng = np.random.default_rng(8)
        bank = EmbeddingBank(rng.standard_normal((60, 7)))
        beta = 0.5
        state_k = init_kernel_state(KernelSpec("linear"), beta)
        state_d = init_design(7, beta)
        sel = list(rng.permutation(60)[:40])
        for count, idx in enumerate(sel, start=1):
            extend_kernel_state(state_k, bank, idx)
            rank_one_update(state_d, bank.vectors[idx])
            if count % 8 == 0 or count == len(sel):
                for _ in range(5):
                    x = rng.standard_normal(7)
                    lifted = residual_kernel(state_k, bank, x, x) / beta
                    assert lifted == pytest.approx(
                        quad_form(state_d, x, x), abs=1e-8
                    )
