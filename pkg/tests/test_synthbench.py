import numpy as np
import pytest

from kite import (
    InvalidArgumentError,
    SynthConfig,
    generate_synthetic,
    mae_eval,
    ridge_fit,
    run_sweep,
)


class TestGenerate:
    def test_deterministic(self):
        cfg = SynthConfig(n=50, d=4, runs=1, n_test=10)
        a = generate_synthetic(cfg, 123)
        b = generate_synthetic(cfg, 123)
        for key in a:
            np.testing.assert_array_equal(a[key], b[key])

    def test_shapes(self):
        cfg = SynthConfig(n=40, d=6, k=3, n_test=17)
        data = generate_synthetic(cfg, 0)
        assert data["theta_star"].shape == (6,)
        assert data["X_train"].shape == (40, 6)
        assert data["y_train"].shape == (40,)
        assert data["Z_test"].shape == (17, 6)

    def test_tiny_sigma_collapses_to_mean(self):
        cfg = SynthConfig(n=200, d=3, sigma=1e-12, mu_train=2.0, n_test=10)
        data = generate_synthetic(cfg, 7)
        np.testing.assert_allclose(data["X_train"], 2.0, atol=1e-9)
        # responses are the degenerate linear value plus unit-variance noise
        expected = data["X_train"] @ data["theta_star"]
        resid = data["y_train"] - expected
        assert 0.5 < np.std(resid) < 1.5

    def test_sample_mean_close_to_mu_train(self):
        cfg = SynthConfig(n=1000, d=5, sigma=5.0, mu_train=1.5, n_test=10)
        data = generate_synthetic(cfg, 11)
        bound = 4.0 * 5.0 / np.sqrt(1000)
        assert np.all(np.abs(data["X_train"].mean(axis=0) - 1.5) < bound)

    def test_mu_test_shifts_queries(self):
        cfg = SynthConfig(n=50, d=4, sigma=1.0, mu_test=3.0, n_test=2000)
        data = generate_synthetic(cfg, 3)
        assert np.all(np.abs(data["Z_test"].mean(axis=0) - 3.0) < 0.2)


class TestRidgeFit:
    def test_single_point_closed_form(self):
        theta = ridge_fit(np.array([[1.0, 0.0]]), np.array([1.0]), 1.0)
        np.testing.assert_allclose(theta, [0.5, 0.0])

    def test_zero_targets(self):
        rng = np.random.default_rng(0)
        theta = ridge_fit(rng.standard_normal((6, 3)), np.zeros(6), 0.5)
        np.testing.assert_allclose(theta, 0.0, atol=1e-12)

    def test_small_beta_matches_ols(self):
        rng = np.random.default_rng(1)
        X = rng.standard_normal((20, 4))
        y = rng.standard_normal(20)
        ols = np.linalg.solve(X.T @ X, X.T @ y)
        ridge = ridge_fit(X, y, 1e-10)
        assert np.linalg.norm(ridge - ols) / np.linalg.norm(ols) <= 1e-6

    def test_validation(self):
        with pytest.raises(InvalidArgumentError):
            ridge_fit(np.ones((2, 2)), np.ones(3), 1.0)
        with pytest.raises(InvalidArgumentError):
            ridge_fit(np.ones((2, 2)), np.ones(2), 0.0)


class TestMaeEval:
    def test_perfect_estimate(self):
        theta = np.array([1.0, -2.0])
        Z = np.random.default_rng(0).standard_normal((10, 2))
        assert mae_eval(theta, theta, Z) == 0.0

    def test_unit_error_on_axis(self):
        theta_star = np.array([1.0, 0.0])
        theta_hat = np.array([0.0, 0.0])
        Z = np.array([[1.0, 0.0], [-1.0, 0.0]])
        assert mae_eval(theta_star, theta_hat, Z) == 1.0

    def test_matches_loop_oracle(self):
        rng = np.random.default_rng(2)
        ts = rng.standard_normal(5)
        th = rng.standard_normal(5)
        Z = rng.standard_normal((30, 5))
        expected = sum(abs(float(z @ (ts - th))) for z in Z) / 30
        assert mae_eval(ts, th, Z) == pytest.approx(expected, rel=1e-12)


class TestRunSweep:
    def test_random_with_k_equals_n_matches_full_pool(self):
        # when the subset is the whole pool every selector coincides
        cfg = SynthConfig(n=12, d=3, k=12, runs=2, n_test=6, methods=("random",), seed=5)
        report = run_sweep(cfg)
        assert "random" in report.methods
        for run in range(cfg.runs):
            data = generate_synthetic(cfg, np.random.SeedSequence([5, 1, run]))
            theta_hat = ridge_fit(data["X_train"], data["y_train"], cfg.beta_fit)
            expected = mae_eval(data["theta_star"], theta_hat, data["Z_test"])
            assert report.methods["random"].per_run[run] == pytest.approx(expected, rel=1e-12)

    def test_report_covers_requested_cells(self):
        cfg = SynthConfig(
            n=40,
            d=3,
            k=3,
            runs=2,
            n_test=5,
            methods=("lite", "dense", "dpp", "random"),
            lambda_grid=(1.0, 2.0),
            seed=1,
        )
        report = run_sweep(cfg)
        assert set(report.methods) == {"lite", "dense", "dpp", "random"}
        assert set(report.lite_lambda) == {1.0, 2.0}
        assert report.lite_best_lambda in (1.0, 2.0)
        for res in report.methods.values():
            assert len(res.per_run) == 2
            assert res.mean_abs_error >= 0.0
        data = report.to_dict()
        assert set(data) == {"methods", "lite_lambda", "lite_best_lambda", "config"}
        assert "lite" in report.to_text()

    def test_deterministic(self):
        cfg = SynthConfig(n=30, d=3, k=3, runs=2, n_test=4, methods=("dense", "random"), seed=9)
        a = run_sweep(cfg)
        b = run_sweep(cfg)
        assert a.to_dict() == b.to_dict()

    def test_method_subset_does_not_change_results(self):
        # dropping other methods must not perturb a method's own numbers
        base = SynthConfig(n=30, d=3, k=3, runs=2, n_test=4, seed=9,
                           methods=("dense", "dpp", "random"), lambda_grid=(1.0,))
        only = SynthConfig(n=30, d=3, k=3, runs=2, n_test=4, seed=9,
                           methods=("random",))
        a = run_sweep(base)
        b = run_sweep(only)
        assert a.methods["random"].per_run == b.methods["random"].per_run

    def test_config_validation(self):
        with pytest.raises(InvalidArgumentError):
            SynthConfig(n=5, k=10)
        with pytest.raises(InvalidArgumentError):
            SynthConfig(methods=("bm25",))
        with pytest.raises(InvalidArgumentError):
            SynthConfig(sigma=0.0)
        with pytest.raises(InvalidArgumentError):
            SynthConfig(runs=0)

    def test_lite_beats_dense_at_desk_scale(self):
        # scaled-down version of the benchmark ordering (full scale is
        # covered by the acceptance suite)
        cfg = SynthConfig(
            n=300, d=5, k=5, runs=3, n_test=40,
            methods=("lite", "dense"), lambda_grid=(5.0, 10.0), seed=0,
        )
        report = run_sweep(cfg)
        assert report.methods["lite"].mean_abs_error < report.methods["dense"].mean_abs_error
