"""Smoke tests for the pycoex module.

Runnable standalone (python test_smoke.py) or under pytest. Requires the
built extension on PYTHONPATH.
"""

import math

import pycoex


def small_dataset(seed=5):
    truth = pycoex.SyntheticTruth()
    truth.design = pycoex.Design.uniform(4, 3, 2, 4)
    ensemble, reanalysis, latents = pycoex.generate_synthetic(truth, seed)
    return truth, ensemble, reanalysis, latents


def quick_chains(seed=9):
    cfg = pycoex.ChainConfig()
    cfg.n_chains = 2
    cfg.iters_initial = 1500
    cfg.burn_in = 750
    cfg.extend_by = 750
    cfg.thin = 6
    cfg.max_total_iters = 30000
    cfg.base_seed = seed
    return cfg


def test_validate_reports_violations():
    data = pycoex.EnsembleData([("a", [1.0], [2.0]), ("b", [1.5], [])])
    violations, warnings = pycoex.validate(data, pycoex.ReanalysisData([0.5]))
    assert any("fut_runs empty" in v for v in violations)
    data_ok = pycoex.EnsembleData([("a", [1.0], [2.0]), ("b", [1.5], [2.5])])
    violations, warnings = pycoex.validate(data_ok, pycoex.ReanalysisData([0.5]))
    assert violations == []
    assert any("prior-dominated" in w for w in warnings)


def test_fit_is_deterministic_and_converges():
    truth, ensemble, reanalysis, _ = small_dataset()
    priors = pycoex.PriorConfig.defaults_for(ensemble.model_count)
    a = pycoex.fit(ensemble, reanalysis, priors, truth.inad, quick_chains())
    b = pycoex.fit(ensemble, reanalysis, priors, truth.inad, quick_chains())
    assert a["converged"]
    assert a["draws"]["mu_H"] == b["draws"]["mu_H"]
    assert len(a["draws"]["mu_H"]) == a["kept_per_chain"] * a["n_chains"]
    assert set(a["psrf"]) >= {"mu_H", "mu_F", "beta", "psi2", "nu_H", "tau_W"}
    assert all(v <= 1.10 for v in a["psrf"].values())
    assert 0.0 <= a["accept_nu_h"] <= 1.0
    # Predictive and derived series come with the draws.
    for name in ("Y_F", "Y_Fa", "phi_a", "Y_F_minus_Y_H", "constraint_effect"):
        assert len(a["draws"][name]) == len(a["draws"]["mu_H"])


def test_log_joint_sentinel_and_derived():
    truth, ensemble, reanalysis, _ = small_dataset()
    priors = pycoex.PriorConfig.defaults_for(ensemble.model_count)
    state = pycoex.ParameterState.sized(ensemble.model_count)
    value = pycoex.log_joint(state, ensemble, reanalysis, priors, truth.inad)
    assert math.isfinite(value)
    state.tau_h = 0.0
    assert pycoex.log_joint(state, ensemble, reanalysis, priors, truth.inad) == -math.inf

    state.tau_h = 1.44
    d = pycoex.derived(state, pycoex.InadequacyConfig(1.2, 1.2))
    assert abs(d["tau_delta_h"] - 1.0) < 1e-12


def test_analytic_formulas():
    assert abs(pycoex.dilution_expectation(0.0, 1.0, 1.0, 1.0) + 0.5) < 1e-12
    assert abs(pycoex.dilution_expectation(0.7, 2.0, 0.0, 3.0) - 0.7) < 1e-12
    assert abs(pycoex.coexchangeable_shrinkage(2.0, 1.0, 1.0, 1.0) - 1.0) < 1e-12

    data = pycoex.EnsembleData([("a", [0.0], [1.0]), ("b", [2.0], [5.0])])
    fit = pycoex.ensemble_regression(data)
    assert abs(fit["beta_prime_hat"] - 1.0) < 1e-12

    pits = [i / 14.0 for i in range(1, 14)]
    assert pycoex.ks_uniform_pvalue(pits) > 0.95


def test_diagnostics():
    chains = [[float(i % 7) for i in range(100)], [float((i + 3) % 7) for i in range(100)]]
    assert pycoex.psrf(chains) < 1.2
    series = [math.sin(0.1 * i) for i in range(1000)]
    assert pycoex.mcse_batch_means(series) > 0.0
    summary = pycoex.summarize([float(i) for i in range(1, 101)])
    assert abs(summary["q50"] - 50.5) < 1e-12
    matrix, flags = pycoex.correlations([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]])
    assert abs(matrix[0][1] - 1.0) < 1e-9
    assert flags == [False, False]


def test_loo_cv_pit():
    truth, ensemble, reanalysis, _ = small_dataset(seed=11)
    priors = pycoex.PriorConfig.defaults_for(ensemble.model_count)
    pits = pycoex.loo_cv_pit(ensemble, reanalysis, priors, truth.inad, quick_chains(21), "all")
    assert len(pits) == 4
    assert all(0.0 < pit < 1.0 for _, pit in pits)


def test_correctness_suites():
    errors = pycoex.conditional_grid_check(seed=3, n_states=2)
    assert len(errors) == 16
    assert max(errors.values()) < 1e-6
    z = pycoex.geweke_joint_test(n_draws=1500, seed=4)
    assert len(z) == 36
    assert max(abs(v) for v in z.values()) < 6.0


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok {test.__name__}")
    print(f"{len(tests)} smoke tests passed")


if __name__ == "__main__":
    main()
