use qwoa::engine::Landscape;
use qwoa::problems::{generate_instance, Family, SizeParams};
use qwoa::tuner::{evaluate_params, tune, EvalMode, Objective, Optimizer, TuneParams, TuneSpec};
use qwoa::Sense;

fn landscape(family: Family, n: usize, k: usize, seed: u64) -> Landscape {
    Landscape::new(generate_instance(family, SizeParams::new(n, k), seed).unwrap()).unwrap()
}

#[test]
fn shot_estimate_is_within_five_standard_errors() {
    let l = landscape(Family::Maxcut, 10, 2, 2);
    let params = TuneParams::initial(3, &l.instance.lambda_f);
    let exact = evaluate_params(&l, 3, &params, Objective::Expectation, EvalMode::Exact, 0).unwrap();
    let shots = 10_000;
    let estimate = evaluate_params(&l, 3, &params, Objective::Expectation, EvalMode::Shots(shots), 7).unwrap();
    // the spread under the amplified state is at most the full value range
    let (lo, hi) = l.eval_values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let se = (hi - lo) / 2.0 / (shots as f64).sqrt();
    assert!((estimate - exact).abs() < 5.0 * se, "exact {exact} estimate {estimate} se {se}");
}

#[test]
fn exact_cvar_bounds_expectation() {
    let l = landscape(Family::Qap, 5, 5, 1);
    let params = TuneParams::initial(2, &[]);
    let mean = evaluate_params(&l, 2, &params, Objective::Expectation, EvalMode::Exact, 0).unwrap();
    let cvar = evaluate_params(&l, 2, &params, Objective::Cvar(0.1), EvalMode::Exact, 0).unwrap();
    let full = evaluate_params(&l, 2, &params, Objective::Cvar(1.0), EvalMode::Exact, 0).unwrap();
    assert_eq!(l.sense(), Sense::Minimize);
    assert!(cvar <= mean);
    assert!((full - mean).abs() < 1e-9 * mean.abs());
}

#[test]
fn tuned_maxcut_beats_one_sigma_above_mean() {
    let l = landscape(Family::Maxcut, 12, 2, 5);
    let report = tune(&l, 10, &TuneSpec::default()).unwrap();
    assert!(report.best_value > l.mean() + l.sigma(), "{} vs {}", report.best_value, l.mean() + l.sigma());
    assert!(report.evaluations <= 400);
    assert_eq!(report.log.len(), report.evaluations);
}

#[test]
fn best_so_far_is_monotone_and_logged() {
    let l = landscape(Family::KMeans, 6, 3, 3);
    let spec = TuneSpec {
        budget: 60,
        ..TuneSpec::default()
    };
    let report = tune(&l, 3, &spec).unwrap();
    let init = TuneParams::initial(3, &l.instance.lambda_f);
    assert_eq!(report.log[0].params, init);
    for w in report.log.windows(2) {
        assert!(w[1].best_so_far <= w[0].best_so_far);
        assert_eq!(w[1].eval, w[0].eval + 1);
    }
    let last = report.log.last().unwrap();
    assert_eq!(last.best_so_far, report.best_value);
    assert!(report.converged || report.budget_exhausted);
}

#[test]
fn shot_mode_counts_preparations() {
    let l = landscape(Family::Maxcut, 8, 2, 1);
    let spec = TuneSpec {
        mode: EvalMode::Shots(100),
        budget: 25,
        ..TuneSpec::default()
    };
    let report = tune(&l, 2, &spec).unwrap();
    assert_eq!(report.preparations, report.evaluations * 100);
    let again = tune(&l, 2, &spec).unwrap();
    assert_eq!(again, report);
}

#[test]
fn bfgs_improves_on_start() {
    let l = landscape(Family::Maxcut, 8, 2, 4);
    let spec = TuneSpec {
        optimizer: Optimizer::Bfgs,
        budget: 150,
        ..TuneSpec::default()
    };
    let report = tune(&l, 3, &spec).unwrap();
    assert!(report.best_value > report.log[0].value);
    let shots = TuneSpec {
        optimizer: Optimizer::Bfgs,
        mode: EvalMode::Shots(10),
        ..TuneSpec::default()
    };
    assert!(tune(&l, 3, &shots).is_err());
}

#[test]
fn lambda_tuning_moves_penalties() {
    let l = landscape(Family::Mis, 10, 2, 6);
    let spec = TuneSpec {
        tune_lambda: true,
        budget: 120,
        ..TuneSpec::default()
    };
    let report = tune(&l, 3, &spec).unwrap();
    assert_eq!(report.log[0].params.lambda_t, l.instance.lambda_f);
    assert!(report.log.iter().any(|r| r.params.lambda_t != l.instance.lambda_f));
    assert!(report.log.iter().all(|r| r.params.lambda_t.iter().all(|&v| v >= 0.0)));
    // fixed penalties stay put without the flag
    let fixed = tune(&l, 3, &TuneSpec { budget: 30, ..TuneSpec::default() }).unwrap();
    assert!(fixed.log.iter().all(|r| r.params.lambda_t == l.instance.lambda_f));
}

#[test]
fn invalid_specs_are_rejected() {
    let l = landscape(Family::Maxcut, 6, 2, 1);
    assert!(tune(&l, 2, &TuneSpec { budget: 0, ..TuneSpec::default() }).is_err());
    assert!(tune(&l, 2, &TuneSpec { objective: Objective::Cvar(0.0), ..TuneSpec::default() }).is_err());
    assert!(tune(&l, 0, &TuneSpec::default()).is_err());
}
