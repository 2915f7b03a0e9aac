mod common;

use common::{brute_force_remainder, direct_wls};
use errdist::montecarlo::{
    convergence_study, expansion_remainder, run_monte_carlo, EstimatorKind, ResidualSource,
    ScenarioConfig,
};
use errdist::{
    sample_scenario, CovariateModel, ErrorModel, LocalPolyConfig, LocalPolyFit, RegressionModel,
};

fn normal() -> ErrorModel {
    ErrorModel::normal(1.0).unwrap()
}

fn scenario(n: usize, seed: u64) -> errdist::Dataset {
    sample_scenario(
        &CovariateModel::Uniform,
        &RegressionModel::polynomial(vec![1.0, 1.0, -2.0]).unwrap(),
        &normal(),
        n,
        seed,
    )
    .unwrap()
}

#[test]
fn noisy_fit_matches_direct_least_squares() {
    let data = scenario(300, 11);
    let c = 0.2;
    for d in 0..=3 {
        let fit = LocalPolyFit::new(LocalPolyConfig::new(d, c), &data).unwrap();
        for i in 0..=40 {
            let x = i as f64 / 40.0;
            let want = direct_wls(data.z(), data.y(), d, c, x);
            let got = fit.predict(x).unwrap();
            assert!((got - want).abs() < 1e-9 * (1.0 + want.abs()), "d={d} x={x}: {got} vs {want}");
        }
    }
}

#[test]
fn remainder_matches_dense_grid() {
    let n = 200;
    let data = scenario(n, 7);
    let config = ScenarioConfig::new(n, 1, normal());
    let got = expansion_remainder(&data, &config).unwrap();
    let residuals = config.residuals(&data).unwrap();
    let errors = data.true_errors().unwrap();
    let a = config.bandwidths().unwrap().a_n;
    let lo = residuals.iter().chain(errors).fold(f64::INFINITY, |m, &v| m.min(v)) - 3.0 * a;
    let hi = residuals.iter().chain(errors).fold(f64::NEG_INFINITY, |m, &v| m.max(v)) + 3.0 * a;
    let model = normal();
    let want = brute_force_remainder(&residuals, errors, a, &|t| model.density(t), lo, hi, 1_000_000);
    assert!((got - want).abs() < 1e-3, "{got} vs {want}");
    assert_eq!(got, expansion_remainder(&data.clone(), &config).unwrap());
}

#[test]
fn known_regression_stays_under_ceiling() {
    let n = 400;
    let data = scenario(n, 3);
    let mut config = ScenarioConfig::new(n, 1, normal());
    config.residual_source = ResidualSource::TrueRegression;
    let a = config.bandwidths().unwrap().a_n;
    let errors = data.true_errors().unwrap();
    let mean = errors.iter().sum::<f64>() / n as f64;
    let sup_f = normal().density(0.0);
    // Smoothing an EDF by a_n moves it by at most the largest count of
    // errors in a window of width 2a_n.
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let window = sorted
        .iter()
        .map(|&e| sorted.iter().filter(|&&x| (x - e).abs() <= 2.0 * a).count())
        .max()
        .unwrap() as f64
        / n as f64;
    let ceiling = (n as f64).sqrt() * (mean.abs() * sup_f + window);
    let got = expansion_remainder(&data, &config).unwrap();
    assert!(got <= ceiling, "{got} > {ceiling}");
}

#[test]
fn residuals_approach_errors() {
    let config = ScenarioConfig::new(100, 1, normal());
    let gap = |n: usize| {
        let data = scenario(n, 5);
        let res = config.residuals(&data).unwrap();
        res.iter()
            .zip(data.true_errors().unwrap())
            .map(|(r, e)| (r - e).abs())
            .fold(0.0, f64::max)
    };
    assert!(gap(4000) < gap(250));
}

#[test]
fn corrected_estimators_beat_oracle_edf() {
    let report = run_monte_carlo(&ScenarioConfig::new(200, 1000, normal())).unwrap();
    let point = report.at(0.0).unwrap();
    let oracle = point.estimator(EstimatorKind::OracleEdf).variance;
    for kind in [EstimatorKind::MeanZeroCorrected, EstimatorKind::EmpiricalLikelihood] {
        let v = point.estimator(kind).variance;
        assert!(v < oracle, "{} variance {v} not below {oracle}", kind.name());
        let theory = point.var_efficient_meanzero;
        assert!((v - theory).abs() < 0.2 * theory, "{}: {v} vs {theory}", kind.name());
    }
}

#[test]
fn shrinkage_is_robust_across_master_seeds() {
    let sizes = [200, 800, 3200];
    let decreasing = (0..10u64)
        .filter(|&s| {
            let mut config = ScenarioConfig::new(sizes[0], 500, normal());
            config.seed = 1_000 + s;
            let rows = convergence_study(&config, &sizes).unwrap();
            rows.windows(2).all(|w| w[1].median_remainder < w[0].median_remainder)
        })
        .count();
    assert!(decreasing >= 9, "decreasing for only {decreasing} of 10 seeds");
}
