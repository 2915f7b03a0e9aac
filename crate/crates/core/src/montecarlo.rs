//! Replicated simulations of the residual-based estimators.
//!
//! Each replication draws a dataset from the scenario, fits the local
//! polynomial smoother at the scheduled bandwidths, and records five
//! estimators of `F` on the `t` grid together with the sup-remainder
//!
//! ```text
//! √n · sup_t |F̂*(t) − 𝔽(t) − f(t) ε̄|
//! ```
//!
//! which should vanish in probability as `n` grows. Replication `i` is
//! seeded from `(seed, i)` alone and results are reduced in index order, so
//! reports are bit-identical for any number of worker threads.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{
    BandwidthSchedule, Bandwidths, EdfCurve, EmpiricalLikelihood, MeanZeroCorrected, SmoothedEdf,
};
use crate::kernels::Kernel;
use crate::localpoly::{Dataset, LocalPolyConfig, LocalPolyFit};
use crate::models::{
    sample_scenario, var_efficient_meanzero, var_empirical, var_smoothed, CovariateModel,
    ErrorModel, RegressionModel,
};
use crate::rng::replication_seed;

/// Master seed used when a scenario does not set one.
pub const DEFAULT_SEED: u64 = 20_061_018;
pub const DEFAULT_SUP_GRID_SIZE: usize = 2048;

/// The estimators tracked per replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    /// EDF of the true errors.
    OracleEdf,
    /// EDF of the residuals.
    ResidualEdf,
    /// Kernel-smoothed residual EDF.
    Smoothed,
    /// Mean-zero corrected EDF of the true errors.
    MeanZeroCorrected,
    /// Empirical likelihood EDF of the true errors.
    EmpiricalLikelihood,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 5] = [
        Self::OracleEdf,
        Self::ResidualEdf,
        Self::Smoothed,
        Self::MeanZeroCorrected,
        Self::EmpiricalLikelihood,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::OracleEdf => "oracle_edf",
            Self::ResidualEdf => "residual_edf",
            Self::Smoothed => "smoothed",
            Self::MeanZeroCorrected => "meanzero_corrected",
            Self::EmpiricalLikelihood => "empirical_likelihood",
        }
    }

    /// Asymptotic variance of `√n(est(t) − F(t))`.
    pub fn theory_variance(&self, model: &ErrorModel, t: f64) -> f64 {
        match self {
            Self::OracleEdf => var_empirical(model, t),
            // The residual EDF shares the smoothed estimator's expansion.
            Self::ResidualEdf | Self::Smoothed => var_smoothed(model, t),
            Self::MeanZeroCorrected | Self::EmpiricalLikelihood => var_efficient_meanzero(model, t),
        }
    }

    fn index(&self) -> usize {
        *self as usize
    }
}

/// Where the residuals of a replication come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResidualSource {
    /// `Y − r̂(Z)` from the local polynomial fit.
    #[default]
    Smoother,
    /// `Y − r(Z)` with the true regression function. Diagnostic only.
    TrueRegression,
}

/// A complete simulation scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub n: usize,
    pub replications: usize,
    pub covariate: CovariateModel,
    pub regression: RegressionModel,
    pub error: ErrorModel,
    pub schedule: BandwidthSchedule,
    pub order: usize,
    pub seed: u64,
    pub t_grid: Vec<f64>,
    pub sup_grid_size: usize,
    pub smoothing_kernel: Kernel,
    pub regression_kernel: Kernel,
    pub residual_source: ResidualSource,
}

impl ScenarioConfig {
    /// Uniform covariates, `r(z) = 1 + z − 2z²`, local quadratic fit, unit
    /// bandwidth constants and `t = 0`.
    pub fn new(n: usize, replications: usize, error: ErrorModel) -> Self {
        Self {
            n,
            replications,
            covariate: CovariateModel::Uniform,
            regression: RegressionModel::Polynomial(vec![1.0, 1.0, -2.0]),
            error,
            schedule: BandwidthSchedule::default(),
            order: 2,
            seed: DEFAULT_SEED,
            t_grid: vec![0.0],
            sup_grid_size: DEFAULT_SUP_GRID_SIZE,
            smoothing_kernel: Kernel::triweight(),
            regression_kernel: Kernel::epanechnikov(),
            residual_source: ResidualSource::Smoother,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidConfig(msg));
        if self.replications == 0 {
            return invalid("replications must be at least 1".into());
        }
        if self.n < 2 {
            return invalid(format!("n must be at least 2, got {}", self.n));
        }
        if self.t_grid.is_empty() {
            return invalid("t grid is empty".into());
        }
        if self.t_grid.iter().any(|t| !t.is_finite()) {
            return invalid("t grid has non-finite entries".into());
        }
        if self.t_grid.windows(2).any(|w| w[0] > w[1]) {
            return invalid("t grid must be sorted ascending".into());
        }
        if self.sup_grid_size < 2 {
            return invalid("sup grid needs at least 2 points".into());
        }
        if self.error.is_test_only() {
            return invalid(format!(
                "error model `{}` has a non-Lipschitz density and is not allowed in simulations",
                self.error
            ));
        }
        self.schedule
            .validate()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        Ok(())
    }

    pub fn bandwidths(&self) -> Result<Bandwidths> {
        self.schedule.bandwidths(self.n)
    }

    fn smoother(&self, c_n: f64) -> LocalPolyConfig {
        LocalPolyConfig::new(self.order, c_n).with_kernel(self.regression_kernel)
    }

    /// Residuals of a dataset under this scenario's residual source.
    pub fn residuals(&self, dataset: &Dataset) -> Result<Vec<f64>> {
        match self.residual_source {
            ResidualSource::Smoother => {
                let bw = self.schedule.bandwidths(dataset.len())?;
                LocalPolyFit::new(self.smoother(bw.c_n), dataset)?.residuals()
            }
            ResidualSource::TrueRegression => Ok(dataset
                .z()
                .iter()
                .zip(dataset.y())
                .map(|(&z, &y)| y - self.regression.value(z))
                .collect()),
        }
    }
}

/// `√n · sup_t |F̂*(t) − 𝔽(t) − f(t) ε̄|` for one dataset.
pub fn expansion_remainder(dataset: &Dataset, config: &ScenarioConfig) -> Result<f64> {
    let errors = dataset
        .true_errors()
        .ok_or_else(|| Error::InvalidDataset("expansion remainder needs the true errors".into()))?;
    let residuals = config.residuals(dataset)?;
    let bw = config.schedule.bandwidths(dataset.len())?;
    let smoothed = SmoothedEdf::new(residuals, bw.a_n, config.smoothing_kernel)?;
    let oracle = EdfCurve::new(errors.to_vec())?;
    Ok(remainder_statistic(&smoothed, &oracle, &config.error, config.sup_grid_size))
}

/// Sup-remainder for given residuals and true errors.
///
/// The sup is taken over both one-sided limits at every jump of `𝔽` and a
/// uniform grid of `grid_size` points on `[min − 3a, max + 3a]`, where the
/// range covers residuals and errors.
pub fn remainder_statistic(
    smoothed: &SmoothedEdf,
    oracle: &EdfCurve,
    model: &ErrorModel,
    grid_size: usize,
) -> f64 {
    let n = oracle.len() as f64;
    let mean = oracle.samples().iter().sum::<f64>() / n;
    let continuous = |t: f64| smoothed.eval(t) - model.density(t) * mean;

    let mut sup: f64 = 0.0;
    for &e in oracle.samples() {
        let c = continuous(e);
        sup = sup
            .max((c - oracle.eval(e)).abs())
            .max((c - oracle.left_limit(e)).abs());
    }

    let a = smoothed.bandwidth();
    let res = smoothed.residuals();
    let errs = oracle.samples();
    let lo = res[0].min(errs[0]) - 3.0 * a;
    let hi = res[res.len() - 1].max(errs[errs.len() - 1]) + 3.0 * a;
    let step = (hi - lo) / (grid_size - 1) as f64;
    for i in 0..grid_size {
        let t = lo + step * i as f64;
        sup = sup.max((continuous(t) - oracle.eval(t)).abs());
    }
    n.sqrt() * sup
}

/// Estimates of one successful replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationValues {
    /// `estimates[k][j]` is estimator `EstimatorKind::ALL[k]` at `t_grid[j]`.
    pub estimates: Vec<Vec<f64>>,
    pub remainder: f64,
}

impl ReplicationValues {
    pub fn estimator(&self, kind: EstimatorKind) -> &[f64] {
        &self.estimates[kind.index()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReplicationOutcome {
    Success(ReplicationValues),
    Failure { rep_index: usize, error: Error },
}

/// Runs replication `rep_index`. Estimation failures are returned as
/// [`ReplicationOutcome::Failure`]; only configuration problems are errors.
pub fn run_replication(config: &ScenarioConfig, rep_index: usize) -> Result<ReplicationOutcome> {
    config.validate()?;
    if rep_index >= config.replications {
        return Err(Error::InvalidConfig(format!(
            "replication index {rep_index} out of range (replications = {})",
            config.replications
        )));
    }
    Ok(replicate(config, rep_index))
}

fn replicate(config: &ScenarioConfig, rep_index: usize) -> ReplicationOutcome {
    match replicate_inner(config, rep_index) {
        Ok(values) => ReplicationOutcome::Success(values),
        Err(error) => ReplicationOutcome::Failure { rep_index, error },
    }
}

fn replicate_inner(config: &ScenarioConfig, rep_index: usize) -> Result<ReplicationValues> {
    let seed = replication_seed(config.seed, rep_index as u64);
    let dataset = sample_scenario(
        &config.covariate,
        &config.regression,
        &config.error,
        config.n,
        seed,
    )?;
    let errors = dataset.true_errors().expect("simulated data carries errors").to_vec();
    let bw = config.bandwidths()?;
    let residuals = config.residuals(&dataset)?;

    let oracle = EdfCurve::new(errors.clone())?;
    let residual_edf = EdfCurve::new(residuals.clone())?;
    let smoothed = SmoothedEdf::new(residuals, bw.a_n, config.smoothing_kernel)?;
    let corrected = MeanZeroCorrected::new(errors.clone())?;
    let el = EmpiricalLikelihood::new(&errors)?;

    let grid = &config.t_grid;
    let estimates = EstimatorKind::ALL
        .iter()
        .map(|kind| {
            grid.iter()
                .map(|&t| match kind {
                    EstimatorKind::OracleEdf => oracle.eval(t),
                    EstimatorKind::ResidualEdf => residual_edf.eval(t),
                    EstimatorKind::Smoothed => smoothed.eval(t),
                    EstimatorKind::MeanZeroCorrected => corrected.eval(t),
                    EstimatorKind::EmpiricalLikelihood => el.eval(t),
                })
                .collect()
        })
        .collect();
    let remainder = remainder_statistic(&smoothed, &oracle, &config.error, config.sup_grid_size);
    Ok(ReplicationValues {
        estimates,
        remainder,
    })
}

/// Mean and variance of `√n(est(t) − F(t))` over successful replications.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorStats {
    pub kind: EstimatorKind,
    pub mean: f64,
    /// Unbiased sample variance; NaN with fewer than two replications.
    pub variance: f64,
    pub theory_variance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointStats {
    pub t: f64,
    pub true_cdf: f64,
    pub var_empirical: f64,
    pub var_smoothed: f64,
    pub var_efficient_meanzero: f64,
    pub estimators: Vec<EstimatorStats>,
}

impl PointStats {
    pub fn estimator(&self, kind: EstimatorKind) -> &EstimatorStats {
        &self.estimators[kind.index()]
    }
}

/// Nearest-rank quantiles of the sup-remainder.
#[derive(Debug, Clone, PartialEq)]
pub struct RemainderStats {
    pub median: f64,
    pub q90: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub n: usize,
    pub replications: usize,
    pub successes: usize,
    pub failures: usize,
    /// Fewer than two successful replications: variances are undefined.
    pub insufficient_replications: bool,
    pub per_t: Vec<PointStats>,
    pub remainder: RemainderStats,
    /// Sup-remainder per successful replication, in replication order.
    pub remainders: Vec<f64>,
    pub bandwidths: Bandwidths,
}

impl MonteCarloReport {
    pub fn failure_rate(&self) -> f64 {
        self.failures as f64 / self.replications as f64
    }

    pub fn at(&self, t: f64) -> Option<&PointStats> {
        self.per_t.iter().find(|p| p.t == t)
    }

    /// `t,estimator,emp_mean,emp_var,theory_var`, one row per `t` and estimator.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,estimator,emp_mean,emp_var,theory_var\n");
        for p in &self.per_t {
            for s in &p.estimators {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    p.t,
                    s.kind.name(),
                    s.mean,
                    s.variance,
                    s.theory_variance
                );
            }
        }
        out
    }

    /// `n,median_remainder,q90_remainder,failures`.
    pub fn remainder_csv(&self) -> String {
        remainder_table_csv(std::slice::from_ref(&ConvergenceRow::from(self)))
    }
}

/// Nearest-rank quantile: the smallest value with at least `p·N` values at
/// or below it.
pub fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let rank = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

fn mean_and_variance(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, ss / (m - 1.0))
}

/// Runs every replication on the current rayon pool.
pub fn run_monte_carlo(config: &ScenarioConfig) -> Result<MonteCarloReport> {
    config.validate()?;
    let outcomes: Vec<ReplicationOutcome> = (0..config.replications)
        .into_par_iter()
        .map(|i| replicate(config, i))
        .collect();
    aggregate(config, &outcomes)
}

/// [`run_monte_carlo`] on a dedicated pool of `threads` workers.
pub fn run_monte_carlo_with_threads(config: &ScenarioConfig, threads: usize) -> Result<MonteCarloReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot build thread pool: {e}")))?;
    pool.install(|| run_monte_carlo(config))
}

/// Reduces replication outcomes in index order.
pub fn aggregate(config: &ScenarioConfig, outcomes: &[ReplicationOutcome]) -> Result<MonteCarloReport> {
    let successes: Vec<&ReplicationValues> = outcomes
        .iter()
        .filter_map(|o| match o {
            ReplicationOutcome::Success(v) => Some(v),
            ReplicationOutcome::Failure { .. } => None,
        })
        .collect();
    if successes.is_empty() {
        return Err(Error::AllReplicationsFailed {
            replications: outcomes.len(),
        });
    }
    let root_n = (config.n as f64).sqrt();
    let model = &config.error;
    let per_t = config
        .t_grid
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let true_cdf = model.cdf(t);
            let estimators = EstimatorKind::ALL
                .iter()
                .map(|&kind| {
                    let scaled: Vec<f64> = successes
                        .iter()
                        .map(|v| root_n * (v.estimator(kind)[j] - true_cdf))
                        .collect();
                    let (mean, variance) = mean_and_variance(&scaled);
                    EstimatorStats {
                        kind,
                        mean,
                        variance,
                        theory_variance: kind.theory_variance(model, t),
                    }
                })
                .collect();
            PointStats {
                t,
                true_cdf,
                var_empirical: var_empirical(model, t),
                var_smoothed: var_smoothed(model, t),
                var_efficient_meanzero: var_efficient_meanzero(model, t),
                estimators,
            }
        })
        .collect();

    let remainders: Vec<f64> = successes.iter().map(|v| v.remainder).collect();
    let mut sorted = remainders.clone();
    sorted.sort_by(f64::total_cmp);
    Ok(MonteCarloReport {
        n: config.n,
        replications: outcomes.len(),
        successes: successes.len(),
        failures: outcomes.len() - successes.len(),
        insufficient_replications: successes.len() < 2,
        per_t,
        remainder: RemainderStats {
            median: nearest_rank(&sorted, 0.5),
            q90: nearest_rank(&sorted, 0.9),
        },
        remainders,
        bandwidths: config.bandwidths()?,
    })
}

/// One line of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub median_remainder: f64,
    pub q90_remainder: f64,
    pub failures: usize,
}

impl From<&MonteCarloReport> for ConvergenceRow {
    fn from(r: &MonteCarloReport) -> Self {
        Self {
            n: r.n,
            median_remainder: r.remainder.median,
            q90_remainder: r.remainder.q90,
            failures: r.failures,
        }
    }
}

/// `n,median_remainder,q90_remainder,failures`.
pub fn remainder_table_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("n,median_remainder,q90_remainder,failures\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.n, r.median_remainder, r.q90_remainder, r.failures
        );
    }
    out
}

/// Runs the scenario at each sample size with that size's bandwidths.
/// Replication `i` uses the same seed at every size.
pub fn convergence_study(config: &ScenarioConfig, sizes: &[usize]) -> Result<Vec<ConvergenceRow>> {
    if sizes.len() < 2 {
        return Err(Error::InvalidConfig(
            "a convergence study needs at least two sample sizes".into(),
        ));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "sample sizes must be strictly increasing".into(),
        ));
    }
    sizes
        .iter()
        .map(|&n| {
            let cfg = ScenarioConfig {
                n,
                ..config.clone()
            };
            run_monte_carlo(&cfg).map(|r| ConvergenceRow::from(&r))
        })
        .collect()
}

/// [`convergence_study`] on a dedicated pool of `threads` workers.
pub fn convergence_study_with_threads(
    config: &ScenarioConfig,
    sizes: &[usize],
    threads: usize,
) -> Result<Vec<ConvergenceRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot build thread pool: {e}")))?;
    pool.install(|| convergence_study(config, sizes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn normal_config(n: usize, reps: usize) -> ScenarioConfig {
        ScenarioConfig::new(n, reps, ErrorModel::normal(1.0).unwrap())
    }

    #[test]
    fn nearest_rank_rule() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
        assert_eq!(nearest_rank(&v, 0.5), 5.0);
        assert_eq!(nearest_rank(&v, 0.9), 9.0);
        assert_eq!(nearest_rank(&[3.0], 0.5), 3.0);
        assert_eq!(nearest_rank(&[1.0, 2.0, 3.0], 0.5), 2.0);
        assert!(nearest_rank(&[], 0.5).is_nan());
    }

    #[test]
    fn validation() {
        let mut c = normal_config(50, 0);
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        c.replications = 3;
        assert!(c.validate().is_ok());
        c.t_grid = vec![1.0, 0.0];
        assert!(c.validate().is_err());
        c.t_grid = vec![];
        assert!(c.validate().is_err());
        let u = ScenarioConfig::new(50, 3, ErrorModel::uniform(1.0).unwrap());
        assert!(run_replication(&u, 0).is_err());
        assert!(run_replication(&normal_config(50, 3), 3).is_err());
    }

    #[test]
    fn replication_is_deterministic() {
        let mut c = normal_config(120, 4);
        c.t_grid = vec![-1.0, 0.0, 0.5];
        let a = run_replication(&c, 2).unwrap();
        let b = run_replication(&c, 2).unwrap();
        let other = run_replication(&c, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, other);
    }

    #[test]
    fn sandwich_per_replication() {
        let mut c = normal_config(150, 3);
        c.t_grid = (0..41).map(|i| -2.0 + 0.1 * i as f64).collect();
        let a_n = c.bandwidths().unwrap().a_n;
        for rep in 0..3 {
            let ds = sample_scenario(
                &c.covariate,
                &c.regression,
                &c.error,
                c.n,
                replication_seed(c.seed, rep as u64),
            )
            .unwrap();
            let res = EdfCurve::new(c.residuals(&ds).unwrap()).unwrap();
            let ReplicationOutcome::Success(v) = run_replication(&c, rep).unwrap() else {
                panic!("replication failed");
            };
            for (j, &t) in c.t_grid.iter().enumerate() {
                let s = v.estimator(EstimatorKind::Smoothed)[j];
                assert!(res.eval(t - a_n) <= s && s <= res.eval(t + a_n));
            }
        }
    }

    #[test]
    fn single_replication_flags_variance() {
        let r = run_monte_carlo(&normal_config(60, 1)).unwrap();
        assert!(r.insufficient_replications);
        assert!(r.per_t[0].estimators[0].variance.is_nan());
        assert!(r.to_csv().contains("NaN"));
    }

    #[test]
    fn all_failed() {
        let c = normal_config(60, 2);
        let outcomes = vec![
            ReplicationOutcome::Failure {
                rep_index: 0,
                error: Error::InfeasibleConstraint,
            };
            2
        ];
        assert!(matches!(
            aggregate(&c, &outcomes),
            Err(Error::AllReplicationsFailed { replications: 2 })
        ));
    }

    #[test]
    fn failures_are_counted_not_fatal() {
        let c = normal_config(60, 3);
        let mut outcomes: Vec<ReplicationOutcome> = (0..3).map(|i| replicate(&c, i)).collect();
        outcomes[1] = ReplicationOutcome::Failure {
            rep_index: 1,
            error: Error::SingularDesign { x: 0.5, index: None },
        };
        let r = aggregate(&c, &outcomes).unwrap();
        assert_eq!(r.failures, 1);
        assert_eq!(r.successes, 2);
        assert!(!r.insufficient_replications);
    }

    #[test]
    fn thread_count_does_not_change_report() {
        let mut c = normal_config(100, 24);
        c.t_grid = vec![-1.0, 0.0, 1.0];
        let one = run_monte_carlo_with_threads(&c, 1).unwrap();
        let four = run_monte_carlo_with_threads(&c, 4).unwrap();
        assert_eq!(one, four);
        assert_eq!(one.to_csv(), four.to_csv());
    }

    #[test]
    fn aggregation_ignores_outcome_order_for_statistics() {
        let c = normal_config(80, 6);
        let outcomes: Vec<ReplicationOutcome> = (0..6).map(|i| replicate(&c, i)).collect();
        let mut reversed = outcomes.clone();
        reversed.reverse();
        let a = aggregate(&c, &outcomes).unwrap();
        let b = aggregate(&c, &reversed).unwrap();
        assert_eq!(a.remainder, b.remainder);
        for (pa, pb) in a.per_t.iter().zip(&b.per_t) {
            for (sa, sb) in pa.estimators.iter().zip(&pb.estimators) {
                assert!((sa.mean - sb.mean).abs() < 1e-12);
                assert!((sa.variance - sb.variance).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn convergence_preconditions() {
        let c = normal_config(50, 2);
        assert!(convergence_study(&c, &[100]).is_err());
        assert!(convergence_study(&c, &[200, 100]).is_err());
        assert!(convergence_study(&c, &[100, 100]).is_err());
        let rows = convergence_study(&c, &[60, 120]).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].n, 120);
    }

    #[test]
    fn csv_layout() {
        let mut c = normal_config(60, 3);
        c.t_grid = vec![-0.5, 0.5];
        let r = run_monte_carlo(&c).unwrap();
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,estimator,emp_mean,emp_var,theory_var");
        assert_eq!(lines.len(), 1 + 2 * 5);
        assert!(lines[1].starts_with("-0.5,oracle_edf,"));
        let rem = r.remainder_csv();
        assert!(rem.starts_with("n,median_remainder,q90_remainder,failures\n60,"));
    }
}
