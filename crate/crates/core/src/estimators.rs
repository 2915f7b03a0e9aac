//! Estimators of the error distribution function.
//!
//! * [`EdfCurve`]: the step-function EDF, used both on the true errors
//!   (the oracle `𝔽`) and on the residuals (`F̂`).
//! * [`SmoothedEdf`]: `F̂*(t) = (1/n) Σ K((t − ε̂_i)/a)` and its density
//!   `f*(t) = (1/(na)) Σ k((t − ε̂_i)/a)`.
//! * [`MeanZeroCorrected`]: `𝔽(t) − Ĉ₀(t) ε̄` with
//!   `Ĉ₀(t) = Σ ε_i 1{ε_i ≤ t} / Σ ε_i²`.
//! * [`EmpiricalLikelihood`]: weights maximising `Π p_i` subject to
//!   `Σ p_i = 1`, `Σ p_i ε_i = 0`, and the weighted EDF they induce.
//!
//! Every EDF uses `≤`, so all step functions are right-continuous.

use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::models::ErrorModel;

/// Constants in `a_n = a·n^{-1/4}/ln n` and `c_n = c·n^{-1/4}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthSchedule {
    pub a_constant: f64,
    pub c_constant: f64,
}

impl Default for BandwidthSchedule {
    fn default() -> Self {
        Self {
            a_constant: 1.0,
            c_constant: 1.0,
        }
    }
}

/// Smoothing bandwidth `a_n` for the error CDF and regression bandwidth `c_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bandwidths {
    pub a_n: f64,
    pub c_n: f64,
}

impl BandwidthSchedule {
    pub fn new(a_constant: f64, c_constant: f64) -> Result<Self> {
        let s = Self {
            a_constant,
            c_constant,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a_constant", self.a_constant), ("c_constant", self.c_constant)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn bandwidths(&self, n: usize) -> Result<Bandwidths> {
        if n < 2 {
            return Err(Error::InvalidSize {
                n,
                reason: "bandwidths need n >= 2",
            });
        }
        let nf = n as f64;
        let root = nf.powf(-0.25);
        Ok(Bandwidths {
            a_n: self.a_constant * root / nf.ln(),
            c_n: self.c_constant * root,
        })
    }
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidDataset(format!("no {what}")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidDataset(format!("non-finite {what}")));
    }
    Ok(())
}

/// Right-continuous empirical distribution function.
#[derive(Debug, Clone, PartialEq)]
pub struct EdfCurve {
    samples: Vec<f64>,
}

impl EdfCurve {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        check_finite(&samples, "samples")?;
        Ok(Self {
            samples: sorted(samples),
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Number of samples `≤ t`.
    pub fn count_le(&self, t: f64) -> usize {
        self.samples.partition_point(|&s| s <= t)
    }

    /// Number of samples `< t`.
    pub fn count_lt(&self, t: f64) -> usize {
        self.samples.partition_point(|&s| s < t)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.count_le(t) as f64 / self.len() as f64
    }

    /// `lim_{s↑t} eval(s)`.
    pub fn left_limit(&self, t: f64) -> f64 {
        self.count_lt(t) as f64 / self.len() as f64
    }
}

/// Kernel-smoothed EDF of a sample of residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedEdf {
    residuals: Vec<f64>,
    bandwidth: f64,
    kernel: Kernel,
}

impl SmoothedEdf {
    pub fn new(residuals: Vec<f64>, bandwidth: f64, kernel: Kernel) -> Result<Self> {
        check_finite(&residuals, "residuals")?;
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "smoothing bandwidth must be positive, got {bandwidth}"
            )));
        }
        Ok(Self {
            residuals: sorted(residuals),
            bandwidth,
            kernel,
        })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    /// Residuals in ascending order.
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    // Residuals strictly inside (t − a, t + a), plus the count at or below t − a.
    fn window(&self, t: f64) -> (usize, &[f64]) {
        let a = self.bandwidth;
        let lo = self.residuals.partition_point(|&e| (t - e) / a >= 1.0);
        let hi = self.residuals.partition_point(|&e| (t - e) / a > -1.0);
        (lo, &self.residuals[lo..hi.max(lo)])
    }

    /// `F̂*(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        let (below, window) = self.window(t);
        let partial: f64 = window
            .iter()
            .map(|&e| self.kernel.cdf((t - e) / self.bandwidth))
            .sum();
        (below as f64 + partial) / self.residuals.len() as f64
    }

    /// `f*(t)`.
    pub fn density(&self, t: f64) -> f64 {
        let (_, window) = self.window(t);
        let s: f64 = window
            .iter()
            .map(|&e| self.kernel.value((t - e) / self.bandwidth))
            .sum();
        s / (self.residuals.len() as f64 * self.bandwidth)
    }
}

/// Ĉ₀(t) = Σ ε_i 1{ε_i ≤ t} / Σ ε_i².
pub fn c0_hat(errors: &[f64], t: f64) -> Result<f64> {
    Ok(MeanZeroCorrected::new(errors.to_vec())?.c0_hat(t))
}

/// `𝔽(t) − Ĉ₀(t)·ε̄`. Not clipped to `[0, 1]`.
pub fn meanzero_corrected_eval(errors: &[f64], t: f64) -> Result<f64> {
    Ok(MeanZeroCorrected::new(errors.to_vec())?.eval(t))
}

/// EDF corrected for the mean-zero constraint, precomputed for repeated
/// evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanZeroCorrected {
    edf: EdfCurve,
    // prefix[k] = sum of the k smallest errors, accumulated in sorted order.
    prefix: Vec<f64>,
    sum_squares: f64,
    mean: f64,
}

impl MeanZeroCorrected {
    pub fn new(errors: Vec<f64>) -> Result<Self> {
        let n = errors.len() as f64;
        let sum: f64 = errors.iter().sum();
        let sum_squares: f64 = errors.iter().map(|e| e * e).sum();
        let edf = EdfCurve::new(errors)?;
        if sum_squares == 0.0 {
            return Err(Error::DegenerateErrors);
        }
        let mut prefix = Vec::with_capacity(edf.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for &e in edf.samples() {
            acc += e;
            prefix.push(acc);
        }
        Ok(Self {
            edf,
            prefix,
            sum_squares,
            mean: sum / n,
        })
    }

    pub fn c0_hat(&self, t: f64) -> f64 {
        self.prefix[self.edf.count_le(t)] / self.sum_squares
    }

    pub fn eval(&self, t: f64) -> f64 {
        let base = self.edf.eval(t);
        if self.mean == 0.0 {
            return base;
        }
        base - self.c0_hat(t) * self.mean
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }
}

/// Result of the empirical likelihood optimisation.
#[derive(Debug, Clone, PartialEq)]
pub struct ElWeights {
    /// `p_i` in the order of the input errors.
    pub weights: Vec<f64>,
    /// Lagrange multiplier of the mean constraint.
    pub lambda: f64,
    pub iterations: usize,
}

const EL_MAX_ITERATIONS: usize = 100;
const EL_TOLERANCE: f64 = 1e-12;

/// Empirical likelihood weights under the mean-zero constraint.
///
/// The weights are `p_i = 1/(n(1 + λε_i))`, where `λ` is the root of the
/// strictly decreasing dual score `g(λ) = Σ ε_i/(1 + λε_i)` on
/// `(−1/max ε, −1/min ε)`. The root is found by Newton's method with a
/// bisection fallback whenever a step leaves the current bracket.
pub fn el_weights(errors: &[f64]) -> Result<ElWeights> {
    check_finite(errors, "errors")?;
    let (min, max) = errors
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    if !(min < 0.0 && max > 0.0) {
        return Err(Error::InfeasibleConstraint);
    }
    let scale = max.max(-min);
    let tolerance = EL_TOLERANCE * scale;
    let (mut lo, mut hi) = (-1.0 / max, -1.0 / min);
    let score = |lambda: f64| -> (f64, f64) {
        errors.iter().fold((0.0, 0.0), |(g, dg), &e| {
            let r = e / (1.0 + lambda * e);
            (g + r, dg - r * r)
        })
    };

    let mut lambda = 0.0;
    let mut iterations = 0;
    loop {
        let (g, dg) = score(lambda);
        if g.abs() <= tolerance {
            break;
        }
        if g > 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
        // Bracket collapsed to adjacent floats: the root is pinned.
        if hi - lo <= 4.0 * f64::EPSILON * lambda.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        if iterations == EL_MAX_ITERATIONS {
            return Err(Error::NumericalFailure(format!(
                "empirical likelihood multiplier did not converge (score {g:e})"
            )));
        }
        iterations += 1;
        let newton = lambda - g / dg;
        lambda = if newton > lo && newton < hi && newton.is_finite() {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }

    let n = errors.len() as f64;
    let mut weights: Vec<f64> = errors.iter().map(|&e| 1.0 / (n * (1.0 + lambda * e))).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|p| *p /= total);
    Ok(ElWeights {
        weights,
        lambda,
        iterations,
    })
}

/// `Σ p_i 1{ε_i ≤ t}`.
pub fn el_cdf_eval(errors: &[f64], weights: &[f64], t: f64) -> Result<f64> {
    if errors.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: errors.len(),
            actual: weights.len(),
        });
    }
    Ok(errors
        .iter()
        .zip(weights)
        .filter(|(&e, _)| e <= t)
        .map(|(_, &p)| p)
        .sum())
}

/// Empirical likelihood distribution function with cumulative weights
/// precomputed in sorted order.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalLikelihood {
    sorted_errors: Vec<f64>,
    cumulative: Vec<f64>,
    weights: ElWeights,
}

impl EmpiricalLikelihood {
    pub fn new(errors: &[f64]) -> Result<Self> {
        let weights = el_weights(errors)?;
        let mut pairs: Vec<(f64, f64)> = errors.iter().copied().zip(weights.weights.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut cumulative = Vec::with_capacity(pairs.len() + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for &(_, p) in &pairs {
            acc += p;
            cumulative.push(acc);
        }
        Ok(Self {
            sorted_errors: pairs.into_iter().map(|(e, _)| e).collect(),
            cumulative,
            weights,
        })
    }

    pub fn weights(&self) -> &ElWeights {
        &self.weights
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.cumulative[self.sorted_errors.partition_point(|&e| e <= t)]
    }
}

/// `1{ε ≤ t} − F(t) + f(t)ε`.
pub fn influence_function(model: &ErrorModel, eps: f64, t: f64) -> f64 {
    let jump = if eps <= t { 1.0 } else { 0.0 };
    jump - model.cdf(t) + model.density(t) * eps
}
