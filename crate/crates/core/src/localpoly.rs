//! Local polynomial regression of order `d`.
//!
//! At a query point `x` the smoother minimises
//!
//! ```text
//! Σ_j (Y_j − Σ_m β_m ((Z_j − x)/c)^m)² · w((Z_j − x)/c) / c
//! ```
//!
//! and reports `r̂(x) = β₀(x)`. The normal equations are `Q(x) β = b(x)` with
//! the Hankel matrix `Q(x)[k][m] = q_{k+m}(x)`, where
//! `q_m(x) = (1/n) Σ_j u_j^m w(u_j) / c` and `u_j = (Z_j − x)/c`. Working in
//! the rescaled powers `u_j` keeps the moments of order one for any bandwidth.
//!
//! The fit is linear in the responses: `r̂(x) = (1/n) Σ_j A(x, Z_j) Y_j` with
//! `A(x, y) = p(x)ᵀ w_n(y − x)` and `p(x)` the first column of `Q(x)⁻¹`.
//!
//! When `Q(x)` is numerically singular the local bandwidth is widened by a
//! fixed factor a bounded number of times before giving up with
//! [`Error::SingularDesign`].

use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::linalg::{reciprocal_condition, SquareMatrix};

/// Paired covariate/response sample, with the true errors when simulated.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    z: Vec<f64>,
    y: Vec<f64>,
    true_errors: Option<Vec<f64>>,
}

impl Dataset {
    pub fn new(z: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::InvalidDataset("dataset is empty".into()));
        }
        if z.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: z.len(),
                actual: y.len(),
            });
        }
        if let Some(i) = z.iter().chain(&y).position(|v| !v.is_finite()) {
            let i = i % z.len();
            return Err(Error::InvalidDataset(format!(
                "non-finite value in observation {i}"
            )));
        }
        Ok(Self {
            z,
            y,
            true_errors: None,
        })
    }

    pub fn with_true_errors(mut self, errors: Vec<f64>) -> Result<Self> {
        if errors.len() != self.z.len() {
            return Err(Error::DimensionMismatch {
                expected: self.z.len(),
                actual: errors.len(),
            });
        }
        if errors.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidDataset("non-finite true error".into()));
        }
        self.true_errors = Some(errors);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn true_errors(&self) -> Option<&[f64]> {
        self.true_errors.as_deref()
    }

    /// Same covariates and errors with the responses replaced.
    pub fn with_responses(&self, y: Vec<f64>) -> Result<Self> {
        let mut out = Self::new(self.z.clone(), y)?;
        out.true_errors = self.true_errors.clone();
        Ok(out)
    }
}

/// Order, bandwidth and weight kernel of the smoother, plus the fallback
/// policy for degenerate windows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalPolyConfig {
    pub order: usize,
    pub bandwidth: f64,
    pub kernel: Kernel,
    /// Designs with reciprocal condition below `1 / condition_cap` are
    /// treated as singular.
    pub condition_cap: f64,
    pub bandwidth_growth: f64,
    pub max_widenings: usize,
}

impl LocalPolyConfig {
    pub fn new(order: usize, bandwidth: f64) -> Self {
        Self {
            order,
            bandwidth,
            kernel: Kernel::epanechnikov(),
            condition_cap: 1e12,
            bandwidth_growth: 1.5,
            max_widenings: 10,
        }
    }

    pub fn with_kernel(mut self, kernel: Kernel) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bandwidth must be positive, got {}",
                self.bandwidth
            )));
        }
        if !(self.condition_cap > 1.0) {
            return Err(Error::InvalidParameter("condition_cap must exceed 1".into()));
        }
        if !(self.bandwidth_growth > 1.0) {
            return Err(Error::InvalidParameter("bandwidth_growth must exceed 1".into()));
        }
        Ok(())
    }
}

/// `(w_{n0}(u), …, w_{nd}(u))` with `w_{nm}(u) = u^m / c^{m+1} · w(u / c)`.
pub fn weight_vector(config: &LocalPolyConfig, u: f64) -> Vec<f64> {
    weight_vector_at(config.order, config.bandwidth, config.kernel, u)
}

fn weight_vector_at(order: usize, bandwidth: f64, kernel: Kernel, u: f64) -> Vec<f64> {
    let s = u / bandwidth;
    let base = kernel.value(s) / bandwidth;
    let mut out = Vec::with_capacity(order + 1);
    let mut p = 1.0;
    for _ in 0..=order {
        out.push(p * base);
        p *= s;
    }
    out
}

/// The matrix `Q_n(x)` at the nominal bandwidth (no widening).
pub fn design_matrix(config: &LocalPolyConfig, dataset: &Dataset, x: f64) -> SquareMatrix {
    let fit = LocalPolyFit::new_unchecked(*config, dataset);
    fit.system(x, config.bandwidth).0
}

/// Local coefficients `β(x)` in the rescaled basis. `β₀` is `r̂(x)`.
pub fn local_fit(config: &LocalPolyConfig, dataset: &Dataset, x: f64) -> Result<LocalEstimate> {
    LocalPolyFit::new(*config, dataset)?.local_fit(x)
}

/// `(A_n(x, Z_1), …, A_n(x, Z_n))` in dataset order.
pub fn smoothing_weights(config: &LocalPolyConfig, dataset: &Dataset, x: f64) -> Result<Vec<f64>> {
    LocalPolyFit::new(*config, dataset)?.smoothing_weights(x)
}

/// Solution of the local normal equations at one query point.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalEstimate {
    /// `β(x)` in powers of `(z − x)/bandwidth`.
    pub coefficients: Vec<f64>,
    /// First column of `Q(x)⁻¹`.
    pub first_inverse_column: Vec<f64>,
    /// Bandwidth actually used, larger than the nominal one after widening.
    pub bandwidth: f64,
}

impl LocalEstimate {
    pub fn value(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn widened(&self, nominal: f64) -> bool {
        self.bandwidth > nominal
    }
}

/// Non-fatal observations made while fitting.
#[derive(Debug, Clone, PartialEq)]
pub enum FitWarning {
    CovariateOutsideUnitInterval { index: usize, z: f64 },
}

/// A local polynomial smoother bound to a dataset.
#[derive(Debug, Clone)]
pub struct LocalPolyFit<'a> {
    config: LocalPolyConfig,
    dataset: &'a Dataset,
    // Covariates sorted ascending, with their dataset indices.
    sorted_z: Vec<f64>,
    order_index: Vec<usize>,
    warnings: Vec<FitWarning>,
}

impl<'a> LocalPolyFit<'a> {
    pub fn new(config: LocalPolyConfig, dataset: &'a Dataset) -> Result<Self> {
        config.validate()?;
        Ok(Self::new_unchecked(config, dataset))
    }

    fn new_unchecked(config: LocalPolyConfig, dataset: &'a Dataset) -> Self {
        let mut order_index: Vec<usize> = (0..dataset.len()).collect();
        order_index.sort_by(|&a, &b| dataset.z[a].total_cmp(&dataset.z[b]).then(a.cmp(&b)));
        let sorted_z = order_index.iter().map(|&i| dataset.z[i]).collect();
        let warnings = dataset
            .z
            .iter()
            .enumerate()
            .filter(|(_, z)| !(0.0..=1.0).contains(*z))
            .map(|(index, &z)| FitWarning::CovariateOutsideUnitInterval { index, z })
            .collect();
        Self {
            config,
            dataset,
            sorted_z,
            order_index,
            warnings,
        }
    }

    pub fn config(&self) -> &LocalPolyConfig {
        &self.config
    }

    pub fn dataset(&self) -> &Dataset {
        self.dataset
    }

    pub fn warnings(&self) -> &[FitWarning] {
        &self.warnings
    }

    /// Sorted-order positions of the covariates within `bandwidth` of `x`.
    fn window(&self, x: f64, bandwidth: f64) -> std::ops::Range<usize> {
        let lo = self.sorted_z.partition_point(|&z| z < x - bandwidth);
        let hi = self.sorted_z.partition_point(|&z| z <= x + bandwidth);
        lo..hi.max(lo)
    }

    /// `Q(x)` and `b(x)` at a given bandwidth.
    fn system(&self, x: f64, bandwidth: f64) -> (SquareMatrix, Vec<f64>) {
        let d = self.config.order;
        let n = self.dataset.len() as f64;
        let mut moments = vec![0.0; 2 * d + 1];
        let mut rhs = vec![0.0; d + 1];
        for pos in self.window(x, bandwidth) {
            let j = self.order_index[pos];
            let u = (self.sorted_z[pos] - x) / bandwidth;
            let base = self.config.kernel.value(u) / bandwidth;
            if base == 0.0 {
                continue;
            }
            let y = self.dataset.y[j];
            let mut p = base;
            for (m, q) in moments.iter_mut().enumerate() {
                *q += p;
                if m <= d {
                    rhs[m] += p * y;
                }
                p *= u;
            }
        }
        moments.iter_mut().for_each(|q| *q /= n);
        rhs.iter_mut().for_each(|b| *b /= n);
        (SquareMatrix::from_fn(d + 1, |k, m| moments[k + m]), rhs)
    }

    pub fn local_fit(&self, x: f64) -> Result<LocalEstimate> {
        let mut bandwidth = self.config.bandwidth;
        for _ in 0..=self.config.max_widenings {
            let (q, rhs) = self.system(x, bandwidth);
            if reciprocal_condition(&q) >= 1.0 / self.config.condition_cap {
                // reciprocal_condition > 0 guarantees the factorisation exists.
                let lu = q.lu().expect("nonsingular design");
                let coefficients = lu.solve(&rhs);
                let mut e0 = vec![0.0; q.dim()];
                e0[0] = 1.0;
                let first_inverse_column = lu.solve(&e0);
                return Ok(LocalEstimate {
                    coefficients,
                    first_inverse_column,
                    bandwidth,
                });
            }
            bandwidth *= self.config.bandwidth_growth;
        }
        Err(Error::SingularDesign { x, index: None })
    }

    pub fn predict(&self, x: f64) -> Result<f64> {
        self.local_fit(x).map(|e| e.value())
    }

    pub fn smoothing_weights(&self, x: f64) -> Result<Vec<f64>> {
        let est = self.local_fit(x)?;
        let mut out = vec![0.0; self.dataset.len()];
        for pos in self.window(x, est.bandwidth) {
            let wn = weight_vector_at(
                self.config.order,
                est.bandwidth,
                self.config.kernel,
                self.sorted_z[pos] - x,
            );
            out[self.order_index[pos]] = est
                .first_inverse_column
                .iter()
                .zip(&wn)
                .map(|(p, w)| p * w)
                .sum();
        }
        Ok(out)
    }

    /// `r̂(Z_i)` for every observation, in dataset order.
    pub fn fitted_values(&self) -> Result<Vec<f64>> {
        self.dataset
            .z
            .iter()
            .enumerate()
            .map(|(i, &z)| {
                self.predict(z).map_err(|e| match e {
                    Error::SingularDesign { x, .. } => Error::SingularDesign { x, index: Some(i) },
                    other => other,
                })
            })
            .collect()
    }

    /// `ε̂_i = Y_i − r̂(Z_i)`.
    pub fn residuals(&self) -> Result<Vec<f64>> {
        Ok(self
            .fitted_values()?
            .into_iter()
            .zip(&self.dataset.y)
            .map(|(r, y)| y - r)
            .collect())
    }
}
