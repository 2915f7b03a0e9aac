//! Compactly supported kernels on `[-1, 1]`.
//!
//! Two roles use these: the smoothing kernel `k` (with distribution function
//! `K`) that turns the residual EDF into a continuous estimator, and the
//! weight kernel `w` of the local polynomial smoother. The triweight is the
//! lowest-degree polynomial density that is twice continuously
//! differentiable on the whole line, so it is the default smoothing kernel.
//! The Epanechnikov kernel is the default regression weight.
//!
//! All distribution functions are exact polynomial antiderivatives.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Built-in kernel families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelFamily {
    /// `(35/32)(1 - x²)³` on `[-1, 1]`.
    Triweight,
    /// `(3/4)(1 - x²)` on `[-1, 1]`.
    Epanechnikov,
    /// `1/2` on `[-1, 1]`. Discontinuous; meant for tests.
    Uniform,
}

/// A symmetric probability density supported on `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Kernel {
    family: KernelFamily,
}

impl Kernel {
    pub const fn new(family: KernelFamily) -> Self {
        Self { family }
    }

    pub const fn triweight() -> Self {
        Self::new(KernelFamily::Triweight)
    }

    pub const fn epanechnikov() -> Self {
        Self::new(KernelFamily::Epanechnikov)
    }

    pub const fn uniform() -> Self {
        Self::new(KernelFamily::Uniform)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn support_radius(&self) -> f64 {
        1.0
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            KernelFamily::Triweight => "triweight",
            KernelFamily::Epanechnikov => "epanechnikov",
            KernelFamily::Uniform => "uniform",
        }
    }

    /// Kernel density `k(x)`; zero outside `[-1, 1]`.
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        if x.abs() > 1.0 {
            return 0.0;
        }
        let s = 1.0 - x * x;
        match self.family {
            KernelFamily::Triweight => 35.0 / 32.0 * s * s * s,
            KernelFamily::Epanechnikov => 0.75 * s,
            KernelFamily::Uniform => 0.5,
        }
    }

    /// First derivative `k'(x)`.
    ///
    /// The Epanechnikov derivative jumps at `±1`; at exactly `±1` the
    /// one-sided interior value is returned.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        if matches!(self.family, KernelFamily::Uniform) {
            return Err(self.unsupported("derivative"));
        }
        if x.abs() > 1.0 {
            return Ok(0.0);
        }
        let s = 1.0 - x * x;
        Ok(match self.family {
            KernelFamily::Triweight => -105.0 / 16.0 * x * s * s,
            KernelFamily::Epanechnikov => -1.5 * x,
            KernelFamily::Uniform => unreachable!(),
        })
    }

    /// Second derivative `k''(x)`, available for the triweight only.
    pub fn second_derivative(&self, x: f64) -> Result<f64> {
        if !matches!(self.family, KernelFamily::Triweight) {
            return Err(self.unsupported("second derivative"));
        }
        if x.abs() > 1.0 {
            return Ok(0.0);
        }
        let x2 = x * x;
        Ok(105.0 / 16.0 * (1.0 - x2) * (5.0 * x2 - 1.0))
    }

    /// Distribution function `K(x) = ∫_{-∞}^x k`.
    #[inline]
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= -1.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let x2 = x * x;
        match self.family {
            // x - x³ + 3x⁵/5 - x⁷/7, Horner in x².
            KernelFamily::Triweight => {
                0.5 + 35.0 / 32.0 * x * (1.0 + x2 * (-1.0 + x2 * (0.6 - x2 / 7.0)))
            }
            KernelFamily::Epanechnikov => 0.5 + 0.75 * x * (1.0 - x2 / 3.0),
            KernelFamily::Uniform => 0.5 * (x + 1.0),
        }
    }

    fn unsupported(&self, operation: &'static str) -> Error {
        Error::UnsupportedOperation {
            kernel: self.name(),
            operation,
        }
    }
}

impl Default for Kernel {
    fn default() -> Self {
        Self::triweight()
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "triweight" => Ok(Self::triweight()),
            "epanechnikov" => Ok(Self::epanechnikov()),
            "uniform" => Ok(Self::uniform()),
            other => Err(Error::InvalidParameter(format!("unknown kernel `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FAMILIES: [Kernel; 3] = [Kernel::triweight(), Kernel::epanechnikov(), Kernel::uniform()];

    fn grid() -> impl Iterator<Item = f64> {
        (0..=100).map(|i| -1.0 + 0.02 * i as f64)
    }

    // Composite Simpson on [a, b] with an even number of panels.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        let mut s = f(a) + f(b);
        for i in 1..panels {
            let x = a + h * i as f64;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0
    }

    #[test]
    fn closed_form_values() {
        let tw = Kernel::triweight();
        assert_eq!(tw.value(0.0), 1.09375);
        assert_eq!(tw.value(1.0), 0.0);
        assert_eq!(Kernel::epanechnikov().value(0.0), 0.75);
        assert_eq!(tw.derivative(0.0).unwrap(), 0.0);
        assert_eq!(tw.derivative(1.0).unwrap(), 0.0);
        assert!((tw.derivative(0.5).unwrap() + 1.845703125).abs() < 1e-15);
        assert_eq!(tw.second_derivative(1.0).unwrap(), 0.0);
        assert_eq!(tw.second_derivative(0.0).unwrap(), -6.5625);
        assert!(tw.second_derivative(1.0 / 5f64.sqrt()).unwrap().abs() < 1e-14);
    }

    #[test]
    fn unsupported_derivatives() {
        assert!(matches!(
            Kernel::uniform().derivative(0.1),
            Err(Error::UnsupportedOperation { .. })
        ));
        assert!(Kernel::epanechnikov().second_derivative(0.1).is_err());
    }

    #[test]
    fn cdf_endpoints_and_centre() {
        for k in FAMILIES {
            assert_eq!(k.cdf(-1.0), 0.0);
            assert_eq!(k.cdf(1.0), 1.0);
            assert_eq!(k.cdf(-3.0), 0.0);
            assert_eq!(k.cdf(3.0), 1.0);
            assert!((k.cdf(0.0) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn triweight_cdf_matches_quadrature() {
        let tw = Kernel::triweight();
        let oracle = simpson(|t| tw.value(t), -1.0, 0.5, 2000);
        assert!((oracle - 0.929443359375).abs() < 1e-12);
        assert!((tw.cdf(0.5) - oracle).abs() < 1e-12);
    }

    #[test]
    fn density_and_moment_integrals() {
        for k in FAMILIES {
            let mass = simpson(|x| k.value(x), -1.0, 1.0, 2000);
            let mean = simpson(|x| x * k.value(x), -1.0, 1.0, 2000);
            assert!((mass - 1.0).abs() < 1e-10, "{k}: {mass}");
            assert!(mean.abs() < 1e-10, "{k}: {mean}");
        }
    }

    #[test]
    fn finite_differences() {
        let h = 1e-5;
        for k in [Kernel::triweight(), Kernel::epanechnikov()] {
            for x in grid() {
                // The Epanechnikov derivative is discontinuous at ±1.
                if k.family() == KernelFamily::Epanechnikov && x.abs() > 1.0 - 1e-9 {
                    continue;
                }
                let fd = (k.value(x + h) - k.value(x - h)) / (2.0 * h);
                assert!((fd - k.derivative(x).unwrap()).abs() < 1e-6, "{k} k' at {x}");
                let fd = (k.cdf(x + h) - k.cdf(x - h)) / (2.0 * h);
                assert!((fd - k.value(x)).abs() < 1e-6, "{k} K' at {x}");
            }
        }
    }

    #[test]
    fn triweight_boundary_smoothness() {
        let tw = Kernel::triweight();
        for x in [-1.0, 1.0] {
            assert_eq!(tw.value(x), 0.0);
            assert_eq!(tw.derivative(x).unwrap(), 0.0);
            assert_eq!(tw.second_derivative(x).unwrap(), 0.0);
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!("triweight".parse::<Kernel>().unwrap(), Kernel::triweight());
        assert_eq!("Epanechnikov".parse::<Kernel>().unwrap(), Kernel::epanechnikov());
        assert_eq!("uniform".parse::<Kernel>().unwrap(), Kernel::uniform());
        assert!("gaussian".parse::<Kernel>().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn symmetry(x in -2.0f64..2.0) {
                for k in FAMILIES {
                    prop_assert_eq!(k.value(-x), k.value(x));
                    prop_assert!((k.cdf(x) + k.cdf(-x) - 1.0).abs() < 1e-12);
                }
            }

            #[test]
            fn cdf_monotone(x in -1.5f64..1.5, dx in 0.0f64..0.5) {
                for k in FAMILIES {
                    prop_assert!(k.cdf(x + dx) >= k.cdf(x));
                }
            }

            #[test]
            fn compact_support(x in 1.0f64..10.0) {
                for k in FAMILIES {
                    let x = x + f64::EPSILON * 4.0;
                    prop_assert_eq!(k.value(x), 0.0);
                    prop_assert_eq!(k.value(-x), 0.0);
                }
            }
        }
    }
}
