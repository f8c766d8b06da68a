//! Scalar abstraction shared by the floating-point engine.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar (`f32` or `f64`) the numerical engine runs on.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Display + Debug {
    /// Machine epsilon of the type.
    fn eps() -> Self {
        Self::default_epsilon()
    }

    /// Converts an `f64` literal into the scalar type.
    fn lit(x: f64) -> Self {
        nalgebra::convert(x)
    }

    /// Lossy conversion used for diagnostics and error payloads.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type Cx<T> = Complex<T>;

pub(crate) fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

pub(crate) fn cx_re<T: Real>(re: T) -> Cx<T> {
    Complex::new(re, T::zero())
}

pub(crate) fn cx_to_f64<T: Real>(z: Cx<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy())
}

/// Numerical tolerances used throughout the engine.
///
/// The defaults are the `f64` values; for lower precision types each value is
/// floored at a multiple of the type's epsilon so that the thresholds remain
/// meaningful.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances<T> {
    /// Relative radius `r·(1+|z|)` inside which roots are merged into one zero.
    pub cluster: T,
    /// Relative singular-value ratio `σ_r/σ_1` accepted as a rank drop at a computed zero.
    pub confirm: T,
    /// Trailing-coefficient threshold used to fix the degree of an interpolated polynomial.
    pub degree: T,
    /// Relative residual above which a linear solve is treated as hitting a pole.
    pub pole_residual: T,
    /// Distance below which a root of the numerator and of the denominator count as common.
    pub coprime: T,
    /// Relative tolerance for matching zero multisets, `tol·(1+|z|)`.
    pub matching: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        let eps = T::eps();
        let sqrt_eps = eps.sqrt();
        let floor = |spec: f64, alt: T| T::lit(spec).max(alt);
        Self {
            cluster: floor(1e-6, sqrt_eps * T::lit(10.0)),
            confirm: floor(1e-6, sqrt_eps * T::lit(10.0)),
            degree: floor(1e-8, eps * T::lit(1e3)),
            pole_residual: floor(1e-6, eps * T::lit(100.0)),
            coprime: floor(1e-7, sqrt_eps),
            matching: floor(1e-6, sqrt_eps * T::lit(10.0)),
        }
    }
}

impl<T: Real> Tolerances<T> {
    /// Same defaults with a different matching tolerance.
    pub fn with_matching(mut self, tol: T) -> Self {
        self.matching = tol;
        self
    }
}

/// Modulus and argument for [`Cx`] over any [`Real`]; `num_complex` only
/// provides them for `num_traits::Float`.
pub trait CxExt<T: Real> {
    fn norm(&self) -> T;
    fn arg(&self) -> T;
}

impl<T: Real> CxExt<T> for Cx<T> {
    fn norm(&self) -> T {
        self.re.hypot(self.im)
    }

    fn arg(&self) -> T {
        self.im.atan2(self.re)
    }
}
