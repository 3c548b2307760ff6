//! Dimension-dependent constants shared by every module.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::integrate_profile;
use crate::special::unit_sphere_area;

/// Exponents and constants attached to a dimension n ≥ 3.
///
/// * `p = (n+2)/(n-2)` is the critical exponent of the equation,
/// * `q = 2n/(n-2)` the volume exponent,
/// * `alpha_n = [n(n-2)]^{(n-2)/4}` the bubble amplitude,
/// * `v_n` the total mass `∫ ū(·,λ)^q` of one standard bubble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionContext {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub alpha_n: f64,
    pub sphere_area: f64,
    pub v_n: f64,
}

impl DimensionContext {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidDimension(n));
        }
        let nf = n as f64;
        let p = (nf + 2.0) / (nf - 2.0);
        let q = 2.0 * nf / (nf - 2.0);
        let nn2 = nf * (nf - 2.0);
        let alpha_n = ((nf - 2.0) / 4.0 * nn2.ln()).exp();
        let sphere_area = unit_sphere_area(n);
        // V_n = ω_n [n(n-2)]^{n/2} ∫_0^∞ t^{n-1}/(1+t²)^n dt
        let v_n = sphere_area * (0.5 * nf * nn2.ln()).exp() * integrate_profile(n, 0.5 * PI);
        Ok(DimensionContext {
            n,
            p,
            q,
            alpha_n,
            sphere_area,
            v_n,
        })
    }

    pub fn dim(&self) -> f64 {
        self.n as f64
    }

    /// (n-2)/2, the decay exponent of the cylinder transform.
    pub fn half_nm2(&self) -> f64 {
        (self.n as f64 - 2.0) / 2.0
    }

    /// p as a reduced fraction (numerator, denominator).
    pub fn p_rational(&self) -> (u64, u64) {
        reduce(self.n as u64 + 2, self.n as u64 - 2)
    }

    /// q as a reduced fraction (numerator, denominator).
    pub fn q_rational(&self) -> (u64, u64) {
        reduce(2 * self.n as u64, self.n as u64 - 2)
    }

    /// Exponent 4/(n-2) of the conformal metric factor.
    pub fn metric_exponent(&self) -> f64 {
        4.0 / (self.n as f64 - 2.0)
    }
}

fn reduce(a: u64, b: u64) -> (u64, u64) {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    (a / x, b / x)
}

/// Alias matching the operation name used throughout the CLI.
pub fn make_context(n: usize) -> Result<DimensionContext> {
    DimensionContext::new(n)
}
