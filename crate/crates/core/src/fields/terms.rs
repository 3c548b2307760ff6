//! Single building blocks: the standard bubble and the flat bubble.

use serde::{Deserialize, Serialize};

use crate::dimension::DimensionContext;

/// Closed-form data of one term at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct TermEval {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub laplacian: f64,
    /// Curvature for which this term alone is an exact solution.
    pub curvature: f64,
    /// Gradient of that curvature (zero for standard bubbles).
    pub curvature_gradient: Option<Vec<f64>>,
}

/// How the amplitude of a bubble is fixed. Only the standard α_n is used.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum AmplitudeMode {
    #[default]
    Standard,
}

/// ū(|x - center|, λ) = α_n (λ / (λ² + |x - center|²))^{(n-2)/2}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BubbleTerm {
    pub center: Vec<f64>,
    pub lambda: f64,
    #[serde(skip)]
    pub amplitude_mode: AmplitudeMode,
}

/// ln(a² + b²) without overflow or underflow for a, b ≥ 0.
fn ln_sum_squares(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == 0.0 {
        return f64::NEG_INFINITY;
    }
    let r = lo / hi;
    2.0 * hi.ln() + (r * r).ln_1p()
}

impl BubbleTerm {
    pub fn new(center: Vec<f64>, lambda: f64) -> Self {
        BubbleTerm {
            center,
            lambda,
            amplitude_mode: AmplitudeMode::Standard,
        }
    }

    /// The baseline bubble u_o: center 0, λ = 1.
    pub fn baseline(n: usize) -> Self {
        BubbleTerm::new(vec![0.0; n], 1.0)
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// ū(ρ, λ) as a function of the distance ρ to the center.
    pub fn profile(ctx: &DimensionContext, lambda: f64, rho: f64) -> f64 {
        let ln_s = ln_sum_squares(lambda, rho);
        ctx.alpha_n * (ctx.half_nm2() * (lambda.ln() - ln_s)).exp()
    }

    /// |∇ū|(ρ, λ) = (n-2) ū ρ / (λ² + ρ²).
    pub fn profile_slope(ctx: &DimensionContext, lambda: f64, rho: f64) -> f64 {
        let ln_s = ln_sum_squares(lambda, rho);
        let u = ctx.alpha_n * (ctx.half_nm2() * (lambda.ln() - ln_s)).exp();
        (ctx.dim() - 2.0) * u * rho * (-ln_s).exp()
    }

    pub fn value(&self, ctx: &DimensionContext, x: &[f64]) -> f64 {
        Self::profile(ctx, self.lambda, self.distance(x))
    }

    /// Value at the center, α_n λ^{(2-n)/2}.
    pub fn peak_value(&self, ctx: &DimensionContext) -> f64 {
        ctx.alpha_n * (-ctx.half_nm2() * self.lambda.ln()).exp()
    }

    pub fn gradient(&self, ctx: &DimensionContext, x: &[f64]) -> Vec<f64> {
        self.eval(ctx, x).gradient
    }

    pub fn laplacian(&self, ctx: &DimensionContext, x: &[f64]) -> f64 {
        self.eval(ctx, x).laplacian
    }

    pub fn eval(&self, ctx: &DimensionContext, x: &[f64]) -> TermEval {
        let diff: Vec<f64> = x.iter().zip(&self.center).map(|(a, c)| a - c).collect();
        self.eval_displacement(ctx, &diff)
    }

    /// [`Self::eval`] at `center + diff`.
    pub fn eval_displacement(&self, ctx: &DimensionContext, diff: &[f64]) -> TermEval {
        let n = ctx.dim();
        let d = norm(diff);
        let ln_s = ln_sum_squares(self.lambda, d);
        let u = ctx.alpha_n * (ctx.half_nm2() * (self.lambda.ln() - ln_s)).exp();
        let inv_s = (-ln_s).exp();
        let g = -(n - 2.0) * u * inv_s;
        let gradient = diff.iter().map(|a| g * a).collect();
        // Δū = -n(n-2) λ² ū / (λ² + ρ²)²
        let laplacian = -n * (n - 2.0) * u * (2.0 * (self.lambda.ln() - ln_s)).exp();
        TermEval {
            value: u,
            gradient,
            laplacian,
            curvature: 1.0,
            curvature_gradient: None,
        }
    }
}

/// ũ_b(x) = (|x|² + b²)^{(2-n)/4}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatBubbleTerm {
    pub b: f64,
}

impl FlatBubbleTerm {
    pub fn new(b: f64) -> Self {
        FlatBubbleTerm { b }
    }

    fn beta(ctx: &DimensionContext) -> f64 {
        (ctx.dim() - 2.0) / 4.0
    }

    pub fn value(&self, ctx: &DimensionContext, x: &[f64]) -> f64 {
        let r = norm(x);
        (-Self::beta(ctx) * ln_sum_squares(r, self.b)).exp()
    }

    /// K_b(x) = n(n-2)/2 · (1 - (n+2)/(2n) · |x|²/(|x|² + b²)).
    pub fn curvature(&self, ctx: &DimensionContext, x: &[f64]) -> f64 {
        let n = ctx.dim();
        let r2: f64 = x.iter().map(|a| a * a).sum();
        let frac = if r2.is_infinite() { 1.0 } else { r2 / (r2 + self.b * self.b) };
        n * (n - 2.0) / 2.0 * (1.0 - (n + 2.0) / (2.0 * n) * frac)
    }

    /// ∇K_b(x) = -(n-2)(n+2)/2 · b² x / (|x|² + b²)².
    pub fn curvature_gradient(&self, ctx: &DimensionContext, x: &[f64]) -> Vec<f64> {
        let n = ctx.dim();
        let r = norm(x);
        let inv_s = (-ln_sum_squares(r, self.b)).exp();
        let c = -(n - 2.0) * (n + 2.0) / 2.0 * self.b * self.b * inv_s * inv_s;
        x.iter().map(|a| c * a).collect()
    }

    pub fn eval(&self, ctx: &DimensionContext, x: &[f64]) -> TermEval {
        let n = ctx.dim();
        let beta = Self::beta(ctx);
        let r = norm(x);
        let ln_s = ln_sum_squares(r, self.b);
        let inv_s = (-ln_s).exp();
        let u = (-beta * ln_s).exp();
        let gradient = x.iter().map(|a| -2.0 * beta * u * inv_s * a).collect();
        // Δũ = -2β s^{-β-2} (n s - 2(β+1)|x|²), evaluated as -2β ũ/s (n - 2(β+1)|x|²/s)
        let frac = r * r * inv_s;
        let laplacian = -2.0 * beta * u * inv_s * (n - 2.0 * (beta + 1.0) * frac);
        TermEval {
            value: u,
            gradient,
            laplacian,
            curvature: self.curvature(ctx, x),
            curvature_gradient: Some(self.curvature_gradient(ctx, x)),
        }
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    let m = x.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    m * x.iter().map(|a| (a / m) * (a / m)).sum::<f64>().sqrt()
}

/// Flat-bubble curvature K_b at x.
pub fn flat_bubble_curvature(ctx: &DimensionContext, term: &FlatBubbleTerm, x: &[f64]) -> f64 {
    term.curvature(ctx, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimension::make_context;
    use approx::assert_relative_eq;

    fn central_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
        (0..x.len())
            .map(|i| {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[i] += h;
                xm[i] -= h;
                (f(&xp) - f(&xm)) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn bubble_values() {
        let c3 = make_context(3).unwrap();
        let b = BubbleTerm::new(vec![0.0; 3], 1.0);
        assert_relative_eq!(b.value(&c3, &[0.0, 0.0, 0.0]), 1.316_074_012_952_492, max_relative = 1e-14);
        assert_relative_eq!(b.value(&c3, &[1.0, 0.0, 0.0]), 3f64.powf(0.25) * 0.5f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(b.value(&c3, &[1.0, 0.0, 0.0]), 0.930_604_859_102_099_9, max_relative = 1e-12);
        for n in 3..8 {
            let c = make_context(n).unwrap();
            for &lam in &[1e-9, 0.01, 1.0, 30.0] {
                let t = BubbleTerm::new(vec![0.5; n], lam);
                let want = c.alpha_n * lam.powf((2.0 - n as f64) / 2.0);
                assert_relative_eq!(t.value(&c, &vec![0.5; n]), want, max_relative = 1e-13);
                assert_relative_eq!(t.peak_value(&c), want, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn bubble_gradient_vanishes_at_center_and_matches_fd() {
        let c3 = make_context(3).unwrap();
        let b = BubbleTerm::new(vec![0.0; 3], 1.0);
        assert!(b.gradient(&c3, &[0.0; 3]).iter().all(|g| *g == 0.0));
        let x = [1.0, 0.0, 0.0];
        let g = b.gradient(&c3, &x);
        let fd = central_gradient(|y| b.value(&c3, y), &x, 1e-6);
        for (a, e) in g.iter().zip(&fd) {
            assert!((a - e).abs() <= 1e-8 * g[0].abs().max(1e-300) + 1e-12);
        }
        // |∇ū| = (n-2) ū ρ/(λ²+ρ²) = α_3 2^{-1/2} / 2
        assert_relative_eq!(g[0].abs(), 3f64.powf(0.25) * 0.5f64.sqrt() * 0.5, max_relative = 1e-14);
    }

    #[test]
    fn bubble_laplacian_is_minus_value_to_p() {
        for n in 3..8 {
            let c = make_context(n).unwrap();
            let t = BubbleTerm::new(vec![0.2; n], 0.3);
            for k in 0..20 {
                let x: Vec<f64> = (0..n).map(|i| ((k * 7 + i * 3) % 11) as f64 * 0.37 - 1.5).collect();
                let e = t.eval(&c, &x);
                assert_relative_eq!(e.laplacian, -e.value.powf(c.p), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn flat_curvature_examples() {
        let c3 = make_context(3).unwrap();
        let f = FlatBubbleTerm::new(1.0);
        assert_relative_eq!(f.curvature(&c3, &[0.0; 3]), 1.5, max_relative = 1e-15);
        assert_relative_eq!(f.curvature(&c3, &[1.0, 0.0, 0.0]), 0.875, max_relative = 1e-15);
        assert!((f.curvature(&c3, &[1e4, 0.0, 0.0]) - 0.25).abs() < 1e-7);
        for n in 3..9 {
            let c = make_context(n).unwrap();
            let f = FlatBubbleTerm::new(0.7);
            let nf = n as f64;
            assert_relative_eq!(f.curvature(&c, &vec![0.0; n]), nf * (nf - 2.0) / 2.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn flat_curvature_equals_quotient() {
        for n in 3..8 {
            let c = make_context(n).unwrap();
            let f = FlatBubbleTerm::new(1.3);
            for k in 0..30 {
                let x: Vec<f64> = (0..n).map(|i| ((k * 5 + i) % 9) as f64 * 0.9 - 3.0).collect();
                let e = f.eval(&c, &x);
                let k_quot = -e.laplacian / e.value.powf(c.p);
                assert_relative_eq!(e.curvature, k_quot, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn translation_invariance() {
        let c = make_context(4).unwrap();
        let shift = vec![1.5, -2.0, 0.25, 3.0];
        let t = BubbleTerm::new(shift.clone(), 0.4);
        let t0 = BubbleTerm::new(vec![0.0; 4], 0.4);
        let x = vec![0.3, 0.7, -1.1, 2.0];
        let xs: Vec<f64> = x.iter().zip(&shift).map(|(a, b)| a - b).collect();
        assert_eq!(t.value(&c, &x), t0.value(&c, &xs));
    }
}
