//! The Pohozaev functional as a ball integral and as a sphere integral.

use serde::Serialize;

use crate::fields::SolutionField;
use crate::quadrature::{ball_integrate_split, sphere_integrate, Integral, QuadSettings};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// P(u, r) = (n-2)/(2n) ∫_{B_o(r)} x·∇K u^q dx with ∇K in closed form.
pub fn pohozaev_volume(field: &SolutionField, r: f64, settings: &QuadSettings) -> Integral {
    let ctx = field.context;
    let integrand = |x: &[f64], lo: &[f64]| {
        let e = field.eval_split(x, lo);
        (dot(x, &e.curvature_gradient) + dot(lo, &e.curvature_gradient)) * e.value.powf(ctx.q)
    };
    ball_integrate_split(&field.geometry(), &integrand, r, settings).scaled((ctx.dim() - 2.0) / (2.0 * ctx.dim()))
}

/// ∫_{S_r} [r u_r² - (r/2)|∇u|² + (n-2)/(2n) r K u^q + (n-2)/2 u u_r] dS.
pub fn pohozaev_surface(field: &SolutionField, r: f64, settings: &QuadSettings) -> Integral {
    let ctx = field.context;
    let n = ctx.dim();
    let integrand = |x: &[f64]| {
        let (u, g) = field.value_gradient(x);
        let ur = dot(x, &g) / r;
        let grad2 = dot(&g, &g);
        let k = field.curvature(x);
        r * ur * ur - 0.5 * r * grad2 + (n - 2.0) / (2.0 * n) * r * k * u.powf(ctx.q) + 0.5 * (n - 2.0) * u * ur
    };
    sphere_integrate(&field.geometry(), &integrand, r, settings).scaled(r.powi(ctx.n as i32 - 1))
}

/// Both forms of P(u, r) side by side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PohozaevReport {
    pub r: f64,
    pub p_volume: f64,
    pub p_surface: f64,
    pub discrepancy: f64,
    pub volume_error: f64,
    pub surface_error: f64,
    pub converged: bool,
    /// How ∇K was obtained.
    pub gradient_mode: String,
}

impl PohozaevReport {
    pub fn combined_error(&self) -> f64 {
        self.volume_error + self.surface_error
    }
}

pub fn pohozaev_report(field: &SolutionField, r: f64, settings: &QuadSettings) -> PohozaevReport {
    let v = pohozaev_volume(field, r, settings);
    let s = pohozaev_surface(field, r, settings);
    PohozaevReport {
        r,
        p_volume: v.value,
        p_surface: s.value,
        discrepancy: (v.value - s.value).abs(),
        volume_error: v.error,
        surface_error: s.error,
        converged: v.converged && s.converged,
        gradient_mode: "analytic".into(),
    }
}
