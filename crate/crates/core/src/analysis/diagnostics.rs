//! Grid measurements of the growth and Pohozaev hypotheses on the cylinder.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cylinder::CylinderField;
use super::growth::probe_directions;
use super::pohozaev::pohozaev_volume;
use crate::fields::SolutionField;
use crate::quadrature::{sphere_integrate, QuadSettings};

/// Constants entering the diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsParams {
    /// Additive constant C₁₁ in |v_s| ≤ C₁₁ + C₁₂ v.
    #[serde(default = "DiagnosticsParams::default_c11")]
    pub c11: f64,
    /// Exponent λ ∈ (0, 1) in ∫|v_s|^q dθ ≤ C e^{λs}.
    #[serde(default = "DiagnosticsParams::default_lambda")]
    pub lambda: f64,
    /// Exponent ε in the logarithmic decay floor for ∂K/∂r.
    #[serde(default = "DiagnosticsParams::default_eps")]
    pub eps: f64,
    /// Radius from which rows count as "large r".
    #[serde(default = "DiagnosticsParams::default_onset")]
    pub onset_radius: f64,
}

impl DiagnosticsParams {
    fn default_c11() -> f64 {
        1.0
    }
    fn default_lambda() -> f64 {
        0.5
    }
    fn default_eps() -> f64 {
        0.5
    }
    fn default_onset() -> f64 {
        10.0
    }
}

impl Default for DiagnosticsParams {
    fn default() -> Self {
        DiagnosticsParams {
            c11: Self::default_c11(),
            lambda: Self::default_lambda(),
            eps: Self::default_eps(),
            onset_radius: Self::default_onset(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsRow {
    pub s: f64,
    pub r: f64,
    pub beyond_onset: bool,
    /// ∫ v_s² dθ / (1 + ∫ v² dθ).
    pub energy_ratio: f64,
    /// max_θ (|v_s| - C₁₁)/v.
    pub derivative_ratio: f64,
    /// max_θ |v_s|/v.
    pub log_derivative: f64,
    /// e^{-λs} ∫ |v_s|^q dθ.
    pub weighted_derivative_mass: f64,
    /// min_θ r² ∂K/∂r.
    pub k_radial_floor: f64,
    /// min_θ r^{(n+2)/2} |ln r|^{1+ε} ∂K/∂r.
    pub k_radial_log_floor: f64,
    /// P(u, r).
    pub pohozaev: f64,
    pub pohozaev_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub params: DiagnosticsParams,
    pub rows: Vec<DiagnosticsRow>,
    /// inf of P(u, r) over the grid; δ² candidate is max(0, -inf).
    pub pohozaev_inf: f64,
    pub delta_sq: f64,
    /// P at the last grid point and |P(r_max) - P(r_max/2)|.
    pub pohozaev_last: f64,
    pub pohozaev_cauchy_tail: f64,
}

pub fn diagnostics(
    field: &SolutionField,
    s_grid: &[f64],
    params: &DiagnosticsParams,
    settings: &QuadSettings,
) -> DiagnosticsReport {
    let ctx = field.context;
    let n = ctx.dim();
    let cyl = CylinderField::new(field);
    let dirs = probe_directions(field);
    let geom = field.geometry();
    let rows: Vec<DiagnosticsRow> = s_grid
        .iter()
        .map(|&s| {
            let r = s.exp();
            let pointwise: Vec<(f64, f64, f64)> = dirs
                .par_iter()
                .map(|th| {
                    let e = cyl.eval(s, th);
                    let x: Vec<f64> = th.iter().map(|t| r * t).collect();
                    let dk: f64 = field.eval(&x).curvature_gradient.iter().zip(th).map(|(a, b)| a * b).sum();
                    ((e.v_s.abs() - params.c11) / e.v, e.v_s.abs() / e.v, dk)
                })
                .collect();
            let derivative_ratio = pointwise.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
            let log_derivative = pointwise.iter().map(|p| p.1).fold(0.0, f64::max);
            let dk_min = pointwise.iter().map(|p| p.2).fold(f64::INFINITY, f64::min);

            let over = |f: &(dyn Fn(&[f64]) -> f64 + Sync)| sphere_integrate(&geom, f, r, settings).value;
            let theta_of = |x: &[f64]| x.iter().map(|a| a / r).collect::<Vec<f64>>();
            let vs2 = over(&|x| cyl.eval(s, &theta_of(x)).v_s.powi(2));
            let v2 = over(&|x| cyl.eval(s, &theta_of(x)).v.powi(2));
            let vsq = over(&|x| cyl.eval(s, &theta_of(x)).v_s.abs().powf(ctx.q));
            let p = pohozaev_volume(field, r, settings);
            DiagnosticsRow {
                s,
                r,
                beyond_onset: r >= params.onset_radius,
                energy_ratio: vs2 / (1.0 + v2),
                derivative_ratio,
                log_derivative,
                weighted_derivative_mass: (-params.lambda * s).exp() * vsq,
                k_radial_floor: r * r * dk_min,
                k_radial_log_floor: r.powf((n + 2.0) / 2.0) * r.ln().abs().powf(1.0 + params.eps) * dk_min,
                pohozaev: p.value,
                pohozaev_error: p.error,
            }
        })
        .collect();
    let pohozaev_inf = rows.iter().map(|r| r.pohozaev).fold(f64::INFINITY, f64::min);
    let pohozaev_last = rows.last().map_or(0.0, |r| r.pohozaev);
    let pohozaev_cauchy_tail = match rows.last() {
        Some(last) => {
            let half = pohozaev_volume(field, 0.5 * last.r, settings).value;
            (last.pohozaev - half).abs()
        }
        None => 0.0,
    };
    DiagnosticsReport {
        params: *params,
        rows,
        pohozaev_inf,
        delta_sq: (-pohozaev_inf).max(0.0),
        pohozaev_last,
        pohozaev_cauchy_tail,
    }
}
