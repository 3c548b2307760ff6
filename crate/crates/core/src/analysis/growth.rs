//! Ball and sphere integrals of powers of u, and the slow-decay sup.

use rayon::prelude::*;
use serde::Serialize;

use crate::construct::GrowthTable;
use crate::fields::SolutionField;
use crate::quadrature::{ball_integrate, sphere_integrate, Integral, QuadSettings, SphereRule};

/// rtol 1e-8, or 1e-6 once some bubble is sharper than λ = 1e-4.
pub fn default_settings(field: &SolutionField) -> QuadSettings {
    let sharp = field.bubbles.iter().any(|b| b.lambda < 1e-4);
    QuadSettings::for_dim(field.dim()).with_rtol(if sharp { 1e-6 } else { 1e-8 })
}

/// Volume integrals only feed growth-rate comparisons; 1e-4 is ample and keeps
/// large radii with many ring peaks affordable.
pub fn growth_settings(field: &SolutionField) -> QuadSettings {
    QuadSettings::for_dim(field.dim()).with_rtol(1e-4)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRow {
    pub r: f64,
    /// ∫_{B_o(r)} u^q dx.
    pub value: f64,
    pub error: f64,
    /// value / ln r, for r > 1.
    pub per_log: Option<f64>,
    /// value / φ(r), when a target is given.
    pub per_phi: Option<f64>,
    pub converged: bool,
}

pub fn ball_volume(field: &SolutionField, r: f64, settings: &QuadSettings) -> Integral {
    let q = field.context.q;
    ball_integrate(&field.geometry(), &|x: &[f64]| field.value(x).powf(q), r, settings)
}

/// ∫_{B_o(r)} u^q dx for each r.
pub fn volume_growth(
    field: &SolutionField,
    r_list: &[f64],
    phi: Option<&GrowthTable>,
    settings: &QuadSettings,
) -> Vec<GrowthRow> {
    r_list
        .iter()
        .map(|&r| {
            let i = ball_volume(field, r, settings);
            GrowthRow {
                r,
                value: i.value,
                error: i.error,
                per_log: (r > 1.0).then(|| i.value / r.ln()),
                per_phi: phi.map(|t| i.value / t.eval(r)),
                converged: i.converged,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereLp {
    pub r: f64,
    pub p: f64,
    /// ∫_{S^{n-1}} u^p(r, θ) dθ.
    pub value: f64,
    /// value · r^{(n-2)p/2}.
    pub normalized: f64,
    pub error: f64,
}

pub fn sphere_lp(field: &SolutionField, r: f64, p: f64, settings: &QuadSettings) -> SphereLp {
    let i = sphere_integrate(&field.geometry(), &|x: &[f64]| field.value(x).powf(p), r, settings);
    SphereLp {
        r,
        p,
        value: i.value,
        normalized: i.value * r.powf(field.context.half_nm2() * p),
        error: i.error,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayRow {
    pub r: f64,
    /// sup_θ r^{(n-2)/2} u(r, θ).
    pub sup: f64,
    pub argmax: Vec<f64>,
}

/// Directions probed on each sphere: a product rule's nodes plus every bubble-center direction.
pub fn probe_directions(field: &SolutionField) -> Vec<Vec<f64>> {
    let n = field.dim();
    let polar = match n {
        3 => 24,
        4 => 12,
        _ => 6,
    };
    let mut dirs: Vec<Vec<f64>> = SphereRule::new(n, polar).iter().map(|(x, _)| x.to_vec()).collect();
    for b in &field.bubbles {
        let norm = b.center.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 0.0 {
            dirs.push(b.center.iter().map(|c| c / norm).collect());
        }
    }
    dirs
}

pub fn slow_decay_measure(field: &SolutionField, r_list: &[f64]) -> Vec<DecayRow> {
    let dirs = probe_directions(field);
    let m = field.context.half_nm2();
    r_list
        .iter()
        .map(|&r| {
            let vals: Vec<f64> = dirs
                .par_iter()
                .map(|d| {
                    let x: Vec<f64> = d.iter().map(|t| r * t).collect();
                    field.value(&x)
                })
                .collect();
            let mut best = 0;
            for (i, v) in vals.iter().enumerate() {
                if *v > vals[best] {
                    best = i;
                }
            }
            DecayRow {
                r,
                sup: r.powf(m) * vals[best],
                argmax: dirs[best].iter().map(|t| r * t).collect(),
            }
        })
        .collect()
}
