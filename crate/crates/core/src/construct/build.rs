//! Assembly of the two superpositions and their inequality reports.

use serde::Serialize;

use super::lambda::{
    choose_lambda_ring, choose_lambda_unbounded, domination_sup, ring_count, ring_radius,
};
use super::params::{ConstructionAParams, ConstructionBParams};
use crate::dimension::DimensionContext;
use crate::error::{Error, Result};
use crate::fields::{BubbleTerm, FlatBubbleTerm, SolutionField};
use crate::quadrature::radial_mass_fraction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">=")]
    AtLeast,
}

/// One verified inequality `value relation bound`; `margin` is positive when it holds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub index: Option<usize>,
    pub value: f64,
    pub relation: Relation,
    pub bound: f64,
    pub margin: f64,
    pub holds: bool,
}

impl Check {
    pub fn new(name: &str, index: Option<usize>, value: f64, relation: Relation, bound: f64) -> Self {
        let margin = match relation {
            Relation::AtMost | Relation::Below => bound - value,
            Relation::AtLeast => value - bound,
        };
        let holds = match relation {
            Relation::Below => margin > 0.0,
            _ => margin >= 0.0,
        };
        Check {
            name: name.to_string(),
            index,
            value,
            relation,
            bound,
            margin,
            holds,
        }
    }
}

/// Per-bubble-group data: one entry per u_k, or per ring.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleRecord {
    pub index: usize,
    pub count: usize,
    pub eps: f64,
    pub center_norm: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstructionReport {
    pub construction: String,
    pub n: usize,
    pub tail_bound_coeff: f64,
    pub scales: Vec<ScaleRecord>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl ConstructionReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

#[derive(Debug, Clone)]
pub struct Construction {
    pub field: SolutionField,
    pub report: ConstructionReport,
}

fn domination_checks(
    ctx: &DimensionContext,
    checks: &mut Vec<Check>,
    k: usize,
    lambda: f64,
    eps: f64,
    center_norm: f64,
    rho0: f64,
) {
    let s = domination_sup(ctx, lambda, center_norm, rho0);
    checks.push(Check::new("domination_value", Some(k), s.value_ratio, Relation::AtMost, eps));
    checks.push(Check::new("domination_gradient", Some(k), s.gradient, Relation::Below, eps));
}

/// u = ũ_b + u_o + Σ_{k ≤ K} u_k with u_k centered at (r_k, 0, …, 0).
pub fn build_unbounded(params: &ConstructionAParams) -> Result<Construction> {
    let ctx = DimensionContext::new(params.n)?;
    let (eps, r, m, tail) = params.sequences()?;
    let mut bubbles = Vec::with_capacity(params.k_max);
    let mut scales = Vec::with_capacity(params.k_max);
    let mut checks = Vec::new();
    for k in 1..=params.k_max {
        let (e, rk, mk) = (eps[k - 1], r[k - 1], m[k - 1]);
        let lambda = choose_lambda_unbounded(&ctx, e, rk, mk)?;
        let mut center = vec![0.0; params.n];
        center[0] = rk;
        let term = BubbleTerm::new(center, lambda);
        checks.push(Check::new("peak_value", Some(k), term.peak_value(&ctx), Relation::AtLeast, mk));
        domination_checks(&ctx, &mut checks, k, lambda, e, rk, 0.25);
        bubbles.push(term);
        scales.push(ScaleRecord {
            index: k,
            count: 1,
            eps: e,
            center_norm: rk,
            lambda,
        });
    }
    let total: f64 = eps.iter().sum();
    checks.push(Check::new("weights_total", None, total + tail, Relation::AtMost, 1.0));

    let field = SolutionField::new(
        ctx,
        Some(FlatBubbleTerm::new(params.flat_b)),
        params.include_baseline,
        bubbles,
        tail,
    )?;
    for (k, b) in field.bubbles.iter().enumerate() {
        checks.push(Check::new("field_at_center", Some(k + 1), field.value(&b.center), Relation::AtLeast, m[k]));
    }
    for radius in [10.0, 100.0, 1000.0] {
        let worst = (0..params.n)
            .flat_map(|i| [1.0, -1.0].map(|s| (i, s)))
            .map(|(i, s)| {
                let mut x = vec![0.0; params.n];
                x[i] = s * radius;
                field.metric_factor(&x)
            })
            .fold(f64::INFINITY, f64::min);
        checks.push(Check::new(
            "completeness",
            None,
            worst,
            Relation::AtLeast,
            0.5 / (radius * radius),
        ));
    }
    let report = ConstructionReport {
        construction: "A".into(),
        n: params.n,
        tail_bound_coeff: tail,
        scales,
        checks,
        notes: Vec::new(),
    };
    Ok(Construction { field, report })
}

/// x_{k,j} = (k sin jθ_k, k cos jθ_k, 0, …, 0), θ_k = 2π/N_k, j = 1..N_k.
pub fn ring_centers(n: usize, k: usize, count: usize) -> Vec<Vec<f64>> {
    let theta = 2.0 * std::f64::consts::PI / count as f64;
    (1..=count)
        .map(|j| {
            let (s, c) = (j as f64 * theta).sin_cos();
            let mut x = vec![0.0; n];
            x[0] = k as f64 * s;
            x[1] = k as f64 * c;
            x
        })
        .collect()
}

/// u = ũ_b + u_o + Σ_k Σ_j u_{k,j} with N_k bubbles on the circle of radius k.
pub fn build_prescribed_growth(params: &ConstructionBParams) -> Result<Construction> {
    let ctx = DimensionContext::new(params.n)?;
    if !(params.flat_b > 0.0 && params.flat_b.is_finite()) {
        return Err(Error::param("flat_b", "must be positive"));
    }
    let weights = params.weight_rule.terms(params.k_max)?;
    if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(Error::param("weight_rule", "ring weights must be positive"));
    }
    let total: f64 = weights.iter().sum();
    let tail = params
        .weight_rule
        .tail_after(params.k_max)
        .unwrap_or_else(|| (1.0 - total).max(0.0));

    let mut notes = Vec::new();
    let phi0 = params.phi.eval(0.0);
    if phi0 < 10.0 * ctx.v_n {
        notes.push(format!(
            "phi(0) = {phi0} is below 10 V_n = {}; the construction does not rely on this normalization",
            10.0 * ctx.v_n
        ));
    }

    let mut checks = Vec::new();
    let mut scales = Vec::new();
    let mut bubbles = Vec::new();
    let mut prev_eps = f64::INFINITY;
    for k in 1..=params.k_max {
        let target = params.phi.eval(k as f64 + 2.0);
        let count = ring_count(&ctx, target);
        let eps = weights[k - 1] / count as f64;
        if eps.is_nan() || eps >= 1.0 {
            return Err(Error::param("weight_rule", format!("ϵ_{k} = {eps} is not below 1")));
        }
        if eps >= prev_eps {
            return Err(Error::param("weight_rule", format!("ϵ_k must decrease, fails at k = {k}")));
        }
        prev_eps = eps;
        let lambda = choose_lambda_ring(&ctx, eps, count, k as f64)?;
        let rho0 = ring_radius(count);
        checks.push(Check::new("ring_count", Some(k), count as f64, Relation::AtLeast, 2.0 * target / ctx.v_n));
        domination_checks(&ctx, &mut checks, k, lambda, eps, k as f64, rho0);
        checks.push(Check::new(
            "half_mass",
            Some(k),
            radial_mass_fraction(params.n, rho0 / lambda),
            Relation::AtLeast,
            0.5,
        ));
        for c in ring_centers(params.n, k, count) {
            bubbles.push(BubbleTerm::new(c, lambda));
        }
        scales.push(ScaleRecord {
            index: k,
            count,
            eps,
            center_norm: k as f64,
            lambda,
        });
    }
    checks.push(Check::new("weights_total", None, total + tail, Relation::AtMost, 1.0));
    let field = SolutionField::new(ctx, Some(FlatBubbleTerm::new(params.flat_b)), true, bubbles, tail)?;
    let report = ConstructionReport {
        construction: "B".into(),
        n: params.n,
        tail_bound_coeff: tail,
        scales,
        checks,
        notes,
    };
    Ok(Construction { field, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::params::GrowthTable;

    #[test]
    fn unbounded_defaults() {
        let c = build_unbounded(&ConstructionAParams::new(3, 5)).unwrap();
        assert!(c.report.all_hold(), "{:?}", c.report.failures().collect::<Vec<_>>());
        assert_eq!(c.field.bubbles.len(), 5);
        assert_eq!(c.field.tail_bound_coeff, 1.0 / 32.0);
        assert!(c.field.value(&c.field.bubbles[4].center) >= 5.0);
    }

    #[test]
    fn empty_unbounded_is_flat() {
        let mut p = ConstructionAParams::new(3, 0);
        p.include_baseline = false;
        let c = build_unbounded(&p).unwrap();
        let x = [0.7, -0.2, 1.1];
        let kb = c.field.flat.unwrap().curvature(&c.field.context, &x);
        assert!((c.field.curvature(&x) - kb).abs() <= 1e-12 * kb);
    }

    #[test]
    fn growth_rings() {
        let phi = GrowthTable::from_fn((0..=20).map(f64::from), |r| r * r).unwrap();
        let c = build_prescribed_growth(&ConstructionBParams::new(3, 6, phi)).unwrap();
        assert!(c.report.all_hold(), "{:?}", c.report.failures().collect::<Vec<_>>());
        let counts: Vec<usize> = c.report.scales.iter().map(|s| s.count).collect();
        assert_eq!(counts, vec![2, 3, 4, 6, 8, 10]);
        assert_eq!(c.field.bubbles.len(), 33);
        assert_eq!(c.report.notes.len(), 1);
    }

    #[test]
    fn single_ring_rotation() {
        let phi = GrowthTable::new(vec![[0.0, 1.0], [10.0, 1.0]]).unwrap();
        let c = build_prescribed_growth(&ConstructionBParams::new(3, 1, phi)).unwrap();
        assert_eq!(c.field.bubbles.len(), 1);
        assert!(c.field.induced_curvature(&[0.3, 0.9, 0.1]).is_ok());

        let phi = GrowthTable::new(vec![[0.0, 60.0], [10.0, 60.0]]).unwrap();
        let c = build_prescribed_growth(&ConstructionBParams::new(3, 1, phi)).unwrap();
        let count = c.report.scales[0].count;
        let theta = 2.0 * std::f64::consts::PI / count as f64;
        for i in 0..20 {
            let x = [0.1 * i as f64 - 1.0, 0.05 * i as f64, 0.3];
            let (s, co) = theta.sin_cos();
            let y = [co * x[0] + s * x[1], -s * x[0] + co * x[1], x[2]];
            let (a, b) = (c.field.value(&x), c.field.value(&y));
            assert!((a - b).abs() <= 1e-12 * a);
        }
    }
}
