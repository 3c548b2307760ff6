use clap::ValueEnum;
use confcurv_core::analysis::{
    format_number, pohozaev_report, probe_directions, volume_growth, CsvTable, CylinderField,
};
use confcurv_core::construct::{Check, GrowthTable, Relation};
use confcurv_core::fields::{curvature_bounds, SamplingPlan};
use confcurv_core::quadrature::QuadSettings;
use confcurv_core::SolutionField;
use serde_json::{json, Map, Value};

use crate::config::{Grids, Tolerances};
use crate::report::CheckRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Curvature,
    Pohozaev,
    Growth,
    Cylinder,
    All,
}

impl Suite {
    fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Curvature, Suite::Pohozaev, Suite::Growth, Suite::Cylinder],
            s => vec![s],
        }
    }

    fn name(self) -> &'static str {
        match self {
            Suite::Curvature => "curvature",
            Suite::Pohozaev => "pohozaev",
            Suite::Growth => "growth",
            Suite::Cylinder => "cylinder",
            Suite::All => "all",
        }
    }
}

/// Everything a verification run needs besides the field.
pub struct VerifyInputs<'a> {
    pub field: &'a SolutionField,
    pub phi: Option<&'a GrowthTable>,
    pub grids: &'a Grids,
    pub tolerances: &'a Tolerances,
    pub settings: QuadSettings,
    pub volume_settings: QuadSettings,
}

pub struct SuiteOutput {
    pub checks: Vec<CheckRow>,
    pub data: Map<String, Value>,
    pub tables: Vec<(String, CsvTable)>,
}

pub fn run(inputs: &VerifyInputs<'_>, suite: Suite) -> SuiteOutput {
    let mut out = SuiteOutput {
        checks: Vec::new(),
        data: Map::new(),
        tables: Vec::new(),
    };
    for s in suite.expand() {
        let (checks, data, tables) = match s {
            Suite::Curvature => curvature(inputs),
            Suite::Pohozaev => pohozaev(inputs),
            Suite::Growth => growth(inputs),
            Suite::Cylinder => cylinder(inputs),
            Suite::All => unreachable!(),
        };
        out.checks.extend(checks);
        out.data.insert(s.name().to_string(), data);
        out.tables.extend(tables);
    }
    out
}

type Section = (Vec<CheckRow>, Value, Vec<(String, CsvTable)>);

/// Fields with K ≡ 1: one standard bubble and nothing else.
fn is_single_bubble(f: &SolutionField) -> bool {
    f.flat.is_none() && f.term_count() == 1
}

fn is_flat_only(f: &SolutionField) -> bool {
    f.flat.is_some() && f.term_count() == 1
}

fn curvature(inp: &VerifyInputs<'_>) -> Section {
    const SUITE: &str = "curvature";
    let f = inp.field;
    let plan = SamplingPlan::covering(f);
    let mut checks = Vec::new();
    let bounds = match curvature_bounds(f, &plan) {
        Ok(b) => b,
        Err(e) => {
            checks.push(CheckRow::new(SUITE, "curvature_positive", f64::NAN, Relation::Below, 0.0));
            return (checks, json!({ "error": e.to_string() }), Vec::new());
        }
    };
    checks.push(CheckRow::new(SUITE, "curvature_positive", bounds.min, Relation::AtLeast, 0.0));

    // weighted-sum curvature against -Δu/u^p on a thinned copy of the plan
    let pts = plan.points(f);
    let stride = (pts.len() / 4000).max(1);
    let mut worst: f64 = 0.0;
    let mut exact_dev: f64 = 0.0;
    for x in pts.iter().step_by(stride) {
        let kw = f.curvature(x);
        let kq = -f.laplacian(x) / f.value(x).powf(f.context.p);
        worst = worst.max((kw - kq).abs() / kw.abs());
        exact_dev = exact_dev.max((kw - 1.0).abs());
    }
    checks.push(CheckRow::new(
        SUITE,
        "curvature_consistency",
        worst,
        Relation::AtMost,
        inp.tolerances.curvature_consistency,
    ));
    if is_single_bubble(f) {
        checks.push(CheckRow::new(SUITE, "constant_curvature", exact_dev, Relation::AtMost, 1e-11));
    }
    if is_flat_only(f) {
        let n = f.context.dim();
        let lo = (n - 2.0).powi(2) * n / (4.0 * n);
        let hi = n * (n - 2.0) / 2.0;
        checks.push(CheckRow::new(SUITE, "flat_bracket_min", (bounds.min - lo).abs(), Relation::AtMost, 1e-9));
        checks.push(CheckRow::new(SUITE, "flat_bracket_max", (bounds.max - hi).abs(), Relation::AtMost, 1e-9));
    }
    let data = json!({
        "min": bounds.min,
        "max": bounds.max,
        "argmin": bounds.argmin,
        "argmax": bounds.argmax,
        "c1": bounds.c1,
        "c2_empirical": bounds.c2_empirical,
        "samples": bounds.samples,
        "consistency_points": pts.len().div_ceil(stride),
    });
    (checks, data, Vec::new())
}

fn pohozaev(inp: &VerifyInputs<'_>) -> Section {
    const SUITE: &str = "pohozaev";
    let tol = inp.tolerances;
    let mut checks = Vec::new();
    let mut table = CsvTable::new(&["r", "p_volume", "p_surface", "discrepancy", "volume_error", "surface_error"]);
    let mut rows = Vec::new();
    for &r in &inp.grids.r_list {
        let p = pohozaev_report(inp.field, r, &inp.settings);
        let bound = (tol.pohozaev_factor * p.combined_error()).max(tol.pohozaev_floor);
        checks.push(
            CheckRow::new(SUITE, "surface_matches_volume", p.discrepancy, Relation::AtMost, bound)
                .at(r)
                .error(p.combined_error()),
        );
        table.push_numbers(&[r, p.p_volume, p.p_surface, p.discrepancy, p.volume_error, p.surface_error]);
        rows.push(p);
    }
    (checks, json!({ "rows": rows }), vec![("pohozaev.csv".into(), table)])
}

fn growth(inp: &VerifyInputs<'_>) -> Section {
    const SUITE: &str = "growth";
    let rows = volume_growth(inp.field, &inp.grids.volume_r_list, inp.phi, &inp.volume_settings);
    let mut checks = Vec::new();
    for w in rows.windows(2) {
        checks.push(
            CheckRow::new(SUITE, "volume_increasing", w[1].value - w[0].value, Relation::AtLeast, 0.0)
                .at(w[1].r),
        );
    }
    if let Some(phi) = inp.phi {
        for row in &rows {
            checks.push(
                CheckRow::new(SUITE, "volume_at_least_phi", row.value, Relation::AtLeast, phi.eval(row.r))
                    .at(row.r)
                    .error(row.error),
            );
        }
    }
    let max_per_log = rows.iter().filter_map(|r| r.per_log).fold(f64::NEG_INFINITY, f64::max);
    let opt = |x: Option<f64>| x.map_or_else(String::new, format_number);
    let mut table = CsvTable::new(&["r", "volume", "error", "per_log", "per_phi", "converged"]);
    for r in &rows {
        table.push(vec![
            format_number(r.r),
            format_number(r.value),
            format_number(r.error),
            opt(r.per_log),
            opt(r.per_phi),
            r.converged.to_string(),
        ]);
    }
    let data = json!({
        "rows": rows,
        "max_per_log": (max_per_log.is_finite()).then_some(max_per_log),
    });
    (checks, data, vec![("growth.csv".into(), table)])
}

fn cylinder(inp: &VerifyInputs<'_>) -> Section {
    const SUITE: &str = "cylinder";
    let f = inp.field;
    let tol = inp.tolerances;
    let cyl = CylinderField::new(f);
    let dirs = probe_directions(f);
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let mut table = CsvTable::new(&[
        "s",
        "residual",
        "round_trip",
        "w",
        "w2_fd",
        "w2_rhs",
        "two_p_sphere",
        "two_p_volume",
        "quadrature_error",
    ]);
    for &s in &inp.grids.s_grid {
        let r = s.exp();
        let mut residual: f64 = 0.0;
        let mut round_trip: f64 = 0.0;
        for th in &dirs {
            let parts = cyl.residual_parts(s, th, 1e-4);
            let m = f.context.half_nm2();
            let scale = (m * m * parts.v).max(parts.k.abs() * parts.v.powf(f.context.p)).max(1.0);
            residual = residual.max(parts.residual() / scale);
            let x: Vec<f64> = th.iter().map(|t| r * t).collect();
            let u = f.value(&x);
            round_trip = round_trip.max((cyl.u_from_v(&x) - u).abs() / u);
        }
        let id = cyl.w_identity_check(s, 1e-2, &inp.settings);
        checks.push(CheckRow::new(SUITE, "equation_residual", residual, Relation::AtMost, tol.cylinder_residual).at(s));
        checks.push(CheckRow::new(SUITE, "round_trip", round_trip, Relation::AtMost, tol.round_trip).at(s));
        checks.push(
            CheckRow::new(
                SUITE,
                "pohozaev_identity",
                id.pohozaev_gap,
                Relation::AtMost,
                tol.pohozaev_identity.max(tol.pohozaev_factor * id.quadrature_error),
            )
            .at(s)
            .error(id.quadrature_error),
        );
        checks.push(
            CheckRow::new(
                SUITE,
                "energy_second_derivative",
                id.second_derivative_gap,
                Relation::AtMost,
                tol.w_identity * id.w2_rhs.abs().max(1.0) + id.fd_error + id.quadrature_error,
            )
            .at(s)
            .error(id.fd_error + id.quadrature_error),
        );
        table.push_numbers(&[
            s,
            residual,
            round_trip,
            id.w,
            id.w2_fd,
            id.w2_rhs,
            id.two_p_sphere,
            id.two_p_volume,
            id.quadrature_error,
        ]);
        rows.push(json!({ "s": s, "residual": residual, "round_trip": round_trip, "identity": id }));
    }
    (checks, json!({ "rows": rows }), vec![("cylinder.csv".into(), table)])
}

/// Construction inequalities, reported alongside the suites when the field was built from a config.
pub fn construction_rows(checks: &[Check]) -> Vec<CheckRow> {
    checks.iter().map(|c| CheckRow::from_check("construction", c)).collect()
}
