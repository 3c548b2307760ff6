use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use confcurv_core::analysis::{diagnostics, CsvTable};
use confcurv_core::fowler::{family_csv, fixed_point, homoclinic, integrate, necksize_family};
use confcurv_core::{make_context, SolutionField};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{ConfigError, Grids, RunConfig, Tolerances};
use crate::report::{to_json, CheckRow, Report, Sink, Status, VERSION};
use crate::verify::{self, Suite, VerifyInputs};
use crate::Source;

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn resolve(source: &Source) -> Result<Option<RunConfig>> {
    let mut cfg = match (&source.config, &source.preset) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(name)) => RunConfig::preset(name)?,
        (None, None) => return Ok(None),
    };
    if let Some(r) = source.rtol {
        if !(r > 0.0 && r < 1.0) {
            bail!(ConfigError(format!("--rtol must lie in (0, 1), got {r}")));
        }
        cfg.quadrature.rtol = Some(r);
    }
    Ok(Some(cfg))
}

fn require(source: &Source) -> Result<RunConfig> {
    resolve(source)?.ok_or_else(|| ConfigError("one of --config or --preset is required".into()).into())
}

fn sink_for(source: &Source, cfg: Option<&RunConfig>) -> Result<Sink> {
    let dir = source.out.clone().or_else(|| cfg.and_then(|c| c.output.as_ref().map(PathBuf::from)));
    Sink::new(dir)
}

fn load_field(path: &Path) -> Result<(SolutionField, String)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let field = SolutionField::from_json(&text)
        .map_err(|e| ConfigError(format!("{}: not a field document: {e}", path.display())))?;
    Ok((field, text))
}

pub fn construct(source: &Source) -> Result<bool> {
    let cfg = require(source)?;
    let sink = sink_for(source, Some(&cfg))?;
    let built = cfg.build()?;
    let field_json = built.field.to_json()?;
    let checks = verify::construction_rows(&built.report.checks);
    let data = json!({
        "construction": built.report,
        "field": serde_json::from_str::<Value>(&field_json)?,
    });
    let report = Report::new("construct", cfg.hash(), checks, data);
    sink.emit("field.json", &field_json, false)?;
    sink.emit("construct.json", &to_json(&report)?, true)?;
    Ok(report.passed())
}

pub fn verify(source: &Source, field_path: Option<&Path>, suite: Suite) -> Result<bool> {
    let cfg = resolve(source)?;
    let sink = sink_for(source, cfg.as_ref())?;
    let (field, mut checks, hash) = match (field_path, &cfg) {
        (Some(p), _) => {
            let (field, text) = load_field(p)?;
            let mut h = text;
            if let Some(c) = &cfg {
                h.push_str(&c.hash());
            } else if let Some(r) = source.rtol {
                h.push_str(&format!("rtol={r:e}"));
            }
            (field, Vec::new(), sha256_hex(h.as_bytes()))
        }
        (None, Some(c)) => {
            let built = c.build()?;
            (built.field, verify::construction_rows(&built.report.checks), c.hash())
        }
        (None, None) => bail!(ConfigError("verify needs --field, --config or --preset".into())),
    };
    let default_grids = Grids::default();
    let default_tol = Tolerances::default();
    let (grids, tolerances) = match &cfg {
        Some(c) => (&c.grids, &c.tolerances),
        None => (&default_grids, &default_tol),
    };
    let (settings, volume_settings) = match &cfg {
        Some(c) => (c.settings(&field), c.volume_settings(&field)),
        None => {
            let override_rtol = |mut s: confcurv_core::quadrature::QuadSettings| {
                if let Some(r) = source.rtol {
                    s.rtol = r;
                }
                s
            };
            (
                override_rtol(confcurv_core::analysis::default_settings(&field)),
                override_rtol(confcurv_core::analysis::growth_settings(&field)),
            )
        }
    };
    let inputs = VerifyInputs {
        field: &field,
        phi: cfg.as_ref().and_then(|c| c.phi()),
        grids,
        tolerances,
        settings,
        volume_settings,
    };
    let out = verify::run(&inputs, suite);
    checks.extend(out.checks);
    let data = json!({
        "n": field.dim(),
        "terms": field.term_count(),
        "rtol": settings.rtol,
        "volume_rtol": volume_settings.rtol,
        "suites": out.data,
    });
    let report = Report::new("verify", hash, checks, data);
    // partial results are written before the exit status is decided
    for (name, table) in &out.tables {
        sink.emit_csv(name, table)?;
    }
    sink.emit("verify.json", &to_json(&report)?, true)?;
    Ok(report.passed())
}

pub fn diagnose(source: &Source, field_path: Option<&Path>) -> Result<bool> {
    let cfg = resolve(source)?;
    let sink = sink_for(source, cfg.as_ref())?;
    let (field, hash) = match (field_path, &cfg) {
        (Some(p), _) => {
            let (field, mut text) = load_field(p)?;
            if let Some(c) = &cfg {
                text.push_str(&c.hash());
            }
            (field, sha256_hex(text.as_bytes()))
        }
        (None, Some(c)) => (c.build()?.field, c.hash()),
        (None, None) => bail!(ConfigError("diagnose needs --field, --config or --preset".into())),
    };
    let grids = cfg.as_ref().map(|c| c.grids.clone()).unwrap_or_default();
    let params = cfg.as_ref().map(|c| c.diagnostics).unwrap_or_default();
    let settings = match &cfg {
        Some(c) => c.settings(&field),
        None => confcurv_core::analysis::default_settings(&field),
    };
    let rep = diagnostics(&field, &grids.s_grid, &params, &settings);
    let mut table = CsvTable::new(&[
        "s",
        "r",
        "energy_ratio",
        "derivative_ratio",
        "log_derivative",
        "weighted_derivative_mass",
        "k_radial_floor",
        "k_radial_log_floor",
        "pohozaev",
        "pohozaev_error",
    ]);
    for r in &rep.rows {
        table.push_numbers(&[
            r.s,
            r.r,
            r.energy_ratio,
            r.derivative_ratio,
            r.log_derivative,
            r.weighted_derivative_mass,
            r.k_radial_floor,
            r.k_radial_log_floor,
            r.pohozaev,
            r.pohozaev_error,
        ]);
    }
    let report = Report::new("diagnose", hash, Vec::new(), serde_json::to_value(&rep)?);
    sink.emit_csv("diagnostics.csv", &table)?;
    sink.emit("diagnose.json", &to_json(&report)?, true)?;
    Ok(true)
}

#[derive(Args, Debug)]
pub struct FowlerArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Comma-separated necksizes for the family table.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["homoclinic", "fixed_point"])]
    eps: Vec<f64>,
    /// Integrate the homoclinic orbit from its maximum (1, 0).
    #[arg(long, conflicts_with = "fixed_point")]
    homoclinic: bool,
    /// Print the constant solution ((n-2)/n)^{(n-2)/4}.
    #[arg(long)]
    fixed_point: bool,
    /// Compare the homoclinic orbit with (cosh s)^{-(n-2)/2}; exit 1 above 1e-8.
    #[arg(long, requires = "homoclinic")]
    check: bool,
    #[arg(long, default_value_t = 10.0)]
    s_end: f64,
    /// Local error tolerance of the integrator.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn fowler(args: &FowlerArgs) -> Result<bool> {
    let ctx = make_context(args.n).map_err(|e| ConfigError(e.to_string()))?;
    let sink = Sink::new(args.out.clone())?;
    let hash = sha256_hex(format!("{args:?}").as_bytes());
    let (table, checks, data) = if args.fixed_point {
        let mut t = CsvTable::new(&["n", "v_star"]);
        let v = fixed_point(&ctx);
        t.push(vec![args.n.to_string(), confcurv_core::analysis::format_number(v)]);
        (t, Vec::new(), json!({ "n": args.n, "v_star": v }))
    } else if args.homoclinic {
        let orbit = integrate(&ctx, 1.0, 0.0, args.s_end, args.tol).map_err(|e| ConfigError(e.to_string()))?;
        let err = orbit
            .samples
            .iter()
            .map(|p| (p.v - homoclinic(&ctx, p.s)).abs())
            .fold(0.0, f64::max);
        let mut checks = Vec::new();
        if args.check {
            checks.push(CheckRow::new(
                "fowler",
                "homoclinic_closed_form",
                err,
                confcurv_core::construct::Relation::AtMost,
                1e-8,
            ));
        }
        let data = json!({ "n": args.n, "max_error": err, "energy_drift": orbit.energy_drift });
        (orbit.to_csv(&ctx), checks, data)
    } else {
        if args.eps.is_empty() {
            bail!(ConfigError("fowler needs --eps, --homoclinic or --fixed-point".into()));
        }
        let rows = necksize_family(&ctx, &args.eps, args.tol).map_err(|e| ConfigError(e.to_string()))?;
        (family_csv(&rows), Vec::new(), json!({ "n": args.n, "family": rows }))
    };
    let report = Report::new("fowler", hash, checks, data);
    match sink.dir() {
        Some(_) => {
            sink.emit_csv("fowler.csv", &table)?;
            sink.emit("fowler.json", &to_json(&report)?, true)?;
        }
        None => {
            print!("{}", table.render());
            if report.status == Status::Fail {
                eprintln!("check failed: {}", to_json(&report.checks)?);
            }
        }
    }
    Ok(report.passed())
}

pub fn report(inputs: &[PathBuf], out: Option<&Path>) -> Result<bool> {
    let mut files: Vec<PathBuf> = inputs.to_vec();
    if files.is_empty() {
        let Some(dir) = out else {
            bail!(ConfigError("report needs input files or --out".into()));
        };
        for entry in std::fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
            let path = entry?.path();
            let is_json = path.extension().is_some_and(|e| e == "json");
            let is_input = !matches!(path.file_name().and_then(|n| n.to_str()), Some("summary.json" | "field.json"));
            if is_json && is_input {
                files.push(path);
            }
        }
    }
    files.sort();
    let mut entries = Vec::new();
    let mut all_pass = true;
    for path in &files {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let doc: Value = serde_json::from_str(&text)
            .map_err(|e| ConfigError(format!("{}: not JSON: {e}", path.display())))?;
        let (Some(command), Some(status)) = (doc["command"].as_str(), doc["status"].as_str()) else {
            bail!(ConfigError(format!("{}: not a confcurv report", path.display())));
        };
        let checks = doc["checks"].as_array().map_or(&[][..], |v| v.as_slice());
        let failed: Vec<&Value> = checks.iter().filter(|c| c["status"] != "pass").collect();
        all_pass &= status == "pass";
        entries.push(json!({
            "file": path.file_name().map(|n| n.to_string_lossy().into_owned()),
            "command": command,
            "config_hash": doc["config_hash"],
            "version": doc["version"],
            "status": status,
            "checks": checks.len(),
            "failed": failed,
        }));
    }
    let summary = json!({
        "tool": "confcurv",
        "version": VERSION,
        "status": if all_pass { "pass" } else { "fail" },
        "reports": entries,
    });
    let sink = Sink::new(out.map(Path::to_path_buf))?;
    sink.emit("summary.json", &to_json(&summary)?, true)?;
    Ok(all_pass)
}
