use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use confcurv_core::analysis::CsvTable;
use confcurv_core::construct::{Check, Relation};
use serde::Serialize;
use serde_json::Value;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn of(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// One verified inequality with its measured value and, where meaningful, the
/// quadrature error estimate behind it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub suite: String,
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at: Option<f64>,
    pub value: f64,
    pub relation: Relation,
    pub bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_estimate: Option<f64>,
    pub status: Status,
}

impl CheckRow {
    pub fn new(suite: &str, name: &str, value: f64, relation: Relation, bound: f64) -> Self {
        let c = Check::new(name, None, value, relation, bound);
        CheckRow {
            suite: suite.to_string(),
            name: name.to_string(),
            index: None,
            at: None,
            value,
            relation,
            bound,
            error_estimate: None,
            // NaN never passes
            status: Status::of(c.holds && value.is_finite()),
        }
    }

    pub fn from_check(suite: &str, c: &Check) -> Self {
        CheckRow {
            suite: suite.to_string(),
            name: c.name.clone(),
            index: c.index,
            at: None,
            value: c.value,
            relation: c.relation,
            bound: c.bound,
            error_estimate: None,
            status: Status::of(c.holds),
        }
    }

    pub fn at(mut self, x: f64) -> Self {
        self.at = Some(x);
        self
    }

    pub fn error(mut self, e: f64) -> Self {
        self.error_estimate = Some(e);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_hash: String,
    pub status: Status,
    pub checks: Vec<CheckRow>,
    pub data: Value,
}

impl Report {
    pub fn new(command: &str, config_hash: String, checks: Vec<CheckRow>, data: Value) -> Self {
        let status = Status::of(checks.iter().all(|c| c.status == Status::Pass));
        Report {
            tool: "confcurv",
            version: VERSION,
            command: command.to_string(),
            config_hash,
            status,
            checks,
            data,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Destination for command output: a directory, or stdout when none is given.
pub struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            std::fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
        }
        Ok(Sink { dir })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// Writes `name` into the output directory; without one, only the primary
    /// document goes to stdout.
    pub fn emit(&self, name: &str, contents: &str, primary: bool) -> Result<()> {
        match &self.dir {
            Some(d) => {
                let path = d.join(name);
                std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
            }
            None => {
                if primary {
                    print!("{contents}");
                }
                Ok(())
            }
        }
    }

    pub fn emit_csv(&self, name: &str, table: &CsvTable) -> Result<()> {
        self.emit(name, &table.render(), false)
    }
}
