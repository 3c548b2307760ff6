//! Parameter sequences and growth targets for the two constructions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rule producing a sequence a_1, a_2, … indexed from k = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SeqRule {
    /// a_k = scale · ratio^k
    Geometric { scale: f64, ratio: f64 },
    /// a_k = offset + slope · k
    Linear { offset: f64, slope: f64 },
    /// a_k = values[k - 1]
    Table { values: Vec<f64> },
}

impl SeqRule {
    pub fn term(&self, k: usize) -> Result<f64> {
        match self {
            SeqRule::Geometric { scale, ratio } => Ok(scale * ratio.powi(k as i32)),
            SeqRule::Linear { offset, slope } => Ok(offset + slope * k as f64),
            SeqRule::Table { values } => values.get(k.wrapping_sub(1)).copied().ok_or_else(|| {
                Error::param("values", format!("table has {} entries, term {k} requested", values.len()))
            }),
        }
    }

    pub fn terms(&self, count: usize) -> Result<Vec<f64>> {
        (1..=count).map(|k| self.term(k)).collect()
    }

    /// Σ_{k > count} a_k when the rule determines it, i.e. for geometric decay.
    pub fn tail_after(&self, count: usize) -> Option<f64> {
        match *self {
            SeqRule::Geometric { scale, ratio } if (0.0..1.0).contains(&ratio) => {
                Some(scale * ratio.powi(count as i32 + 1) / (1.0 - ratio))
            }
            _ => None,
        }
    }
}

/// Nondecreasing function on [0, ∞) given by a table, linear in between and
/// extended linearly past the last node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct GrowthTable {
    nodes: Vec<[f64; 2]>,
}

impl TryFrom<Vec<[f64; 2]>> for GrowthTable {
    type Error = Error;

    fn try_from(nodes: Vec<[f64; 2]>) -> Result<Self> {
        GrowthTable::new(nodes)
    }
}

impl From<GrowthTable> for Vec<[f64; 2]> {
    fn from(t: GrowthTable) -> Self {
        t.nodes
    }
}

impl GrowthTable {
    pub fn new(nodes: Vec<[f64; 2]>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::param("phi", "need at least two nodes"));
        }
        if nodes[0][0] != 0.0 {
            return Err(Error::param("phi", "first node must be at r = 0"));
        }
        for w in nodes.windows(2) {
            if w[1][0].partial_cmp(&w[0][0]) != Some(std::cmp::Ordering::Greater) {
                return Err(Error::param("phi", "abscissae must increase strictly"));
            }
            if w[1][1] < w[0][1] {
                return Err(Error::param(
                    "phi",
                    format!("must be nondecreasing, drops at r = {}", w[1][0]),
                ));
            }
        }
        if nodes.iter().flatten().any(|v| !v.is_finite()) || nodes[0][1] < 0.0 {
            return Err(Error::param("phi", "values must be finite and nonnegative"));
        }
        Ok(GrowthTable { nodes })
    }

    /// Samples `f` at the given abscissae (which must start at 0).
    pub fn from_fn(rs: impl IntoIterator<Item = f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(rs.into_iter().map(|r| [r, f(r)]).collect())
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn eval(&self, r: f64) -> f64 {
        let r = r.max(0.0);
        let i = match self.nodes.iter().position(|nd| nd[0] > r) {
            Some(0) => 0,
            Some(i) => i - 1,
            None => self.nodes.len() - 2,
        };
        let [r0, y0] = self.nodes[i];
        let [r1, y1] = self.nodes[i + 1];
        y0 + (y1 - y0) * (r - r0) / (r1 - r0)
    }
}

fn default_flat_b() -> f64 {
    1.0
}

/// Parameters of the unbounded construction: bubbles u_k at (r_k, 0, …, 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionAParams {
    pub n: usize,
    pub k_max: usize,
    #[serde(default = "ConstructionAParams::default_eps")]
    pub eps_rule: SeqRule,
    #[serde(default = "ConstructionAParams::default_r")]
    pub r_rule: SeqRule,
    #[serde(default = "ConstructionAParams::default_m")]
    pub m_rule: SeqRule,
    #[serde(default = "default_flat_b")]
    pub flat_b: f64,
    /// Whether u_o is part of the sum (it is the k = 0 term of the series).
    #[serde(default = "default_true")]
    pub include_baseline: bool,
}

fn default_true() -> bool {
    true
}

/// (ε_k, r_k, M_k, tail coefficient) of construction A.
pub type Sequences = (Vec<f64>, Vec<f64>, Vec<f64>, f64);

impl ConstructionAParams {
    pub fn default_eps() -> SeqRule {
        SeqRule::Geometric { scale: 1.0, ratio: 0.5 }
    }

    pub fn default_r() -> SeqRule {
        SeqRule::Geometric {
            scale: 1.0,
            ratio: std::f64::consts::E,
        }
    }

    pub fn default_m() -> SeqRule {
        SeqRule::Linear { offset: 0.0, slope: 1.0 }
    }

    /// ε_k = 2^{-k}, r_k = e^k, M_k = k, b = 1.
    pub fn new(n: usize, k_max: usize) -> Self {
        ConstructionAParams {
            n,
            k_max,
            eps_rule: Self::default_eps(),
            r_rule: Self::default_r(),
            m_rule: Self::default_m(),
            flat_b: 1.0,
            include_baseline: true,
        }
    }

    /// Checks the sequence requirements and returns (ε_k, r_k, M_k, tail).
    pub fn sequences(&self) -> Result<Sequences> {
        if !(self.flat_b > 0.0 && self.flat_b.is_finite()) {
            return Err(Error::param("flat_b", "must be positive"));
        }
        let eps = self.eps_rule.terms(self.k_max)?;
        let r = self.r_rule.terms(self.k_max)?;
        let m = self.m_rule.terms(self.k_max)?;
        if eps.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
            return Err(Error::param("eps_rule", "every ε_k must lie in (0, 1)"));
        }
        if eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::param("eps_rule", "ε_k must decrease"));
        }
        let total: f64 = eps.iter().sum();
        let tail = self
            .eps_rule
            .tail_after(self.k_max)
            .unwrap_or_else(|| (1.0 - total).max(0.0));
        if total + tail > 1.0 + 1e-12 {
            return Err(Error::param(
                "eps_rule",
                format!("Σ ε_k including tail is {} > 1", total + tail),
            ));
        }
        if let Some(&r1) = r.first() {
            if r1 < 1.0 {
                return Err(Error::param("r_rule", "r_1 must be at least 1"));
            }
        }
        if r.windows(2).any(|w| w[1] - w[0] < 1.0) {
            return Err(Error::param("r_rule", "consecutive r_k must differ by at least 1"));
        }
        if m.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::param("m_rule", "M_k must be positive"));
        }
        if m.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::param("m_rule", "M_k must be nondecreasing"));
        }
        Ok((eps, r, m, tail))
    }
}

/// Parameters of the prescribed-growth construction: rings of N_k bubbles.
///
/// `weight_rule` gives the ring weights w_k = N_k ϵ_k; the per-bubble bound is ϵ_k = w_k / N_k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionBParams {
    pub n: usize,
    pub k_max: usize,
    pub phi: GrowthTable,
    #[serde(default = "default_flat_b")]
    pub flat_b: f64,
    #[serde(default = "ConstructionBParams::default_weights")]
    pub weight_rule: SeqRule,
}

impl ConstructionBParams {
    pub fn default_weights() -> SeqRule {
        SeqRule::Geometric { scale: 1.0, ratio: 0.5 }
    }

    pub fn new(n: usize, k_max: usize, phi: GrowthTable) -> Self {
        ConstructionBParams {
            n,
            k_max,
            phi,
            flat_b: 1.0,
            weight_rule: Self::default_weights(),
        }
    }
}
