//! Finite superpositions of bubble terms.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::terms::{BubbleTerm, FlatBubbleTerm, TermEval};
use crate::dimension::DimensionContext;
use crate::error::{Error, Result};
use crate::quadrature::Geometry;

/// u = ũ_b + u_o + Σ u_k, any part optional except that at least one term is present.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    pub context: DimensionContext,
    pub flat: Option<FlatBubbleTerm>,
    pub baseline: Option<BubbleTerm>,
    pub bubbles: Vec<BubbleTerm>,
    /// The dropped series tail is at most this multiple of u_o.
    pub tail_bound_coeff: f64,
}

/// Value, derivatives and induced curvature at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointEval {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub laplacian: f64,
    pub curvature: f64,
    pub curvature_gradient: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct FlatDoc {
    b: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldDoc {
    n: usize,
    flat: Option<FlatDoc>,
    baseline: bool,
    bubbles: Vec<BubbleTerm>,
    tail_bound_coeff: f64,
}

enum Term<'a> {
    Flat(&'a FlatBubbleTerm),
    Bubble(&'a BubbleTerm),
}

impl SolutionField {
    pub fn new(
        context: DimensionContext,
        flat: Option<FlatBubbleTerm>,
        baseline: bool,
        bubbles: Vec<BubbleTerm>,
        tail_bound_coeff: f64,
    ) -> Result<Self> {
        let field = SolutionField {
            context,
            flat,
            baseline: baseline.then(|| BubbleTerm::baseline(context.n)),
            bubbles,
            tail_bound_coeff,
        };
        field.validate()?;
        Ok(field)
    }

    pub fn single_bubble(context: DimensionContext, center: Vec<f64>, lambda: f64) -> Result<Self> {
        Self::new(context, None, false, vec![BubbleTerm::new(center, lambda)], 0.0)
    }

    pub fn flat_only(context: DimensionContext, b: f64) -> Result<Self> {
        Self::new(context, Some(FlatBubbleTerm::new(b)), false, Vec::new(), 0.0)
    }

    pub fn baseline_only(context: DimensionContext) -> Result<Self> {
        Self::new(context, None, true, Vec::new(), 0.0)
    }

    fn validate(&self) -> Result<()> {
        let n = self.context.n;
        if self.flat.is_none() && self.baseline.is_none() && self.bubbles.is_empty() {
            return Err(Error::param("bubbles", "field has no terms"));
        }
        if let Some(f) = &self.flat {
            if !(f.b > 0.0 && f.b.is_finite()) {
                return Err(Error::param("flat.b", format!("must be positive, got {}", f.b)));
            }
        }
        for (i, b) in self.bubbles.iter().enumerate() {
            if b.center.len() != n {
                return Err(Error::param(
                    format!("bubbles[{i}].center"),
                    format!("expected {n} coordinates, got {}", b.center.len()),
                ));
            }
            if b.center.iter().any(|c| !c.is_finite()) {
                return Err(Error::param(format!("bubbles[{i}].center"), "must be finite"));
            }
            if !(b.lambda > 0.0 && b.lambda.is_finite()) {
                return Err(Error::param(
                    format!("bubbles[{i}].lambda"),
                    format!("must be positive, got {}", b.lambda),
                ));
            }
        }
        if !(self.tail_bound_coeff >= 0.0 && self.tail_bound_coeff.is_finite()) {
            return Err(Error::param("tail_bound_coeff", "must be finite and nonnegative"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.context.n
    }

    /// Number of terms, flat and baseline included.
    pub fn term_count(&self) -> usize {
        self.flat.is_some() as usize + self.baseline.is_some() as usize + self.bubbles.len()
    }

    fn terms(&self) -> impl Iterator<Item = Term<'_>> {
        self.flat
            .iter()
            .map(Term::Flat)
            .chain(self.baseline.iter().map(Term::Bubble))
            .chain(self.bubbles.iter().map(Term::Bubble))
    }

    fn term_eval(&self, t: &Term<'_>, x: &[f64]) -> TermEval {
        match t {
            Term::Flat(f) => f.eval(&self.context, x),
            Term::Bubble(b) => b.eval(&self.context, x),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.terms()
            .map(|t| match t {
                Term::Flat(f) => f.value(&self.context, x),
                Term::Bubble(b) => b.value(&self.context, x),
            })
            .sum()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        for t in self.terms() {
            for (a, b) in g.iter_mut().zip(self.term_eval(&t, x).gradient) {
                *a += b;
            }
        }
        g
    }

    /// (u, ∇u) in one pass.
    pub fn value_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let mut u = 0.0;
        let mut g = vec![0.0; x.len()];
        for t in self.terms() {
            let e = self.term_eval(&t, x);
            u += e.value;
            for (a, b) in g.iter_mut().zip(e.gradient) {
                *a += b;
            }
        }
        (u, g)
    }

    pub fn laplacian(&self, x: &[f64]) -> f64 {
        self.terms().map(|t| self.term_eval(&t, x).laplacian).sum()
    }

    /// Full evaluation. The curvature is computed as Σ K_i (u_i/u)^p, which equals
    /// -Δu/u^p term by term and stays accurate when one term dominates.
    pub fn eval(&self, x: &[f64]) -> PointEval {
        self.eval_parts(x, None)
    }

    /// [`Self::eval`] at the node `x + lo`, where `lo` is a low-order correction
    /// far below the rounding of `x`. Bubble displacements `(x - c) + lo` stay
    /// exact next to centers with |c| much larger than λ.
    pub fn eval_split(&self, x: &[f64], lo: &[f64]) -> PointEval {
        self.eval_parts(x, Some(lo))
    }

    fn eval_parts(&self, x: &[f64], lo: Option<&[f64]>) -> PointEval {
        let n = x.len();
        let p = self.context.p;
        let parts: Vec<TermEval> = self
            .terms()
            .map(|t| match (t, lo) {
                (Term::Bubble(b), Some(lo)) => {
                    let diff: Vec<f64> = x.iter().zip(&b.center).zip(lo).map(|((a, c), l)| (a - c) + l).collect();
                    b.eval_displacement(&self.context, &diff)
                }
                (t, _) => self.term_eval(&t, x),
            })
            .collect();
        let value: f64 = parts.iter().map(|e| e.value).sum();
        let laplacian: f64 = parts.iter().map(|e| e.laplacian).sum();
        let mut gradient = vec![0.0; n];
        for e in &parts {
            for (a, b) in gradient.iter_mut().zip(&e.gradient) {
                *a += b;
            }
        }
        let weights: Vec<f64> = parts.iter().map(|e| e.value / value).collect();
        let curvature: f64 = parts
            .iter()
            .zip(&weights)
            .map(|(e, w)| e.curvature * w.powf(p))
            .sum();

        // ∇K = Σ ∇K_i w_i^p + p Σ_{i≠d} (K_i w_i^{p-1} - K_d w_d^{p-1}) ∇w_i,
        // using Σ ∇w_i = 0 with d the dominant term.
        let mut curvature_gradient = vec![0.0; n];
        for (e, w) in parts.iter().zip(&weights) {
            if let Some(gk) = &e.curvature_gradient {
                let wp = w.powf(p);
                for (a, b) in curvature_gradient.iter_mut().zip(gk) {
                    *a += b * wp;
                }
            }
        }
        let d = weights
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let kd = parts[d].curvature * weights[d].powf(p - 1.0);
        for (i, (e, w)) in parts.iter().zip(&weights).enumerate() {
            if i == d {
                continue;
            }
            let coeff = p * (e.curvature * w.powf(p - 1.0) - kd) / value;
            for k in 0..n {
                curvature_gradient[k] += coeff * (e.gradient[k] - w * gradient[k]);
            }
        }

        PointEval {
            value,
            gradient,
            laplacian,
            curvature,
            curvature_gradient,
        }
    }

    /// K(x) = -Δu/u^p; errors if the result is not finite and positive.
    pub fn induced_curvature(&self, x: &[f64]) -> Result<f64> {
        let k = self.curvature(x);
        if k.is_finite() && k > 0.0 {
            Ok(k)
        } else {
            Err(Error::NonPositiveCurvature {
                value: k,
                point: x.to_vec(),
            })
        }
    }

    /// Induced curvature without the positivity check.
    pub fn curvature(&self, x: &[f64]) -> f64 {
        let p = self.context.p;
        let parts: Vec<(f64, f64)> = self
            .terms()
            .map(|t| match t {
                Term::Flat(f) => (f.value(&self.context, x), f.curvature(&self.context, x)),
                Term::Bubble(b) => (b.value(&self.context, x), 1.0),
            })
            .collect();
        let u: f64 = parts.iter().map(|(v, _)| v).sum();
        parts.iter().map(|(v, k)| k * (v / u).powf(p)).sum()
    }

    /// Conformal factor u^{4/(n-2)} of the metric g = u^{4/(n-2)} g_o.
    pub fn metric_factor(&self, x: &[f64]) -> f64 {
        self.value(x).powf(self.context.metric_exponent())
    }

    /// Values at many points, in input order.
    pub fn values(&self, points: &[Vec<f64>]) -> Vec<f64> {
        points.par_iter().map(|x| self.value(x)).collect()
    }

    /// Curvatures at many points, in input order.
    pub fn curvatures(&self, points: &[Vec<f64>]) -> Vec<f64> {
        points.par_iter().map(|x| self.curvature(x)).collect()
    }

    /// Peak layout used by the quadrature routines.
    pub fn geometry(&self) -> Geometry {
        let origin = vec![0.0; self.dim()];
        let mut centers: Vec<(&[f64], f64)> = Vec::new();
        if let Some(f) = &self.flat {
            centers.push((&origin, f.b));
        }
        for b in self.baseline.iter().chain(&self.bubbles) {
            centers.push((&b.center, b.lambda));
        }
        Geometry::from_centers(self.dim(), centers)
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = FieldDoc {
            n: self.context.n,
            flat: self.flat.map(|f| FlatDoc { b: f.b }),
            baseline: self.baseline.is_some(),
            bubbles: self.bubbles.clone(),
            tail_bound_coeff: self.tail_bound_coeff,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FieldDoc = serde_json::from_str(text)?;
        let context = DimensionContext::new(doc.n)?;
        Self::new(
            context,
            doc.flat.map(|f| FlatBubbleTerm::new(f.b)),
            doc.baseline,
            doc.bubbles,
            doc.tail_bound_coeff,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimension::make_context;
    use approx::assert_relative_eq;

    fn three_bubbles(n: usize) -> SolutionField {
        let c = make_context(n).unwrap();
        let mut c1 = vec![0.0; n];
        c1[0] = 1.0;
        let mut c2 = vec![0.0; n];
        c2[1] = -0.7;
        c2[0] = 0.3;
        let c3 = vec![0.4; n];
        SolutionField::new(
            c,
            Some(FlatBubbleTerm::new(1.0)),
            true,
            vec![
                BubbleTerm::new(c1, 0.2),
                BubbleTerm::new(c2, 0.05),
                BubbleTerm::new(c3, 0.5),
            ],
            0.125,
        )
        .unwrap()
    }

    #[test]
    fn single_term_fields() {
        let c = make_context(3).unwrap();
        let f = SolutionField::flat_only(c, 1.0).unwrap();
        let t = FlatBubbleTerm::new(1.0);
        let x = [0.3, -1.2, 2.0];
        assert_eq!(f.value(&x), t.value(&c, &x));
        let o = SolutionField::baseline_only(c).unwrap();
        assert_relative_eq!(o.value(&[0.0; 3]), c.alpha_n, max_relative = 1e-15);
    }

    #[test]
    fn laplacian_matches_finite_differences() {
        for n in [3, 4, 6] {
            let f = three_bubbles(n);
            let h = 1e-4;
            for k in 0..25 {
                let x: Vec<f64> = (0..n).map(|i| ((k * 3 + i * 5) % 13) as f64 * 0.21 - 1.2).collect();
                let u0 = f.value(&x);
                let mut fd = 0.0;
                for i in 0..n {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[i] += h;
                    xm[i] -= h;
                    fd += (f.value(&xp) - 2.0 * u0 + f.value(&xm)) / (h * h);
                }
                let lap = f.laplacian(&x);
                if u0 > 0.01 {
                    assert!((lap - fd).abs() <= 1e-6 * lap.abs().max(1.0), "n={n} x={x:?} {lap} {fd}");
                }
            }
        }
    }

    #[test]
    fn curvature_equals_quotient_and_gradient_matches_fd() {
        for n in [3, 4, 5] {
            let f = three_bubbles(n);
            for k in 0..25 {
                let x: Vec<f64> = (0..n).map(|i| ((k * 7 + i * 2) % 11) as f64 * 0.3 - 1.4).collect();
                let e = f.eval(&x);
                let quot = -e.laplacian / e.value.powf(f.context.p);
                assert_relative_eq!(e.curvature, quot, max_relative = 1e-12);
                assert_relative_eq!(e.curvature, f.curvature(&x), max_relative = 1e-14);
                let h = 1e-5;
                for i in 0..n {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[i] += h;
                    xm[i] -= h;
                    let fd = (f.curvature(&xp) - f.curvature(&xm)) / (2.0 * h);
                    assert!(
                        (fd - e.curvature_gradient[i]).abs() <= 1e-6 * (1.0 + fd.abs()),
                        "n={n} i={i} {fd} {}",
                        e.curvature_gradient[i]
                    );
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let f = three_bubbles(4);
        let text = f.to_json().unwrap();
        let keys: Vec<usize> = ["\"n\"", "\"flat\"", "\"baseline\"", "\"bubbles\"", "\"tail_bound_coeff\""]
            .iter()
            .map(|k| text.find(k).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        let g = SolutionField::from_json(&text).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn rejects_bad_fields() {
        let c = make_context(3).unwrap();
        assert!(SolutionField::single_bubble(c, vec![0.0; 3], 0.0).is_err());
        assert!(SolutionField::single_bubble(c, vec![0.0; 2], 1.0).is_err());
        assert!(SolutionField::new(c, None, false, vec![], 0.0).is_err());
        assert!(SolutionField::from_json(r#"{"n":2,"flat":null,"baseline":true,"bubbles":[],"tail_bound_coeff":0}"#).is_err());
    }

    #[test]
    fn tiny_bubble_curvature_stays_exact() {
        let c = make_context(3).unwrap();
        let f = SolutionField::new(
            c,
            Some(FlatBubbleTerm::new(1.0)),
            true,
            vec![BubbleTerm::new(vec![20.0, 0.0, 0.0], 1e-11)],
            0.0,
        )
        .unwrap();
        let e = f.eval(&[20.0, 1e-11, 0.0]);
        assert!(e.curvature.is_finite() && e.curvature > 0.0);
        assert!((e.curvature - 1.0).abs() < 1e-4);
        assert!(e.curvature_gradient.iter().all(|g| g.is_finite()));
    }
}
