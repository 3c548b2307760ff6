//! One-dimensional Gauss rules.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::special::ln_gamma;

/// Nodes and weights of a Gauss rule on a reference interval.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Gauss–Legendre rule with `k` nodes on [-1, 1].
    pub fn legendre(k: usize) -> Self {
        assert!(k >= 1, "Gauss–Legendre rule needs at least one node");
        let mut nodes = vec![0.0; k];
        let mut weights = vec![0.0; k];
        let kf = k as f64;
        for i in 0..k.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_k.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (kf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(k, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(k, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[k - 1 - i] = x;
            weights[i] = w;
            weights[k - 1 - i] = w;
        }
        if k % 2 == 1 {
            nodes[k / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    /// Gauss rule for the weight (1 - t²)^a on [-1, 1], a > -1, built by Golub–Welsch.
    pub fn gegenbauer(k: usize, a: f64) -> Self {
        assert!(k >= 1 && a > -1.0);
        if a == 0.0 {
            return Self::legendre(k);
        }
        // Monic recurrence: p_{j+1} = t p_j - beta_j p_{j-1},
        // beta_j = j (j + 2a) / (4 (j + a)(j + a) - 1) for the symmetric Jacobi weight.
        let mut jacobi = DMatrix::<f64>::zeros(k, k);
        for j in 1..k {
            let jf = j as f64;
            let beta = jf * (jf + 2.0 * a) / (4.0 * (jf + a) * (jf + a) - 1.0);
            let off = beta.sqrt();
            jacobi[(j, j - 1)] = off;
            jacobi[(j - 1, j)] = off;
        }
        let eig = SymmetricEigen::new(jacobi);
        // mu0 = ∫ (1 - t²)^a dt = B(1/2, a + 1)
        let mu0 = (ln_gamma(0.5) + ln_gamma(a + 1.0) - ln_gamma(a + 1.5)).exp();
        let mut pairs: Vec<(f64, f64)> = (0..k)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (eig.eigenvalues[i], mu0 * v0 * v0)
            })
            .collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        // Symmetrize to remove eigen-solver asymmetry.
        for i in 0..k / 2 {
            let j = k - 1 - i;
            let t = 0.5 * (pairs[j].0 - pairs[i].0);
            let w = 0.5 * (pairs[i].1 + pairs[j].1);
            pairs[i] = (-t, w);
            pairs[j] = (t, w);
        }
        if k % 2 == 1 {
            pairs[k / 2].0 = 0.0;
        }
        GaussRule {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped affinely onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&t, &w)| (mid + half * t, half * w))
    }

    /// ∫_a^b f by this rule (Legendre weight assumed).
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(k: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=k {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    if k == 0 {
        return (1.0, 0.0);
    }
    let d = k as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre integration of a scalar function over consecutive panels.
pub fn composite(rule: &GaussRule, breaks: &[f64], mut f: impl FnMut(f64) -> f64) -> f64 {
    breaks
        .windows(2)
        .map(|w| rule.integrate(w[0], w[1], &mut f))
        .sum()
}
