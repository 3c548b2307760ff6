//! Product quadrature on the unit sphere S^{d-1} ⊂ R^d.
//!
//! The rule is assembled recursively: Gauss–Gegenbauer in the cosine of each
//! polar angle (weight (1 - t²)^{(k-3)/2} on S^{k-1}) and the trapezoid rule in
//! the final azimuth.

use std::f64::consts::PI;

use super::gauss::GaussRule;

#[derive(Debug, Clone)]
pub struct SphereRule {
    dim: usize,
    /// Flattened unit vectors, `dim` entries per node.
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl SphereRule {
    /// Rule on S^{dim-1} with `polar` Gauss nodes per polar angle and `2 * polar`
    /// azimuthal nodes.
    pub fn new(dim: usize, polar: usize) -> Self {
        Self::with_orders(dim, polar, 2 * polar)
    }

    pub fn with_orders(dim: usize, polar: usize, azimuth: usize) -> Self {
        assert!(dim >= 2, "sphere rules need dim >= 2");
        assert!(polar >= 1 && azimuth >= 1);
        let (nodes, weights) = build(dim, polar, azimuth);
        SphereRule {
            dim,
            nodes,
            weights,
        }
    }

    /// Same rule expressed in an orthonormal frame whose first vector is `axis`.
    pub fn oriented(&self, axis: &[f64]) -> Self {
        let frame = orthonormal_frame(axis);
        let d = self.dim;
        let mut nodes = vec![0.0; self.nodes.len()];
        for (src, dst) in self.nodes.chunks(d).zip(nodes.chunks_mut(d)) {
            for (c, e) in src.iter().zip(&frame) {
                for (o, ei) in dst.iter_mut().zip(e) {
                    *o += c * ei;
                }
            }
        }
        SphereRule {
            dim: d,
            nodes,
            weights: self.weights.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.nodes.chunks(self.dim).zip(self.weights.iter().copied())
    }

    /// ∫_{S^{d-1}} f(θ) dθ.
    pub fn integrate_unit(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        self.iter().map(|(th, w)| w * f(th)).sum()
    }

    /// ∫_{S^{d-1}} f(r θ) dθ (unit-sphere measure).
    pub fn integrate(&self, r: f64, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        let mut x = vec![0.0; self.dim];
        self.iter()
            .map(|(th, w)| {
                for (xi, ti) in x.iter_mut().zip(th) {
                    *xi = r * ti;
                }
                w * f(&x)
            })
            .sum()
    }
}

fn build(dim: usize, polar: usize, azimuth: usize) -> (Vec<f64>, Vec<f64>) {
    if dim == 2 {
        let h = 2.0 * PI / azimuth as f64;
        let mut nodes = Vec::with_capacity(2 * azimuth);
        for j in 0..azimuth {
            let phi = h * j as f64;
            nodes.push(phi.cos());
            nodes.push(phi.sin());
        }
        return (nodes, vec![h; azimuth]);
    }
    let (sub_nodes, sub_weights) = build(dim - 1, polar, azimuth);
    let gauss = GaussRule::gegenbauer(polar, (dim as f64 - 3.0) / 2.0);
    let sub_len = sub_weights.len();
    let mut nodes = Vec::with_capacity(dim * polar * sub_len);
    let mut weights = Vec::with_capacity(polar * sub_len);
    for (&t, &wt) in gauss.nodes.iter().zip(&gauss.weights) {
        let s = (1.0 - t * t).max(0.0).sqrt();
        for (sub, &ws) in sub_nodes.chunks(dim - 1).zip(&sub_weights) {
            nodes.push(t);
            nodes.extend(sub.iter().map(|c| s * c));
            weights.push(wt * ws);
        }
    }
    (nodes, weights)
}

/// Orthonormal basis of R^d whose first element is `axis / |axis|`.
pub fn orthonormal_frame(axis: &[f64]) -> Vec<Vec<f64>> {
    let d = axis.len();
    let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
    assert!(norm > 0.0, "frame axis must be nonzero");
    let mut frame: Vec<Vec<f64>> = vec![axis.iter().map(|a| a / norm).collect()];
    // Gram–Schmidt over the standard basis, skipping near-dependent vectors.
    let mut candidates: Vec<usize> = (0..d).collect();
    candidates.sort_by(|&i, &j| frame[0][i].abs().total_cmp(&frame[0][j].abs()));
    for &i in &candidates {
        if frame.len() == d {
            break;
        }
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        for _ in 0..2 {
            for e in &frame {
                let dot: f64 = v.iter().zip(e).map(|(a, b)| a * b).sum();
                for (vk, ek) in v.iter_mut().zip(e) {
                    *vk -= dot * ek;
                }
            }
        }
        let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if nv > 1e-8 {
            frame.push(v.into_iter().map(|a| a / nv).collect());
        }
    }
    frame
}
