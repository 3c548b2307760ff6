//! Point sets for empirical curvature bounds.

use rayon::prelude::*;
use serde::Serialize;

use super::field::SolutionField;
use crate::error::{Error, Result};

/// A uniform grid on a ball, rays through the origin and every bubble center,
/// far-field rays along the axes, and dense shells around each center.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingPlan {
    pub ball_radius: f64,
    /// Grid points per axis before clipping to the ball (forced odd).
    pub grid_resolution: usize,
    /// Upper bound on the number of grid points.
    pub grid_budget: usize,
    pub ray_points: usize,
    /// Far rays run geometrically from 1 out to this radius.
    pub far_radius: f64,
    pub far_points: usize,
    /// Shell radii per bubble, geometric from λ/10 to `shell_radius`.
    pub shell_radii: usize,
    pub shell_radius: f64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan {
            ball_radius: 2.0,
            grid_resolution: 41,
            grid_budget: 200_000,
            ray_points: 200,
            far_radius: 1e6,
            far_points: 120,
            shell_radii: 40,
            shell_radius: 0.25,
        }
    }
}

impl SamplingPlan {
    /// Plan whose grid ball contains every bubble center.
    pub fn covering(field: &SolutionField) -> Self {
        let reach = field
            .bubbles
            .iter()
            .map(|b| b.center.iter().map(|c| c * c).sum::<f64>().sqrt())
            .fold(1.0f64, f64::max);
        SamplingPlan {
            ball_radius: 1.25 * reach + 1.0,
            ..SamplingPlan::default()
        }
    }

    pub fn points(&self, field: &SolutionField) -> Vec<Vec<f64>> {
        let n = field.dim();
        let mut pts = Vec::new();

        let mut res = self.grid_resolution.max(1);
        while res > 1 && (res as f64).powi(n as i32) > self.grid_budget as f64 {
            res -= 1;
        }
        if res.is_multiple_of(2) {
            res -= 1;
        }
        let h = if res > 1 { 2.0 * self.ball_radius / (res - 1) as f64 } else { 0.0 };
        let mut idx = vec![0usize; n];
        loop {
            let x: Vec<f64> = idx.iter().map(|&i| -self.ball_radius + h * i as f64).collect();
            if x.iter().map(|a| a * a).sum::<f64>() <= self.ball_radius * self.ball_radius * (1.0 + 1e-12) {
                pts.push(x);
            }
            let mut k = 0;
            while k < n {
                idx[k] += 1;
                if idx[k] < res {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }

        let unit = |i: usize, s: f64| {
            let mut e = vec![0.0; n];
            e[i] = s;
            e
        };
        let far_ratio = self.far_radius.max(1.0).powf(1.0 / self.far_points.max(1) as f64);
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut r = 1.0;
                for _ in 0..=self.far_points {
                    pts.push(unit(i, s * r));
                    r *= far_ratio;
                }
            }
        }

        let dirs = shell_directions(n);
        for b in &field.bubbles {
            let norm = b.center.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm > 0.0 {
                let m = self.ray_points.max(2);
                for j in 0..m {
                    let t = 2.0 * j as f64 / (m - 1) as f64;
                    pts.push(b.center.iter().map(|c| c * t).collect());
                }
            }
            let r0 = (b.lambda / 10.0).min(self.shell_radius);
            let ratio = (self.shell_radius / r0).powf(1.0 / self.shell_radii.max(1) as f64);
            let mut r = r0;
            pts.push(b.center.clone());
            for _ in 0..=self.shell_radii {
                for d in &dirs {
                    pts.push(b.center.iter().zip(d).map(|(c, e)| c + r * e).collect());
                }
                r *= ratio;
            }
        }
        pts
    }
}

/// ±e_i plus the normalized diagonals (1, ±1, 0, …).
fn shell_directions(n: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[i] = s;
            dirs.push(e);
        }
    }
    let h = 0.5f64.sqrt();
    for i in 1..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[0] = h;
            e[i] = s * h;
            dirs.push(e);
        }
    }
    dirs
}

/// Empirical bracket a² ≤ K ≤ b² over a sampling plan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureBounds {
    pub min: f64,
    pub max: f64,
    pub argmin: Vec<f64>,
    pub argmax: Vec<f64>,
    /// c₁ = 3^{p-1}.
    pub c1: f64,
    /// Empirical max of u^p/(-Δu), i.e. 1/min K.
    pub c2_empirical: f64,
    pub samples: usize,
}

pub fn curvature_bounds(field: &SolutionField, plan: &SamplingPlan) -> Result<CurvatureBounds> {
    let pts = plan.points(field);
    let ks: Vec<f64> = pts.par_iter().map(|x| field.curvature(x)).collect();
    let mut imin = 0;
    let mut imax = 0;
    for (i, &k) in ks.iter().enumerate() {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::NonPositiveCurvature {
                value: k,
                point: pts[i].clone(),
            });
        }
        if k < ks[imin] {
            imin = i;
        }
        if k > ks[imax] {
            imax = i;
        }
    }
    Ok(CurvatureBounds {
        min: ks[imin],
        max: ks[imax],
        argmin: pts[imin].clone(),
        argmax: pts[imax].clone(),
        c1: 3f64.powf(field.context.p - 1.0),
        c2_empirical: 1.0 / ks[imin],
        samples: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimension::make_context;

    #[test]
    fn flat_bracket() {
        let c = make_context(3).unwrap();
        let f = SolutionField::flat_only(c, 1.0).unwrap();
        let b = curvature_bounds(&f, &SamplingPlan::default()).unwrap();
        assert!((b.min - 0.25).abs() < 1e-9);
        assert!((b.max - 1.5).abs() < 1e-12);
        assert!(b.argmax.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn single_bubble_is_flat_in_k() {
        for n in [3, 4, 6] {
            let c = make_context(n).unwrap();
            let mut ctr = vec![0.0; n];
            ctr[0] = 3.0;
            let f = SolutionField::single_bubble(c, ctr, 0.01).unwrap();
            let b = curvature_bounds(&f, &SamplingPlan::covering(&f)).unwrap();
            assert!((b.min - 1.0).abs() < 1e-12 && (b.max - 1.0).abs() < 1e-12);
        }
    }
}
