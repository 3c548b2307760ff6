use serde::{Deserialize, Serialize};

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    /// Estimated absolute error (sum of the last level differences).
    pub error: f64,
    /// Integral of |f| at the final level; the scale against which cancellation is judged.
    pub abs_value: f64,
    pub converged: bool,
}

impl Integral {
    pub fn zero() -> Self {
        Integral {
            value: 0.0,
            error: 0.0,
            abs_value: 0.0,
            converged: true,
        }
    }

    pub fn scaled(self, c: f64) -> Self {
        Integral {
            value: c * self.value,
            error: c.abs() * self.error,
            abs_value: c.abs() * self.abs_value,
            converged: self.converged,
        }
    }
}

impl std::ops::Add for Integral {
    type Output = Integral;
    fn add(self, o: Integral) -> Integral {
        Integral {
            value: self.value + o.value,
            error: self.error + o.error,
            abs_value: self.abs_value + o.abs_value,
            converged: self.converged && o.converged,
        }
    }
}

impl std::iter::Sum for Integral {
    fn sum<I: Iterator<Item = Integral>>(iter: I) -> Integral {
        iter.fold(Integral::zero(), |a, b| a + b)
    }
}

/// Tolerances and refinement limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSettings {
    pub rtol: f64,
    pub atol: f64,
    /// Gauss nodes per radial panel at level 0 (doubled per level).
    pub radial_order: usize,
    pub max_radial_level: usize,
    /// Polar order of the sphere rule at level 0 (doubled per level).
    pub sphere_order: usize,
    pub max_sphere_level: usize,
    /// Integrand budget of each adaptive cubature over spherical coordinates.
    #[serde(default = "default_max_evals")]
    pub max_evals: usize,
}

fn default_max_evals() -> usize {
    4_000_000
}

impl QuadSettings {
    /// Defaults sized so that the finest sphere rule stays around 10⁴ nodes.
    pub fn for_dim(dim: usize) -> Self {
        let sphere_order = match dim {
            0..=3 => 8,
            4 => 6,
            _ => 4,
        };
        let mut max_sphere_level = 0;
        while max_sphere_level < 4 {
            let k = sphere_order << (max_sphere_level + 1);
            let nodes = (k as f64).powi(dim as i32 - 2) * 2.0 * k as f64;
            if nodes > 1.2e4 {
                break;
            }
            max_sphere_level += 1;
        }
        QuadSettings {
            rtol: 1e-8,
            atol: 1e-300,
            radial_order: 8,
            max_radial_level: 3,
            sphere_order,
            max_sphere_level,
            max_evals: default_max_evals(),
        }
    }

    pub fn with_rtol(mut self, rtol: f64) -> Self {
        self.rtol = rtol;
        self
    }

    pub(crate) fn radial_nodes(&self, level: usize) -> usize {
        self.radial_order << level
    }

    pub(crate) fn sphere_nodes(&self, level: usize) -> usize {
        self.sphere_order << level
    }
}

/// Two-axis level refinement. `eval(lr, la)` returns (Σ w f, Σ w |f|).
pub(crate) fn adapt2(
    settings: &QuadSettings,
    max_r: usize,
    max_a: usize,
    mut eval: impl FnMut(usize, usize) -> (f64, f64),
) -> Integral {
    let (mut lr, mut la) = (0usize, 0usize);
    let mut cur = eval(lr, la);
    let mut err_r = f64::INFINITY;
    let mut err_a = f64::INFINITY;
    loop {
        let up_r = (lr < max_r).then(|| eval(lr + 1, la));
        let up_a = (la < max_a).then(|| eval(lr, la + 1));
        if let Some(v) = up_r {
            err_r = (v.0 - cur.0).abs();
        }
        if let Some(v) = up_a {
            err_a = (v.0 - cur.0).abs();
        }
        if max_r == 0 {
            err_r = 0.0;
        }
        if max_a == 0 {
            err_a = 0.0;
        }
        let abs_scale = cur.1.max(up_r.map_or(0.0, |v| v.1)).max(up_a.map_or(0.0, |v| v.1));
        let tol = (settings.rtol * cur.0.abs())
            .max(1e-14 * abs_scale)
            .max(settings.atol);
        let ok_r = err_r <= 0.5 * tol;
        let ok_a = err_a <= 0.5 * tol;
        if ok_r && ok_a {
            let mut value = cur.0;
            if let Some(v) = up_r {
                value += v.0 - cur.0;
            }
            if let Some(v) = up_a {
                value += v.0 - cur.0;
            }
            return Integral {
                value,
                error: err_r + err_a,
                abs_value: abs_scale,
                converged: true,
            };
        }
        let mut moved = false;
        if !ok_r && lr < max_r {
            lr += 1;
            moved = true;
        }
        if !ok_a && la < max_a {
            la += 1;
            moved = true;
        }
        if !moved {
            let best = match (up_r, up_a) {
                (Some(r), _) if err_r <= err_a => r.0,
                (_, Some(a)) => a.0,
                (Some(r), None) => r.0,
                (None, None) => cur.0,
            };
            return Integral {
                value: best,
                error: err_r + err_a,
                abs_value: abs_scale,
                converged: false,
            };
        }
        cur = eval(lr, la);
    }
}

/// One-axis level refinement.
pub(crate) fn adapt1(
    settings: &QuadSettings,
    max_level: usize,
    mut eval: impl FnMut(usize) -> (f64, f64),
) -> Integral {
    adapt2(settings, max_level, 0, |l, _| eval(l))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_level_budget() {
        assert_eq!(QuadSettings::for_dim(3).max_sphere_level, 3);
        for d in 3..9 {
            let s = QuadSettings::for_dim(d);
            let k = s.sphere_nodes(s.max_sphere_level) as f64;
            assert!(k.powi(d as i32 - 2) * 2.0 * k <= 1.2e4 || s.max_sphere_level == 0);
        }
    }

    #[test]
    fn adapt_converges_on_geometric_sequence() {
        let s = QuadSettings::for_dim(3);
        // value(l) = 1 + 10^{-3(l+1)}
        let res = adapt1(&s, 3, |l| (1.0 + 10f64.powi(-3 * (l as i32 + 1)), 1.0));
        assert!(res.converged);
        assert!((res.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn adapt_reports_unconverged() {
        let s = QuadSettings::for_dim(3);
        let res = adapt1(&s, 2, |l| (l as f64, 1.0));
        assert!(!res.converged);
    }
}
