//! The cylinder picture v(s, θ) = e^{s(n-2)/2} u(e^s θ) and the energy w(s).

use serde::Serialize;

use super::pohozaev::pohozaev_volume;
use crate::fields::SolutionField;
use crate::quadrature::{orthonormal_frame, sphere_integrate, QuadSettings};

/// v and its first derivatives at one point of ℝ × S^{n-1}.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderEval {
    pub v: f64,
    pub v_s: f64,
    /// Tangential gradient ∇_θ v, a vector orthogonal to θ.
    pub grad_theta: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct CylinderField<'a> {
    pub source: &'a SolutionField,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl<'a> CylinderField<'a> {
    pub fn new(source: &'a SolutionField) -> Self {
        CylinderField { source }
    }

    fn m(&self) -> f64 {
        self.source.context.half_nm2()
    }

    pub fn v(&self, s: f64, theta: &[f64]) -> f64 {
        let r = s.exp();
        let x: Vec<f64> = theta.iter().map(|t| r * t).collect();
        (self.m() * s).exp() * self.source.value(&x)
    }

    /// v_s = e^{sn/2} (u_r + (n-2)u/(2r)) and ∇_θ v = e^{s(n-2)/2} r (∇u - u_r θ).
    pub fn eval(&self, s: f64, theta: &[f64]) -> CylinderEval {
        let r = s.exp();
        let x: Vec<f64> = theta.iter().map(|t| r * t).collect();
        let (u, g) = self.source.value_gradient(&x);
        let scale = (self.m() * s).exp();
        let ur = dot(theta, &g);
        CylinderEval {
            v: scale * u,
            v_s: scale * (r * ur + self.m() * u),
            grad_theta: g.iter().zip(theta).map(|(gi, ti)| scale * r * (gi - ur * ti)).collect(),
        }
    }

    /// Inverse transform u(x) = |x|^{(2-n)/2} v(ln|x|, x/|x|).
    pub fn u_from_v(&self, x: &[f64]) -> f64 {
        let r = dot(x, x).sqrt();
        let theta: Vec<f64> = x.iter().map(|a| a / r).collect();
        r.powf(-self.m()) * self.v(r.ln(), &theta)
    }

    /// Terms of v_ss + Δ_θ v - ((n-2)²/4) v + K v^p at one point. Second derivatives are
    /// central differences of the closed-form first derivatives, along s and along n-1 great circles.
    pub fn residual_parts(&self, s: f64, theta: &[f64], h: f64) -> ResidualParts {
        let v_ss = (self.eval(s + h, theta).v_s - self.eval(s - h, theta).v_s) / (2.0 * h);
        let frame = orthonormal_frame(theta);
        let mut lap = 0.0;
        for e in frame.iter().skip(1) {
            // d/dt v(s, cos t θ + sin t e) = ∇_θ v · (-sin t θ + cos t e)
            let deriv = |t: f64| {
                let (st, ct) = t.sin_cos();
                let p: Vec<f64> = theta.iter().zip(e).map(|(a, b)| ct * a + st * b).collect();
                let tangent: Vec<f64> = theta.iter().zip(e).map(|(a, b)| -st * a + ct * b).collect();
                dot(&self.eval(s, &p).grad_theta, &tangent)
            };
            lap += (deriv(h) - deriv(-h)) / (2.0 * h);
        }
        let x: Vec<f64> = theta.iter().map(|t| s.exp() * t).collect();
        ResidualParts {
            n: self.source.context.n,
            v_ss,
            lap_theta: lap,
            v: self.v(s, theta),
            k: self.source.curvature(&x),
        }
    }

    pub fn residual_at(&self, s: f64, theta: &[f64], h: f64) -> f64 {
        self.residual_parts(s, theta, h).residual()
    }

    pub fn residual(&self, s: f64, thetas: &[Vec<f64>]) -> f64 {
        thetas
            .iter()
            .map(|t| self.residual_at(s, t, 1e-4))
            .fold(0.0, f64::max)
    }

    fn sphere(&self, s: f64, settings: &QuadSettings, f: impl Fn(&CylinderEval, &[f64]) -> f64 + Sync) -> (f64, f64) {
        let r = s.exp();
        let integrand = |x: &[f64]| {
            let theta: Vec<f64> = x.iter().map(|a| a / r).collect();
            f(&self.eval(s, &theta), x)
        };
        let i = sphere_integrate(&self.source.geometry(), &integrand, r, settings);
        (i.value, i.error)
    }

    /// w(s) = ½ ∫_{S^{n-1}} v² dθ.
    pub fn w_energy(&self, s: f64, settings: &QuadSettings) -> f64 {
        0.5 * self.sphere(s, settings, |e, _| e.v * e.v).0
    }

    /// The four sphere integrals ∫v_s², ∫|∇_θ v|², ∫v², ∫K v^q.
    pub fn sphere_terms(&self, s: f64, settings: &QuadSettings) -> SphereTerms {
        let q = self.source.context.q;
        let (vs2, e1) = self.sphere(s, settings, |e, _| e.v_s * e.v_s);
        let (gt2, e2) = self.sphere(s, settings, |e, _| dot(&e.grad_theta, &e.grad_theta));
        let (v2, e3) = self.sphere(s, settings, |e, _| e.v * e.v);
        let (kvq, e4) = self.sphere(s, settings, |e, x| self.source.curvature(x) * e.v.powf(q));
        SphereTerms {
            v_s_sq: vs2,
            grad_theta_sq: gt2,
            v_sq: v2,
            k_v_q: kvq,
            error: e1 + e2 + e3 + e4,
        }
    }

    /// Compares w'' (five-point differences, step h) with its expression through the
    /// sphere integrals, and 2P(u, e^s) from the ball integral with its sphere form.
    pub fn w_identity_check(&self, s: f64, h: f64, settings: &QuadSettings) -> WIdentity {
        // the stencil divides by h², so w gets a much tighter tolerance
        let w_settings = settings.with_rtol(settings.rtol.min(1e-11));
        let (w, w_err): (Vec<f64>, Vec<f64>) = [-2.0, -1.0, 0.0, 1.0, 2.0]
            .iter()
            .map(|j| {
                let (v, e) = self.sphere(s + j * h, &w_settings, |e, _| e.v * e.v);
                (0.5 * v, 0.5 * e)
            })
            .unzip();
        let w_error = w_err.iter().copied().fold(0.0, f64::max);
        let w2 = (-w[0] + 16.0 * w[1] - 30.0 * w[2] + 16.0 * w[3] - w[4]) / (12.0 * h * h);
        let t = self.sphere_terms(s, settings);
        let n = self.source.context.dim();
        let m2 = self.m() * self.m();
        let w2_rhs = t.v_s_sq + t.grad_theta_sq + m2 * t.v_sq - t.k_v_q;
        let two_p_sphere = t.v_s_sq - t.grad_theta_sq - m2 * t.v_sq + (n - 2.0) / n * t.k_v_q;
        let pv = pohozaev_volume(self.source, s.exp(), settings);
        WIdentity {
            s,
            w: w[2],
            w2_fd: w2,
            w2_rhs,
            second_derivative_gap: (w2 - w2_rhs).abs(),
            // stencil weights sum to 64/12 in absolute value
            fd_error: 64.0 / 12.0 * w_error / (h * h),
            two_p_sphere,
            two_p_volume: 2.0 * pv.value,
            pohozaev_gap: (two_p_sphere - 2.0 * pv.value).abs(),
            quadrature_error: t.error + 2.0 * pv.error,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualParts {
    pub n: usize,
    pub v_ss: f64,
    pub lap_theta: f64,
    pub v: f64,
    pub k: f64,
}

impl ResidualParts {
    pub fn residual(&self) -> f64 {
        let n = self.n as f64;
        let m = (n - 2.0) / 2.0;
        let p = (n + 2.0) / (n - 2.0);
        (self.v_ss + self.lap_theta - m * m * self.v + self.k * self.v.powf(p)).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereTerms {
    pub v_s_sq: f64,
    pub grad_theta_sq: f64,
    pub v_sq: f64,
    pub k_v_q: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WIdentity {
    pub s: f64,
    pub w: f64,
    pub w2_fd: f64,
    pub w2_rhs: f64,
    pub second_derivative_gap: f64,
    /// Bound on the part of w''_fd caused by quadrature error in w.
    pub fd_error: f64,
    pub two_p_sphere: f64,
    pub two_p_volume: f64,
    pub pohozaev_gap: f64,
    pub quadrature_error: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimension::make_context;
    use crate::quadrature::SphereRule;

    fn thetas(n: usize) -> Vec<Vec<f64>> {
        SphereRule::new(n, 4).iter().map(|(x, _)| x.to_vec()).collect()
    }

    #[test]
    fn baseline_closed_form() {
        for n in [3, 4, 5] {
            let c = make_context(n).unwrap();
            let f = SolutionField::baseline_only(c).unwrap();
            let cyl = CylinderField::new(&f);
            let th = thetas(n);
            for s in [-1.0, 0.0, 1.0, 2.0] {
                // v(s) = α_n (2 cosh s)^{-(n-2)/2}
                let want = c.alpha_n * (2.0 * f64::cosh(s)).powf(-c.half_nm2());
                let e = cyl.eval(s, &th[3]);
                assert!((e.v - want).abs() < 1e-14 * want);
                assert!((e.v_s + c.half_nm2() * f64::tanh(s) * want).abs() < 1e-13 * want);
                assert!(e.grad_theta.iter().all(|g| g.abs() < 1e-14));
                assert!(cyl.residual(s, &th) < 1e-6);
            }
        }
    }

    #[test]
    fn off_origin_bubble_residual_and_round_trip() {
        let c = make_context(3).unwrap();
        let f = SolutionField::single_bubble(c, vec![0.3, -0.2, 0.5], 0.7).unwrap();
        let cyl = CylinderField::new(&f);
        for s in [0.0, 1.0, 2.0] {
            assert!(cyl.residual(s, &thetas(3)) < 1e-6);
        }
        for x in [[0.1, 2.0, -0.3], [5.0, 1.0, 1.0], [-0.01, 0.02, 0.0]] {
            let u = f.value(&x);
            assert!((cyl.u_from_v(&x) - u).abs() <= 1e-13 * u);
        }
    }

    #[test]
    fn constant_is_not_a_solution() {
        let parts = ResidualParts {
            n: 3,
            v_ss: 0.0,
            lap_theta: 0.0,
            v: 1.0,
            k: 1.0,
        };
        assert!(parts.residual() > 0.5);
        // v ≡ (1/3)^{1/4} balances K = 3/4
        let fixed = ResidualParts {
            v: (1.0f64 / 3.0).powf(0.25),
            k: 0.75,
            ..parts
        };
        assert!(fixed.residual() < 1e-15);
    }

    #[test]
    fn baseline_energy() {
        let c = make_context(3).unwrap();
        let f = SolutionField::baseline_only(c).unwrap();
        let cyl = CylinderField::new(&f);
        let s = QuadSettings::for_dim(3);
        let w0 = cyl.w_energy(0.0, &s);
        assert!((w0 - std::f64::consts::PI * 3f64.sqrt()).abs() < 1e-12);
        let id = cyl.w_identity_check(1.0, 0.01, &s);
        assert!(id.second_derivative_gap < 1e-4, "{id:?}");
        assert!(id.pohozaev_gap < 1e-9, "{id:?}");
    }
}
