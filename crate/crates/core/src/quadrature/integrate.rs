use std::f64::consts::PI;

use rayon::prelude::*;

use super::adapt::{adapt1, adapt2, Integral, QuadSettings};
use super::cubature::{cubature, Cell};
use super::gauss::GaussRule;
use super::sphere::{orthonormal_frame, SphereRule};

/// An off-origin concentration point of the integrand.
#[derive(Debug, Clone, PartialEq)]
pub struct Peak {
    pub center: Vec<f64>,
    pub norm: f64,
    pub direction: Vec<f64>,
    /// Width of the peak (smallest bubble scale at this center).
    pub scale: f64,
    /// Radius of the partition-of-unity ball around the center.
    pub radius: f64,
}

/// Where the integrand concentrates; drives panel placement.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub dim: usize,
    pub peaks: Vec<Peak>,
    /// Smallest scale of origin-centered features.
    pub origin_scale: f64,
    /// Polar axis of the origin-centered sphere rules.
    pub axis: Vec<f64>,
}

impl Geometry {
    /// No peaks, origin features on scale 1.
    pub fn smooth(dim: usize) -> Self {
        let mut axis = vec![0.0; dim];
        axis[0] = 1.0;
        Geometry {
            dim,
            peaks: Vec::new(),
            origin_scale: 1.0,
            axis,
        }
    }

    /// Builds the peak layout from `(center, scale)` pairs. Centers at the origin
    /// only lower `origin_scale`; coincident centers merge into one peak.
    pub fn from_centers<'a>(
        dim: usize,
        centers: impl IntoIterator<Item = (&'a [f64], f64)>,
    ) -> Self {
        let mut geom = Geometry::smooth(dim);
        let mut raw: Vec<(Vec<f64>, f64)> = Vec::new();
        for (c, scale) in centers {
            let norm = norm(c);
            if norm == 0.0 {
                geom.origin_scale = geom.origin_scale.min(scale);
                continue;
            }
            if let Some(existing) = raw.iter_mut().find(|(e, _)| dist(e, c) <= 1e-12 * norm) {
                existing.1 = existing.1.min(scale);
            } else {
                raw.push((c.to_vec(), scale));
            }
        }
        for (i, (c, scale)) in raw.iter().enumerate() {
            let norm = norm(c);
            let mut sep = norm;
            for (j, (other, _)) in raw.iter().enumerate() {
                if i != j {
                    sep = sep.min(dist(c, other));
                }
            }
            geom.peaks.push(Peak {
                center: c.clone(),
                norm,
                direction: c.iter().map(|v| v / norm).collect(),
                scale: *scale,
                radius: 0.4 * sep,
            });
        }
        if let Some(p) = geom.peaks.first() {
            geom.axis = p.direction.clone();
        }
        geom
    }

    /// Whether some peak lies off the polar axis. Product sphere rules resolve
    /// axial layouts well; anything else goes through adaptive cubature.
    pub fn off_axis(&self) -> bool {
        self.peaks.iter().any(|p| {
            let c: f64 = p.direction.iter().zip(&self.axis).map(|(a, b)| a * b).sum();
            c.abs() < 1.0 - 1e-12
        })
    }

    /// Σ_j χ_j(x).
    pub fn partition(&self, x: &[f64]) -> f64 {
        self.peaks
            .iter()
            .map(|p| {
                let d2: f64 = x.iter().zip(&p.center).map(|(a, b)| (a - b) * (a - b)).sum();
                if d2 >= p.radius * p.radius {
                    0.0
                } else {
                    bump(d2.sqrt() / p.radius)
                }
            })
            .sum()
    }
}

/// C^∞ cutoff: 1 on [0, 1/2], 0 on [1, ∞).
pub fn bump(t: f64) -> f64 {
    if t <= 0.5 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        let s = 2.0 * t - 1.0;
        1.0 / (1.0 + (1.0 / (1.0 - s) - 1.0 / s).exp())
    }
}

/// Error-free sum: a + b = s + e exactly.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Breakpoints for the origin-centered radial integration over [0, R].
pub fn radial_panels(geom: &Geometry, big_r: f64) -> Vec<f64> {
    let mut pts = vec![0.0, big_r];
    for p in &geom.peaks {
        for r in [
            p.norm - p.radius,
            p.norm - 0.5 * p.radius,
            p.norm,
            p.norm + 0.5 * p.radius,
            p.norm + p.radius,
        ] {
            if r > 0.0 && r < big_r {
                pts.push(r);
            }
        }
    }
    // geometric refinement toward the origin, down to the origin feature scale
    let first = pts
        .iter()
        .copied()
        .filter(|&r| r > 0.0)
        .fold(f64::INFINITY, f64::min)
        .min(geom.origin_scale.max(1e-300) * 4.0);
    let floor = geom.origin_scale / 16.0;
    let mut r = first;
    while r > floor && r > 0.0 {
        if r < big_r {
            pts.push(r);
        }
        r *= 0.5;
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1e-300));
    // split long panels geometrically
    let mut out = vec![pts[0]];
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a > 0.0 {
            let mut x = 2.0 * a;
            while x < b / 1.5 {
                out.push(x);
                x *= 2.0;
            }
        }
        out.push(b);
    }
    out
}

/// ∫_{S^{n-1}} f(rθ) dθ with a fixed rule and no peak handling.
pub fn sphere_integrate_fixed(rule: &SphereRule, r: f64, f: impl Fn(&[f64]) -> f64) -> f64 {
    rule.integrate(r, f)
}

fn remainder_sphere_sum(
    geom: &Geometry,
    rule: &SphereRule,
    r: f64,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    x: &mut [f64],
) -> (f64, f64) {
    let mut acc = 0.0;
    let mut abs = 0.0;
    for (th, w) in rule.iter() {
        for (xi, ti) in x.iter_mut().zip(th) {
            *xi = r * ti;
        }
        let chi = geom.partition(x);
        if chi >= 1.0 {
            continue;
        }
        let v = w * f(x) * (1.0 - chi);
        acc += v;
        abs += v.abs();
    }
    (acc, abs)
}

/// Hyperspherical coordinates (θ_1, …, θ_{n-2}, φ) around an oriented frame.
struct Chart {
    frame: Vec<Vec<f64>>,
}

impl Chart {
    fn new(axis: &[f64]) -> Self {
        Chart {
            frame: orthonormal_frame(axis),
        }
    }

    /// Writes rθ(angles) into `x` and returns the angular Jacobian.
    fn point(&self, r: f64, angles: &[f64], x: &mut [f64]) -> f64 {
        let n = self.frame.len();
        let mut y = vec![0.0; n];
        let mut sprod = 1.0;
        let mut jac = 1.0;
        for k in 0..n - 2 {
            let (s, c) = angles[k].sin_cos();
            y[k] = sprod * c;
            jac *= s.powi((n - 2 - k) as i32);
            sprod *= s;
        }
        let (s, c) = angles[n - 2].sin_cos();
        y[n - 2] = sprod * c;
        y[n - 1] = sprod * s;
        x.iter_mut().for_each(|v| *v = 0.0);
        for (yk, e) in y.iter().zip(&self.frame) {
            for (xi, ei) in x.iter_mut().zip(e) {
                *xi += r * yk * ei;
            }
        }
        jac
    }

    /// Initial angular boxes; coarse enough to be cheap, fine enough that
    /// no partition ball falls between the sample points of every cell.
    fn angular_boxes(&self) -> Vec<(Vec<f64>, Vec<f64>)> {
        let n = self.frame.len();
        let (polar, azimuth) = match n {
            3 => (8, 16),
            4 => (4, 8),
            _ => (2, 4),
        };
        let mut boxes = vec![(Vec::new(), Vec::new())];
        for k in 0..n - 1 {
            let (parts, span) = if k < n - 2 { (polar, PI) } else { (azimuth, 2.0 * PI) };
            let h = span / parts as f64;
            boxes = boxes
                .into_iter()
                .flat_map(|(lo, hi)| {
                    (0..parts).map(move |i| {
                        let mut lo = lo.clone();
                        let mut hi = hi.clone();
                        lo.push(i as f64 * h);
                        hi.push((i + 1) as f64 * h);
                        (lo, hi)
                    })
                })
                .collect();
        }
        boxes
    }
}

fn remainder_sphere_cubature(
    geom: &Geometry,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    r: f64,
    settings: &QuadSettings,
) -> Integral {
    let chart = Chart::new(&geom.axis);
    let g = |a: &[f64]| {
        let mut x = vec![0.0; geom.dim];
        let jac = chart.point(r, a, &mut x);
        let chi = geom.partition(&x);
        if chi >= 1.0 || jac == 0.0 {
            0.0
        } else {
            jac * f(&x) * (1.0 - chi)
        }
    };
    let cells = chart
        .angular_boxes()
        .iter()
        .map(|(lo, hi)| Cell::from_bounds(lo, hi))
        .collect();
    cubature(&g, cells, settings.rtol, settings.atol, settings.max_evals / 4)
}

fn remainder_ball_cubature(
    geom: &Geometry,
    f: &SplitIntegrand<'_>,
    panels: &[f64],
    settings: &QuadSettings,
) -> Integral {
    let n = geom.dim;
    let chart = Chart::new(&geom.axis);
    let zeros = vec![0.0; n];
    let f = |x: &[f64]| f(x, &zeros);
    let g = |a: &[f64]| {
        let mut x = vec![0.0; n];
        let jac = chart.point(a[0], &a[1..], &mut x) * a[0].powi(n as i32 - 1);
        let chi = geom.partition(&x);
        if chi >= 1.0 || jac == 0.0 {
            0.0
        } else {
            jac * f(&x) * (1.0 - chi)
        }
    };
    let boxes = chart.angular_boxes();
    let mut cells = Vec::with_capacity(boxes.len() * panels.len());
    for w in panels.windows(2) {
        for (lo, hi) in &boxes {
            let mut l = vec![w[0]];
            let mut h = vec![w[1]];
            l.extend_from_slice(lo);
            h.extend_from_slice(hi);
            cells.push(Cell::from_bounds(&l, &h));
        }
    }
    cubature(&g, cells, settings.rtol, settings.atol, settings.max_evals)
}

/// Directions orthogonal to a peak axis: S^{n-2} rule mapped into R^n.
struct PerpRule {
    axis: Vec<f64>,
    dirs: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl PerpRule {
    fn new(axis: &[f64], order: usize) -> Self {
        let n = axis.len();
        let frame = orthonormal_frame(axis);
        let sub = SphereRule::new(n - 1, order);
        let mut dirs = Vec::with_capacity(sub.len());
        for (eta, _) in sub.iter() {
            let mut d = vec![0.0; n];
            for (c, e) in eta.iter().zip(&frame[1..]) {
                for (di, ei) in d.iter_mut().zip(e) {
                    *di += c * ei;
                }
            }
            dirs.push(d);
        }
        PerpRule {
            axis: frame[0].clone(),
            dirs,
            weights: sub.weights().to_vec(),
        }
    }
}

/// ∫_{S^{n-1}} f(rθ) dθ, resolving peaks that lie within their partition radius of S_r.
pub fn sphere_integrate(
    geom: &Geometry,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    r: f64,
    settings: &QuadSettings,
) -> Integral {
    let n = geom.dim;
    let remainder = if geom.off_axis() {
        remainder_sphere_cubature(geom, f, r, settings)
    } else {
        adapt1(settings, settings.max_sphere_level, |la| {
            let rule = SphereRule::new(n, settings.sphere_nodes(la)).oriented(&geom.axis);
            let mut x = vec![0.0; n];
            remainder_sphere_sum(geom, &rule, r, f, &mut x)
        })
    };
    let caps: Integral = geom
        .peaks
        .iter()
        .filter(|p| (r - p.norm).abs() < p.radius && r > 0.0)
        .map(|p| sphere_cap(p, f, r, settings))
        .sum();
    remainder + caps
}

fn cos_at_distance(r: f64, c: f64, d: f64) -> f64 {
    ((r * r + c * c - d * d) / (2.0 * r * c)).clamp(-1.0, 1.0)
}

fn sphere_cap(
    peak: &Peak,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    r: f64,
    settings: &QuadSettings,
) -> Integral {
    let n = peak.center.len();
    let psi_max = cos_at_distance(r, peak.norm, peak.radius).acos();
    let delta = (r - peak.norm).abs();
    let mut breaks = vec![0.0, psi_max];
    if delta < 0.5 * peak.radius {
        breaks.push(cos_at_distance(r, peak.norm, 0.5 * peak.radius).acos());
    }
    let psi_s = peak.scale.max(delta) / (r * peak.norm).sqrt() / 8.0;
    let mut s = psi_s;
    while s < psi_max {
        breaks.push(s);
        s *= 2.0;
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let power = n as i32 - 2;
    adapt2(
        settings,
        settings.max_radial_level,
        settings.max_sphere_level.min(2),
        |lp, le| {
            let gl = GaussRule::legendre(settings.radial_nodes(lp));
            let perp = PerpRule::new(&peak.direction, settings.sphere_nodes(le) / 2);
            let mut x = vec![0.0; n];
            let mut acc = 0.0;
            let mut abs = 0.0;
            for w in breaks.windows(2) {
                for (psi, wp) in gl.mapped(w[0], w[1]) {
                    let (sp, cp) = psi.sin_cos();
                    let jac = wp * sp.powi(power);
                    for (eta, &we) in perp.dirs.iter().zip(&perp.weights) {
                        for i in 0..n {
                            x[i] = r * (cp * perp.axis[i] + sp * eta[i]);
                        }
                        let d = dist(&x, &peak.center);
                        let chi = bump(d / peak.radius);
                        if chi == 0.0 {
                            continue;
                        }
                        let v = jac * we * chi * f(&x);
                        acc += v;
                        abs += v.abs();
                    }
                }
            }
            (acc, abs)
        },
    )
}

/// Integrand that also receives the low-order part `lo` of its node, so that
/// the node is `x + lo` to about twice working precision. Near a peak center c
/// the displacement `(x - c) + lo` is then exact even when |c| ≫ the peak width.
pub type SplitIntegrand<'a> = dyn Fn(&[f64], &[f64]) -> f64 + Sync + 'a;

/// ∫_{B_o(R)} f dx.
pub fn ball_integrate(
    geom: &Geometry,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    big_r: f64,
    settings: &QuadSettings,
) -> Integral {
    ball_integrate_split(geom, &|x, _| f(x), big_r, settings)
}

/// [`ball_integrate`] for integrands that use the node's low-order part.
pub fn ball_integrate_split(
    geom: &Geometry,
    f: &SplitIntegrand<'_>,
    big_r: f64,
    settings: &QuadSettings,
) -> Integral {
    if big_r <= 0.0 {
        return Integral::zero();
    }
    let panels = radial_panels(geom, big_r);
    let remainder = if geom.off_axis() {
        remainder_ball_cubature(geom, f, &panels, settings)
    } else {
        remainder_ball_product(geom, f, &panels, settings)
    };
    let locals: Vec<Integral> = geom
        .peaks
        .par_iter()
        .filter(|p| p.norm - p.radius < big_r)
        .map(|p| local_ball(p, f, big_r, settings))
        .collect();
    remainder + locals.into_iter().sum::<Integral>()
}

fn remainder_ball_product(
    geom: &Geometry,
    f: &SplitIntegrand<'_>,
    panels: &[f64],
    settings: &QuadSettings,
) -> Integral {
    let n = geom.dim;
    let zeros = vec![0.0; n];
    let f = &|x: &[f64]| f(x, &zeros);
    adapt2(
        settings,
        settings.max_radial_level,
        settings.max_sphere_level,
        |lr, la| {
            let gl = GaussRule::legendre(settings.radial_nodes(lr));
            let rule = SphereRule::new(n, settings.sphere_nodes(la)).oriented(&geom.axis);
            let parts: Vec<(f64, f64)> = panels
                .par_windows(2)
                .map(|w| {
                    let mut x = vec![0.0; n];
                    let mut acc = 0.0;
                    let mut abs = 0.0;
                    for (r, wr) in gl.mapped(w[0], w[1]) {
                        let (s, sa) = remainder_sphere_sum(geom, &rule, r, f, &mut x);
                        let jac = wr * r.powi(n as i32 - 1);
                        acc += jac * s;
                        abs += jac * sa;
                    }
                    (acc, abs)
                })
                .collect();
            parts
                .iter()
                .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1))
        },
    )
}

/// ∫_{B(c,ρ) ∩ B_o(R)} χ f dx in coordinates centered at the peak.
fn local_ball(
    peak: &Peak,
    f: &SplitIntegrand<'_>,
    big_r: f64,
    settings: &QuadSettings,
) -> Integral {
    let n = peak.center.len();
    let rho = peak.radius;
    let c = peak.norm;
    let mut breaks = vec![0.0, 0.5 * rho, rho];
    let mut d = peak.scale / 8.0;
    while d < 0.5 * rho {
        breaks.push(d);
        d *= 2.0;
    }
    let cut = (big_r - c).abs();
    if cut > 0.0 && cut < rho {
        breaks.push(cut);
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs());
    let full_ball = big_r >= c + rho;
    let power = n as i32 - 2;
    adapt2(
        settings,
        settings.max_radial_level,
        settings.max_sphere_level.min(2),
        |lr, la| {
            let gl = GaussRule::legendre(settings.radial_nodes(lr));
            let glp = GaussRule::legendre(settings.sphere_nodes(la));
            let perp = PerpRule::new(&peak.direction, (settings.sphere_nodes(la) / 2).max(2));
            let parts: Vec<(f64, f64)> = breaks
                .par_windows(2)
                .map(|w| {
                    let mut x = vec![0.0; n];
                    let mut lo = vec![0.0; n];
                    let mut acc = 0.0;
                    let mut abs = 0.0;
                    for (d, wd) in gl.mapped(w[0], w[1]) {
                        let psi_lo = if full_ball {
                            0.0
                        } else {
                            let gamma = (big_r * big_r - c * c - d * d) / (2.0 * d * c);
                            if gamma <= -1.0 {
                                continue;
                            }
                            gamma.min(1.0).acos()
                        };
                        let chi = bump(d / rho);
                        if chi == 0.0 {
                            continue;
                        }
                        let radial = wd * d.powi(n as i32 - 1) * chi;
                        for (psi, wp) in glp.mapped(psi_lo, PI) {
                            let (sp, cp) = psi.sin_cos();
                            let jac = radial * wp * sp.powi(power);
                            for (eta, &we) in perp.dirs.iter().zip(&perp.weights) {
                                for i in 0..n {
                                    let off = d * (cp * perp.axis[i] + sp * eta[i]);
                                    (x[i], lo[i]) = two_sum(peak.center[i], off);
                                }
                                let v = jac * we * f(&x, &lo);
                                acc += v;
                                abs += v.abs();
                            }
                        }
                    }
                    (acc, abs)
                })
                .collect();
            parts
                .iter()
                .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1))
        },
    )
}

/// Fraction of the mass of ū(·,λ)^{2n/(n-2)} inside radius t·λ:
/// ∫_0^t s^{n-1}/(1+s²)^n ds normalized by its value at t = ∞.
pub fn radial_mass_fraction(dim: usize, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t.is_infinite() {
        return 1.0;
    }
    integrate_profile(dim, t.atan()) / integrate_profile(dim, 0.5 * PI)
}

/// ∫_0^{φ_max} (sin φ cos φ)^{n-1} dφ, i.e. ∫_0^{tan φ_max} s^{n-1}/(1+s²)^n ds.
pub fn integrate_profile(dim: usize, phi_max: f64) -> f64 {
    let rule = GaussRule::legendre(32);
    let panels = 8;
    let h = phi_max / panels as f64;
    (0..panels)
        .map(|i| {
            rule.integrate(i as f64 * h, (i + 1) as f64 * h, |phi| {
                (phi.sin() * phi.cos()).powi(dim as i32 - 1)
            })
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::unit_sphere_area;
    use approx::assert_relative_eq;

    #[test]
    fn bump_is_a_partition_profile() {
        assert_eq!(bump(0.0), 1.0);
        assert_eq!(bump(0.5), 1.0);
        assert_eq!(bump(1.0), 0.0);
        assert_relative_eq!(bump(0.75), 0.5, max_relative = 1e-14);
        let mut prev = 1.0;
        for i in 0..=100 {
            let v = bump(0.5 + 0.005 * i as f64);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn constant_sphere_and_ball() {
        let s = QuadSettings::for_dim(3);
        let g = Geometry::smooth(3);
        let one = |_: &[f64]| 1.0;
        let sph = sphere_integrate(&g, &one, 2.0, &s);
        assert_relative_eq!(sph.value, 4.0 * PI, max_relative = 1e-13);
        let ball = ball_integrate(&g, &one, 1.0, &s);
        assert_relative_eq!(ball.value, 4.0 * PI / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn peaked_gaussian_mass_through_cut() {
        // Narrow Gaussian centered on the bounding sphere: half its mass is inside.
        let s = QuadSettings::for_dim(3);
        let c = [3.0, 0.0, 0.0];
        let sig: f64 = 1e-4;
        let g = Geometry::from_centers(3, [(&c[..], sig)]);
        let f = move |x: &[f64]| {
            let d2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
            (-d2 / (2.0 * sig * sig)).exp()
        };
        let total = (2.0 * PI).powf(1.5) * sig.powi(3);
        let full = ball_integrate(&g, &f, 5.0, &s);
        assert_relative_eq!(full.value, total, max_relative = 1e-9);
        let half = ball_integrate(&g, &f, 3.0, &s);
        // the sphere |x| = 3 is curved: inside share is 1/2 - O(σ/R)
        assert_relative_eq!(half.value / total, 0.5, max_relative = 1e-3);
    }

    #[test]
    fn sphere_through_peak() {
        // ∫_{S²} exp(-|3θ - c|²/(2σ²)) dθ ≈ 2πσ²/9 for a peak on the sphere
        let s = QuadSettings::for_dim(3);
        let c = [0.0, 3.0, 0.0];
        let sig: f64 = 1e-5;
        let g = Geometry::from_centers(3, [(&c[..], sig)]);
        let f = move |x: &[f64]| {
            let d2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
            (-d2 / (2.0 * sig * sig)).exp()
        };
        let got = sphere_integrate(&g, &f, 3.0, &s);
        assert_relative_eq!(got.value, 2.0 * PI * sig * sig / 9.0, max_relative = 1e-6);
    }

    #[test]
    fn off_axis_peaks_through_cubature() {
        // ring of Gaussians plus a broad background; each peak carries (2π)^{3/2}σ³
        let s = QuadSettings::for_dim(3).with_rtol(1e-6);
        let sig: f64 = 1e-3;
        let centers: Vec<[f64; 3]> = (0..5)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / 5.0;
                [2.0 * t.cos(), 2.0 * t.sin(), 0.0]
            })
            .collect();
        let g = Geometry::from_centers(3, centers.iter().map(|c| (&c[..], sig)));
        assert!(g.off_axis());
        let cs = centers.clone();
        let f = move |x: &[f64]| {
            let peaks: f64 = cs
                .iter()
                .map(|c| {
                    let d2: f64 = x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
                    (-d2 / (2.0 * sig * sig)).exp()
                })
                .sum();
            let r2: f64 = x.iter().map(|a| a * a).sum();
            peaks + (-r2).exp()
        };
        let background = PI.powf(1.5) * gaussian_ball_fraction(4.0);
        let want = 5.0 * (2.0 * PI).powf(1.5) * sig.powi(3) + background;
        let got = ball_integrate(&g, &f, 4.0, &s);
        assert!(got.converged, "{got:?}");
        assert!((got.value - want).abs() <= got.error + 1e-12 * want);
        // on the ring sphere every peak is cut in half by symmetry of the Gaussian
        let sph = sphere_integrate(&g, &f, 2.0, &s);
        let want_s = 5.0 * 2.0 * PI * sig * sig / 4.0 + 4.0 * PI * (-4.0f64).exp();
        assert_relative_eq!(sph.value, want_s, max_relative = 1e-5);
    }

    /// Fraction of ∫ e^{-|x|²} over R³ carried by the ball of radius R.
    fn gaussian_ball_fraction(big_r: f64) -> f64 {
        statrs::function::erf::erf(big_r) - 2.0 * big_r * (-big_r * big_r).exp() / PI.sqrt()
    }

    #[test]
    fn mass_fraction_limits() {
        for n in 3..8 {
            assert_eq!(radial_mass_fraction(n, 0.0), 0.0);
            assert_relative_eq!(radial_mass_fraction(n, 1e12), 1.0, max_relative = 1e-12);
            // symmetry s -> 1/s maps the profile onto itself: F(1) = 1/2
            assert_relative_eq!(radial_mass_fraction(n, 1.0), 0.5, max_relative = 1e-13);
        }
    }

    #[test]
    fn product_rule_matches_radial_composition() {
        let s = QuadSettings::for_dim(3);
        let g = Geometry::smooth(3);
        let f = |x: &[f64]| (-(x[0] - 0.3).powi(2) - 2.0 * x[1] * x[1] - x[2] * x[2]).exp();
        let ball = ball_integrate(&g, &f, 2.0, &s);
        let rule = SphereRule::new(3, 64);
        let gl = GaussRule::legendre(64);
        let panels = radial_panels(&g, 2.0);
        let manual = super::super::gauss::composite(&gl, &panels, |r| {
            r * r * sphere_integrate_fixed(&rule, r, f)
        });
        assert_relative_eq!(ball.value, manual, max_relative = 1e-10);
        assert!(ball.converged);
        let _ = unit_sphere_area(3);
    }
}
