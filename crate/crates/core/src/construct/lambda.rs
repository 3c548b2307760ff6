//! Choice of bubble scales under domination and concentration constraints.

use serde::Serialize;

use crate::dimension::DimensionContext;
use crate::error::{Error, Result};
use crate::fields::BubbleTerm;
use crate::quadrature::radial_mass_fraction;

/// Scales are chosen so that the domination suprema stay below this fraction of ε.
const SAFETY: f64 = 0.999;

/// Suprema of the two domination ratios over |y| ≥ ρ₀ for one bubble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominationSup {
    /// sup ū(ρ,λ)/u_o, worst case over the sphere |y - c| = ρ.
    pub value_ratio: f64,
    /// sup |∇ū|(ρ,λ).
    pub gradient: f64,
}

/// Maximum of f over [a, b]: log-spaced scan, then golden-section refinement
/// around the best grid point.
fn sup_on(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    const GRID: usize = 400;
    let la = a.ln();
    let step = (b.ln() - la) / GRID as f64;
    let at = |i: usize| (la + step * i as f64).exp();
    let mut best = 0;
    let mut fbest = f(a);
    for i in 1..=GRID {
        let v = f(at(i));
        if v > fbest {
            best = i;
            fbest = v;
        }
    }
    let (mut lo, mut hi) = (la + step * best.saturating_sub(1) as f64, la + step * (best + 1).min(GRID) as f64);
    let g = |t: f64| f(t.exp());
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (g(x1), g(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = g(x1);
        }
    }
    fbest.max(f1).max(f2)
}

/// Suprema over |y| ≥ ρ₀ for a bubble of scale λ whose center has norm `center_norm`.
///
/// Since u_o is radial and decreasing, the worst point on the sphere |y - c| = ρ is
/// the one farthest from the origin, which reduces the value ratio to
/// h(ρ) = [λ (1 + (ρ + |c|)²)/(λ² + ρ²)]^{(n-2)/2}. Beyond Y the bound
/// h ≤ [λ (Y^{-2} + (1 + |c|/Y)²)]^{(n-2)/2} is used.
pub fn domination_sup(ctx: &DimensionContext, lambda: f64, center_norm: f64, rho0: f64) -> DominationSup {
    let m = ctx.half_nm2();
    let y = (1e6 * rho0).max(1e3 * (center_norm + 1.0));
    let h = |rho: f64| {
        let ln = lambda.ln() + (1.0 + (rho + center_norm).powi(2)).ln() - (lambda * lambda + rho * rho).ln();
        (m * ln).exp()
    };
    let far = (m * (lambda.ln() + (y.powi(-2) + (1.0 + center_norm / y).powi(2)).ln())).exp();
    let value_ratio = sup_on(rho0, y, h).max(far);
    let grad = |rho: f64| BubbleTerm::profile_slope(ctx, lambda, rho);
    let gradient = sup_on(rho0, y, grad).max(grad(y));
    DominationSup { value_ratio, gradient }
}

fn admissible(ctx: &DimensionContext, lambda: f64, eps: f64, center_norm: f64, rho0: f64) -> bool {
    let s = domination_sup(ctx, lambda, center_norm, rho0);
    s.value_ratio <= SAFETY * eps && s.gradient <= SAFETY * eps
}

/// Largest admissible λ ≤ `ceiling` up to 50 bisection steps in log λ.
fn largest_admissible(
    ctx: &DimensionContext,
    eps: f64,
    center_norm: f64,
    rho0: f64,
    ceiling: f64,
) -> Result<f64> {
    // On λ ≤ ρ₀ √(m/(m+2)) both ratios increase with λ, so admissibility is monotone there.
    let m = ctx.half_nm2();
    let top = ceiling.min(rho0 * (m / (m + 2.0)).sqrt());
    if admissible(ctx, top, eps, center_norm, rho0) {
        return Ok(top);
    }
    let mut hi = top;
    let mut lo = top;
    let mut found = false;
    for _ in 0..400 {
        lo *= 0.5;
        if admissible(ctx, lo, eps, center_norm, rho0) {
            found = true;
            break;
        }
        hi = lo;
    }
    if !found {
        return Err(Error::LambdaSearch(format!(
            "no admissible λ below {top:e} for ε = {eps}, |c| = {center_norm}"
        )));
    }
    for _ in 0..50 {
        let mid = (lo * hi).sqrt();
        if admissible(ctx, mid, eps, center_norm, rho0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Scale of u_k: large peak (α_n λ^{(2-n)/2} ≥ M_k) and dominated by ε_k u_o, with gradient
/// below ε_k, outside B(x^{1,k}, 1/4).
pub fn choose_lambda_unbounded(ctx: &DimensionContext, eps_k: f64, r_k: f64, m_k: f64) -> Result<f64> {
    if !(eps_k > 0.0 && eps_k <= 1.0) {
        return Err(Error::param("eps_k", format!("must lie in (0, 1], got {eps_k}")));
    }
    if !(r_k >= 0.0 && r_k.is_finite()) {
        return Err(Error::param("r_k", "must be finite and nonnegative"));
    }
    if !(m_k > 0.0 && m_k.is_finite()) {
        return Err(Error::param("M_k", "must be positive"));
    }
    let peak_cap = (ctx.alpha_n / m_k).powf(1.0 / ctx.half_nm2());
    largest_admissible(ctx, eps_k, r_k, 0.25, peak_cap)
}

/// Radius π/(10 N) of the mass ball around each ring bubble.
pub fn ring_radius(n_k: usize) -> f64 {
    std::f64::consts::PI / (10.0 * n_k as f64)
}

/// t with F(t) = 1/2, where F is the radial mass fraction of ū(·,1)^q.
pub fn median_mass_radius(ctx: &DimensionContext) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    while radial_mass_fraction(ctx.n, hi) < 0.5 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if radial_mass_fraction(ctx.n, mid) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Scale of the ring-k bubbles: dominated outside B(x_{k,j}, π/(10N_k)) and holding at
/// least half of the bubble mass inside it.
pub fn choose_lambda_ring(ctx: &DimensionContext, eps_k: f64, n_k: usize, ring_k: f64) -> Result<f64> {
    if !(eps_k > 0.0 && eps_k <= 1.0) {
        return Err(Error::param("eps_k", format!("must lie in (0, 1], got {eps_k}")));
    }
    if n_k == 0 {
        return Err(Error::param("N_k", "must be at least 1"));
    }
    let rho0 = ring_radius(n_k);
    let mass_cap = rho0 / median_mass_radius(ctx);
    largest_admissible(ctx, eps_k, ring_k, rho0, mass_cap)
}

/// N_k = ⌈2 φ(k+2)/V_n⌉, at least 1.
pub fn ring_count(ctx: &DimensionContext, phi_at_k_plus_2: f64) -> usize {
    ((2.0 * phi_at_k_plus_2 / ctx.v_n).ceil() as usize).max(1)
}
