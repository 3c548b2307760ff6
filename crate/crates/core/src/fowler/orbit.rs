//! v'' - ((n-2)²/4) v + (n(n-2)/4) v^{(n+2)/(n-2)} = 0 and its orbits.

use rayon::prelude::*;
use serde::Serialize;

use super::dopri::{hermite, step, State};
use crate::analysis::CsvTable;
use crate::dimension::DimensionContext;
use crate::error::{Error, Result};

/// v* = ((n-2)/n)^{(n-2)/4}, the constant solution.
pub fn fixed_point(ctx: &DimensionContext) -> f64 {
    let n = ctx.dim();
    ((n - 2.0) / n).powf((n - 2.0) / 4.0)
}

/// (cosh s)^{-(n-2)/2}, the orbit homoclinic to 0 with maximum 1 at s = 0.
pub fn homoclinic(ctx: &DimensionContext, s: f64) -> f64 {
    s.cosh().powf(-ctx.half_nm2())
}

/// E = v'²/2 - ((n-2)²/8) v² + ((n-2)²/8) v^{2n/(n-2)}.
pub fn energy(ctx: &DimensionContext, v: f64, vp: f64) -> f64 {
    let c = ctx.half_nm2().powi(2) / 2.0;
    0.5 * vp * vp - c * v * v + c * v.abs().powf(ctx.q)
}

/// v'' as a function of v.
pub fn acceleration(ctx: &DimensionContext, v: f64) -> f64 {
    let m = ctx.half_nm2();
    m * m * v - m * (m + 1.0) * v.abs().powf(ctx.p).copysign(v)
}

/// Multiplier c with c·v solving the equation above whenever v solves
/// v'' - ((n-2)²/4) v + v^p = 0: c = (4/(n(n-2)))^{(n-2)/4}.
pub fn rescaling_factor(ctx: &DimensionContext) -> f64 {
    let n = ctx.dim();
    (4.0 / (n * (n - 2.0))).powf((n - 2.0) / 4.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub s: f64,
    pub v: f64,
    pub vp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FowlerOrbit {
    pub n: usize,
    pub v0: f64,
    pub v0p: f64,
    pub samples: Vec<Sample>,
    pub energy: f64,
    /// max |E(s) - E(0)| over accepted steps.
    pub energy_drift: f64,
    pub necksize: Option<f64>,
    pub period: Option<f64>,
    pub v_max: Option<f64>,
    /// Set when v left (0, ∞) before the end of the span.
    pub blow_up: Option<String>,
    /// Set for the constant orbit at the fixed point.
    pub degenerate: bool,
}

impl FowlerOrbit {
    pub fn max_abs_derivative(&self) -> f64 {
        self.samples.iter().map(|p| p.vp.abs()).fold(0.0, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.samples.iter().map(|p| p.v).fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.samples.iter().map(|p| p.v).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Linear-time lookup of the sample nearest to s, refined by one exact step.
    pub fn value_at(&self, ctx: &DimensionContext, s: f64, tol: f64) -> Option<f64> {
        let i = self.samples.iter().rposition(|p| p.s <= s)?;
        let p = self.samples[i];
        let mut y = [p.v, p.vp];
        let rhs = |y: &State| [y[1], acceleration(ctx, y[0])];
        let mut t = p.s;
        let h_max = (tol.powf(0.2) * 0.5).max(1e-4);
        while t < s {
            let h = (s - t).min(h_max);
            let (yn, _, _) = step(&rhs, &y, &rhs(&y), h);
            y = yn;
            t += h;
        }
        Some(y[0])
    }

    pub fn to_csv(&self, ctx: &DimensionContext) -> CsvTable {
        let mut t = CsvTable::new(&["s", "v", "vp", "energy"]);
        for p in &self.samples {
            t.push_numbers(&[p.s, p.v, p.vp, energy(ctx, p.v, p.vp)]);
        }
        t
    }
}

/// Turning points that can end the integration. Crossings of v* are always recorded.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Event {
    /// v' crosses 0 from above (a maximum of v).
    Maximum,
    /// v' crosses 0 from below (a minimum of v).
    Minimum,
}

/// Keeps the stored trajectory dense enough for tables and plots.
const MAX_STEP: f64 = 0.25;

struct Integrator<'a> {
    ctx: &'a DimensionContext,
    tol: f64,
}

impl Integrator<'_> {
    fn rhs(&self, y: &State) -> State {
        [y[1], acceleration(self.ctx, y[0])]
    }

    /// Integrates over [0, s_end], stopping early at the `stop_after`-th event in `events`.
    fn run(&self, y0: State, s_end: f64, events: &[Event], stop_after: usize) -> Result<Run> {
        let f = |y: &State| self.rhs(y);
        let e0 = energy(self.ctx, y0[0], y0[1]);
        let mut run = Run {
            samples: vec![Sample { s: 0.0, v: y0[0], vp: y0[1] }],
            drift: 0.0,
            hits: Vec::new(),
            blow_up: None,
        };
        let mut s = 0.0;
        let mut y = y0;
        let mut fy = f(&y);
        let mut h = 1e-3_f64.min(s_end);
        let mut rejected = 0usize;
        while s < s_end {
            h = h.min(s_end - s).min(MAX_STEP);
            if h < 1e-14 {
                return Err(Error::Integration(format!("step size underflow at s = {s}")));
            }
            let (yn, fnew, err) = step(&f, &y, &fy, h);
            let scale = |i: usize| self.tol * (1.0 + y[i].abs().max(yn[i].abs()));
            let en = (err[0] / scale(0)).abs().max((err[1] / scale(1)).abs());
            let de = (energy(self.ctx, yn[0], yn[1]) - energy(self.ctx, y[0], y[1])).abs();
            let energy_ok = de <= 0.1 * self.tol * (1.0 + e0.abs());
            if !(en <= 1.0 && energy_ok) || !yn.iter().all(|v| v.is_finite()) {
                let factor = if en.is_finite() && en > 1.0 { (0.9 * en.powf(-0.2)).max(0.2) } else { 0.5 };
                h *= factor;
                rejected += 1;
                if rejected > 100_000 {
                    return Err(Error::Integration("too many rejected steps".into()));
                }
                continue;
            }
            let v_star = fixed_point(self.ctx);
            let mut found: Vec<(f64, State, bool)> = Vec::new();
            if (y[0] - v_star) * (yn[0] - v_star) < 0.0 {
                let (t, yt) = self.locate(&y, &fy, &yn, &fnew, h, 0, v_star);
                found.push((t, yt, false));
            }
            for ev in events {
                let crossed = match ev {
                    Event::Maximum => y[1] > 0.0 && yn[1] <= 0.0,
                    Event::Minimum => y[1] < 0.0 && yn[1] >= 0.0,
                };
                if crossed {
                    let (t, yt) = self.locate(&y, &fy, &yn, &fnew, h, 1, 0.0);
                    found.push((t, yt, true));
                }
            }
            found.sort_by(|a, b| a.0.total_cmp(&b.0));
            for (t, yt, counted) in found {
                if run.hits.len() >= stop_after {
                    break;
                }
                run.samples.push(Sample { s: s + t, v: yt[0], vp: yt[1] });
                if counted {
                    run.hits.push((s + t, yt));
                }
            }
            if run.hits.len() >= stop_after {
                let (_, ye) = run.hits[stop_after - 1];
                run.drift = run.drift.max((energy(self.ctx, ye[0], ye[1]) - e0).abs());
                return Ok(run);
            }
            s += h;
            y = yn;
            fy = fnew;
            run.drift = run.drift.max((energy(self.ctx, y[0], y[1]) - e0).abs());
            run.samples.push(Sample { s, v: y[0], vp: y[1] });
            if !(y[0] > 0.0 && y[0] < 1e8) {
                run.blow_up = Some(format!("v = {} at s = {s}", y[0]));
                return Ok(run);
            }
            h *= if en > 0.0 { (0.9 * en.powf(-0.2)).min(5.0) } else { 5.0 };
        }
        Ok(run)
    }

    /// Root of y[idx] = target inside a step: Hermite bisection, then Newton with exact
    /// steps from the step start.
    #[allow(clippy::too_many_arguments)]
    fn locate(&self, y0: &State, f0: &State, y1: &State, f1: &State, h: f64, idx: usize, target: f64) -> (f64, State) {
        let g = |t: f64| hermite(y0[idx], f0[idx], y1[idx], f1[idx], h, t) - target;
        let (mut a, mut b) = (0.0, 1.0);
        let ga = g(0.0);
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            if (g(mid) > 0.0) == (ga > 0.0) {
                a = mid;
            } else {
                b = mid;
            }
        }
        let f = |y: &State| self.rhs(y);
        let mut t = 0.5 * (a + b) * h;
        let mut yt = *y1;
        for _ in 0..8 {
            let (ys, fs, _) = step(&f, y0, f0, t);
            yt = ys;
            if fs[idx] == 0.0 {
                break;
            }
            let dt = (ys[idx] - target) / fs[idx];
            t = (t - dt).clamp(0.0, h);
            if dt.abs() < 1e-15 * (1.0 + t) {
                let (ys, _, _) = step(&f, y0, f0, t);
                yt = ys;
                break;
            }
        }
        (t, yt)
    }
}

struct Run {
    samples: Vec<Sample>,
    drift: f64,
    hits: Vec<(f64, State)>,
    blow_up: Option<String>,
}

/// Adaptive integration over [0, s_end] from (v0, v0'); records every accepted step.
pub fn integrate(ctx: &DimensionContext, v0: f64, v0p: f64, s_end: f64, tol: f64) -> Result<FowlerOrbit> {
    if !(v0 > 0.0 && v0.is_finite()) {
        return Err(Error::param("v0", "must be positive"));
    }
    if !(s_end > 0.0 && tol > 0.0) {
        return Err(Error::param("s_span", "end and tolerance must be positive"));
    }
    let it = Integrator { ctx, tol };
    let run = it.run([v0, v0p], s_end, &[], usize::MAX)?;
    Ok(FowlerOrbit {
        n: ctx.n,
        v0,
        v0p,
        samples: run.samples,
        energy: energy(ctx, v0, v0p),
        energy_drift: run.drift,
        necksize: None,
        period: None,
        v_max: None,
        blow_up: run.blow_up,
        degenerate: false,
    })
}

/// The periodic orbit through the neck (ε, 0), integrated over one period.
pub fn necksize_orbit(ctx: &DimensionContext, eps: f64, tol: f64) -> Result<FowlerOrbit> {
    let v_star = fixed_point(ctx);
    if !(eps > 0.0 && eps <= v_star) {
        return Err(Error::param("eps", format!("must lie in (0, {v_star}], got {eps}")));
    }
    let e = energy(ctx, eps, 0.0);
    if (v_star - eps) <= 1e-12 * v_star {
        return Ok(FowlerOrbit {
            n: ctx.n,
            v0: eps,
            v0p: 0.0,
            samples: vec![Sample { s: 0.0, v: eps, vp: 0.0 }],
            energy: e,
            energy_drift: 0.0,
            necksize: Some(eps),
            period: None,
            v_max: Some(eps),
            blow_up: None,
            degenerate: true,
        });
    }
    let it = Integrator { ctx, tol };
    // the period grows like ln(1/ε); 200 + 20 ln(1/ε) comfortably covers one round trip
    let s_end = 200.0 + 20.0 * (1.0 / eps).ln();
    let run = it.run([eps, 0.0], s_end, &[Event::Maximum, Event::Minimum], 2)?;
    if run.hits.len() < 2 {
        return Err(Error::Integration(format!("no return to the neck within s = {s_end}")));
    }
    let (_, top) = run.hits[0];
    let (period, bottom) = run.hits[1];
    Ok(FowlerOrbit {
        n: ctx.n,
        v0: eps,
        v0p: 0.0,
        necksize: Some(bottom[0].min(eps)),
        period: Some(period),
        v_max: Some(top[0]),
        energy: e,
        energy_drift: run.drift,
        samples: run.samples,
        blow_up: run.blow_up,
        degenerate: false,
    })
}

/// Larger root of v^q - v² = ε^q - ε² on (v*, 1), the top of the orbit with neck ε.
pub fn turning_point(ctx: &DimensionContext, eps: f64) -> f64 {
    let level = eps.powf(ctx.q) - eps * eps;
    let g = |v: f64| v.powf(ctx.q) - v * v - level;
    let (mut a, mut b) = (fixed_point(ctx), 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if g(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Measured max |v'| with its energy bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeBound {
    pub max_abs_derivative: f64,
    /// sqrt(2 max(0, E + ((n-2)²/8) sup(v² - v^q))), the sup attained at v = v*.
    pub energy_bound: f64,
}

pub fn ode_residual_bounded_derivative(ctx: &DimensionContext, orbit: &FowlerOrbit) -> DerivativeBound {
    let v_star = fixed_point(ctx);
    let c = ctx.half_nm2().powi(2) / 2.0;
    let sup = v_star * v_star - v_star.powf(ctx.q);
    DerivativeBound {
        max_abs_derivative: orbit.max_abs_derivative(),
        energy_bound: (2.0 * (orbit.energy + c * sup).max(0.0)).sqrt(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyRow {
    pub eps: f64,
    pub period: Option<f64>,
    pub v_max: f64,
    pub max_abs_derivative: f64,
    pub energy_drift: f64,
}

/// Necksize family over a grid of ε, in input order.
pub fn necksize_family(ctx: &DimensionContext, eps_grid: &[f64], tol: f64) -> Result<Vec<FamilyRow>> {
    eps_grid
        .par_iter()
        .map(|&eps| {
            let o = necksize_orbit(ctx, eps, tol)?;
            Ok(FamilyRow {
                eps,
                period: o.period,
                v_max: o.v_max.unwrap_or(eps),
                max_abs_derivative: ode_residual_bounded_derivative(ctx, &o).max_abs_derivative,
                energy_drift: o.energy_drift,
            })
        })
        .collect()
}

pub fn family_csv(rows: &[FamilyRow]) -> CsvTable {
    let mut t = CsvTable::new(&["eps", "period", "v_max", "max_abs_vp"]);
    for r in rows {
        t.push_numbers(&[r.eps, r.period.unwrap_or(f64::NAN), r.v_max, r.max_abs_derivative]);
    }
    t
}
