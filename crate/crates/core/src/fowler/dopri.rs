//! Dormand–Prince 5(4) step for a planar autonomous system (the nodes c_i are not needed).

pub type State = [f64; 2];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Difference between the 5th- and 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One step of size h from y (with f0 = f(y)). Returns (y_new, f(y_new), error estimate).
pub fn step(f: &impl Fn(&State) -> State, y: &State, f0: &State, h: f64) -> (State, State, State) {
    let mut k = [[0.0; 2]; 7];
    k[0] = *f0;
    for i in 1..7 {
        let mut yi = *y;
        for (j, kj) in k.iter().enumerate().take(i) {
            yi[0] += h * A[i][j] * kj[0];
            yi[1] += h * A[i][j] * kj[1];
        }
        k[i] = f(&yi);
    }
    let mut y_new = *y;
    for (j, kj) in k.iter().enumerate().take(6) {
        y_new[0] += h * A[6][j] * kj[0];
        y_new[1] += h * A[6][j] * kj[1];
    }
    // First-same-as-last: stage 7 is evaluated at y_new.
    let f_new = k[6];
    let mut err = [0.0; 2];
    for (j, kj) in k.iter().enumerate() {
        err[0] += h * E[j] * kj[0];
        err[1] += h * E[j] * kj[1];
    }
    (y_new, f_new, err)
}

/// Cubic Hermite interpolant of one component on [0, h] at fraction t.
pub fn hermite(y0: f64, d0: f64, y1: f64, d1: f64, h: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * h * d0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * h * d1
}
