//! Adaptive Dormand–Prince 5(4) integration for complex first-order systems.

use num_complex::Complex64;

use crate::error::{PdmError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IvpOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl IvpOptions {
    pub fn with_tol(tol: f64) -> Self {
        IvpOptions { rtol: tol, atol: tol, max_steps: 10_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Requested output positions, in integration order.
    pub xs: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
    pub final_x: f64,
    pub final_state: Vec<Complex64>,
    pub steps: usize,
}

impl Trajectory {
    /// Component `c` at every output node.
    pub fn component(&self, c: usize) -> Vec<Complex64> {
        self.states.iter().map(|s| s[c]).collect()
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combo(y: &[Complex64], h: f64, terms: &[(f64, &[Complex64])], out: &mut [Complex64]) {
    for i in 0..y.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, k) in terms {
            acc += k[i] * *c;
        }
        out[i] = y[i] + acc * h;
    }
}

/// Integrates `y' = f(x, y)` from `x_span.0` to `x_span.1` (either direction),
/// recording the state at each of `outputs`, which must be ordered along the
/// direction of integration and lie inside the span.
pub fn integrate_ivp<F>(
    mut f: F,
    y0: &[Complex64],
    x_span: (f64, f64),
    outputs: &[f64],
    opts: IvpOptions,
) -> Result<Trajectory>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let (x0, x_end) = x_span;
    if !(x0.is_finite() && x_end.is_finite()) {
        return Err(PdmError::InvalidParameter("integration span must be finite".into()));
    }
    let dir = if x_end >= x0 { 1.0 } else { -1.0 };
    let lo = x0.min(x_end);
    let hi = x0.max(x_end);
    for w in outputs.windows(2) {
        if (w[1] - w[0]) * dir < 0.0 {
            return Err(PdmError::InvalidParameter("output nodes must follow the integration direction".into()));
        }
    }
    if outputs.iter().any(|&x| x < lo || x > hi) {
        return Err(PdmError::InvalidParameter("output nodes must lie inside the integration span".into()));
    }

    let n = y0.len();
    let mut traj = Trajectory {
        xs: Vec::with_capacity(outputs.len()),
        states: Vec::with_capacity(outputs.len()),
        final_x: x0,
        final_state: y0.to_vec(),
        steps: 0,
    };
    let mut next_out = 0;
    while next_out < outputs.len() && outputs[next_out] == x0 {
        traj.xs.push(x0);
        traj.states.push(y0.to_vec());
        next_out += 1;
    }
    if x0 == x_end {
        return Ok(traj);
    }

    let zero = Complex64::new(0.0, 0.0);
    let mut y = y0.to_vec();
    let mut x = x0;
    let mut k1 = vec![zero; n];
    let mut k2 = vec![zero; n];
    let mut k3 = vec![zero; n];
    let mut k4 = vec![zero; n];
    let mut k5 = vec![zero; n];
    let mut k6 = vec![zero; n];
    let mut k7 = vec![zero; n];
    let mut tmp = vec![zero; n];
    let mut y_new = vec![zero; n];
    f(x, &y, &mut k1);

    let scale_of = |a: &[Complex64], b: &[Complex64], i: usize| opts.atol + opts.rtol * a[i].norm().max(b[i].norm());

    // Initial step from the local derivative scale.
    let d0 = (y.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64).sqrt();
    let d1 = (k1.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64).sqrt();
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(hi - lo).max(1e-12 * (hi - lo));

    let mut steps = 0usize;
    loop {
        let remaining = (x_end - x) * dir;
        if remaining <= 0.0 {
            break;
        }
        // Land exactly on the next output node or the span end.
        let target = if next_out < outputs.len() { outputs[next_out] } else { x_end };
        let to_target = (target - x) * dir;
        let mut hit = false;
        if h >= to_target {
            h = to_target;
            hit = true;
        }
        if h <= 16.0 * f64::EPSILON * x.abs().max(1.0) && !hit {
            return Err(PdmError::StepSizeCollapse { x, h });
        }
        steps += 1;
        if steps > opts.max_steps {
            return Err(PdmError::StepSizeCollapse { x, h });
        }

        let hs = h * dir;
        combo(&y, hs, &[(A21, &k1)], &mut tmp);
        f(x + C2 * hs, &tmp, &mut k2);
        combo(&y, hs, &[(A31, &k1), (A32, &k2)], &mut tmp);
        f(x + C3 * hs, &tmp, &mut k3);
        combo(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)], &mut tmp);
        f(x + C4 * hs, &tmp, &mut k4);
        combo(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], &mut tmp);
        f(x + C5 * hs, &tmp, &mut k5);
        combo(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], &mut tmp);
        f(x + hs, &tmp, &mut k6);
        combo(&y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], &mut y_new);
        let x_new = if hit { target } else { x + hs };
        f(x_new, &y_new, &mut k7);

        let mut err = 0.0;
        for i in 0..n {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * hs;
            let r = e.norm() / scale_of(&y, &y_new, i);
            err += r * r;
        }
        let err = (err / n as f64).sqrt();
        if !err.is_finite() {
            return Err(PdmError::StepSizeCollapse { x, h });
        }

        if err <= 1.0 {
            x = x_new;
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);
            if hit && next_out < outputs.len() {
                while next_out < outputs.len() && outputs[next_out] == target {
                    traj.xs.push(target);
                    traj.states.push(y.clone());
                    next_out += 1;
                }
            }
            if hit && target == x_end {
                break;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
    }
    traj.final_x = x;
    traj.final_state = y;
    traj.steps = steps;
    Ok(traj)
}
