//! Dormand–Prince 5(4) with FSAL and standard step-size control.

use crate::error::{Error, Result};

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RkControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for RkControl {
    fn default() -> Self {
        RkControl { rtol: 1e-8, atol: 1e-10, max_steps: 1_000_000 }
    }
}

/// Integrates the autonomous system y' = f(y) from t = 0 and records y at each output time
/// (non-decreasing). Returns the states and the number of accepted steps.
pub fn dopri5(
    f: &dyn Fn(&[f64], &mut [f64]),
    y0: &[f64],
    out_times: &[f64],
    ctrl: &RkControl,
) -> Result<(Vec<Vec<f64>>, usize)> {
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = 0.0;
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    f(&y, &mut k[0]);
    let t_end = out_times.iter().copied().fold(0.0, f64::max);
    let mut h = initial_step(&y, &k[0], t_end, ctrl);
    let mut out = Vec::with_capacity(out_times.len());
    let mut next = 0;
    let mut steps = 0;
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    while next < out_times.len() {
        if out_times[next] <= t {
            out.push(y.clone());
            next += 1;
            continue;
        }
        if steps >= ctrl.max_steps || h <= 1e-14 * t.abs().max(1e-3) {
            return Err(Error::StepSizeUnderflow { t });
        }
        let target = out_times[next];
        let hit = t + h >= target;
        let hs = if hit { target - t } else { h };
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, a) in A[s][..s].iter().enumerate() {
                    acc += hs * a * k[j][i];
                }
                tmp[i] = acc;
            }
            f(&tmp, &mut k[s]);
            if s == 6 {
                y_new.copy_from_slice(&tmp);
            }
        }
        let mut err = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for (j, w) in E.iter().enumerate() {
                e += w * k[j][i];
            }
            let sc = ctrl.atol + ctrl.rtol * y[i].abs().max(y_new[i].abs());
            err += (hs * e / sc).powi(2);
        }
        let err = (err / n.max(1) as f64).sqrt();
        if !err.is_finite() {
            h *= 0.1;
            continue;
        }
        if err <= 1.0 {
            t = if hit { target } else { t + hs };
            y.copy_from_slice(&y_new);
            k.swap(0, 6);
            steps += 1;
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        if err <= 1.0 && hit {
            // keep the unclipped step size for the next interval
            h = h.max(hs * fac);
        } else {
            h = hs * fac;
        }
    }
    Ok((out, steps))
}

fn initial_step(y: &[f64], f0: &[f64], t_end: f64, ctrl: &RkControl) -> f64 {
    let n = y.len().max(1) as f64;
    let d0 = (y.iter().map(|v| (v / (ctrl.atol + ctrl.rtol * v.abs())).powi(2)).sum::<f64>() / n).sqrt();
    let d1 = (y.iter().zip(f0).map(|(v, d)| (d / (ctrl.atol + ctrl.rtol * v.abs())).powi(2)).sum::<f64>() / n).sqrt();
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(t_end.max(1e-12))
}
