//! Shifted Grünwald–Letnikov (weighted and shifted, second order) in space
//! and Crank–Nicolson in time for u_t = K ∂^α u/∂|x|^α, u = 0 at both ends.

use nalgebra::{DMatrix, DVector};

use super::mol::MOLProblem;
use crate::error::{Error, Result};
use crate::fracops::riesz_coefficient;

/// Successive grids must agree to this at the final time.
pub const REFINE_TOL: f64 = 1e-3;
const MAX_LEVELS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct FdResult {
    /// Grid points including both ends.
    pub grid: Vec<f64>,
    pub times: Vec<f64>,
    /// Full profiles (boundary zeros included), one per output time.
    pub values: Vec<Vec<f64>>,
    /// Max difference between the last two grids at the final time.
    pub last_change: f64,
    pub levels: usize,
}

impl FdResult {
    /// Piecewise-linear interpolation of the profile at output `k`.
    pub fn sample(&self, k: usize, x: f64) -> f64 {
        let g = &self.grid;
        let h = g[1] - g[0];
        let n = g.len() - 1;
        let s = ((x - g[0]) / h).clamp(0.0, n as f64);
        let i = (s.floor() as usize).min(n - 1);
        let w = s - i as f64;
        (1.0 - w) * self.values[k][i] + w * self.values[k][i + 1]
    }
}

fn wsgd_weights(alpha: f64, len: usize) -> Vec<f64> {
    let mut g = vec![1.0; len];
    for k in 1..len {
        g[k] = g[k - 1] * (1.0 - (alpha + 1.0) / k as f64);
    }
    let (l1, l2) = (0.5 * alpha, 0.5 * (2.0 - alpha));
    (0..len).map(|k| l1 * g[k] + if k > 0 { l2 * g[k - 1] } else { 0.0 }).collect()
}

/// One run on `grid_n` intervals with `time_steps` steps over the horizon.
pub fn gl_fd_oracle(p: &MOLProblem, grid_n: usize, time_steps: usize) -> Result<FdResult> {
    p.validate()?;
    if grid_n < 2 || time_steps == 0 {
        return Err(Error::param("grid_n must be at least 2 and time_steps positive"));
    }
    let alpha = p.alpha;
    let h = p.length / grid_n as f64;
    let grid: Vec<f64> = (0..=grid_n).map(|i| p.length * i as f64 / grid_n as f64).collect();
    let m = grid_n - 1;
    let w = wsgd_weights(alpha, m + 2);
    let ha = h.powf(-alpha);
    // left operator, interior nodes; index i − j + 1 of the shifted weights
    let dl = DMatrix::from_fn(m, m, |i, j| if j <= i + 1 { w[i + 1 - j] * ha } else { 0.0 });
    let rz = (&dl + dl.transpose()) * (-riesz_coefficient(alpha)?);
    let a = rz * p.dispersion;
    let mut u = DVector::from_iterator(m, grid[1..grid_n].iter().map(|&x| p.amplitude * p.u0.eval(x, p.length)));
    let times = p.times();
    let dt_nominal = if p.horizon > 0.0 { p.horizon / time_steps as f64 } else { 1.0 };
    let id = DMatrix::<f64>::identity(m, m);
    let mut t = 0.0;
    let mut values = Vec::with_capacity(times.len());
    let mut cache: Option<(f64, DMatrix<f64>)> = None;
    for &target in &times {
        let span = target - t;
        if span > 0.0 {
            let steps = (span / dt_nominal - 1e-9).ceil().max(1.0) as usize;
            let dt = span / steps as f64;
            let prop = match &cache {
                Some((d, pm)) if *d == dt => pm.clone(),
                _ => {
                    let lhs = &id - &a * (0.5 * dt);
                    let rhs = &id + &a * (0.5 * dt);
                    let pm = lhs.lu().solve(&rhs).ok_or(Error::SingularMatrix)?;
                    cache = Some((dt, pm.clone()));
                    pm
                }
            };
            for _ in 0..steps {
                u = &prop * &u;
            }
            t = target;
        }
        let mut full = Vec::with_capacity(grid_n + 1);
        full.push(0.0);
        full.extend(u.iter().copied());
        full.push(0.0);
        values.push(full);
    }
    Ok(FdResult { grid, times, values, last_change: f64::NAN, levels: 1 })
}

/// Doubles grid and time steps until successive final profiles agree at the
/// coarse nodes to `REFINE_TOL`.
pub fn gl_fd_solve(p: &MOLProblem, grid_n: usize, time_steps: usize) -> Result<FdResult> {
    let mut prev = gl_fd_oracle(p, grid_n, time_steps)?;
    let (mut n, mut s) = (grid_n, time_steps);
    let mut last_change = f64::INFINITY;
    for level in 2..=MAX_LEVELS {
        n *= 2;
        s *= 2;
        let mut next = gl_fd_oracle(p, n, s)?;
        let k = next.times.len() - 1;
        let pv = &prev.values[k];
        let nv = &next.values[k];
        last_change = (0..pv.len()).map(|i| (pv[i] - nv[2 * i]).abs()).fold(0.0, f64::max);
        next.last_change = last_change;
        next.levels = level;
        if last_change <= REFINE_TOL {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NonConvergence(format!(
        "finite-difference grids still differ by {last_change:.3e} after {MAX_LEVELS} levels"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_zero() {
        // Σ g_k = 0 for the Grünwald weights, hence also for the shifted combination
        let w = wsgd_weights(1.6, 20000);
        let s: f64 = w.iter().sum();
        assert!(s.abs() < 1e-4, "{s}");
    }
}
