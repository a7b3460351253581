use super::{beta_fn, SeriesControl, SeriesSum, TailRule};
use crate::error::{Error, Result};

fn nonpositive_int(x: f64) -> Option<usize> {
    if x <= 0.0 && x == x.floor() {
        Some((-x) as usize)
    } else {
        None
    }
}

/// Generalized hypergeometric series pFq(upper; lower; x).
pub fn hyp_pfq(upper: &[f64], lower: &[f64], x: f64, ctrl: &SeriesControl) -> Result<f64> {
    hyp_pfq_sum(upper, lower, x, ctrl).map(|s| s.value)
}

/// As [`hyp_pfq`], also reporting term count and the largest term.
pub fn hyp_pfq_sum(upper: &[f64], lower: &[f64], x: f64, ctrl: &SeriesControl) -> Result<SeriesSum> {
    if let Some(b) = lower.iter().find(|b| nonpositive_int(**b).is_some()) {
        return Err(Error::param(format!("lower parameter {b} is a non-positive integer")));
    }
    if x == 0.0 {
        return Ok(SeriesSum { value: 1.0, terms: 1, converged: true, max_term: 1.0 });
    }
    let stop_at = upper.iter().filter_map(|a| nonpositive_int(*a)).min();
    let (p, q) = (upper.len(), lower.len());
    if stop_at.is_none() {
        if p > q + 1 {
            return Err(Error::convergence(format!("{p}F{q} diverges for x != 0")));
        }
        if p == q + 1 && x.abs() >= 1.0 {
            return Err(Error::convergence(format!("{p}F{q} requires |x| < 1, got {x}")));
        }
    }

    let mut rule = TailRule::new(ctrl);
    let mut term = 1.0;
    for k in 0..ctrl.max_terms {
        let kf = k as f64;
        let num: f64 = upper.iter().map(|a| a + kf).product();
        let den: f64 = lower.iter().map(|b| b + kf).product();
        let ratio = num / den * x / (kf + 1.0);
        let done = rule.push(term, ratio.abs() < 1.0);
        if stop_at == Some(k) || ratio == 0.0 {
            return Ok(rule.finish(true));
        }
        if done {
            return Ok(rule.finish(true));
        }
        term *= ratio;
        if !term.is_finite() {
            return Err(Error::convergence("hypergeometric term overflow"));
        }
    }
    Err(Error::convergence(format!("{p}F{q} at x = {x} not converged after {} terms", ctrl.max_terms)))
}

/// Lower incomplete Beta function b(α, β; x) = ∫₀ˣ t^(α-1) (1-t)^(β-1) dt.
pub fn lower_incomplete_beta(alpha: f64, beta: f64, x: f64, ctrl: &SeriesControl) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::domain(format!("incomplete Beta requires alpha > 0, got {alpha}")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("incomplete Beta requires 0 <= x <= 1, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let direct = |a: f64, b: f64, z: f64| -> Result<f64> {
        Ok(z.powf(a) / a * hyp_pfq(&[a, 1.0 - b], &[a + 1.0], z, ctrl)?)
    };
    if x == 1.0 {
        if nonpositive_int(1.0 - beta).is_some() {
            return direct(alpha, beta, 1.0);
        }
        if !(beta > 0.0) {
            return Err(Error::domain(format!("complete Beta diverges for beta = {beta}")));
        }
        return beta_fn(alpha, beta);
    }
    if x > 0.5 && beta > 0.0 {
        // reflect so the series argument stays below 1/2
        return Ok(beta_fn(alpha, beta)? - direct(beta, alpha, 1.0 - x)?);
    }
    direct(alpha, beta, x)
}
