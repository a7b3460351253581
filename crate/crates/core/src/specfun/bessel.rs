use std::f64::consts::PI;

use super::{gamma::rgamma, SeriesControl, TailRule};
use crate::error::{Error, Result};

/// Modified Bessel function of the first kind from its ascending series.
pub fn bessel_i(nu: f64, x: f64, ctrl: &SeriesControl) -> Result<f64> {
    if !(x > 0.0) {
        if x == 0.0 {
            return Ok(if nu == 0.0 { 1.0 } else if nu > 0.0 || nu == nu.floor() { 0.0 } else { f64::INFINITY });
        }
        return Err(Error::domain(format!("bessel_i requires x > 0, got {x}")));
    }
    if nu < 0.0 && nu == nu.floor() {
        return bessel_i(-nu, x, ctrl);
    }
    let q = 0.25 * x * x;
    let mut rule = TailRule::new(ctrl);
    let mut term = (0.5 * x).powf(nu) * rgamma(nu + 1.0);
    for k in 0..ctrl.max_terms {
        let kf = k as f64;
        let ratio = q / ((kf + 1.0) * (nu + kf + 1.0));
        if rule.push(term, ratio.abs() < 1.0) {
            return Ok(rule.sum);
        }
        term *= ratio;
        if !term.is_finite() {
            break;
        }
    }
    Err(Error::convergence(format!("bessel_i({nu}, {x}) series not converged")))
}

/// Modified Bessel function of the second kind, non-integer order.
///
/// Uses K_ν = π/(2 sin πν)·(I₋ν − I_ν) for x ≤ 1. Beyond that the two series
/// cancel catastrophically, so Steed's continued fraction with upward
/// recurrence is used instead.
pub fn bessel_k(nu: f64, x: f64, ctrl: &SeriesControl) -> Result<f64> {
    if (nu - nu.round()).abs() < 1e-6 {
        return Err(Error::domain(format!("bessel_k requires non-integer order, got {nu}")));
    }
    if !(x > 0.0) {
        return Err(Error::domain(format!("bessel_k requires x > 0, got {x}")));
    }
    let nu = nu.abs();
    if x <= 1.0 {
        let d = bessel_i(-nu, x, ctrl)? - bessel_i(nu, x, ctrl)?;
        return Ok(PI / (2.0 * (PI * nu).sin()) * d);
    }
    bessel_k_cf2(nu, x, ctrl)
}

fn bessel_k_cf2(nu: f64, x: f64, ctrl: &SeriesControl) -> Result<f64> {
    let nl = (nu + 0.5).floor();
    let mu = nu - nl;
    let mu2 = mu * mu;
    let xi = 1.0 / x;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - mu2;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    let mut ok = false;
    for i in 1..ctrl.max_terms {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < ctrl.rel_tol {
            ok = true;
            break;
        }
    }
    if !ok {
        return Err(Error::convergence(format!("bessel_k({nu}, {x}) continued fraction not converged")));
    }
    h *= a1;
    let mut k_mu = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let mut k_mu1 = k_mu * (mu + x + 0.5 - h) * xi;
    for i in 1..=(nl as usize) {
        let t = (mu + i as f64) * 2.0 * xi * k_mu1 + k_mu;
        k_mu = k_mu1;
        k_mu1 = t;
    }
    Ok(k_mu)
}
