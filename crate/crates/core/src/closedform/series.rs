//! Analytically continued integrals ∫ v^P (1−v)^C w(v) dv on sub-intervals of
//! [0, 1], with w ∈ {1, ln v, ln(1−v)}. Every closed form of the power-term
//! engine reduces to these.

use crate::error::{Error, Result};
use crate::specfun::{SeriesControl, TailRule};

/// A partial result: value, Σ|terms| (for the cancellation guard), terms summed.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Val {
    pub v: f64,
    pub mag: f64,
    pub terms: usize,
}

impl Val {
    pub fn exact(v: f64) -> Self {
        Val { v, mag: v.abs(), terms: 1 }
    }

    pub fn scale(self, f: f64) -> Self {
        Val { v: self.v * f, mag: self.mag * f.abs(), terms: self.terms }
    }
}

impl std::ops::Add for Val {
    type Output = Val;
    fn add(self, o: Val) -> Val {
        Val { v: self.v + o.v, mag: self.mag + o.mag, terms: self.terms + o.terms }
    }
}

impl std::ops::Sub for Val {
    type Output = Val;
    fn sub(self, o: Val) -> Val {
        Val { v: self.v - o.v, mag: self.mag + o.mag, terms: self.terms + o.terms }
    }
}

impl std::iter::Sum for Val {
    fn sum<I: Iterator<Item = Val>>(it: I) -> Val {
        it.fold(Val::default(), |a, b| a + b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Weight {
    One,
    LnV,
    Ln1mV,
}

impl Weight {
    fn reflected(self) -> Weight {
        match self {
            Weight::One => Weight::One,
            Weight::LnV => Weight::Ln1mV,
            Weight::Ln1mV => Weight::LnV,
        }
    }
}

const RESONANCE: f64 = 1e-13;

fn near_nonpositive_int(x: f64) -> bool {
    x < 0.5 && (x - x.round()).abs() < RESONANCE
}

/// ∫ v^q dv and ∫ v^q ln v dv, with the logarithmic cases at q = −1.
fn prim(q: f64, log: bool, z: f64) -> f64 {
    let e = q + 1.0;
    let lz = z.ln();
    if e.abs() < RESONANCE {
        if log {
            0.5 * lz * lz
        } else {
            lz
        }
    } else {
        let ze = z.powf(e);
        if log {
            ze * (lz / e - 1.0 / (e * e))
        } else {
            ze / e
        }
    }
}

/// Termwise antiderivative from the expansion of (1−v)^C about v = 0.
fn natural(p: f64, c: f64, w: Weight, z: f64, ctrl: &SeriesControl) -> Result<Val> {
    // g_k: coefficients of (1−v)^C; h_k: of (1−v)^C ln(1−v)
    let mut g = 1.0;
    let mut h = 0.0;
    let mut rule = TailRule::new(ctrl);
    let mut mag = 0.0;
    for k in 0..ctrl.max_terms {
        let kf = k as f64;
        let term = match w {
            Weight::One => g * prim(p + kf, false, z),
            Weight::LnV => g * prim(p + kf, true, z),
            Weight::Ln1mV => h * prim(p + kf, false, z),
        };
        mag += term.abs();
        let shrinking = kf > c.abs() + 2.0 && p + kf + 1.0 > 0.0;
        if rule.push(term, shrinking) {
            return Ok(Val { v: rule.sum, mag, terms: rule.terms });
        }
        h = ((kf - c) * h - g) / (kf + 1.0);
        g *= (kf - c) / (kf + 1.0);
        if !term.is_finite() {
            break;
        }
    }
    Err(Error::convergence(format!("power-term series (P={p}, C={c}) at {z} not converged")))
}

/// z^(P+1) (1−z)^(C+1)/(P+1) · ₂F₁(P+C+2, 1; P+2; z): same antiderivative,
/// positive terms when C is large.
fn hyp_form(p: f64, c: f64, z: f64, ctrl: &SeriesControl) -> Result<Val> {
    let a = p + c + 2.0;
    let b = p + 2.0;
    let pre = z.powf(p + 1.0) * (1.0 - z).powf(c + 1.0) / (p + 1.0);
    let mut term: f64 = 1.0;
    let mut rule = TailRule::new(ctrl);
    let mut mag = 0.0;
    for k in 0..ctrl.max_terms {
        let kf = k as f64;
        mag += term.abs();
        let ratio = (a + kf) / (b + kf) * z;
        if rule.push(term, ratio.abs() < 1.0 && b + kf > 0.0) {
            return Ok(Val { v: pre * rule.sum, mag: (pre * mag).abs(), terms: rule.terms });
        }
        term *= ratio;
        if !term.is_finite() {
            break;
        }
    }
    Err(Error::convergence(format!("incomplete-beta series (P={p}, C={c}) at {z} not converged")))
}

/// The continued antiderivative at z, zero at the origin.
pub(crate) fn antider(p: f64, c: f64, w: Weight, z: f64, ctrl: &SeriesControl) -> Result<Val> {
    if z == 0.0 {
        return Ok(Val::default());
    }
    if w == Weight::One && c > 2.0 && !near_nonpositive_int(p + 1.0) {
        hyp_form(p, c, z, ctrl)
    } else {
        natural(p, c, w, z, ctrl)
    }
}

/// Continued ∫_{z1}^{z2} v^P (1−v)^C w(v) dv for 0 ≤ z1 < z2 ≤ 1.
pub(crate) fn integral(p: f64, c: f64, w: Weight, z1: f64, z2: f64, ctrl: &SeriesControl) -> Result<Val> {
    if z2 <= 0.5 {
        Ok(antider(p, c, w, z2, ctrl)? - antider(p, c, w, z1, ctrl)?)
    } else if z1 >= 0.5 {
        integral(c, p, w.reflected(), 1.0 - z2, 1.0 - z1, ctrl)
    } else {
        Ok(integral(p, c, w, z1, 0.5, ctrl)? + integral(p, c, w, 0.5, z2, ctrl)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::beta_fn;

    fn c() -> SeriesControl {
        SeriesControl::default()
    }

    #[test]
    fn complete_beta() {
        let v = integral(1.5, 0.3, Weight::One, 0.0, 1.0, &c()).unwrap();
        assert!((v.v - beta_fn(2.5, 1.3).unwrap()).abs() < 1e-14);
        // continued in the (1−v) exponent: B(2.5, −0.4)
        let v = integral(1.5, -1.4, Weight::One, 0.0, 1.0, &c()).unwrap();
        assert!((v.v / beta_fn(2.5, -0.4).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn large_exponent_stable() {
        let v = integral(0.4, 60.0, Weight::One, 0.0, 1.0, &c()).unwrap();
        assert!((v.v / beta_fn(1.4, 61.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_weights() {
        // ∫₀¹ v^2 ln v dv = −1/9, ∫₀¹ v ln(1−v) dv = −3/4
        let a = integral(2.0, 0.0, Weight::LnV, 0.0, 1.0, &c()).unwrap();
        assert!((a.v + 1.0 / 9.0).abs() < 1e-14);
        let b = integral(1.0, 0.0, Weight::Ln1mV, 0.0, 1.0, &c()).unwrap();
        assert!((b.v + 0.75).abs() < 1e-14);
    }

    #[test]
    fn resonant_power() {
        // ∫_{0.2}^{0.4} v^-1 (1−v) dv = ln 2 − 0.2
        let a = integral(-1.0, 1.0, Weight::One, 0.2, 0.4, &c()).unwrap();
        assert!((a.v - (2f64.ln() - 0.2)).abs() < 1e-15);
    }
}
