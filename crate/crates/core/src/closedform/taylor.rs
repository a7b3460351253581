//! Gaussian and multiquadric profiles: hypergeometric forms from a zero base,
//! Taylor expansions about the base or the evaluation point otherwise.

use super::power::Kind;
use super::series::Val;
use crate::error::{Error, Result};
use crate::rbf::{FamilyTag, RBFFamily};
use crate::specfun::{gamma_ratio, hyp_pfq_sum, pochhammer, rgamma, SeriesControl, TailRule};

/// Scaled Taylor coefficients q_j = φ^(j)(x0)/j! · h^j.
struct Stream {
    gauss: bool,
    hb: f64,
    x0: f64,
    a: f64,
    h: f64,
    prev: f64,
    cur: f64,
    j: usize,
}

impl Stream {
    fn new(family: &RBFFamily, x0: f64, h: f64) -> Self {
        let gauss = family.tag == FamilyTag::Gaussian;
        let a = 1.0 + 0.5 * x0 * x0;
        let hb = 0.5 * family.param;
        let q0 = if gauss { (-0.5 * x0 * x0).exp() } else { a.powf(hb) };
        Stream { gauss, hb, x0, a, h, prev: 0.0, cur: q0, j: 0 }
    }

    fn next(&mut self) -> f64 {
        let out = self.cur;
        let jf = self.j as f64;
        let (h, x0) = (self.h, self.x0);
        let nxt = if self.gauss {
            // φ' = −tφ
            -(x0 * h * self.cur + h * h * self.prev) / (jf + 1.0)
        } else {
            // (1 + t²/2) φ' = (β/2) t φ
            (self.hb * (x0 * h * self.cur + h * h * self.prev)
                - x0 * jf * h * self.cur
                - 0.5 * (jf - 1.0) * h * h * self.prev)
                / (self.a * (jf + 1.0))
        };
        self.prev = self.cur;
        self.cur = nxt;
        self.j += 1;
        out
    }
}

/// Left operator of an analytic profile from A to Z (A < Z, A ≠ 0).
pub(crate) fn taylor_op(
    family: &RBFFamily,
    kind: Kind,
    alpha: f64,
    a: f64,
    z: f64,
    ctrl: &SeriesControl,
) -> Result<Val> {
    let s = z - a;
    let gauss = family.tag == FamilyTag::Gaussian;
    let at_base = if gauss {
        a.abs() <= z.abs()
    } else {
        let ra = s / (a * a + 2.0).sqrt();
        let rz = s / (z * z + 2.0).sqrt();
        if ra.min(rz) >= 0.95 {
            return Err(Error::convergence(format!(
                "multiquadric expansion over [{a}, {z}] lies outside its disk of convergence"
            )));
        }
        ra <= rz
    };
    let x0 = if at_base { a } else { z };
    let k0 = if gauss { 2.0 * (x0.abs() * s + s * s) + 4.0 } else { 4.0 + family.param.abs() };
    let m = alpha.ceil() as usize;
    let mut st = Stream::new(family, x0, s);
    let mut rule = TailRule::new(ctrl);
    let mut mag = 0.0;

    let (g, skip) = match kind {
        Kind::Int => (alpha, 0),
        Kind::Der => (-alpha, 0),
        Kind::Cap => (if at_base { -alpha } else { m as f64 - alpha }, m),
    };
    for _ in 0..skip {
        st.next();
    }
    // ρ_k = Γ(k+1)/Γ(k+γ+1) for the base expansion
    let mut rho = rgamma(g + 1.0);
    for k in 0..skip {
        rho *= (k as f64 + 1.0) / (k as f64 + g + 1.0);
    }
    for k in skip..ctrl.max_terms {
        let kf = k as f64;
        let q = st.next();
        let term = if at_base {
            let t = q * rho;
            rho *= (kf + 1.0) / (kf + g + 1.0);
            t
        } else {
            let i = (k - skip) as f64;
            let sign = if (k - skip).is_multiple_of(2) { 1.0 } else { -1.0 };
            let f = if skip > 0 { crate::specfun::falling(kf, m) } else { 1.0 };
            q * f * sign / (i + g)
        };
        mag += term.abs();
        if rule.push(term, kf > k0) {
            let pre = if at_base {
                s.powf(g)
            } else if skip > 0 {
                s.powf(-alpha) * rgamma(g)
            } else {
                s.powf(g) * rgamma(g)
            };
            return Ok(Val { v: rule.sum * pre, mag: mag * pre.abs(), terms: rule.terms });
        }
        if !term.is_finite() {
            break;
        }
    }
    Err(Error::convergence(format!("Taylor series over [{a}, {z}] not converged")))
}

/// Zero base: x^γ/Γ(1+γ)·F₂₂(1/2, 1; (1+γ)/2, (2+γ)/2; −x²/2) for the
/// Gaussian, the F₃₂ with extra upper −β/2 for the multiquadric.
pub(crate) fn zero_base_op(family: &RBFFamily, kind: Kind, alpha: f64, x: f64, ctrl: &SeriesControl) -> Result<Val> {
    let gauss = family.tag == FamilyTag::Gaussian;
    let g = if kind == Kind::Int { alpha } else { -alpha };
    let mut upper = vec![0.5, 1.0];
    if !gauss {
        upper.push(-0.5 * family.param);
    }
    let lower = [0.5 * (1.0 + g), 0.5 * (2.0 + g)];
    let sum = hyp_pfq_sum(&upper, &lower, -0.5 * x * x, ctrl)?;
    let pre = x.powf(g) * rgamma(1.0 + g);
    let mut v = Val { v: pre * sum.value, mag: (pre * sum.max_term).abs() * 4.0, terms: sum.terms };
    if kind == Kind::Cap {
        // drop the monomials t^(2k) with 2k < m, which Caputo annihilates
        let m = alpha.ceil() as usize;
        for k in 0..m.div_ceil(2) {
            let mut c = (-0.5f64).powi(k as i32) / (1..=k).product::<usize>() as f64;
            if !gauss {
                c *= pochhammer(-0.5 * family.param, k);
            }
            let p = 2.0 * k as f64;
            let t = c * gamma_ratio(p + 1.0, p + 1.0 - alpha)? * x.powf(p - alpha);
            v = v - Val::exact(t);
        }
    }
    Ok(v)
}
