//! Operators on sums of power terms c·t^p (optionally ·ln t), t > 0. Used for
//! the powers, thin-plate and Matérn profiles, whose even extensions are
//! handled by reflecting or splitting the span at the origin.

use std::f64::consts::PI;

use super::series::{antider, integral, Val, Weight};
use crate::error::{Error, Result};
use crate::rbf::{FamilyTag, RBFFamily};
use crate::specfun::{digamma_over_gamma, digamma_unchecked, falling, falling_dx, gamma_fn, gamma_ratio, rgamma};
use crate::specfun::{SeriesControl, TailRule};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Term {
    pub coef: f64,
    pub p: f64,
    pub log: bool,
}

/// Left-sided operator kinds; right-sided ones are reached by reflection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kind {
    Int,
    Der,
    Cap,
}

/// Where the span [A, Z] of a left operator sits relative to the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Geo {
    /// 0 ≤ a < x: left operator from a.
    Left { a: f64, x: f64 },
    /// 0 ≤ x < b: the mirrored span, a right operator up to b.
    Right { x: f64, b: f64 },
    /// A < 0 < Z: near part [0, z], far part of length l on the other side.
    Split { z: f64, l: f64 },
}

pub(crate) fn geometry(a: f64, z: f64) -> Geo {
    if a >= 0.0 {
        Geo::Left { a, x: z }
    } else if z <= 0.0 {
        Geo::Right { x: -z, b: -a }
    } else {
        Geo::Split { z, l: -a }
    }
}

fn weight_pair(t: &Term) -> bool {
    t.log
}

/// (1/Γ(γ)) ∫_a^x (x−τ)^(γ−1) τ^p [ln τ] dτ, continued in γ.
fn left_pos(g: f64, t: &Term, a: f64, x: f64, ctrl: &SeriesControl) -> Result<Val> {
    let p = t.p;
    if a == 0.0 {
        if !(p > -1.0) {
            return Err(Error::domain(format!("t^{p} is not integrable at the base point 0")));
        }
        let xp = x.powf(g + p);
        let v = if weight_pair(t) {
            let q = g + p + 1.0;
            gamma_fn(p + 1.0)?
                * xp
                * ((x.ln() + digamma_unchecked(p + 1.0)) * rgamma(q) - digamma_over_gamma(q))
        } else {
            gamma_ratio(p + 1.0, g + p + 1.0)? * xp
        };
        return Ok(Val::exact(v).scale(t.coef));
    }
    let r = a / x;
    let pre = x.powf(g + p) * rgamma(g);
    let one = integral(p, g - 1.0, Weight::One, r, 1.0, ctrl)?;
    let body = if weight_pair(t) {
        one.scale(x.ln()) + integral(p, g - 1.0, Weight::LnV, r, 1.0, ctrl)?
    } else {
        one
    };
    Ok(body.scale(pre * t.coef))
}

/// (1/Γ(γ)) ∫_x^b (τ−x)^(γ−1) τ^p [ln τ] dτ, continued in γ.
fn right_pos(g: f64, t: &Term, x: f64, b: f64, ctrl: &SeriesControl) -> Result<Val> {
    let p = t.p;
    if x == 0.0 {
        let q = g + p;
        if !(q > 0.0) {
            return Err(Error::domain(format!("right operator of t^{p} diverges at 0")));
        }
        let bq = b.powf(q);
        let v = if weight_pair(t) { bq * (b.ln() / q - 1.0 / (q * q)) } else { bq / q };
        return Ok(Val::exact(v * rgamma(g) * t.coef));
    }
    let r = x / b;
    let pp = -g - p - 1.0;
    let pre = x.powf(g + p) * rgamma(g);
    let one = integral(pp, g - 1.0, Weight::One, r, 1.0, ctrl)?;
    let body = if weight_pair(t) {
        one.scale(x.ln()) - integral(pp, g - 1.0, Weight::LnV, r, 1.0, ctrl)?
    } else {
        one
    };
    Ok(body.scale(pre * t.coef))
}

/// (1/Γ(γ)) ∫_0^l (z+u)^(γ−1) u^p [ln u] du, z > 0.
fn far(g: f64, t: &Term, z: f64, l: f64, ctrl: &SeriesControl) -> Result<Val> {
    let p = t.p;
    if !(p > -1.0) {
        return Err(Error::domain(format!("t^{p} is not integrable across the origin")));
    }
    // u = z v/(1−v) on v ≤ 3/4, i.e. u ≤ 3z
    let c = -g - p - 1.0;
    let big_u = l / (z + l);
    let v_end = big_u.min(0.75);
    let mut near = antider(p, c, Weight::One, v_end, ctrl)?;
    if t.log {
        near = near.scale(z.ln()) + antider(p, c, Weight::LnV, v_end, ctrl)?
            - antider(p, c, Weight::Ln1mV, v_end, ctrl)?;
    }
    let mut acc = near.scale(z.powf(g + p));
    if l > 3.0 * z {
        // (z+u)^(γ−1) = Σ_j C(γ−1, j) z^j u^(γ−1−j), z/u ≤ 1/3
        let lo = 3.0 * z;
        let mut binom = 1.0;
        let mut zj = 1.0;
        let mut rule = TailRule::new(ctrl);
        let mut mag = 0.0;
        let mut done = false;
        for j in 0..ctrl.max_terms {
            let jf = j as f64;
            let q = g - 1.0 - jf + p;
            let span = prim_u(q, t.log, l) - prim_u(q, t.log, lo);
            let term = binom * zj * span;
            mag += term.abs();
            if rule.push(term, jf > (g - 1.0).abs() + 2.0) {
                done = true;
                break;
            }
            binom *= (g - 1.0 - jf) / (jf + 1.0);
            zj *= z;
        }
        if !done {
            return Err(Error::convergence("far-side binomial series not converged"));
        }
        acc = acc + Val { v: rule.sum, mag, terms: rule.terms };
    }
    Ok(acc.scale(rgamma(g) * t.coef))
}

fn prim_u(q: f64, log: bool, u: f64) -> f64 {
    let e = q + 1.0;
    let lu = u.ln();
    if e.abs() < 1e-13 {
        if log {
            0.5 * lu * lu
        } else {
            lu
        }
    } else if log {
        u.powf(e) * (lu / e - 1.0 / (e * e))
    } else {
        u.powf(e) / e
    }
}

/// Terms of the m-th derivative of c·t^p [ln t].
fn derivative_terms(t: &Term, m: usize) -> Vec<Term> {
    let mut out = Vec::with_capacity(2);
    let f = falling(t.p, m);
    if f != 0.0 {
        out.push(Term { coef: t.coef * f, p: t.p - m as f64, log: t.log });
    }
    if t.log {
        let fd = falling_dx(t.p, m);
        if fd != 0.0 {
            out.push(Term { coef: t.coef * fd, p: t.p - m as f64, log: false });
        }
    }
    out
}

fn raw(g: f64, geo: Geo, t: &Term, far_sign: f64, ctrl: &SeriesControl) -> Result<Val> {
    match geo {
        Geo::Left { a, x } => left_pos(g, t, a, x, ctrl),
        Geo::Right { x, b } => Ok(right_pos(g, t, x, b, ctrl)?.scale(far_sign)),
        Geo::Split { z, l } => Ok(left_pos(g, t, 0.0, z, ctrl)? + far(g, t, z, l, ctrl)?.scale(far_sign)),
    }
}

pub(crate) fn op_on_term(kind: Kind, alpha: f64, geo: Geo, t: &Term, ctrl: &SeriesControl) -> Result<Val> {
    match kind {
        Kind::Int => raw(alpha, geo, t, 1.0, ctrl),
        Kind::Der => raw(-alpha, geo, t, 1.0, ctrl),
        Kind::Cap => {
            let m = alpha.ceil() as usize;
            // the m-th derivative of an even profile is (−1)^m-symmetric
            let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
            let mut acc = Val::default();
            for dt in derivative_terms(t, m) {
                acc = acc + raw(m as f64 - alpha, geo, &dt, sign, ctrl)?;
            }
            Ok(acc)
        }
    }
}

/// Matérn coefficients: t^ν K_ν(t) = Σ_k (A_k t^(2k) + B_k t^(2ν+2k)).
pub(crate) fn matern_terms(nu: f64, k: usize) -> [Term; 2] {
    let kf = k as f64;
    let pref = PI / (2.0 * (PI * nu).sin());
    let mut fk = 1.0;
    for j in 1..=k {
        fk *= j as f64;
    }
    let q = 0.25f64.powi(k as i32) / fk;
    [
        Term { coef: pref * 2f64.powf(nu) * q * rgamma(kf + 1.0 - nu), p: 2.0 * kf, log: false },
        Term { coef: -pref * 2f64.powf(-nu) * q * rgamma(kf + 1.0 + nu), p: 2.0 * nu + 2.0 * kf, log: false },
    ]
}

/// Left operator of the profile from A to Z (A < Z), any position of 0.
pub(crate) fn apply_profile(
    family: &RBFFamily,
    kind: Kind,
    alpha: f64,
    a: f64,
    z: f64,
    ctrl: &SeriesControl,
) -> Result<Val> {
    let geo = geometry(a, z);
    match family.tag {
        FamilyTag::Powers => op_on_term(kind, alpha, geo, &Term { coef: 1.0, p: family.param, log: false }, ctrl),
        FamilyTag::ThinPlate => {
            op_on_term(kind, alpha, geo, &Term { coef: 1.0, p: 2.0 * family.param, log: true }, ctrl)
        }
        FamilyTag::Matern => {
            let extent = a.abs().max(z.abs());
            let mut rule = TailRule::new(ctrl);
            let mut acc = Val::default();
            for k in 0..ctrl.max_terms {
                let [t1, t2] = matern_terms(family.param, k);
                let pair = op_on_term(kind, alpha, geo, &t1, ctrl)? + op_on_term(kind, alpha, geo, &t2, ctrl)?;
                acc = Val { v: acc.v, mag: acc.mag + pair.mag, terms: acc.terms + pair.terms };
                if rule.push(pair.v, k as f64 > 0.5 * extent + 2.0) {
                    return Ok(Val { v: rule.sum, ..acc });
                }
            }
            Err(Error::convergence("Matern term series not converged"))
        }
        FamilyTag::Gaussian | FamilyTag::Multiquadric => unreachable!("analytic profiles use the Taylor engine"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c() -> SeriesControl {
        SeriesControl::default()
    }

    #[test]
    fn gamma_path_matches_shifted_base_limit() {
        let t = Term { coef: 1.0, p: 1.3, log: false };
        let g0 = op_on_term(Kind::Der, 0.6, Geo::Left { a: 0.0, x: 1.2 }, &t, &c()).unwrap();
        let g1 = op_on_term(Kind::Der, 0.6, Geo::Left { a: 1e-12, x: 1.2 }, &t, &c()).unwrap();
        assert!((g0.v - g1.v).abs() < 1e-10);
    }

    #[test]
    fn right_side_constant() {
        // ₓI_b^α 1 = (b−x)^α/Γ(α+1)
        let t = Term { coef: 1.0, p: 0.0, log: false };
        let v = op_on_term(Kind::Int, 0.7, Geo::Right { x: 0.4, b: 1.5 }, &t, &c()).unwrap();
        assert!((v.v - 1.1f64.powf(0.7) * rgamma(1.7)).abs() < 1e-14);
    }

    #[test]
    fn far_piece_constant() {
        // (1/Γ(γ)) ∫_0^l (z+u)^(γ−1) du = ((z+l)^γ − z^γ)/Γ(γ+1)
        let t = Term { coef: 1.0, p: 0.0, log: false };
        for l in [0.3, 5.0] {
            let v = far(0.6, &t, 0.5, l, &c()).unwrap();
            let want = ((0.5f64 + l).powf(0.6) - 0.5f64.powf(0.6)) * rgamma(1.6);
            assert!((v.v - want).abs() < 1e-14, "l = {l}");
        }
    }

    #[test]
    fn matern_terms_sum_to_profile() {
        let nu = 1.3;
        let x: f64 = 0.8;
        let s: f64 = (0..30).flat_map(|k| matern_terms(nu, k)).map(|t| t.coef * x.powf(t.p)).sum();
        let want = x.powf(nu) * crate::specfun::bessel_k(nu, x, &c()).unwrap();
        assert!((s - want).abs() < 1e-14);
    }
}
