//! The five radial profiles, their derivatives, and scaled/centred kernels.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fracops::Profile;
use crate::specfun::{bessel_k, falling, falling_dx, gamma_fn, rgamma, SeriesControl};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyTag {
    Gaussian,
    Multiquadric,
    Powers,
    Matern,
    ThinPlate,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 5] =
        [FamilyTag::Gaussian, FamilyTag::Multiquadric, FamilyTag::Powers, FamilyTag::Matern, FamilyTag::ThinPlate];

    pub fn name(self) -> &'static str {
        match self {
            FamilyTag::Gaussian => "gaussian",
            FamilyTag::Multiquadric => "multiquadric",
            FamilyTag::Powers => "powers",
            FamilyTag::Matern => "matern",
            FamilyTag::ThinPlate => "thinplate",
        }
    }

    pub fn from_name(s: &str) -> Option<FamilyTag> {
        FamilyTag::ALL.into_iter().find(|t| t.name() == s)
    }
}

/// Family tag plus its parameter: β (multiquadric, powers), ν (Matérn),
/// n (thin-plate); ignored for the Gaussian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RBFFamily {
    pub tag: FamilyTag,
    pub param: f64,
}

impl RBFFamily {
    pub fn new(tag: FamilyTag, param: f64) -> Result<Self> {
        match tag {
            FamilyTag::Gaussian => {}
            FamilyTag::Multiquadric => {
                if !param.is_finite() {
                    return Err(Error::param("multiquadric exponent must be finite"));
                }
            }
            FamilyTag::Powers => {
                if !(param > 0.0) || !param.is_finite() {
                    return Err(Error::param(format!("powers exponent must be positive, got {param}")));
                }
            }
            FamilyTag::Matern => {
                if !(param > 0.0) || (param - param.round()).abs() < 1e-6 {
                    return Err(Error::param(format!("Matern order must be positive and non-integer, got {param}")));
                }
            }
            FamilyTag::ThinPlate => {
                if !(param >= 1.0) || param != param.floor() {
                    return Err(Error::param(format!("thin-plate n must be a positive integer, got {param}")));
                }
            }
        }
        Ok(RBFFamily { tag, param })
    }

    pub fn gaussian() -> Self {
        RBFFamily { tag: FamilyTag::Gaussian, param: 0.0 }
    }

    /// Powers with an even integer exponent are polynomials; usable in the
    /// calculus, but not a sensible interpolation kernel.
    pub fn is_even_power(&self) -> bool {
        self.tag == FamilyTag::Powers && self.param == self.param.floor() && (self.param as i64) % 2 == 0
    }

    /// True when the profile is smooth at the origin.
    pub fn is_smooth(&self) -> bool {
        matches!(self.tag, FamilyTag::Gaussian | FamilyTag::Multiquadric) || self.is_even_power()
    }
}

const MATERN_ZERO: f64 = 1e-15;

/// φ(x) with the signed-argument convention (every profile is even).
pub fn profile_eval(family: &RBFFamily, x: f64) -> f64 {
    let r = x.abs();
    let p = family.param;
    match family.tag {
        FamilyTag::Gaussian => (-0.5 * x * x).exp(),
        FamilyTag::Multiquadric => (1.0 + 0.5 * x * x).powf(0.5 * p),
        FamilyTag::Powers => r.powf(p),
        FamilyTag::Matern => {
            if r < MATERN_ZERO {
                2f64.powf(p - 1.0) * gamma_fn(p).unwrap_or(f64::NAN)
            } else {
                r.powf(p) * bessel_k(p, r, &SeriesControl::default()).unwrap_or(f64::NAN)
            }
        }
        FamilyTag::ThinPlate => {
            if r == 0.0 {
                0.0
            } else {
                r.powf(2.0 * p) * r.ln()
            }
        }
    }
}

/// Taylor coefficients d_j = φ^(j)(x0)/j!, j = 0..len, for the analytic
/// profiles (Gaussian, multiquadric).
pub(crate) fn taylor_coefficients(family: &RBFFamily, x0: f64, len: usize) -> Vec<f64> {
    let mut d = Vec::with_capacity(len);
    match family.tag {
        FamilyTag::Gaussian => {
            // φ' = −tφ
            d.push((-0.5 * x0 * x0).exp());
            if len > 1 {
                d.push(-x0 * d[0]);
            }
            for j in 1..len.saturating_sub(1) {
                let v = -(x0 * d[j] + d[j - 1]) / (j as f64 + 1.0);
                d.push(v);
            }
        }
        FamilyTag::Multiquadric => {
            // (1 + t²/2) φ' = (β/2) t φ, expanded at t = x0 + s
            let hb = 0.5 * family.param;
            let a = 1.0 + 0.5 * x0 * x0;
            d.push(a.powf(hb));
            for j in 0..len.saturating_sub(1) {
                let jf = j as f64;
                let dj = d[j];
                let djm = if j > 0 { d[j - 1] } else { 0.0 };
                let v = (hb * (x0 * dj + djm) - x0 * jf * dj - 0.5 * (jf - 1.0) * djm) / (a * (jf + 1.0));
                d.push(v);
            }
        }
        _ => unreachable!("Taylor coefficients only for analytic profiles"),
    }
    d.truncate(len);
    d
}

/// k-th derivative of the profile at a signed argument.
pub fn profile_derivative(family: &RBFFamily, order: usize, x: f64) -> Result<f64> {
    if order == 0 {
        return Ok(profile_eval(family, x));
    }
    if order > 4 {
        return Err(Error::UnsupportedOrder(order));
    }
    let p = family.param;
    let r = x.abs();
    let sgn = if x < 0.0 && order % 2 == 1 { -1.0 } else { 1.0 };
    match family.tag {
        FamilyTag::Gaussian | FamilyTag::Multiquadric => {
            let d = taylor_coefficients(family, x, order + 1);
            Ok(d[order] * (1..=order).product::<usize>() as f64)
        }
        FamilyTag::Powers => {
            let e = p - order as f64;
            if family.is_even_power() {
                return Ok(falling(p, order) * if e < 0.0 { 0.0 } else { x.powi(e as i32) });
            }
            if r == 0.0 {
                return if e > 0.0 { Ok(0.0) } else { Err(Error::domain("powers derivative singular at 0")) };
            }
            Ok(sgn * falling(p, order) * r.powf(e))
        }
        FamilyTag::ThinPlate => {
            let n2 = 2.0 * p;
            if r == 0.0 {
                return if (order as f64) < n2 { Ok(0.0) } else { Err(Error::domain("thin-plate derivative singular at 0")) };
            }
            let e = n2 - order as f64;
            Ok(sgn * r.powf(e) * (falling(n2, order) * r.ln() + falling_dx(n2, order)))
        }
        FamilyTag::Matern => {
            if r < MATERN_ZERO {
                return matern_derivative_at_zero(p, order);
            }
            Ok(sgn * matern_derivative(p, order, r)?)
        }
    }
}

/// (r^ν K_ν)^(k) = Σ c_{p,j} r^p · r^(ν−j) K_(ν−j), built from
/// d/dr [r^p g_μ] = p r^(p−1) g_μ − r^(p+1) g_(μ−1), g_μ = r^μ K_μ.
fn matern_derivative(nu: f64, order: usize, r: f64) -> Result<f64> {
    let mut terms: BTreeMap<(i32, usize), f64> = BTreeMap::new();
    terms.insert((0, 0), 1.0);
    for _ in 0..order {
        let mut next = BTreeMap::new();
        for (&(p, j), &c) in &terms {
            if p != 0 {
                *next.entry((p - 1, j)).or_insert(0.0) += c * p as f64;
            }
            *next.entry((p + 1, j + 1)).or_insert(0.0) -= c;
        }
        terms = next;
    }
    let ctrl = SeriesControl::default();
    let mut acc = 0.0;
    for ((p, j), c) in terms {
        let mu = nu - j as f64;
        acc += c * r.powi(p) * r.powf(mu) * bessel_k(mu, r, &ctrl)?;
    }
    Ok(acc)
}

fn matern_derivative_at_zero(nu: f64, order: usize) -> Result<f64> {
    if 2.0 * nu < order as f64 {
        return Err(Error::domain("Matern derivative singular at 0"));
    }
    if order % 2 == 1 {
        return Ok(0.0);
    }
    // even part Σ 2^ν π/(2 sin πν) r^(2k) / (4^k k! Γ(k+1−ν))
    let k = order / 2;
    let pref = std::f64::consts::PI / (2.0 * (std::f64::consts::PI * nu).sin());
    let kf: f64 = (1..=k).product::<usize>() as f64;
    let fact2k: f64 = (1..=order).product::<usize>() as f64;
    Ok(pref * 2f64.powf(nu) * 0.25f64.powi(k as i32) / kf * rgamma(k as f64 + 1.0 - nu) * fact2k)
}

/// φ(|x − center| / scale).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RBFKernel {
    pub family: RBFFamily,
    pub scale: f64,
    pub center: f64,
}

impl RBFKernel {
    pub fn new(family: RBFFamily, scale: f64, center: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::param(format!("scale must be positive, got {scale}")));
        }
        if !center.is_finite() {
            return Err(Error::param("center must be finite"));
        }
        Ok(RBFKernel { family, scale, center })
    }

    pub fn eval(&self, x: f64) -> f64 {
        kernel_eval(self, x)
    }

    pub fn derivative(&self, k: usize, x: f64) -> Result<f64> {
        Ok(profile_derivative(&self.family, k, (x - self.center) / self.scale)? * self.scale.powi(-(k as i32)))
    }
}

pub fn kernel_eval(kernel: &RBFKernel, x: f64) -> f64 {
    profile_eval(&kernel.family, (x - kernel.center) / kernel.scale)
}

impl Profile for RBFKernel {
    fn value(&self, t: f64) -> f64 {
        kernel_eval(self, t)
    }
    fn derivative(&self, k: usize, t: f64) -> Option<f64> {
        RBFKernel::derivative(self, k, t).ok()
    }
    fn breakpoints(&self) -> Vec<f64> {
        if self.family.is_smooth() {
            Vec::new()
        } else {
            vec![self.center]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(t: FamilyTag, p: f64) -> RBFFamily {
        RBFFamily::new(t, p).unwrap()
    }

    #[test]
    fn profile_values() {
        assert_eq!(profile_eval(&RBFFamily::gaussian(), 0.0), 1.0);
        assert_eq!(profile_eval(&fam(FamilyTag::Powers, 3.0), -2.0), 8.0);
        assert_eq!(profile_eval(&fam(FamilyTag::ThinPlate, 1.0), 0.0), 0.0);
        let m = profile_eval(&fam(FamilyTag::Matern, 1.5), 0.0);
        assert!((m - 2f64.sqrt() * gamma_fn(1.5).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn derivative_examples() {
        let g = RBFFamily::gaussian();
        assert_eq!(profile_derivative(&g, 1, 0.0).unwrap(), 0.0);
        let x: f64 = 0.7;
        assert!((profile_derivative(&g, 1, x).unwrap() + x * (-x * x / 2.0).exp()).abs() < 1e-16);
        let m = profile_derivative(&fam(FamilyTag::Matern, 1.5), 1, 1.0).unwrap();
        assert!((m + 0.461_068_504_447_894_56).abs() < 1e-14);
        let e = std::f64::consts::E;
        let t = profile_derivative(&fam(FamilyTag::ThinPlate, 1.0), 1, e).unwrap();
        assert!((t - 3.0 * e).abs() < 1e-14);
        assert!(profile_derivative(&fam(FamilyTag::Powers, 1.5), 2, 0.0).is_err());
        assert!(profile_derivative(&g, 5, 0.3).is_err());
    }

    #[test]
    fn kernel_values() {
        let g = RBFFamily::gaussian();
        assert_eq!(kernel_eval(&RBFKernel::new(g, 1.0, 0.0).unwrap(), 0.0), 1.0);
        let k = RBFKernel::new(g, 2.0, 1.0).unwrap();
        assert!((kernel_eval(&k, 3.0) - (-0.5f64).exp()).abs() < 1e-16);
        let p = RBFKernel::new(fam(FamilyTag::Powers, 3.0), 1e-4, 0.5).unwrap();
        assert_eq!(kernel_eval(&p, 0.5), 0.0);
        assert!(RBFKernel::new(g, 0.0, 0.0).is_err());
    }

    #[test]
    fn validation() {
        assert!(RBFFamily::new(FamilyTag::Matern, 2.0).is_err());
        assert!(RBFFamily::new(FamilyTag::ThinPlate, 1.5).is_err());
        assert!(RBFFamily::new(FamilyTag::Powers, -1.0).is_err());
        assert!(fam(FamilyTag::Powers, 2.0).is_even_power());
        assert_eq!(FamilyTag::from_name("thinplate"), Some(FamilyTag::ThinPlate));
        assert_eq!(FamilyTag::from_name("Gaussian"), None);
    }

    #[test]
    fn matern_zero_derivatives_match_series() {
        // second derivative at 0 for ν = 1.7 vs a finite difference just off 0
        let f = fam(FamilyTag::Matern, 1.7);
        let d0 = profile_derivative(&f, 2, 0.0).unwrap();
        let near = profile_derivative(&f, 2, 1e-6).unwrap();
        assert!((d0 - near).abs() < 1e-5 * d0.abs());
        assert!(profile_derivative(&fam(FamilyTag::Matern, 0.3), 1, 0.0).is_err());
    }
}
