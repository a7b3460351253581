//! Fractional operator specifications, the power rules, the
//! Riemann–Liouville/Caputo relation and a quadrature oracle.

pub mod quad;

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::{falling, gamma_ratio, rgamma};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    RLIntegralLeft,
    RLIntegralRight,
    RLDerivativeLeft,
    RLDerivativeRight,
    CaputoLeft,
    CaputoRight,
    Riesz,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 7] = [
        OperatorKind::RLIntegralLeft,
        OperatorKind::RLIntegralRight,
        OperatorKind::RLDerivativeLeft,
        OperatorKind::RLDerivativeRight,
        OperatorKind::CaputoLeft,
        OperatorKind::CaputoRight,
        OperatorKind::Riesz,
    ];

    pub fn is_integral(self) -> bool {
        matches!(self, OperatorKind::RLIntegralLeft | OperatorKind::RLIntegralRight)
    }

    pub fn is_right(self) -> bool {
        matches!(self, OperatorKind::RLIntegralRight | OperatorKind::RLDerivativeRight | OperatorKind::CaputoRight)
    }

    pub fn is_caputo(self) -> bool {
        matches!(self, OperatorKind::CaputoLeft | OperatorKind::CaputoRight)
    }

    /// Left-sided counterpart (identity for left kinds and Riesz).
    pub fn to_left(self) -> OperatorKind {
        match self {
            OperatorKind::RLIntegralRight => OperatorKind::RLIntegralLeft,
            OperatorKind::RLDerivativeRight => OperatorKind::RLDerivativeLeft,
            OperatorKind::CaputoRight => OperatorKind::CaputoLeft,
            k => k,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::RLIntegralLeft => "rl-int-left",
            OperatorKind::RLIntegralRight => "rl-int-right",
            OperatorKind::RLDerivativeLeft => "rl-der-left",
            OperatorKind::RLDerivativeRight => "rl-der-right",
            OperatorKind::CaputoLeft => "caputo-left",
            OperatorKind::CaputoRight => "caputo-right",
            OperatorKind::Riesz => "riesz",
        }
    }

    pub fn from_name(s: &str) -> Option<OperatorKind> {
        OperatorKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// Which operator, of which order, from which base point(s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub order: f64,
    pub base_left: f64,
    pub base_right: Option<f64>,
}

const INTEGER_MARGIN: f64 = 1e-9;

pub(crate) fn check_order(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::param(format!("order must be positive, got {alpha}")));
    }
    if (alpha - alpha.round()).abs() < INTEGER_MARGIN {
        return Err(Error::param("order must be non-integer"));
    }
    if alpha >= 4.0 {
        return Err(Error::param(format!("order must be below 4, got {alpha}")));
    }
    Ok(())
}

impl OperatorSpec {
    /// Validated constructor. Right-sided kinds and Riesz need `base_right`.
    pub fn new(kind: OperatorKind, order: f64, base_left: f64, base_right: Option<f64>) -> Result<Self> {
        check_order(order)?;
        let needs_right = kind.is_right() || kind == OperatorKind::Riesz;
        if needs_right && base_right.is_none() {
            return Err(Error::param(format!("{} requires a right base point", kind.name())));
        }
        if kind == OperatorKind::Riesz {
            let b = base_right.unwrap();
            if !(base_left < b) {
                return Err(Error::param("Riesz interval requires a < b"));
            }
        }
        Ok(OperatorSpec { kind, order, base_left, base_right })
    }

    pub fn left(kind: OperatorKind, order: f64, a: f64) -> Result<Self> {
        Self::new(kind, order, a, None)
    }

    pub fn right(kind: OperatorKind, order: f64, b: f64) -> Result<Self> {
        Self::new(kind, order, f64::NEG_INFINITY, Some(b))
    }

    pub fn riesz(order: f64, a: f64, b: f64) -> Result<Self> {
        Self::new(OperatorKind::Riesz, order, a, Some(b))
    }

    pub fn m(&self) -> usize {
        ceil_order(self)
    }

    pub fn b(&self) -> f64 {
        self.base_right.unwrap_or(f64::INFINITY)
    }

    /// Checks that x lies on the admissible side of the base point(s).
    pub fn check_point(&self, x: f64) -> Result<()> {
        let ok = match self.kind {
            OperatorKind::Riesz => x > self.base_left && x < self.b(),
            // an integral over an empty span is 0
            k if k.is_right() => x < self.b() || (k.is_integral() && x == self.b()),
            k => x > self.base_left || (k.is_integral() && x == self.base_left),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!("point {x} outside the domain of {}", self.kind.name())))
        }
    }
}

/// m = ⌈α⌉.
pub fn ceil_order(spec: &OperatorSpec) -> usize {
    spec.order.ceil() as usize
}

/// c_α = 1/(2 cos(πα/2)); the Riesz derivative is −c_α(left + right).
pub fn riesz_coefficient(alpha: f64) -> Result<f64> {
    if (alpha - 1.0).abs() < INTEGER_MARGIN {
        return Err(Error::domain("Riesz coefficient is singular at order 1"));
    }
    Ok(1.0 / (2.0 * (PI * alpha / 2.0).cos()))
}

/// ₐI^α (x−a)^β = Γ(β+1)/Γ(α+β+1) (x−a)^(α+β).
pub fn power_rule_integral(alpha: f64, beta: f64, a: f64, x: f64) -> Result<f64> {
    if !(beta > -1.0) {
        return Err(Error::domain(format!("power rule needs beta > -1, got {beta}")));
    }
    if !(x > a) {
        return Err(Error::domain("power rule needs x > a"));
    }
    Ok(gamma_ratio(beta + 1.0, alpha + beta + 1.0)? * (x - a).powf(alpha + beta))
}

/// ₐD^α (x−a)^β = Γ(β+1)/Γ(β−α+1) (x−a)^(β−α).
pub fn power_rule_rl_derivative(alpha: f64, beta: f64, a: f64, x: f64) -> Result<f64> {
    if !(beta > alpha - 1.0) {
        return Err(Error::domain(format!("power rule needs beta > alpha - 1, got {beta}")));
    }
    if !(x > a) {
        return Err(Error::domain("power rule needs x > a"));
    }
    Ok(gamma_ratio(beta + 1.0, beta - alpha + 1.0)? * (x - a).powf(beta - alpha))
}

/// Caputo power rule; integer β below m = ⌈α⌉ is annihilated.
pub fn power_rule_caputo(alpha: f64, beta: f64, a: f64, x: f64) -> Result<f64> {
    if !(beta > alpha - 1.0) {
        return Err(Error::domain(format!("power rule needs beta > alpha - 1, got {beta}")));
    }
    if !(x > a) {
        return Err(Error::domain("power rule needs x > a"));
    }
    let m = alpha.ceil();
    if beta == beta.floor() && beta < m {
        return Ok(0.0);
    }
    Ok(gamma_ratio(beta + 1.0, beta - alpha + 1.0)? * (x - a).powf(beta - alpha))
}

/// Caputo value from the RL value and f^(k)(a), k = 0..m−1.
pub fn caputo_from_rl(rl_value: f64, derivs_at_a: &[f64], alpha: f64, a: f64, x: f64) -> Result<f64> {
    let m = alpha.ceil() as usize;
    if derivs_at_a.len() != m {
        return Err(Error::Arity { expected: m, got: derivs_at_a.len() });
    }
    if !(x > a) {
        return Err(Error::domain("Caputo relation needs x > a"));
    }
    let h = x - a;
    let corr: f64 = derivs_at_a
        .iter()
        .enumerate()
        .map(|(k, d)| d * rgamma(k as f64 + 1.0 - alpha) * h.powf(k as f64 - alpha))
        .sum();
    Ok(rl_value - corr)
}

/// Something the oracle can integrate: values, optional derivatives, and
/// the points where it is not smooth.
pub trait Profile: Sync {
    fn value(&self, t: f64) -> f64;
    /// k-th derivative; `None` when unavailable.
    fn derivative(&self, _k: usize, _t: f64) -> Option<f64> {
        None
    }
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Closure-backed profile.
pub struct FnProfile<F, D> {
    f: F,
    d: Option<D>,
    breaks: Vec<f64>,
}

type NoDeriv = fn(usize, f64) -> f64;

impl<F: Fn(f64) -> f64 + Sync> FnProfile<F, NoDeriv> {
    pub fn new(f: F) -> Self {
        FnProfile { f, d: None, breaks: Vec::new() }
    }
}

impl<F: Fn(f64) -> f64 + Sync, D: Fn(usize, f64) -> f64 + Sync> FnProfile<F, D> {
    pub fn with_derivatives(f: F, d: D) -> Self {
        FnProfile { f, d: Some(d), breaks: Vec::new() }
    }

    pub fn with_breakpoints(mut self, b: Vec<f64>) -> Self {
        self.breaks = b;
        self
    }
}

impl<F: Fn(f64) -> f64 + Sync, D: Fn(usize, f64) -> f64 + Sync> Profile for FnProfile<F, D> {
    fn value(&self, t: f64) -> f64 {
        (self.f)(t)
    }
    fn derivative(&self, k: usize, t: f64) -> Option<f64> {
        if k == 0 {
            return Some((self.f)(t));
        }
        self.d.as_ref().map(|d| d(k, t))
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.breaks.clone()
    }
}

/// t ↦ f(−t), used to turn right-sided operators into left-sided ones.
struct Mirrored<'a>(&'a dyn Profile);

impl Profile for Mirrored<'_> {
    fn value(&self, t: f64) -> f64 {
        self.0.value(-t)
    }
    fn derivative(&self, k: usize, t: f64) -> Option<f64> {
        let s = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        self.0.derivative(k, -t).map(|v| s * v)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.0.breakpoints().into_iter().map(|b| -b).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureControl {
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Endpoint weight exponent; the oracle sets it per operator.
    pub singularity_exponent: f64,
}

impl Default for QuadratureControl {
    fn default() -> Self {
        QuadratureControl { abs_tol: 1e-10, max_subdivisions: 2000, singularity_exponent: 0.0 }
    }
}

impl QuadratureControl {
    pub fn new(abs_tol: f64, max_subdivisions: usize, singularity_exponent: f64) -> Result<Self> {
        if !(abs_tol > 0.0) {
            return Err(Error::param("abs_tol must be positive"));
        }
        if max_subdivisions == 0 {
            return Err(Error::param("max_subdivisions must be at least 1"));
        }
        if !(singularity_exponent > -1.0) {
            return Err(Error::param("singularity exponent must exceed -1"));
        }
        Ok(QuadratureControl { abs_tol, max_subdivisions, singularity_exponent })
    }

    pub fn with_tol(abs_tol: f64) -> Self {
        QuadratureControl { abs_tol, ..Default::default() }
    }

    /// ∫₀^L s^e g(s) ds with e = singularity_exponent.
    pub fn weighted(&self, g: &dyn Fn(f64) -> f64, len: f64, breaks: &[f64]) -> Result<f64> {
        quad::weighted_endpoint(g, len, self.singularity_exponent, breaks, self.abs_tol, self.max_subdivisions)
    }
}

/// Direct numerical evaluation of the defining integrals.
pub fn oracle_apply(spec: &OperatorSpec, profile: &dyn Profile, x: f64, q: &QuadratureControl) -> Result<f64> {
    spec.check_point(x)?;
    if spec.kind.is_integral() && (x == spec.base_left || x == spec.b()) {
        return Ok(0.0);
    }
    let alpha = spec.order;
    match spec.kind {
        OperatorKind::Riesz => {
            let b = spec.b();
            let l = left_oracle(OperatorKind::RLDerivativeLeft, alpha, spec.base_left, profile, x, q)?;
            let r = left_oracle(OperatorKind::RLDerivativeLeft, alpha, -b, &Mirrored(profile), -x, q)?;
            Ok(-riesz_coefficient(alpha)? * (l + r))
        }
        k if k.is_right() => left_oracle(k.to_left(), alpha, -spec.b(), &Mirrored(profile), -x, q),
        k => left_oracle(k, alpha, spec.base_left, profile, x, q),
    }
}

fn deriv(p: &dyn Profile, k: usize, t: f64) -> Result<f64> {
    p.derivative(k, t).ok_or(Error::MissingDerivative)
}

fn left_oracle(kind: OperatorKind, alpha: f64, a: f64, p: &dyn Profile, x: f64, q: &QuadratureControl) -> Result<f64> {
    let m = alpha.ceil() as usize;
    let len = x - a;
    let inner: Vec<f64> = p.breakpoints().into_iter().filter(|b| *b >= a && *b < x).collect();
    let s_breaks: Vec<f64> = inner.iter().map(|b| x - b).collect();
    match kind {
        OperatorKind::RLIntegralLeft => {
            let qc = QuadratureControl { singularity_exponent: alpha - 1.0, ..q.clone() };
            let v = qc.weighted(&|s| p.value(x - s), len, &s_breaks)?;
            Ok(v * rgamma(alpha))
        }
        OperatorKind::CaputoLeft => {
            deriv(p, m, x)?;
            let qc = QuadratureControl { singularity_exponent: m as f64 - alpha - 1.0, ..q.clone() };
            // a point that rounds onto a breakpoint has measure zero
            let dm = |s: f64| {
                let t = x - s;
                p.derivative(m, t).unwrap_or(if inner.contains(&t) { 0.0 } else { f64::NAN })
            };
            let v = qc.weighted(&dm, len, &s_breaks)?;
            Ok(v * rgamma(m as f64 - alpha))
        }
        OperatorKind::RLDerivativeLeft => {
            for k in 0..=m {
                deriv(p, k, x)?;
            }
            // split point: the Caputo route needs smoothness on [sp, x]
            let sp = match inner.iter().copied().fold(None, |acc: Option<f64>, b| Some(acc.map_or(b, |v| v.max(b)))) {
                Some(bmax) => bmax + 0.5 * (x - bmax),
                None => a,
            };
            let h = x - sp;
            let mut near = 0.0;
            for k in 0..m {
                near += deriv(p, k, sp)? * rgamma(k as f64 + 1.0 - alpha) * h.powf(k as f64 - alpha);
            }
            let qc = QuadratureControl { singularity_exponent: m as f64 - alpha - 1.0, ..q.clone() };
            near += rgamma(m as f64 - alpha) * qc.weighted(&|s| p.derivative(m, x - s).unwrap_or(f64::NAN), h, &[])?;
            if sp > a {
                let mut pts = vec![a];
                pts.extend(inner.iter().copied().filter(|b| *b > a));
                pts.push(sp);
                let g = |t: f64| (x - t).powf(-alpha - 1.0) * p.value(t);
                let (far, _, _) = quad::adaptive(&g, &pts, q.abs_tol, q.max_subdivisions)?;
                near += rgamma(-alpha) * far;
            }
            Ok(near)
        }
        _ => unreachable!("left kinds only"),
    }
}

/// (x−a)^β as an oracle profile with exact derivatives.
pub fn shifted_power(a: f64, beta: f64) -> impl Profile {
    FnProfile::with_derivatives(
        move |t: f64| (t - a).powf(beta),
        move |k: usize, t: f64| falling(beta, k) * (t - a).powf(beta - k as f64),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_order_values() {
        let s = |a| OperatorSpec::left(OperatorKind::CaputoLeft, a, 0.0).unwrap();
        assert_eq!(ceil_order(&s(1.5)), 2);
        assert_eq!(ceil_order(&s(0.5)), 1);
        assert_eq!(ceil_order(&s(2.7)), 3);
    }

    #[test]
    fn integer_order_rejected() {
        let e = OperatorSpec::left(OperatorKind::RLIntegralLeft, 2.0, 0.0).unwrap_err();
        assert_eq!(e.to_string(), "invalid parameter: order must be non-integer");
        assert!(OperatorSpec::left(OperatorKind::RLIntegralLeft, 1.0 + 1e-10, 0.0).is_err());
        assert!(OperatorSpec::new(OperatorKind::CaputoRight, 0.5, 0.0, None).is_err());
        assert!(OperatorSpec::riesz(1.8, 1.0, 0.0).is_err());
    }

    #[test]
    fn riesz_coefficient_values() {
        assert!((riesz_coefficient(1.8).unwrap() + 0.525_731_112_119_133_6).abs() < 1e-15);
        assert!((riesz_coefficient(0.5).unwrap() - 0.707_106_781_186_547_5).abs() < 1e-15);
        assert!((riesz_coefficient(1.5).unwrap() + 0.707_106_781_186_547_5).abs() < 1e-15);
        assert!(riesz_coefficient(1.0).is_err());
    }

    #[test]
    fn power_rules() {
        assert!((power_rule_integral(0.5, 1.0, 0.0, 1.0).unwrap() - 0.752_252_778_063_675).abs() < 1e-15);
        assert!((power_rule_integral(0.5, 2.0, 0.0, 1.0).unwrap() - 0.601_802_222_450_940).abs() < 1e-15);
        assert!((power_rule_integral(1.3, 0.0, 2.0, 3.0).unwrap() - rgamma(2.3)).abs() < 1e-15);
        assert!((power_rule_rl_derivative(0.5, 1.0, 0.0, 1.0).unwrap() - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-15);
        let g = crate::specfun::gamma_fn(1.7).unwrap();
        assert!((power_rule_rl_derivative(0.7, 0.7, 0.0, 3.0).unwrap() - g).abs() < 1e-14);
        let v = power_rule_rl_derivative(1.5, 3.0, 0.0, 2.0).unwrap();
        assert!((v - 12.766_152_972_845_847).abs() < 1e-12);
        assert_eq!(power_rule_caputo(0.5, 0.0, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(power_rule_caputo(1.5, 1.0, 0.0, 1.0).unwrap(), 0.0);
        assert!((power_rule_caputo(0.5, 2.0, 0.0, 1.0).unwrap() - 1.504_505_556_127_350_2).abs() < 1e-14);
        assert!(power_rule_integral(0.5, -1.0, 0.0, 1.0).is_err());
        assert!(power_rule_rl_derivative(1.5, 0.4, 0.0, 1.0).is_err());
        assert!(power_rule_caputo(0.5, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn caputo_relation() {
        let alpha = 0.5;
        // f = 1: RL = x^-α/Γ(1-α), Caputo = 0
        let rl = power_rule_rl_derivative(alpha, 0.0, 0.0, 2.0).unwrap();
        assert!(caputo_from_rl(rl, &[1.0], alpha, 0.0, 2.0).unwrap().abs() < 1e-15);
        // f = x²: zero boundary data
        let rl = power_rule_rl_derivative(alpha, 2.0, 0.0, 1.0).unwrap();
        let c = caputo_from_rl(rl, &[0.0], alpha, 0.0, 1.0).unwrap();
        assert_eq!(c, power_rule_caputo(alpha, 2.0, 0.0, 1.0).unwrap());
        assert_eq!(caputo_from_rl(1.0, &[1.0, 2.0], 0.5, 0.0, 1.0), Err(Error::Arity { expected: 1, got: 2 }));
    }

    #[test]
    fn oracle_matches_power_rule() {
        let q = QuadratureControl::default();
        let spec = OperatorSpec::left(OperatorKind::RLIntegralLeft, 0.5, 0.0).unwrap();
        let v = oracle_apply(&spec, &shifted_power(0.0, 1.0), 1.0, &q).unwrap();
        assert!((v - 0.752_252_778_063_675).abs() < 1e-10);
        let spec = OperatorSpec::left(OperatorKind::RLDerivativeLeft, 1.5, 0.0).unwrap();
        let v = oracle_apply(&spec, &shifted_power(0.0, 3.0), 2.0, &q).unwrap();
        assert!((v - 12.766_152_972_845_847).abs() < 1e-9);
    }

    #[test]
    fn oracle_zero_profile() {
        let q = QuadratureControl::default();
        let zero = FnProfile::with_derivatives(|_t: f64| 0.0, |_k: usize, _t: f64| 0.0);
        for kind in OperatorKind::ALL {
            let spec = OperatorSpec::new(kind, 1.3, 0.0, Some(2.0)).unwrap();
            assert_eq!(oracle_apply(&spec, &zero, 1.0, &q).unwrap(), 0.0);
        }
    }

    #[test]
    fn oracle_requires_derivatives() {
        let q = QuadratureControl::default();
        let spec = OperatorSpec::left(OperatorKind::CaputoLeft, 0.5, 0.0).unwrap();
        let p = FnProfile::new(|t: f64| t.sin());
        assert_eq!(oracle_apply(&spec, &p, 1.0, &q), Err(Error::MissingDerivative));
    }

    #[test]
    fn oracle_riesz_sine() {
        // mpmath reference for -c_α (₀D^α + D_π^α) sin at π/2, α = 1.8
        let q = QuadratureControl::with_tol(1e-12);
        let spec = OperatorSpec::riesz(1.8, 0.0, PI).unwrap();
        let p = FnProfile::with_derivatives(
            |t: f64| t.sin(),
            |k: usize, t: f64| match k % 4 {
                0 => t.sin(),
                1 => t.cos(),
                2 => -t.sin(),
                _ => -t.cos(),
            },
        );
        let v = oracle_apply(&spec, &p, PI / 2.0, &q).unwrap();
        assert!((v - RIESZ_SIN_REF).abs() < 1e-9, "{v}");
    }

    const RIESZ_SIN_REF: f64 = -0.967_574_121_046_309_3;
}
