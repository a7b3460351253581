#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use super::SeriesControl;
use crate::error::{Error, Result};

// Lanczos approximation, g = 671/128, 14 terms.
const LANCZOS_G: f64 = 5.242_187_5;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

fn lanczos_sum(x: f64) -> f64 {
    let mut ser = 0.999_999_999_999_997_092;
    let mut y = x;
    for c in LANCZOS {
        y += 1.0;
        ser += c / y;
    }
    ser
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// ln Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma_pos(x))
}

fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // keep the Lanczos sum away from its poorly conditioned region
        return ln_gamma_pos(x + 1.0) - x.ln();
    }
    let t = x + LANCZOS_G;
    (x + 0.5) * t.ln() - t + (SQRT_2PI * lanczos_sum(x) / x).ln()
}

/// ln|Γ(x)| together with the sign of Γ(x). Poles are errors.
pub fn log_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    if x > 0.0 {
        return Ok((ln_gamma_pos(x), 1.0));
    }
    let s = (PI * x).sin();
    let lg = (PI / s.abs()).ln() - ln_gamma_pos(1.0 - x);
    Ok((lg, s.signum()))
}

/// Γ(x); reflection for x < 1/2.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    if x == x.floor() && x <= 171.0 {
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return f;
    }
    if x > 140.0 {
        return ln_gamma_pos(x).exp();
    }
    let t = x + LANCZOS_G;
    // split the power to avoid overflow of t^(x+1/2)
    let p = t.powf(0.5 * (x + 0.5));
    SQRT_2PI * lanczos_sum(x) / x * p * (-t).exp() * p
}

/// 1/Γ(x), exactly 0 at the poles.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else if x > 171.0 {
        (-ln_gamma_pos(x)).exp()
    } else {
        1.0 / gamma_unchecked(x)
    }
}

/// Γ(p)/Γ(q) via log-gamma with sign tracking; a pole in q gives 0.
pub fn gamma_ratio(p: f64, q: f64) -> Result<f64> {
    if is_nonpositive_integer(q) {
        if is_nonpositive_integer(p) {
            // ratio of residues: Γ(-n)/Γ(-k) -> (-1)^(n-k) k!/n!
            let (n, k) = (-p, -q);
            let mut r = 1.0;
            if n >= k {
                let mut j = k + 1.0;
                while j <= n {
                    r /= j;
                    j += 1.0;
                }
            } else {
                let mut j = n + 1.0;
                while j <= k {
                    r *= j;
                    j += 1.0;
                }
            }
            let sign = if ((n - k) as i64) % 2 == 0 { 1.0 } else { -1.0 };
            return Ok(sign * r);
        }
        return Ok(0.0);
    }
    let (lp, sp) = log_gamma_signed(p)?;
    let (lq, sq) = log_gamma_signed(q)?;
    if p.abs() < 150.0 && q.abs() < 150.0 && p > 0.0 && q > 0.0 {
        return Ok(gamma_unchecked(p) / gamma_unchecked(q));
    }
    Ok(sp * sq * (lp - lq).exp())
}

/// Complete Beta function B(a, b).
pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    let (la, sa) = log_gamma_signed(a)?;
    let (lb, sb) = log_gamma_signed(b)?;
    let c = a + b;
    if is_nonpositive_integer(c) {
        return Ok(0.0);
    }
    let (lc, sc) = log_gamma_signed(c)?;
    if a > 0.0 && b > 0.0 && c < 150.0 {
        return Ok(gamma_unchecked(a) * gamma_unchecked(b) / gamma_unchecked(c));
    }
    Ok(sa * sb * sc * (la + lb - lc).exp())
}

/// Ψ(x) = Γ'(x)/Γ(x).
pub fn digamma(x: f64, _ctrl: &SeriesControl) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    Ok(digamma_unchecked(x))
}

pub(crate) fn digamma_unchecked(x: f64) -> f64 {
    if x < 0.0 {
        return digamma_unchecked(1.0 - x) - PI / (PI * x).tan();
    }
    let mut acc = 0.0;
    let mut z = x;
    while z < 10.0 {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let z2 = 1.0 / (z * z);
    // Bernoulli tail through z^-12
    let tail = z2
        * (1.0 / 12.0
            - z2 * (1.0 / 120.0
                - z2 * (1.0 / 252.0 - z2 * (1.0 / 240.0 - z2 * (1.0 / 132.0 - z2 * 691.0 / 32760.0)))));
    acc + z.ln() - 0.5 / z - tail
}

/// Ψ(z)/Γ(z), continuous through the poles of Γ.
pub(crate) fn digamma_over_gamma(z: f64) -> f64 {
    if is_nonpositive_integer(z) {
        let n = -z;
        let mut f = 1.0;
        let mut j = 2.0;
        while j <= n {
            f *= j;
            j += 1.0;
        }
        return if (n as i64) % 2 == 0 { -f } else { f };
    }
    digamma_unchecked(z) * rgamma(z)
}

/// Rising factorial (x)_k.
pub fn pochhammer(x: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (x + j as f64))
}

/// Falling factorial x(x-1)...(x-k+1).
pub fn falling(x: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (x - j as f64))
}

/// d/dx of the falling factorial.
pub(crate) fn falling_dx(x: f64, k: usize) -> f64 {
    let mut v = 1.0;
    let mut d = 0.0;
    for j in 0..k {
        let f = x - j as f64;
        d = d * f + v;
        v *= f;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_known_values() {
        assert_eq!(gamma_fn(4.0).unwrap(), 6.0);
        assert!(rel(gamma_fn(0.5).unwrap(), PI.sqrt()) < 1e-15);
        assert!(rel(gamma_fn(3.5).unwrap(), 3.323_350_970_447_842_6) < 1e-14);
        // mpmath, 30 digits
        assert!(rel(gamma_fn(-1.3).unwrap(), 3.328_347_006_788_609_3) < 1e-14);
        assert!(rel(gamma_fn(0.1).unwrap(), 9.513_507_698_668_731_8) < 1e-14);
        assert!(rel(gamma_fn(7.7).unwrap(), 2_769.830_362_327_314_6) < 1e-14);
        assert!(rel(gamma_fn(-2.5).unwrap(), -0.945_308_720_482_941_9) < 1e-14);
        assert!(rel(gamma_fn(30.2).unwrap(), 1.741_009_444_591_131_2e31) < 1e-13);
    }

    #[test]
    fn gamma_poles() {
        assert_eq!(gamma_fn(0.0), Err(Error::Pole(0.0)));
        assert_eq!(gamma_fn(-3.0), Err(Error::Pole(-3.0)));
        assert_eq!(rgamma(-2.0), 0.0);
    }

    #[test]
    fn log_gamma_values() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-15);
        assert!(log_gamma(2.0).unwrap().abs() < 1e-15);
        assert!(rel(log_gamma(11.0).unwrap(), 15.104_412_573_075_516) < 1e-15);
        assert!(rel(log_gamma(1e-5).unwrap(), 11.512_919_692_895_824) < 1e-14);
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
    }

    #[test]
    fn digamma_values() {
        let c = SeriesControl::default();
        assert!(rel(digamma(1.0, &c).unwrap(), -0.577_215_664_901_532_9) < 4e-15);
        assert!(rel(digamma(2.0, &c).unwrap(), 1.0 - 0.577_215_664_901_532_9) < 4e-15);
        assert!(rel(digamma(0.5, &c).unwrap(), -1.963_510_026_021_423_5) < 4e-15);
        assert!(rel(digamma(-0.7, &c).unwrap(), -2.073_952_793_628_703_8) < 1e-13);
        assert!(digamma(-2.0, &c).is_err());
    }

    #[test]
    fn digamma_limit_over_gamma() {
        for n in 0..4 {
            let z = -(n as f64);
            let h = 1e-7;
            let near = 0.5 * (digamma_unchecked(z + h) * rgamma(z + h) + digamma_unchecked(z - h) * rgamma(z - h));
            assert!((near - digamma_over_gamma(z)).abs() < 1e-6 * (1.0 + near.abs()));
        }
    }

    #[test]
    fn gamma_ratio_matches_direct() {
        assert!(rel(gamma_ratio(2.0, 2.5).unwrap(), 0.752_252_778_063_675_1) < 1e-15);
        assert_eq!(gamma_ratio(1.5, -1.0).unwrap(), 0.0);
        assert!(rel(gamma_ratio(200.5, 200.0).unwrap(), 14.133_299_559_727_925) < 1e-10);
        // Γ(-3)/Γ(-1) residue ratio = (-1)^2 / (3*2) = 1/6
        assert!(rel(gamma_ratio(-3.0, -1.0).unwrap(), 1.0 / 6.0) < 1e-15);
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(3.0, 4), 360.0);
        assert_eq!(pochhammer(-7.25, 0), 1.0);
        assert_eq!(falling(3.0, 2), 6.0);
        assert_eq!(falling(1.0, 2), 0.0);
        let h = 1e-6;
        let fd = (falling(2.3 + h, 3) - falling(2.3 - h, 3)) / (2.0 * h);
        assert!((fd - falling_dx(2.3, 3)).abs() < 1e-8);
    }
}
