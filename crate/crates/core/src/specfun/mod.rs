//! Real special functions: Gamma family, generalized hypergeometric series,
//! incomplete Beta and modified Bessel functions.

mod bessel;
mod gamma;
mod hyper;

pub use bessel::{bessel_i, bessel_k};
pub use gamma::{beta_fn, digamma, falling, gamma_fn, gamma_ratio, log_gamma, log_gamma_signed, pochhammer, rgamma};
pub(crate) use gamma::{digamma_over_gamma, digamma_unchecked, falling_dx};
pub use hyper::{hyp_pfq, hyp_pfq_sum, lower_incomplete_beta};

use crate::error::{Error, Result};

/// Truncation rule shared by every infinite series in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl { rel_tol: f64::EPSILON, max_terms: 2000 }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || !rel_tol.is_finite() {
            return Err(Error::param(format!("rel_tol must be positive, got {rel_tol}")));
        }
        if max_terms == 0 {
            return Err(Error::param("max_terms must be at least 1"));
        }
        Ok(SeriesControl { rel_tol, max_terms })
    }

    /// Same tolerance, twice the term budget.
    pub fn doubled(&self) -> Self {
        SeriesControl { rel_tol: self.rel_tol, max_terms: 2 * self.max_terms }
    }
}

/// Outcome of a truncated series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    pub terms: usize,
    pub converged: bool,
    /// Largest |term| seen; `max_term * eps` bounds the rounding error.
    pub max_term: f64,
}

/// Running sum with the three-consecutive-small-terms stopping rule.
#[derive(Debug, Clone)]
pub(crate) struct TailRule {
    rel_tol: f64,
    run: usize,
    pub sum: f64,
    pub max_term: f64,
    pub terms: usize,
}

impl TailRule {
    pub fn new(ctrl: &SeriesControl) -> Self {
        TailRule { rel_tol: ctrl.rel_tol, run: 0, sum: 0.0, max_term: 0.0, terms: 0 }
    }

    /// Adds a term. `shrinking` says the term magnitudes are decreasing from
    /// here on; small terms only count toward the stop rule when it holds.
    /// Returns true once three consecutive terms were negligible.
    pub fn push(&mut self, term: f64, shrinking: bool) -> bool {
        self.sum += term;
        self.terms += 1;
        let a = term.abs();
        if a > self.max_term {
            self.max_term = a;
        }
        let small = if self.sum == 0.0 { a == 0.0 && self.terms > 1 } else { a <= self.rel_tol * self.sum.abs() };
        if small && shrinking {
            self.run += 1;
        } else {
            self.run = 0;
        }
        self.run >= 3
    }

    pub fn finish(&self, converged: bool) -> SeriesSum {
        SeriesSum { value: self.sum, terms: self.terms, converged, max_term: self.max_term }
    }
}
