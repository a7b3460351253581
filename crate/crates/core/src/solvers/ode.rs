//! Kernel collocation for D^α u + u = f on [0, T] with u(0) = u'(0) = 0.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::linalg::{residual_ok, DenseLu, CONDITION_WARNING};
use crate::closedform::kernel_operator_eval;
use crate::error::{Error, Result};
use crate::fracops::{OperatorKind, OperatorSpec};
use crate::rbf::{RBFFamily, RBFKernel};
use crate::specfun::SeriesControl;

/// Right-hand sides selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Forcing {
    Zero,
    One,
    TExp,
    ExpSin,
}

impl Forcing {
    pub fn from_name(s: &str) -> Option<Forcing> {
        match s {
            "zero" => Some(Forcing::Zero),
            "one" => Some(Forcing::One),
            "texp" => Some(Forcing::TExp),
            "expsin" => Some(Forcing::ExpSin),
            _ => None,
        }
    }

    pub fn eval(self, t: f64) -> f64 {
        match self {
            Forcing::Zero => 0.0,
            Forcing::One => 1.0,
            Forcing::TExp => t * (-t).exp(),
            Forcing::ExpSin => (-t).exp() * (0.2 * t).sin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FracODEProblem {
    pub alpha: f64,
    pub forcing: Forcing,
    pub horizon: f64,
    pub node_count: usize,
    pub family: RBFFamily,
    pub scale: f64,
}

impl FracODEProblem {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 1.0 && self.alpha < 2.0) {
            return Err(Error::param(format!("alpha must lie in (1, 2), got {}", self.alpha)));
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Error::param("horizon T must be positive"));
        }
        if self.node_count < 4 {
            return Err(Error::param(format!("n must be at least 4, got {}", self.node_count)));
        }
        if !(self.scale > 0.0) {
            return Err(Error::param("scale must be positive"));
        }
        Ok(())
    }

    pub fn nodes(&self) -> Vec<f64> {
        let n = self.node_count;
        (0..n).map(|i| self.horizon * i as f64 / (n - 1) as f64).collect()
    }

    pub fn kernels(&self) -> Vec<RBFKernel> {
        self.nodes().into_iter().map(|t| RBFKernel { family: self.family, scale: self.scale, center: t }).collect()
    }
}

#[derive(Debug, Clone)]
pub struct CollocationSystem {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub coefficients: Option<DVector<f64>>,
    pub condition_estimate: Option<f64>,
    pub warnings: Vec<String>,
}

/// Rows 0..n−2: equation at t_1..t_{n−2}; row n−2: u(0) = 0; row n−1: u'(0) = 0.
pub fn build_collocation_system(p: &FracODEProblem, ctrl: &SeriesControl) -> Result<CollocationSystem> {
    p.validate()?;
    let n = p.node_count;
    let nodes = p.nodes();
    let kernels = p.kernels();
    let spec = OperatorSpec::left(OperatorKind::RLDerivativeLeft, p.alpha, 0.0)?;
    let rows: Vec<Vec<f64>> = (1..n - 1)
        .into_par_iter()
        .map(|i| {
            kernels
                .iter()
                .map(|k| Ok(kernel_operator_eval(&spec, k, nodes[i], ctrl)?.value + k.eval(nodes[i])))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let mut matrix = DMatrix::zeros(n, n);
    for (r, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            matrix[(r, j)] = *v;
        }
    }
    for (j, k) in kernels.iter().enumerate() {
        matrix[(n - 2, j)] = k.eval(0.0);
        // signed chain rule; profiles used here have φ'(0) = 0 at the center
        matrix[(n - 1, j)] = k.derivative(1, 0.0)?;
    }
    let mut rhs = DVector::zeros(n);
    for i in 1..n - 1 {
        rhs[i - 1] = p.forcing.eval(nodes[i]);
    }
    Ok(CollocationSystem { matrix, rhs, coefficients: None, condition_estimate: None, warnings: Vec::new() })
}

/// Solves in place; returns the coefficient vector.
pub fn solve_dense(sys: &mut CollocationSystem) -> Result<DVector<f64>> {
    let lu = DenseLu::new(&sys.matrix)?;
    let x = lu.solve(&sys.rhs)?;
    let cond = lu.condition_estimate();
    sys.condition_estimate = Some(cond);
    if cond > CONDITION_WARNING {
        sys.warnings.push(format!("condition estimate {cond:.3e} exceeds {CONDITION_WARNING:e}"));
    }
    if !residual_ok(&sys.matrix, &x, &sys.rhs) {
        sys.warnings.push("solve residual above 1e-8 relative bound".into());
    }
    sys.coefficients = Some(x.clone());
    Ok(x)
}

/// u(t) = Σ λ_j φ(|t − t_j|/c).
pub fn ode_solution_eval(p: &FracODEProblem, lambda: &DVector<f64>, t: f64) -> f64 {
    p.kernels().iter().zip(lambda.iter()).map(|(k, l)| l * k.eval(t)).sum()
}

/// u'(t) from the signed kernel derivatives.
pub fn ode_solution_derivative(p: &FracODEProblem, lambda: &DVector<f64>, t: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (k, l) in p.kernels().iter().zip(lambda.iter()) {
        acc += l * k.derivative(1, t)?;
    }
    Ok(acc)
}
