//! Method of lines for u_t = K ∂^α u/∂|x|^α on (0, L) with zero boundary
//! values, on the Lagrange basis of an RBF interpolant.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::linalg::{DenseLu, CONDITION_WARNING};
use super::rk::{dopri5, RkControl};
use crate::closedform::riesz_kernel_eval;
use crate::error::{Error, Result};
use crate::fracops::{oracle_apply, OperatorSpec, QuadratureControl};
use crate::rbf::{RBFFamily, RBFKernel};
use crate::specfun::SeriesControl;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialProfile {
    /// x²(L − x)
    PolyHump,
    /// sin(4x)
    Sin4x,
    Zero,
}

impl InitialProfile {
    pub fn from_name(s: &str) -> Option<InitialProfile> {
        match s {
            "poly-hump" => Some(InitialProfile::PolyHump),
            "sin4x" => Some(InitialProfile::Sin4x),
            "zero" => Some(InitialProfile::Zero),
            _ => None,
        }
    }

    pub fn eval(self, x: f64, length: f64) -> f64 {
        match self {
            InitialProfile::PolyHump => x * x * (length - x),
            InitialProfile::Sin4x => (4.0 * x).sin(),
            InitialProfile::Zero => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MOLProblem {
    pub alpha: f64,
    pub dispersion: f64,
    pub length: f64,
    pub u0: InitialProfile,
    /// Multiplies the initial profile.
    pub amplitude: f64,
    pub horizon: f64,
    pub node_count: usize,
    pub family: RBFFamily,
    pub scale: f64,
    /// Output times; the horizon is used when empty.
    pub out_times: Vec<f64>,
}

impl MOLProblem {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 1.0 && self.alpha < 2.0) {
            return Err(Error::param(format!("alpha must lie in (1, 2), got {}", self.alpha)));
        }
        if !(self.length > 0.0) || !self.length.is_finite() {
            return Err(Error::param("interval length L must be positive"));
        }
        if !(self.horizon >= 0.0) || !self.horizon.is_finite() {
            return Err(Error::param("horizon T must be non-negative"));
        }
        if self.node_count < 3 {
            return Err(Error::param(format!("n must be at least 3, got {}", self.node_count)));
        }
        if !(self.scale > 0.0) {
            return Err(Error::param("scale must be positive"));
        }
        if !self.dispersion.is_finite() || !self.amplitude.is_finite() {
            return Err(Error::param("K and the amplitude must be finite"));
        }
        if self.out_times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
            return Err(Error::param("out_times must be non-negative"));
        }
        if self.out_times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::param("out_times must be non-decreasing"));
        }
        Ok(())
    }

    pub fn nodes(&self) -> Vec<f64> {
        let n = self.node_count;
        (0..n).map(|i| self.length * i as f64 / (n - 1) as f64).collect()
    }

    pub fn times(&self) -> Vec<f64> {
        if self.out_times.is_empty() {
            vec![self.horizon]
        } else {
            self.out_times.clone()
        }
    }
}

pub struct MOLSystem {
    pub nodes: Vec<f64>,
    pub kernels: Vec<RBFKernel>,
    pub interpolation_matrix: DMatrix<f64>,
    lu: DenseLu,
    /// Interior block of the Riesz derivatives of the Lagrange basis.
    pub riesz_matrix: Option<DMatrix<f64>>,
    pub initial: DVector<f64>,
    pub warnings: Vec<String>,
}

impl std::fmt::Debug for MOLSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MOLSystem")
            .field("nodes", &self.nodes.len())
            .field("condition", &self.lu.condition_estimate())
            .field("warnings", &self.warnings)
            .finish()
    }
}

impl MOLSystem {
    pub fn condition_estimate(&self) -> f64 {
        self.lu.condition_estimate()
    }

    /// Row vector ℒL = (ℒφ) A⁻¹ for a functional given on the kernels.
    pub fn lagrange_functional(&self, kernel_values: &DVector<f64>) -> Result<DVector<f64>> {
        // A is symmetric, so (v A⁻¹)ᵀ = A⁻¹ vᵀ
        self.lu.solve(kernel_values)
    }

    /// L_j(x) for all j.
    pub fn lagrange_values(&self, x: f64) -> Result<DVector<f64>> {
        let v = DVector::from_iterator(self.kernels.len(), self.kernels.iter().map(|k| k.eval(x)));
        self.lagrange_functional(&v)
    }
}

pub fn build_lagrange_basis(p: &MOLProblem) -> Result<MOLSystem> {
    p.validate()?;
    let nodes = p.nodes();
    let n = nodes.len();
    for w in nodes.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::SingularMatrix);
        }
    }
    let kernels: Vec<RBFKernel> =
        nodes.iter().map(|&t| RBFKernel { family: p.family, scale: p.scale, center: t }).collect();
    let a = DMatrix::from_fn(n, n, |i, j| kernels[j].eval(nodes[i]));
    let lu = DenseLu::new(&a)?;
    let mut warnings = Vec::new();
    if lu.condition_estimate() > CONDITION_WARNING {
        warnings.push(format!(
            "interpolation matrix condition estimate {:.3e} exceeds {CONDITION_WARNING:e}",
            lu.condition_estimate()
        ));
    }
    let initial = DVector::from_iterator(
        n - 2,
        nodes[1..n - 1].iter().map(|&x| p.amplitude * p.u0.eval(x, p.length)),
    );
    Ok(MOLSystem { nodes, kernels, interpolation_matrix: a, lu, riesz_matrix: None, initial, warnings })
}

/// Where the Riesz derivatives of the kernels come from.
#[derive(Debug, Clone, PartialEq)]
pub enum EntrySource {
    ClosedForm(SeriesControl),
    Oracle(QuadratureControl),
}

impl Default for EntrySource {
    fn default() -> Self {
        EntrySource::ClosedForm(SeriesControl::default())
    }
}

/// Fills `sys.riesz_matrix` with ∂^α L_j/∂|x|^α (x_i) for interior i, j.
pub fn assemble_riesz_matrix(sys: &mut MOLSystem, p: &MOLProblem, source: &EntrySource) -> Result<()> {
    let n = sys.nodes.len();
    let interior = &sys.nodes[1..n - 1];
    let spec = OperatorSpec::riesz(p.alpha, 0.0, p.length)?;
    // column j: kernel j at every interior node
    let cols: Vec<Vec<f64>> = sys
        .kernels
        .par_iter()
        .map(|k| {
            interior
                .iter()
                .map(|&x| match source {
                    EntrySource::ClosedForm(c) => riesz_kernel_eval(p.alpha, (0.0, p.length), k, x, c),
                    EntrySource::Oracle(q) => oracle_apply(&spec, k, x, q),
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    // Rᵀ (n × (n−2)), then M = R A⁻¹ = (A⁻¹ Rᵀ)ᵀ
    let rt = DMatrix::from_fn(n, n - 2, |j, i| cols[j][i]);
    let m = sys.lu.solve_matrix(&rt)?.transpose();
    sys.riesz_matrix = Some(m.columns(1, n - 2).into_owned());
    Ok(())
}

/// Interior values at the requested times; `full_profile` adds the zero
/// boundary values.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub nodes: Vec<f64>,
    /// values[k][i]: node i at times[k].
    pub values: Vec<Vec<f64>>,
    pub steps: usize,
}

impl Trajectory {
    pub fn full_profile(&self, k: usize) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.nodes.len());
        v.push(0.0);
        v.extend_from_slice(&self.values[k]);
        v.push(0.0);
        v
    }

    pub fn last(&self) -> Vec<f64> {
        self.full_profile(self.times.len() - 1)
    }

    pub fn max_abs_diff(&self, other: &[f64]) -> f64 {
        self.last().iter().zip(other).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// β' = K M β from β(0) = U₀ with Dormand–Prince 5(4).
pub fn mol_integrate(sys: &MOLSystem, p: &MOLProblem) -> Result<Trajectory> {
    let m = sys.riesz_matrix.as_ref().ok_or_else(|| Error::param("Riesz matrix not assembled"))?;
    let times = p.times();
    let u0 = sys.initial.as_slice();
    let scale = u0.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if scale == 0.0 || p.dispersion == 0.0 {
        let values = vec![u0.to_vec(); times.len()];
        return Ok(Trajectory { times, nodes: sys.nodes.clone(), values, steps: 0 });
    }
    let km = m * p.dispersion;
    let f = |y: &[f64], dy: &mut [f64]| {
        let r = &km * DVector::from_column_slice(y);
        dy.copy_from_slice(r.as_slice());
    };
    // absolute tolerance relative to the data keeps the solve linear in U₀
    let ctrl = RkControl { rtol: 1e-8, atol: 1e-10 * scale, max_steps: 200_000 };
    let (values, steps) = dopri5(&f, u0, &times, &ctrl)?;
    Ok(Trajectory { times, nodes: sys.nodes.clone(), values, steps })
}

/// Basis, Riesz matrix and integration in one call.
pub fn mol_solve(p: &MOLProblem, source: &EntrySource) -> Result<(MOLSystem, Trajectory)> {
    let mut sys = build_lagrange_basis(p)?;
    assemble_riesz_matrix(&mut sys, p, source)?;
    let tr = mol_integrate(&sys, p)?;
    Ok((sys, tr))
}
