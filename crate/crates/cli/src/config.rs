//! JSON problem files and the merged operator/kernel configuration.

use std::path::Path;

use fracrbf::fracops::{OperatorKind, OperatorSpec, QuadratureControl};
use fracrbf::rbf::{FamilyTag, RBFFamily, RBFKernel};
use fracrbf::solvers::{Forcing, FracODEProblem, InitialProfile, MOLProblem};
use fracrbf::specfun::SeriesControl;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::Failure;

/// Operator/kernel settings accepted from `--config` by eval, oracle-check
/// and sweep; command-line flags override them.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalFile {
    pub op: Option<String>,
    pub alpha: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub family: Option<String>,
    pub param: Option<f64>,
    pub scale: Option<f64>,
    pub center: Option<f64>,
    pub x: Option<f64>,
    pub grid: Option<String>,
    pub rel_tol: Option<f64>,
    pub max_terms: Option<usize>,
    pub quad_tol: Option<f64>,
    /// oracle-check passes when the relative error is at most this.
    pub bound: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeFile {
    pub alpha: f64,
    pub forcing: String,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub n: usize,
    pub family: String,
    pub param: f64,
    pub scale: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeFile {
    pub alpha: f64,
    #[serde(rename = "K")]
    pub dispersion: f64,
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub n: usize,
    pub u0: String,
    pub family: String,
    pub param: f64,
    pub scale: f64,
    pub out_times: Vec<f64>,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::config(format!("--config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::config(format!("--config {}: {e}", path.display())))
}

pub fn family(name: &str, param: Option<f64>) -> Result<RBFFamily, Failure> {
    let tag = FamilyTag::from_name(name).ok_or_else(|| {
        Failure::config(format!(
            "--family: unknown family '{name}' (gaussian, multiquadric, powers, matern, thinplate)"
        ))
    })?;
    let default = match tag {
        FamilyTag::Gaussian => 0.0,
        FamilyTag::Multiquadric => 1.0,
        FamilyTag::Powers => 3.0,
        FamilyTag::Matern => 1.5,
        FamilyTag::ThinPlate => 1.0,
    };
    RBFFamily::new(tag, param.unwrap_or(default)).map_err(|e| Failure::config(format!("--param: {e}")))
}

pub fn series_control(rel_tol: Option<f64>, max_terms: Option<usize>) -> Result<SeriesControl, Failure> {
    let d = SeriesControl::default();
    SeriesControl::new(rel_tol.unwrap_or(d.rel_tol), max_terms.unwrap_or(d.max_terms))
        .map_err(|e| Failure::config(format!("--rel-tol/--max-terms: {e}")))
}

pub fn quad_control(tol: Option<f64>) -> Result<QuadratureControl, Failure> {
    let d = QuadratureControl::with_tol(1e-12);
    QuadratureControl::new(tol.unwrap_or(d.abs_tol), d.max_subdivisions, 0.0)
        .map_err(|e| Failure::config(format!("--quad-tol: {e}")))
}

/// "start:stop:count", inclusive of both ends.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::config(format!("--grid: expected start:stop:count, got '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if count == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    Ok((0..count).map(|i| start + (stop - start) * i as f64 / (count - 1) as f64).collect())
}

/// Everything eval / oracle-check / sweep need, validated.
pub struct EvalSetup {
    pub spec: OperatorSpec,
    pub kernel: RBFKernel,
    pub points: Vec<f64>,
    pub grid_mode: bool,
    pub series: SeriesControl,
    pub quad: QuadratureControl,
    pub bound: f64,
}

impl EvalFile {
    /// Fields set in `over` win.
    pub fn merge(self, over: EvalFile) -> EvalFile {
        // a point or grid on the command line replaces the file's choice of mode
        let (x, grid) = if over.x.is_some() || over.grid.is_some() { (over.x, over.grid) } else { (self.x, self.grid) };
        EvalFile {
            op: over.op.or(self.op),
            alpha: over.alpha.or(self.alpha),
            a: over.a.or(self.a),
            b: over.b.or(self.b),
            family: over.family.or(self.family),
            param: over.param.or(self.param),
            scale: over.scale.or(self.scale),
            center: over.center.or(self.center),
            x,
            grid,
            rel_tol: over.rel_tol.or(self.rel_tol),
            max_terms: over.max_terms.or(self.max_terms),
            quad_tol: over.quad_tol.or(self.quad_tol),
            bound: over.bound.or(self.bound),
        }
    }

    pub fn validate(self, need_grid: bool) -> Result<EvalSetup, Failure> {
        let op = self.op.ok_or_else(|| Failure::config("--op is required"))?;
        let kind = OperatorKind::from_name(&op).ok_or_else(|| {
            Failure::config(format!(
                "--op: unknown operator '{op}' (rl-int-left, rl-int-right, rl-der-left, rl-der-right, caputo-left, caputo-right, riesz)"
            ))
        })?;
        let alpha = self.alpha.ok_or_else(|| Failure::config("--alpha is required"))?;
        let spec = if kind == OperatorKind::Riesz {
            let b = self.b.ok_or_else(|| Failure::config("--b is required for riesz"))?;
            OperatorSpec::riesz(alpha, self.a.unwrap_or(0.0), b)
        } else if kind.is_right() {
            if self.a.is_some() {
                return Err(Failure::config(format!("--a is not used by {op}; give --b")));
            }
            let b = self.b.ok_or_else(|| Failure::config(format!("--b is required for {op}")))?;
            OperatorSpec::right(kind, alpha, b)
        } else {
            if self.b.is_some() {
                return Err(Failure::config(format!("--b is not used by {op}; give --a")));
            }
            OperatorSpec::left(kind, alpha, self.a.unwrap_or(0.0))
        }
        .map_err(|e| Failure::config(format!("--alpha: {e}")))?;
        let fam = family(self.family.as_deref().unwrap_or("gaussian"), self.param)?;
        let kernel = RBFKernel::new(fam, self.scale.unwrap_or(1.0), self.center.unwrap_or(0.0))
            .map_err(|e| Failure::config(format!("--scale/--center: {e}")))?;
        let (points, grid_mode) = match (self.x, self.grid) {
            (Some(_), Some(_)) => return Err(Failure::config("--x and --grid are mutually exclusive")),
            (Some(x), None) if !need_grid => (vec![x], false),
            (None, Some(g)) => (parse_grid(&g)?, true),
            (Some(_), None) => return Err(Failure::config("--grid is required (sweep works on a grid)")),
            (None, None) => return Err(Failure::config("one of --x or --grid is required")),
        };
        let bound = self.bound.unwrap_or(1e-6);
        if bound.is_nan() || bound <= 0.0 {
            return Err(Failure::config("bound must be positive"));
        }
        Ok(EvalSetup {
            spec,
            kernel,
            points,
            grid_mode,
            series: series_control(self.rel_tol, self.max_terms)?,
            quad: quad_control(self.quad_tol)?,
            bound,
        })
    }
}

impl OdeFile {
    pub fn problem(&self) -> Result<FracODEProblem, Failure> {
        let forcing = Forcing::from_name(&self.forcing).ok_or_else(|| {
            Failure::config(format!("forcing: unknown '{}' (one, texp, expsin, zero)", self.forcing))
        })?;
        let p = FracODEProblem {
            alpha: self.alpha,
            forcing,
            horizon: self.horizon,
            node_count: self.n,
            family: family(&self.family, Some(self.param))?,
            scale: self.scale,
        };
        p.validate().map_err(|e| Failure::config(e.to_string()))?;
        Ok(p)
    }
}

impl PdeFile {
    pub fn problem(&self) -> Result<MOLProblem, Failure> {
        let u0 = InitialProfile::from_name(&self.u0)
            .ok_or_else(|| Failure::config(format!("u0: unknown '{}' (poly-hump, sin4x, zero)", self.u0)))?;
        let p = MOLProblem {
            alpha: self.alpha,
            dispersion: self.dispersion,
            length: self.length,
            u0,
            amplitude: 1.0,
            horizon: self.horizon,
            node_count: self.n,
            family: family(&self.family, Some(self.param))?,
            scale: self.scale,
            out_times: self.out_times.clone(),
        };
        p.validate().map_err(|e| Failure::config(e.to_string()))?;
        if p.out_times.iter().any(|t| *t > p.horizon) {
            return Err(Failure::config("out_times must not exceed T"));
        }
        Ok(p)
    }
}
