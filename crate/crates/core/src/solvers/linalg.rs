//! Dense LU with partial pivoting and an ∞-norm condition estimate.

use nalgebra::{DMatrix, DVector, Dyn, LU};

use crate::error::{Error, Result};

/// Condition estimates above this are reported as warnings.
pub const CONDITION_WARNING: f64 = 1e12;

pub struct DenseLu {
    lu: LU<f64, Dyn, Dyn>,
    condition: f64,
}

fn norm_inf(a: &DMatrix<f64>) -> f64 {
    a.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

impl DenseLu {
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::param(format!("matrix must be square, got {}x{}", a.nrows(), a.ncols())));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("matrix has non-finite entries"));
        }
        let lu = a.clone().lu();
        if !lu.is_invertible() {
            return Err(Error::SingularMatrix);
        }
        let inv = lu.try_inverse().ok_or(Error::SingularMatrix)?;
        let condition = norm_inf(a) * norm_inf(&inv);
        if !condition.is_finite() {
            return Err(Error::SingularMatrix);
        }
        Ok(DenseLu { lu, condition })
    }

    /// ‖A‖∞ ‖A⁻¹‖∞ (the inverse is formed explicitly; sizes here are small).
    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    pub fn is_ill_conditioned(&self) -> bool {
        self.condition > CONDITION_WARNING
    }

    pub fn solve(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        self.lu.solve(b).ok_or(Error::SingularMatrix)
    }

    pub fn solve_matrix(&self, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.lu.solve(b).ok_or(Error::SingularMatrix)
    }
}

pub(crate) fn residual_ok(a: &DMatrix<f64>, x: &DVector<f64>, b: &DVector<f64>) -> bool {
    let r = a * x - b;
    let rn = r.amax();
    rn <= 1e-8 * (norm_inf(a) * x.amax() + b.amax())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_solve() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 4.0]);
        let lu = DenseLu::new(&a).unwrap();
        let x = lu.solve(&DVector::from_vec(vec![2.0, 8.0])).unwrap();
        assert_eq!(x.as_slice(), &[1.0, 2.0]);
        assert_eq!(lu.condition_estimate(), 2.0);
    }

    #[test]
    fn singular_detected() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(DenseLu::new(&a), Err(Error::SingularMatrix)));
    }
}
