use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use crate::{GeoError, Result};

#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    /// Weighted residual 2-norm.
    pub residual_norm: f64,
    /// Ratio of extreme singular values of the column-equilibrated design.
    pub condition: f64,
}

/// Solves `min || W (X beta - y) ||` by SVD after column equilibration.
pub fn weighted_least_squares(design: &DMatrix<f64>, rhs: &DVector<f64>, weights: &[f64], max_condition: f64) -> Result<LeastSquares> {
    let (rows, cols) = design.shape();
    if rows != rhs.len() || rows != weights.len() {
        return Err(GeoError::domain("least-squares shapes disagree"));
    }
    if rows < cols || cols == 0 {
        return Err(GeoError::Conditioning(f64::INFINITY));
    }
    let mut x = design.clone();
    let mut y = rhs.clone();
    for (i, w) in weights.iter().enumerate() {
        x.row_mut(i).scale_mut(*w);
        y[i] *= w;
    }
    let mut col_scale = Vec::with_capacity(cols);
    for j in 0..cols {
        let norm = x.column(j).norm();
        let s = if norm > 0.0 { 1.0 / norm } else { 1.0 };
        x.column_mut(j).scale_mut(s);
        col_scale.push(s);
    }
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition < max_condition) {
        return Err(GeoError::Conditioning(condition));
    }
    let beta = svd
        .solve(&y, 0.0)
        .map_err(|_| GeoError::Conditioning(condition))?;
    let residual_norm = (&x * &beta - &y).norm();
    let coefficients = beta.iter().zip(&col_scale).map(|(b, s)| b * s).collect();
    Ok(LeastSquares { coefficients, residual_norm, condition })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let design = DMatrix::from_fn(10, 2, |i, j| if j == 0 { 1.0 } else { xs[i] });
        let rhs = DVector::from_fn(10, |i, _| 3.0 - 2.0 * xs[i]);
        let fit = weighted_least_squares(&design, &rhs, &[1.0; 10], 1e12).unwrap();
        assert!((fit.coefficients[0] - 3.0).abs() < 1e-12);
        assert!((fit.coefficients[1] + 2.0).abs() < 1e-12);
        assert!(fit.residual_norm < 1e-12);
    }

    #[test]
    fn rank_deficient_is_rejected() {
        let design = DMatrix::from_fn(6, 2, |i, _| i as f64);
        let rhs = DVector::from_element(6, 1.0);
        match weighted_least_squares(&design, &rhs, &[1.0; 6], 1e12) {
            Err(GeoError::Conditioning(_)) => {}
            other => panic!("expected conditioning error, got {other:?}"),
        }
    }
}
