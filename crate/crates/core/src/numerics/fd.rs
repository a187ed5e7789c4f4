//! Fourth-order centered finite differences.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::Result;

/// Gradient and Hessian of `f` at `x` with fourth-order centered stencils of spacing `h`.
pub fn gradient_hessian<F>(mut f: F, x: &[f64], h: f64) -> Result<(DVector<f64>, DMatrix<f64>)>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let d = x.len();
    let mut y: Vec<f64> = x.to_vec();
    let mut eval = |y: &mut Vec<f64>, offsets: &[(usize, f64)]| -> Result<f64> {
        for &(i, o) in offsets {
            y[i] = x[i] + o * h;
        }
        let v = f(y);
        for &(i, _) in offsets {
            y[i] = x[i];
        }
        v
    };
    let f0 = eval(&mut y, &[])?;
    let mut grad = DVector::zeros(d);
    let mut hess = DMatrix::zeros(d, d);
    for i in 0..d {
        let fp1 = eval(&mut y, &[(i, 1.0)])?;
        let fm1 = eval(&mut y, &[(i, -1.0)])?;
        let fp2 = eval(&mut y, &[(i, 2.0)])?;
        let fm2 = eval(&mut y, &[(i, -2.0)])?;
        grad[i] = (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * h);
        hess[(i, i)] = (16.0 * (fp1 + fm1) - (fp2 + fm2) - 30.0 * f0) / (12.0 * h * h);
        for j in 0..i {
            let mut at = |a: f64, b: f64| eval(&mut y, &[(i, a), (j, b)]);
            let near = at(1.0, 1.0)? + at(-1.0, -1.0)? - at(1.0, -1.0)? - at(-1.0, 1.0)?;
            let far = at(2.0, 2.0)? + at(-2.0, -2.0)? - at(2.0, -2.0)? - at(-2.0, 2.0)?;
            let v = (16.0 * near - far) / (48.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Ok((grad, hess))
}

/// Weights of the 5-point Lagrange interpolant on nodes `-2..=2` (unit spacing)
/// at offset `t`: values, first and second derivatives.
pub fn lagrange5(t: f64) -> ([f64; 5], [f64; 5], [f64; 5]) {
    let nodes = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let mut w = [0.0; 5];
    let mut d1 = [0.0; 5];
    let mut d2 = [0.0; 5];
    for j in 0..5 {
        let mut denom = 1.0;
        for m in 0..5 {
            if m != j {
                denom *= nodes[j] - nodes[m];
            }
        }
        let others: Vec<f64> = (0..5).filter(|&m| m != j).map(|m| t - nodes[m]).collect();
        let mut p = 1.0;
        let mut dp = 0.0;
        let mut ddp = 0.0;
        for a in 0..4 {
            p *= others[a];
            let mut prod1 = 1.0;
            for b in 0..4 {
                if b != a {
                    prod1 *= others[b];
                }
            }
            dp += prod1;
            for b in 0..4 {
                if b == a {
                    continue;
                }
                let mut prod2 = 1.0;
                for c in 0..4 {
                    if c != a && c != b {
                        prod2 *= others[c];
                    }
                }
                ddp += prod2;
            }
        }
        w[j] = p / denom;
        d1[j] = dp / denom;
        d2[j] = ddp / denom;
    }
    (w, d1, d2)
}
