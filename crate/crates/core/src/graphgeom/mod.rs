//! Graph hypersurfaces `x_{n+1} = u(x)` over an n-plane: induced metric,
//! nonparametric shape operator, divergence identities, the Jacobi operator,
//! and doubling across a horizon.

mod doubling;
mod surfaces;

pub use doubling::{
    horizon_conditions, reflect_double, regularity_certificate, DoubledSurface, HorizonConditions, HorizonCycle,
    RegularityOptions, RegularityReport, RegularitySample,
};
pub use surfaces::{FirstIntegralRadial, GridGraph, QuadraticGraph, RadialFunction, RadialGraph, ShiftedRadial};

#[cfg(not(any(test, feature = "std")))]
#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::symcurv::{matrix_sigmas, newton_from_sigmas};
use crate::{GeoError, Result};

/// Region of the base plane on which a graph is defined.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Domain {
    Whole { n: usize },
    /// `|x - center| >= radius`; derivatives need `|x - center| >= radius + guard`.
    Exterior { center: Vec<f64>, radius: f64, guard: f64 },
    /// Closed box `lower <= x <= upper`.
    Patch { lower: Vec<f64>, upper: Vec<f64> },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Whole { n } => *n,
            Domain::Exterior { center, .. } => center.len(),
            Domain::Patch { lower, .. } => lower.len(),
        }
    }

    fn distance_outside(center: &[f64], x: &[f64]) -> f64 {
        center.iter().zip(x).map(|(c, y)| (y - c) * (y - c)).sum::<f64>().sqrt()
    }

    /// Whether `u(x)` may be queried.
    pub fn admits_value(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            Domain::Whole { .. } => true,
            Domain::Exterior { center, radius, .. } => Self::distance_outside(center, x) >= *radius,
            Domain::Patch { lower, upper } => x.iter().zip(lower.iter().zip(upper)).all(|(v, (l, u))| l <= v && v <= u),
        }
    }

    /// Whether derivatives may be queried (outside the horizon guard band).
    pub fn admits_jet(&self, x: &[f64]) -> bool {
        match self {
            Domain::Exterior { center, radius, guard } => {
                x.len() == center.len() && Self::distance_outside(center, x) >= radius + guard
            }
            _ => self.admits_value(x),
        }
    }
}

/// Value, gradient and Hessian of a graph function at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

/// A scalar field `u` over a region of an n-plane together with its derivatives.
pub trait GraphFunction {
    fn dim(&self) -> usize;
    fn domain(&self) -> Domain;
    fn value(&self, x: &[f64]) -> Result<f64>;
    fn jet(&self, x: &[f64]) -> Result<Jet>;
}

impl<G: GraphFunction + ?Sized> GraphFunction for &G {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn domain(&self) -> Domain {
        (**self).domain()
    }
    fn value(&self, x: &[f64]) -> Result<f64> {
        (**self).value(x)
    }
    fn jet(&self, x: &[f64]) -> Result<Jet> {
        (**self).jet(x)
    }
}

/// `A = B + C` with `B = Hess(u)/W` and `C_ij = -u_i u_k u_kj / W^3`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeDecomposition {
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub a: DMatrix<f64>,
    pub w: f64,
}

fn checked_jet(u: &dyn GraphFunction, x: &[f64]) -> Result<Jet> {
    if x.len() != u.dim() || !u.domain().admits_jet(x) {
        return Err(GeoError::OutOfDomain);
    }
    u.jet(x)
}

fn metric_from_gradient(v: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::identity(v.len(), v.len()) + v * v.transpose()
}

fn inverse_metric(v: &DVector<f64>, w: f64) -> DMatrix<f64> {
    DMatrix::identity(v.len(), v.len()) - v * v.transpose() / (w * w)
}

fn decomposition_from_jet(jet: &Jet) -> ShapeDecomposition {
    let v = &jet.gradient;
    let w = (1.0 + v.norm_squared()).sqrt();
    let b = &jet.hessian / w;
    let c = -(v * (v.transpose() * &jet.hessian)) / (w * w * w);
    let a = &b + &c;
    ShapeDecomposition { b, c, a, w }
}

/// `g_ij = delta_ij + u_i u_j`.
pub fn induced_metric(u: &dyn GraphFunction, x: &[f64]) -> Result<DMatrix<f64>> {
    Ok(metric_from_gradient(&checked_jet(u, x)?.gradient))
}

pub fn shape_operator(u: &dyn GraphFunction, x: &[f64]) -> Result<ShapeDecomposition> {
    Ok(decomposition_from_jet(&checked_jet(u, x)?))
}

/// `g^{1/2} A g^{-1/2}`, symmetric with the eigenvalues of `A`.
pub fn symmetrized_shape_operator(u: &dyn GraphFunction, x: &[f64]) -> Result<DMatrix<f64>> {
    let jet = checked_jet(u, x)?;
    let v = &jet.gradient;
    let w = (1.0 + v.norm_squared()).sqrt();
    let n = v.len();
    let vvt = v * v.transpose();
    let g_inv_half = DMatrix::identity(n, n) - &vvt / (w * (w + 1.0));
    let s = &g_inv_half * &jet.hessian * &g_inv_half / w;
    Ok((&s + s.transpose()) * 0.5)
}

/// Upward unit normal `(-grad u, 1)/W` in `R^{n+1}`.
pub fn unit_normal(u: &dyn GraphFunction, x: &[f64]) -> Result<DVector<f64>> {
    let jet = checked_jet(u, x)?;
    Ok(normal_from_gradient(&jet.gradient))
}

fn normal_from_gradient(v: &DVector<f64>) -> DVector<f64> {
    let w = (1.0 + v.norm_squared()).sqrt();
    let n = v.len();
    let mut out = DVector::zeros(n + 1);
    for i in 0..n {
        out[i] = -v[i] / w;
    }
    out[n] = 1.0 / w;
    out
}

pub fn sigma_p_graph(u: &dyn GraphFunction, x: &[f64], p: usize) -> Result<f64> {
    let s = symmetrized_shape_operator(u, x)?;
    if p > s.nrows() {
        return Err(GeoError::domain("p exceeds the dimension"));
    }
    Ok(matrix_sigmas(&s)?[p])
}

/// All `sigma_0 .. sigma_n` of the shape operator at `x`.
pub fn sigmas_graph(u: &dyn GraphFunction, x: &[f64]) -> Result<Vec<f64>> {
    matrix_sigmas(&symmetrized_shape_operator(u, x)?)
}

pub(crate) struct Frame {
    pub(crate) jet: Jet,
    pub(crate) w: f64,
    pub(crate) newton: DMatrix<f64>,
    pub(crate) g_inv: DMatrix<f64>,
    pub(crate) sigmas: Vec<f64>,
}

pub(crate) fn frame(u: &dyn GraphFunction, x: &[f64], k: usize) -> Result<Frame> {
    let jet = checked_jet(u, x)?;
    let n = jet.gradient.len();
    if k == 0 || 2 * k > n + 1 {
        return Err(GeoError::domain("need 1 <= 2k - 1 <= n"));
    }
    let dec = decomposition_from_jet(&jet);
    let w = dec.w;
    let g_inv = inverse_metric(&jet.gradient, w);
    let sym = {
        let v = &jet.gradient;
        let vvt = v * v.transpose();
        let half = DMatrix::identity(n, n) - &vvt / (w * (w + 1.0));
        let s = &half * &jet.hessian * &half / w;
        (&s + s.transpose()) * 0.5
    };
    let sigmas = matrix_sigmas(&sym)?;
    let newton = newton_from_sigmas(&dec.a, &sigmas, 2 * k - 1);
    Ok(Frame { jet, w, newton, g_inv, sigmas })
}

/// Covariant divergence `(1/W) d_a (W (N g^{-1} dphi)^a)` by centered differences of spacing `h`.
fn divergence<F>(u: &dyn GraphFunction, x: &[f64], k: usize, h: f64, mut dphi: F) -> Result<(f64, Frame)>
where
    F: FnMut(&[f64], &Jet) -> Result<DVector<f64>>,
{
    if !(h > 0.0) {
        return Err(GeoError::domain("finite-difference spacing must be positive"));
    }
    let center = frame(u, x, k)?;
    let n = x.len();
    let mut y = x.to_vec();
    let mut total = 0.0;
    for a in 0..n {
        let mut flux = [0.0; 2];
        for (slot, sign) in [(0, 1.0), (1, -1.0)] {
            y[a] = x[a] + sign * h;
            let f = frame(u, &y, k)?;
            let d = dphi(&y, &f.jet)?;
            flux[slot] = f.w * (&f.newton * (&f.g_inv * d))[a];
        }
        y[a] = x[a];
        total += (flux[0] - flux[1]) / (2.0 * h);
    }
    Ok((total / center.w, center))
}

/// `div_g(N_{2k-1}(A) grad x_i)` for the ambient coordinate `i` (`0..n`, with `i = n` the height).
pub fn divergence_residual(u: &dyn GraphFunction, x: &[f64], i: usize, k: usize, h: f64) -> Result<f64> {
    let n = u.dim();
    if i > n {
        return Err(GeoError::domain("coordinate index exceeds n"));
    }
    let (value, _) = divergence(u, x, k, h, |_, jet| {
        if i == n {
            Ok(jet.gradient.clone())
        } else {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            Ok(e)
        }
    })?;
    Ok(value)
}

/// `J_k f = div_g(N_{2k-1}(A) grad f) - (2k+1) sigma_{2k+1}(A) f` for an ambient field `f`
/// evaluated on the graph; derivatives of `f` are taken by centered differences.
pub fn jacobi_apply<F>(u: &dyn GraphFunction, f: F, x: &[f64], k: usize, h: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let n = u.dim();
    let on_graph = |y: &[f64]| -> Result<f64> {
        let mut p = y.to_vec();
        p.push(u.value(y)?);
        Ok(f(&p))
    };
    let (div, center) = divergence(u, x, k, h, |y, _| {
        let mut z = y.to_vec();
        let mut d = DVector::zeros(n);
        for b in 0..n {
            z[b] = y[b] + h;
            let fp = on_graph(&z)?;
            z[b] = y[b] - h;
            let fm = on_graph(&z)?;
            z[b] = y[b];
            d[b] = (fp - fm) / (2.0 * h);
        }
        Ok(d)
    })?;
    let sigma = if 2 * k < n { center.sigmas[2 * k + 1] } else { 0.0 };
    let mut p = x.to_vec();
    p.push(center.jet.value);
    Ok(div - (2 * k + 1) as f64 * sigma * f(&p))
}
