#[cfg(not(any(test, feature = "std")))]
#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::{Domain, GraphFunction, Jet};
use crate::model::ModelParams;
use crate::numerics::fd::lagrange5;
use crate::numerics::quadrature::{integrate, QuadConfig};
use crate::rotational::{generalized_horizon, MassProfile};
use crate::symcurv::DimensionPair;
use crate::{GeoError, Result};

/// `u(x) = c + <b, x> + x^T H x / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticGraph {
    pub constant: f64,
    pub linear: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

impl QuadraticGraph {
    pub fn new(constant: f64, linear: DVector<f64>, hessian: DMatrix<f64>) -> Result<Self> {
        let n = linear.len();
        if n == 0 || hessian.shape() != (n, n) {
            return Err(GeoError::domain("Hessian shape does not match the gradient"));
        }
        if (&hessian - hessian.transpose()).amax() > 1e-12 * hessian.amax().max(1.0) {
            return Err(GeoError::domain("Hessian must be symmetric"));
        }
        Ok(QuadraticGraph { constant, linear, hessian })
    }

    pub fn constant(n: usize, c: f64) -> Self {
        QuadraticGraph { constant: c, linear: DVector::zeros(n), hessian: DMatrix::zeros(n, n) }
    }

    pub fn linear(slope: &[f64]) -> Self {
        let n = slope.len();
        QuadraticGraph { constant: 0.0, linear: DVector::from_column_slice(slope), hessian: DMatrix::zeros(n, n) }
    }

    /// `|x|^2 / 2`.
    pub fn paraboloid(n: usize) -> Self {
        QuadraticGraph { constant: 0.0, linear: DVector::zeros(n), hessian: DMatrix::identity(n, n) }
    }
}

impl GraphFunction for QuadraticGraph {
    fn dim(&self) -> usize {
        self.linear.len()
    }

    fn domain(&self) -> Domain {
        Domain::Whole { n: self.dim() }
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(GeoError::OutOfDomain);
        }
        let x = DVector::from_column_slice(x);
        Ok(self.constant + self.linear.dot(&x) + 0.5 * x.dot(&(&self.hessian * &x)))
    }

    fn jet(&self, x: &[f64]) -> Result<Jet> {
        let value = self.value(x)?;
        let xv = DVector::from_column_slice(x);
        Ok(Jet { value, gradient: &self.linear + &self.hessian * xv, hessian: self.hessian.clone() })
    }
}

/// A radial profile `f(r)` defined for `r >= inner_radius()`.
pub trait RadialFunction {
    fn inner_radius(&self) -> f64;
    fn value(&self, r: f64) -> Result<f64>;
    fn slope(&self, r: f64) -> Result<f64>;
    fn curvature(&self, r: f64) -> Result<f64>;
}

/// The upper sheet of the model family, `f = t^+(r)`.
impl RadialFunction for ModelParams {
    fn inner_radius(&self) -> f64 {
        self.horizon_radius()
    }

    fn value(&self, r: f64) -> Result<f64> {
        self.profile_t(r)
    }

    fn slope(&self, r: f64) -> Result<f64> {
        self.profile_slope(r)
    }

    fn curvature(&self, r: f64) -> Result<f64> {
        self.profile_slope_derivative(r)
    }
}

/// `f(r + shift)`, a radial profile translated to a new inner radius.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedRadial<F> {
    pub inner: F,
    pub shift: f64,
}

impl<F: RadialFunction> ShiftedRadial<F> {
    /// Shifts `inner` so that its inner radius becomes `radius`.
    pub fn with_inner_radius(inner: F, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(GeoError::domain("inner radius must be positive"));
        }
        let shift = inner.inner_radius() - radius;
        Ok(ShiftedRadial { inner, shift })
    }
}

impl<F: RadialFunction> RadialFunction for ShiftedRadial<F> {
    fn inner_radius(&self) -> f64 {
        self.inner.inner_radius() - self.shift
    }

    fn value(&self, r: f64) -> Result<f64> {
        self.inner.value(r + self.shift)
    }

    fn slope(&self, r: f64) -> Result<f64> {
        self.inner.slope(r + self.shift)
    }

    fn curvature(&self, r: f64) -> Result<f64> {
        self.inner.curvature(r + self.shift)
    }
}

/// Upper sheet of the profile with first integral `s^{n/k-2}(1 - sdot^2) = 2c(s)`.
pub struct FirstIntegralRadial<P> {
    dims: DimensionPair,
    profile: P,
    horizon: f64,
}

impl<P: MassProfile> FirstIntegralRadial<P> {
    pub fn new(dims: DimensionPair, profile: P) -> Result<Self> {
        let horizon = generalized_horizon(dims, &profile)?;
        Ok(FirstIntegralRadial { dims, profile, horizon })
    }

    pub fn profile(&self) -> &P {
        &self.profile
    }

    fn gap(&self, s: f64) -> f64 {
        self.dims.pow_potential(s) - 2.0 * self.profile.c(s)
    }

    fn check(&self, r: f64) -> Result<()> {
        if !(r >= self.horizon) {
            return Err(GeoError::OutOfDomain);
        }
        Ok(())
    }
}

impl<P: MassProfile> RadialFunction for FirstIntegralRadial<P> {
    fn inner_radius(&self) -> f64 {
        self.horizon
    }

    fn value(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        let sh = self.horizon;
        let p = self.dims.potential_exponent();
        let dc = self.profile.dc(sh);
        let dgap = p * self.dims.pow_potential(sh) / sh - 2.0 * dc;
        let limit = 2.0 * (2.0 * self.profile.c(sh) / dgap).sqrt();
        let f = |xi: f64| {
            let s = sh + xi * xi;
            let gap = self.gap(s);
            if s == sh || !(gap > 0.0) {
                return limit;
            }
            2.0 * xi * (2.0 * self.profile.c(s) / gap).sqrt()
        };
        Ok(integrate(f, 0.0, (r - sh).sqrt(), &QuadConfig::default())?.value)
    }

    fn slope(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        let gap = self.gap(r);
        if !(gap > 0.0) {
            return Err(GeoError::OutOfDomain);
        }
        Ok((2.0 * self.profile.c(r) / gap).sqrt())
    }

    fn curvature(&self, r: f64) -> Result<f64> {
        let slope = self.slope(r)?;
        let c = self.profile.c(r);
        let dc = self.profile.dc(r);
        let gap = self.gap(r);
        let dgap = self.dims.potential_exponent() * self.dims.pow_potential(r) / r - 2.0 * dc;
        Ok((dc * gap - c * dgap) / (slope * gap * gap))
    }
}

/// `u(x) = f(|x|)` on the exterior of the inner radius.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGraph<F> {
    n: usize,
    profile: F,
    guard: f64,
}

impl<F: RadialFunction> RadialGraph<F> {
    /// Derivative queries closer than `guard_rel * inner_radius` to the inner cycle are rejected.
    pub fn new(n: usize, profile: F, guard_rel: f64) -> Result<Self> {
        if n < 2 {
            return Err(GeoError::domain("radial graphs need n >= 2"));
        }
        if !(guard_rel >= 0.0) {
            return Err(GeoError::domain("guard band must be nonnegative"));
        }
        let guard = guard_rel * profile.inner_radius();
        Ok(RadialGraph { n, profile, guard })
    }

    pub fn profile(&self) -> &F {
        &self.profile
    }

    fn radius(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(GeoError::OutOfDomain);
        }
        Ok(x.iter().map(|v| v * v).sum::<f64>().sqrt())
    }
}

impl<F: RadialFunction> GraphFunction for RadialGraph<F> {
    fn dim(&self) -> usize {
        self.n
    }

    fn domain(&self) -> Domain {
        Domain::Exterior { center: alloc::vec![0.0; self.n], radius: self.profile.inner_radius(), guard: self.guard }
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        let r = self.radius(x)?;
        let inner = self.profile.inner_radius();
        // Points on the inner cycle land a rounding error off it; the square-root
        // behaviour of the profile there would amplify that error.
        if !(r >= inner * (1.0 - 8.0 * f64::EPSILON)) {
            return Err(GeoError::OutOfDomain);
        }
        let r = if r <= inner * (1.0 + 8.0 * f64::EPSILON) { inner } else { r };
        self.profile.value(r)
    }

    fn jet(&self, x: &[f64]) -> Result<Jet> {
        let r = self.radius(x)?;
        if !(r >= self.profile.inner_radius() + self.guard) || r == 0.0 {
            return Err(GeoError::OutOfDomain);
        }
        let value = self.profile.value(r)?;
        let f1 = self.profile.slope(r)?;
        let f2 = self.profile.curvature(r)?;
        let xhat = DVector::from_iterator(self.n, x.iter().map(|v| v / r));
        let proj = &xhat * xhat.transpose();
        let hessian = &proj * f2 + (DMatrix::identity(self.n, self.n) - &proj) * (f1 / r);
        Ok(Jet { value, gradient: xhat * f1, hessian })
    }
}

/// Samples of `u` on a uniform grid, differentiated through the tensor-product
/// 5-point Lagrange interpolant (fourth-order centered differences at nodes).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridGraph {
    pub spacing: f64,
    pub origin: Vec<f64>,
    pub extents: Vec<usize>,
    /// Row-major values; the last axis varies fastest.
    pub values: Vec<f64>,
}

impl GridGraph {
    pub fn new(spacing: f64, origin: Vec<f64>, extents: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(GeoError::domain("grid spacing must be positive"));
        }
        if origin.is_empty() || origin.len() != extents.len() {
            return Err(GeoError::domain("origin and extents must have the same nonzero length"));
        }
        if extents.iter().any(|&e| e < 5) {
            return Err(GeoError::domain("each grid axis needs at least 5 nodes"));
        }
        let count: usize = extents.iter().product();
        if values.len() != count {
            return Err(GeoError::domain("value count does not match the grid extents"));
        }
        if values.iter().chain(&origin).any(|v| !v.is_finite()) {
            return Err(GeoError::domain("grid data must be finite"));
        }
        Ok(GridGraph { spacing, origin, extents, values })
    }

    /// Samples `f` on the grid.
    pub fn sample<F: FnMut(&[f64]) -> f64>(spacing: f64, origin: Vec<f64>, extents: Vec<usize>, mut f: F) -> Result<Self> {
        let count: usize = extents.iter().product();
        let mut values = Vec::with_capacity(count);
        let mut idx = alloc::vec![0usize; extents.len()];
        let mut x = origin.clone();
        for _ in 0..count {
            for (a, i) in idx.iter().enumerate() {
                x[a] = origin[a] + spacing * *i as f64;
            }
            values.push(f(&x));
            for a in (0..extents.len()).rev() {
                idx[a] += 1;
                if idx[a] < extents[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        GridGraph::new(spacing, origin, extents, values)
    }

    fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.extents).fold(0, |acc, (i, e)| acc * e + i)
    }

    fn interpolate(&self, x: &[f64], derivatives: bool) -> Result<Jet> {
        let n = self.extents.len();
        if !self.domain().admits_value(x) {
            return Err(GeoError::OutOfDomain);
        }
        let mut base = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for a in 0..n {
            let u = (x[a] - self.origin[a]) / self.spacing;
            let b = u.round().clamp(2.0, (self.extents[a] - 3) as f64);
            base.push(b as usize - 2);
            weights.push(lagrange5(u - b));
        }
        let h = self.spacing;
        let mut value = 0.0;
        let mut gradient = DVector::zeros(n);
        let mut hessian = DMatrix::zeros(n, n);
        let total = 5usize.pow(n as u32);
        let mut off = alloc::vec![0usize; n];
        let mut idx = alloc::vec![0usize; n];
        for _ in 0..total {
            for a in 0..n {
                idx[a] = base[a] + off[a];
            }
            let f = self.values[self.flat_index(&idx)];
            let prod: f64 = (0..n).map(|a| weights[a].0[off[a]]).product();
            value += prod * f;
            if derivatives {
                for a in 0..n {
                    let rest: f64 = (0..n).filter(|&b| b != a).map(|b| weights[b].0[off[b]]).product();
                    gradient[a] += weights[a].1[off[a]] * rest * f / h;
                    hessian[(a, a)] += weights[a].2[off[a]] * rest * f / (h * h);
                    for b in 0..a {
                        let rest2: f64 =
                            (0..n).filter(|&c| c != a && c != b).map(|c| weights[c].0[off[c]]).product();
                        let v = weights[a].1[off[a]] * weights[b].1[off[b]] * rest2 * f / (h * h);
                        hessian[(a, b)] += v;
                        hessian[(b, a)] += v;
                    }
                }
            }
            for a in (0..n).rev() {
                off[a] += 1;
                if off[a] < 5 {
                    break;
                }
                off[a] = 0;
            }
        }
        Ok(Jet { value, gradient, hessian })
    }
}

impl GraphFunction for GridGraph {
    fn dim(&self) -> usize {
        self.extents.len()
    }

    fn domain(&self) -> Domain {
        let upper = self
            .origin
            .iter()
            .zip(&self.extents)
            .map(|(o, e)| o + self.spacing * (*e - 1) as f64)
            .collect();
        Domain::Patch { lower: self.origin.clone(), upper }
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.interpolate(x, false)?.value)
    }

    fn jet(&self, x: &[f64]) -> Result<Jet> {
        self.interpolate(x, true)
    }
}
