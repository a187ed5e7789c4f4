//! Closed-form data of the Lovelock-Schwarzschild family and its
//! negative-cosmological-constant analogue: potentials, horizons, the
//! conformally flat chart, and the height function of the embedded profile.

#[cfg(not(any(test, feature = "std")))]
#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;


use crate::numerics::quadrature::{integrate, QuadConfig};
use crate::numerics::roots::brent;
use crate::symcurv::DimensionPair;
use crate::{GeoError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelParams {
    dims: DimensionPair,
    m: f64,
}

/// `x^a - y^a` for `x = y (1 + d)`, accurate when `d` is small.
fn power_gap(y: f64, d: f64, a: f64) -> f64 {
    y.powf(a) * (a * d.ln_1p()).exp_m1()
}

impl ModelParams {
    pub fn new(dims: DimensionPair, m: f64) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(GeoError::domain("mass parameter must be positive"));
        }
        Ok(ModelParams { dims, m })
    }

    pub fn dims(&self) -> DimensionPair {
        self.dims
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// `V(r) = 1 - 2m / r^{n/k - 2}`.
    pub fn potential(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(GeoError::domain("potential needs r > 0"));
        }
        Ok(1.0 - 2.0 * self.m / self.dims.pow_potential(r))
    }

    /// `r_{k,m} = (2m)^{k/(n-2k)}`.
    pub fn horizon_radius(&self) -> f64 {
        (2.0 * self.m).powf(self.dims.horizon_exponent())
    }

    /// Horizon in the conformally flat chart, `(m/2)^{k/(n-2k)}`.
    pub fn conformal_horizon(&self) -> f64 {
        (0.5 * self.m).powf(self.dims.horizon_exponent())
    }

    fn conformal_ratio(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(GeoError::domain("conformal radius needs rho > 0"));
        }
        Ok(self.m / (2.0 * self.dims.pow_potential(rho)))
    }

    /// Areal radius `r(rho) = rho (1 + m / (2 rho^{n/k-2}))^{2k/(n-2k)}`.
    pub fn conformal_radius_map(&self, rho: f64) -> Result<f64> {
        let x = self.conformal_ratio(rho)?;
        Ok(rho * (1.0 + x).powf(2.0 * self.dims.horizon_exponent()))
    }

    /// Lapse `((1 - x) / (1 + x))^2` with `x = m / (2 rho^{n/k-2})`.
    pub fn lapse(&self, rho: f64) -> Result<f64> {
        let x = self.conformal_ratio(rho)?;
        let l = (1.0 - x) / (1.0 + x);
        Ok(l * l)
    }

    fn check_outside(&self, s: f64) -> Result<()> {
        if !(s >= self.horizon_radius()) {
            return Err(GeoError::domain("profile is defined only outside the horizon"));
        }
        Ok(())
    }

    /// `dt/ds = sqrt(2m / (s^{n/k-2} - 2m))` on the upper sheet.
    pub fn profile_slope(&self, s: f64) -> Result<f64> {
        self.check_outside(s)?;
        let gap = self.gap(s);
        if !(gap > 0.0) {
            return Err(GeoError::domain("slope diverges at the horizon"));
        }
        Ok((2.0 * self.m / gap).sqrt())
    }

    /// `d^2 t / ds^2` on the upper sheet.
    pub fn profile_slope_derivative(&self, s: f64) -> Result<f64> {
        let slope = self.profile_slope(s)?;
        let p = self.dims.potential_exponent();
        let sp = self.dims.pow_potential(s);
        Ok(-0.5 * slope * p * sp / (s * self.gap(s)))
    }

    // s^{n/k-2} - 2m, accurate near the horizon.
    fn gap(&self, s: f64) -> f64 {
        let rh = self.horizon_radius();
        power_gap(rh, (s - rh) / rh, self.dims.potential_exponent())
    }

    /// Height of the upper sheet, `t(s) = int_{r_h}^s sqrt(2m/(sigma^{n/k-2} - 2m)) dsigma`.
    pub fn profile_t(&self, s: f64) -> Result<f64> {
        self.check_outside(s)?;
        self.t_from_horizon(s)
    }

    fn t_from_horizon(&self, s: f64) -> Result<f64> {
        let rh = self.horizon_radius();
        let p = self.dims.potential_exponent();
        let two_m = 2.0 * self.m;
        let limit = 2.0 * (rh / p).sqrt();
        // sigma = r_h + xi^2 removes the inverse square root at the horizon.
        let f = |xi: f64| {
            let u = xi * xi / rh;
            if u < 1e-300 {
                return limit;
            }
            let denom = rh.powf(p) * (p * u.ln_1p()).exp_m1();
            2.0 * xi * (two_m / denom).sqrt()
        };
        Ok(integrate(f, 0.0, (s - rh).sqrt(), &QuadConfig::default())?.value)
    }

    fn t_between(&self, s0: f64, s1: f64) -> Result<f64> {
        let f = |sigma: f64| (2.0 * self.m / self.gap(sigma)).sqrt();
        Ok(integrate(f, s0, s1, &QuadConfig::default())?.value)
    }

    /// Heights at many radii, accumulated segment by segment; input need not be sorted.
    pub fn profile_t_many(&self, radii: &[f64]) -> Result<Vec<f64>> {
        let mut order: Vec<usize> = (0..radii.len()).collect();
        order.sort_by(|a, b| radii[*a].total_cmp(&radii[*b]));
        let mut out = alloc::vec![0.0; radii.len()];
        let rh = self.horizon_radius();
        let mut last: Option<(f64, f64)> = None;
        for i in order {
            let s = radii[i];
            self.check_outside(s)?;
            let t = match last {
                // Start away from the horizon segment only once the sqrt singularity is far.
                Some((s0, t0)) if s0 > rh * 1.5 => t0 + self.t_between(s0, s)?,
                _ => self.t_from_horizon(s)?,
            };
            out[i] = t;
            last = Some((s, t));
        }
        Ok(out)
    }
}

/// The Lovelock-adS slice `V(r) = 1 + r^2 - 2m / r^{n/k-2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdSModelParams {
    dims: DimensionPair,
    m: f64,
    horizon: f64,
}

impl AdSModelParams {
    pub fn new(dims: DimensionPair, m: f64) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(GeoError::domain("mass parameter must be positive"));
        }
        let v = |r: f64| 1.0 + r * r - 2.0 * m / dims.pow_potential(r);
        // V increases on r > 0, so any sign change brackets the unique root.
        let hi = 2.0 * m + 2.0;
        let mut lo = (2.0 * m).powf(dims.horizon_exponent()).min(1.0) * 1e-3;
        while v(lo) >= 0.0 {
            lo *= 0.5;
            if lo < 1e-200 {
                return Err(GeoError::Root("no sign change for the adS horizon"));
            }
        }
        if v(hi) <= 0.0 {
            return Err(GeoError::Root("upper adS bracket is not positive"));
        }
        let horizon = brent(v, lo, hi, 1e-15)?;
        Ok(AdSModelParams { dims, m, horizon })
    }

    pub fn dims(&self) -> DimensionPair {
        self.dims
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn potential(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(GeoError::domain("potential needs r > 0"));
        }
        Ok(1.0 + r * r - 2.0 * self.m / self.dims.pow_potential(r))
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    // r^{n/k-2} + r^{n/k} - 2m, accurate near the horizon.
    fn gap(&self, r: f64) -> f64 {
        self.gap_offset((r - self.horizon) / self.horizon)
    }

    fn gap_offset(&self, d: f64) -> f64 {
        let rh = self.horizon;
        let p = self.dims.potential_exponent();
        power_gap(rh, d, p) + power_gap(rh, d, p + 2.0)
    }

    /// `dt/dr` of the graph in hyperbolic space.
    pub fn profile_slope(&self, r: f64) -> Result<f64> {
        if !(r > self.horizon) {
            return Err(GeoError::domain("adS slope is defined only outside the horizon"));
        }
        let w = 1.0 + r * r;
        Ok((2.0 * self.m / (w * w * self.gap(r))).sqrt())
    }

    /// Height `t(r)` of the upper sheet, integrated from the horizon.
    pub fn profile_t(&self, r: f64) -> Result<f64> {
        if !(r >= self.horizon) {
            return Err(GeoError::domain("adS profile is defined only outside the horizon"));
        }
        let rh = self.horizon;
        let p = self.dims.potential_exponent();
        let deriv = p * rh.powf(p - 1.0) + (p + 2.0) * rh.powf(p + 1.0);
        let w_h = 1.0 + rh * rh;
        let limit = 2.0 * (2.0 * self.m / (w_h * w_h * deriv)).sqrt();
        let f = |xi: f64| {
            if xi * xi / rh < 1e-300 {
                return limit;
            }
            let r = rh + xi * xi;
            let w = 1.0 + r * r;
            2.0 * xi * (2.0 * self.m / (w * w * self.gap_offset(xi * xi / rh))).sqrt()
        };
        Ok(integrate(f, 0.0, (r - rh).sqrt(), &QuadConfig::default())?.value)
    }
}
