//! Flux integrals over end cycles, the calibrated Gauss-Bonnet-Chern mass and
//! the Penrose mass-area functional, including sweeps over monotone
//! first-integral profiles.

#[cfg(not(any(test, feature = "std")))]
#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::graphgeom::{frame, GraphFunction};
use crate::numerics::binomial;
use crate::numerics::ode::StepControl;
use crate::numerics::quadrature::gauss_legendre;
use crate::rotational::{flux_density, ConstantMass, MassProfile, ProfileIntegrator, TanhStep};
use crate::{DimensionPair, GeoError, Result};

/// Volume of the round `dim`-sphere of the given radius.
pub fn sphere_area(radius: f64, dim: usize) -> f64 {
    unit_sphere_area(dim) * radius.powi(dim as i32)
}

fn unit_sphere_area(dim: usize) -> f64 {
    // omega_d = 2 pi omega_{d-2} / (d - 1)
    let mut w = if dim.is_multiple_of(2) { 2.0 } else { 2.0 * PI };
    let mut d = if dim.is_multiple_of(2) { 0 } else { 1 };
    while d < dim {
        d += 2;
        w *= 2.0 * PI / (d - 1) as f64;
    }
    w
}

/// Flux through the cycle `|x| = radius`, with the drift against `2 radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FluxReport {
    pub radius: f64,
    pub flux: f64,
    /// `lambda_{k,n} * flux`.
    pub mass: f64,
    /// `|flux(2R) - flux(R)| / |flux(R)|`.
    pub drift: f64,
}

fn report(dims: DimensionPair, radius: f64, f1: f64, f2: f64) -> FluxReport {
    let drift = if f1 == 0.0 { (f2 - f1).abs() } else { (f2 - f1).abs() / f1.abs() };
    FluxReport { radius, flux: f1, mass: mass_constant(dims) * f1, drift }
}

/// `lambda_{k,n} = 1 / (C(n-1, 2k-1) omega_{n-1} 2^k)`, normalizing the model mass to `m^k`.
pub fn mass_constant(dims: DimensionPair) -> f64 {
    let (n, k) = (dims.n(), dims.k());
    1.0 / (binomial(n - 1, 2 * k - 1) * unit_sphere_area(n - 1) * 2f64.powi(k as i32))
}

/// Flux of a rotational end with first-integral profile `c(s)`, from the integrated profile.
pub fn flux_rotational(dims: DimensionPair, profile: &dyn MassProfile, radius: f64, ctrl: &StepControl) -> Result<FluxReport> {
    let integ = ProfileIntegrator::new(dims, profile, *ctrl)?;
    if !(radius >= integ.horizon()) || !radius.is_finite() {
        return Err(GeoError::OutOfDomain);
    }
    let curve = integ.at_radii(&[radius, 2.0 * radius])?;
    let area = |r: f64| sphere_area(r, dims.n() - 1);
    let f1 = flux_density(dims, &curve.samples[0]) * area(curve.samples[0].s);
    let f2 = flux_density(dims, &curve.samples[1]) * area(curve.samples[1].s);
    Ok(report(dims, radius, f1, f2))
}

/// Product quadrature on the unit `(n-1)`-sphere: Gauss-Legendre in the polar
/// angles and the trapezoid rule (`2 order` nodes) in the periodic one.
pub fn sphere_rule(n: usize, order: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    if n < 2 || order == 0 {
        return Err(GeoError::domain("sphere rule needs n >= 2 and a positive order"));
    }
    let (gx, gw) = gauss_legendre(order);
    let polar: Vec<(f64, f64)> = gx.iter().zip(&gw).map(|(x, w)| (0.5 * PI * (x + 1.0), 0.5 * PI * w)).collect();
    let periodic = 2 * order;
    let mut out = Vec::new();
    let mut idx = alloc::vec![0usize; n - 2];
    loop {
        let mut point = alloc::vec![0.0; n];
        let mut weight = 2.0 * PI / periodic as f64;
        let mut sin_prod = 1.0;
        for (i, &j) in idx.iter().enumerate() {
            let (phi, w) = polar[j];
            point[i] = sin_prod * phi.cos();
            weight *= w * phi.sin().powi((n - 2 - i) as i32);
            sin_prod *= phi.sin();
        }
        for j in 0..periodic {
            let phi = 2.0 * PI * j as f64 / periodic as f64;
            let mut p = point.clone();
            p[n - 2] = sin_prod * phi.cos();
            p[n - 1] = sin_prod * phi.sin();
            out.push((p, weight));
        }
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Ok(out);
            }
            idx[pos] += 1;
            if idx[pos] < order {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// `int_C <N_{2k-1}(A) grad x_{n+1}, nu>` over the cycle `|x| = radius` on a graph.
pub fn graph_flux_at(u: &dyn GraphFunction, k: usize, radius: f64, rule: &[(Vec<f64>, f64)]) -> Result<f64> {
    let n = u.dim();
    let mut total = 0.0;
    let mut x = alloc::vec![0.0; n];
    for (dir, w) in rule {
        for i in 0..n {
            x[i] = radius * dir[i];
        }
        let f = frame(u, &x, k)?;
        let grad = &f.jet.gradient;
        let v = &f.g_inv * grad;
        let nv = &f.newton * v;
        let dr = nalgebra::DVector::from_column_slice(dir);
        let conormal = (dr.transpose() * &f.g_inv * &dr)[(0, 0)].sqrt();
        let radial = grad.dot(&dr);
        let vol = (1.0 + grad.norm_squared() - radial * radial).sqrt();
        total += w * nv.dot(&dr) / conormal * vol;
    }
    Ok(total * radius.powi(n as i32 - 1))
}

/// Flux of a graph end centered at the origin at `radius` and `2 radius`.
pub fn flux_graph(u: &dyn GraphFunction, dims: DimensionPair, radius: f64, order: usize) -> Result<FluxReport> {
    if u.dim() != dims.n() {
        return Err(GeoError::domain("graph dimension does not match n"));
    }
    let rule = sphere_rule(dims.n(), order)?;
    let f1 = graph_flux_at(u, dims.k(), radius, &rule)?;
    let f2 = graph_flux_at(u, dims.k(), 2.0 * radius, &rule)?;
    Ok(report(dims, radius, f1, f2))
}

/// Calibrates `lambda_{k,n} = m^k / flux(model)` at `m = 1` and certifies the
/// spread over `m in {0.5, 2}` is below `1e-5`.
pub fn calibrate_mass_constant(dims: DimensionPair) -> Result<f64> {
    let ctrl = StepControl::default();
    let lambda = |m: f64| -> Result<f64> {
        let profile = ConstantMass::new(m)?;
        let rh = (2.0 * m).powf(dims.horizon_exponent());
        let f = flux_rotational(dims, &profile, 50.0 * rh, &ctrl)?;
        Ok(m.powi(dims.k() as i32) / f.flux)
    };
    let base = lambda(1.0)?;
    let mut spread: f64 = 0.0;
    for m in [0.5, 2.0] {
        spread = spread.max((lambda(m)? - base).abs() / base);
    }
    if !(spread < 1e-5) {
        return Err(GeoError::Calibration(spread));
    }
    Ok(base)
}

/// Outcome of comparing a mass against the horizon-area bound.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PenroseReport {
    pub mass: f64,
    pub area: f64,
    pub bound: f64,
    pub gap: f64,
    pub holds: bool,
}

/// Relative slack allowed below the bound.
pub const PENROSE_TOLERANCE: f64 = 1e-6;

/// `c_{k,n} = 2^{-k} omega_{n-1}^{-(n-2k)/(n-1)}`.
pub fn penrose_constant(dims: DimensionPair) -> f64 {
    let (n, k) = (dims.n() as f64, dims.k() as f64);
    2f64.powf(-k) * unit_sphere_area(dims.n() - 1).powf(-(n - 2.0 * k) / (n - 1.0))
}

pub fn penrose_check(mass: f64, horizon_area: f64, dims: DimensionPair) -> Result<PenroseReport> {
    if !(horizon_area > 0.0) || !horizon_area.is_finite() {
        return Err(GeoError::domain("horizon area must be positive"));
    }
    if !(mass >= 0.0) || !mass.is_finite() {
        return Err(GeoError::domain("mass must be nonnegative"));
    }
    let (n, k) = (dims.n() as f64, dims.k() as f64);
    let bound = penrose_constant(dims) * horizon_area.powf((n - 2.0 * k) / (n - 1.0));
    let gap = mass - bound;
    Ok(PenroseReport { mass, area: horizon_area, bound, gap, holds: gap >= -PENROSE_TOLERANCE * mass.max(bound) })
}

/// One member of a Penrose sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepMember {
    pub profile: TanhStep,
    pub horizon: f64,
    /// Smallest `sigma_2k(A) r_h^{2k}` seen along the profile.
    pub min_sigma2k: f64,
    pub flux: FluxReport,
    pub report: PenroseReport,
}

/// Mass by flux far out, horizon area and Penrose gap for one monotone profile.
pub fn penrose_member(dims: DimensionPair, profile: &TanhStep, ctrl: &StepControl) -> Result<SweepMember> {
    let integ = ProfileIntegrator::new(dims, profile, *ctrl)?;
    let rh = integ.horizon();
    let radius = (profile.center + 40.0 * profile.width).max(50.0 * rh);
    let curve = integ.at_radii(&sample_radii(rh, radius))?;
    for s in &curve.samples {
        let rate = profile.dc(s.s);
        if rate < 0.0 {
            return Err(GeoError::EnergyCondition(rate));
        }
    }
    let min_sigma2k = curve.min_sigma2k();
    if min_sigma2k < -1e-10 {
        return Err(GeoError::EnergyCondition(min_sigma2k));
    }
    let flux = flux_rotational(dims, profile, radius, ctrl)?;
    let area = sphere_area(rh, dims.n() - 1);
    let report = penrose_check(flux.mass, area, dims)?;
    Ok(SweepMember { profile: *profile, horizon: rh, min_sigma2k, flux, report })
}

fn sample_radii(rh: f64, radius: f64) -> Vec<f64> {
    let count = 200;
    (0..count).map(|i| rh * (radius / rh).powf(i as f64 / (count - 1) as f64)).collect()
}

pub fn penrose_sweep(dims: DimensionPair, members: &[TanhStep], ctrl: &StepControl) -> Result<Vec<SweepMember>> {
    members.iter().map(|p| penrose_member(dims, p, ctrl)).collect()
}

/// The Penrose report of the exact model with parameter `m`.
pub fn model_penrose(dims: DimensionPair, m: f64) -> Result<PenroseReport> {
    let rh = (2.0 * m).powf(dims.horizon_exponent());
    penrose_check(m.powi(dims.k() as i32), sphere_area(rh, dims.n() - 1), dims)
}
