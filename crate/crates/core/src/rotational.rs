//! Rotational hypersurfaces with null 2k-mean curvature.
//!
//! The generating curve `(s(tau), t(tau))` is parametrized by arc length. The
//! integrator evolves `(s, t, zeta)` with `sdot = tanh(zeta)` and
//! `tdot = sech(zeta)`, so `1 - sdot^2 = sech^2(zeta)` keeps full relative
//! precision far out on the end where `sdot` rounds to one.

#[cfg(not(any(test, feature = "std")))]
#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use crate::numerics::binomial;
use crate::numerics::ode::{DormandPrince, OdeSystem, StepControl};
use crate::numerics::roots::brent;
use crate::symcurv::{sigma_p_rotational_spectrum, DimensionPair};
use crate::{GeoError, Result};

const DEGENERATE: f64 = 1e-14;

/// One point of a profile curve together with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProfileSample {
    pub tau: f64,
    pub s: f64,
    pub sdot: f64,
    pub t: f64,
    /// `dt/dtau`, kept separately from `sdot` for precision.
    pub tdot: f64,
    pub sddot: f64,
    /// `sigma_2k(A) * r_h^{2k}`.
    pub sigma2k_residual: f64,
    pub first_integral: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProfileCurve {
    pub dims: DimensionPair,
    /// First-integral constant at the horizon.
    pub c: f64,
    pub samples: Vec<ProfileSample>,
    /// Largest relative deviation of `s^{n/k-2}(1 - sdot^2)` from `2c(s)`.
    pub max_drift: f64,
}

impl ProfileCurve {
    pub fn horizon_radius(&self) -> f64 {
        self.samples.first().map_or(0.0, |s| s.s)
    }

    /// The reflected sheet `t -> -t`.
    pub fn lower_sheet(&self) -> ProfileCurve {
        let mut out = self.clone();
        for s in &mut out.samples {
            s.t = -s.t;
            s.tdot = -s.tdot;
        }
        out
    }

    pub fn max_abs_sigma2k(&self) -> f64 {
        self.samples.iter().map(|s| s.sigma2k_residual.abs()).fold(0.0, f64::max)
    }

    pub fn min_sigma2k(&self) -> f64 {
        self.samples.iter().map(|s| s.sigma2k_residual).fold(f64::INFINITY, f64::min)
    }

    /// Largest deviation of `sdot^2 + tdot^2` from one.
    pub fn max_speed_defect(&self) -> f64 {
        self.samples.iter().map(|s| (s.sdot * s.sdot + s.tdot * s.tdot - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// A first-integral profile `c(s)`; the model family has `c` constant.
pub trait MassProfile {
    fn c(&self, s: f64) -> f64;
    fn dc(&self, s: f64) -> f64;
    /// Infimum and supremum of `c` on `s > 0`.
    fn bounds(&self) -> (f64, f64);
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConstantMass(f64);

impl ConstantMass {
    pub fn new(m: f64) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(GeoError::domain("first-integral constant must be positive"));
        }
        Ok(ConstantMass(m))
    }

    pub fn m(&self) -> f64 {
        self.0
    }
}

impl MassProfile for ConstantMass {
    fn c(&self, _s: f64) -> f64 {
        self.0
    }

    fn dc(&self, _s: f64) -> f64 {
        0.0
    }

    fn bounds(&self) -> (f64, f64) {
        (self.0, self.0)
    }
}

/// `c(s) = m0 + delta (1 + tanh((s - center) / width)) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TanhStep {
    pub m0: f64,
    pub delta: f64,
    pub center: f64,
    pub width: f64,
}

impl TanhStep {
    pub fn new(m0: f64, delta: f64, center: f64, width: f64) -> Result<Self> {
        if !(m0 > 0.0) || !m0.is_finite() {
            return Err(GeoError::domain("first-integral constant must be positive"));
        }
        if !(width > 0.0) || !center.is_finite() {
            return Err(GeoError::domain("tanh step needs a finite center and positive width"));
        }
        if delta < 0.0 {
            return Err(GeoError::EnergyCondition(delta));
        }
        if !delta.is_finite() {
            return Err(GeoError::domain("tanh step height must be finite"));
        }
        Ok(TanhStep { m0, delta, center, width })
    }
}

impl MassProfile for TanhStep {
    fn c(&self, s: f64) -> f64 {
        self.m0 + 0.5 * self.delta * (1.0 + ((s - self.center) / self.width).tanh())
    }

    fn dc(&self, s: f64) -> f64 {
        let sech = 1.0 / ((s - self.center) / self.width).cosh();
        0.5 * self.delta * sech * sech / self.width
    }

    fn bounds(&self) -> (f64, f64) {
        (self.m0, self.m0 + self.delta)
    }
}

fn horizon_for(dims: DimensionPair, c: f64) -> f64 {
    (2.0 * c).powf(dims.horizon_exponent())
}

/// Horizon radius of a first-integral profile: the root of `s^{n/k-2} = 2c(s)`.
pub fn generalized_horizon(dims: DimensionPair, profile: &dyn MassProfile) -> Result<f64> {
    let (lo_c, hi_c) = profile.bounds();
    if !(lo_c > 0.0) {
        return Err(GeoError::domain("first-integral constant must be positive"));
    }
    let (lo, hi) = (horizon_for(dims, lo_c), horizon_for(dims, hi_c));
    let f = |s: f64| dims.pow_potential(s) - 2.0 * profile.c(s);
    let sh = if hi - lo <= 1e-15 * hi {
        lo
    } else {
        // A steep c(s) can make the horizon equation have several roots; scan for them.
        const SCAN: usize = 512;
        let mut bracket = None;
        let mut changes = 0;
        let mut prev = (lo, f(lo));
        for i in 1..=SCAN {
            let s = lo + (hi - lo) * i as f64 / SCAN as f64;
            let cur = (s, f(s));
            if (prev.1 <= 0.0) != (cur.1 <= 0.0) || (i == SCAN && bracket.is_none()) {
                changes += 1;
                bracket.get_or_insert((prev.0, cur.0));
            }
            prev = cur;
        }
        if changes > 1 {
            return Err(GeoError::domain("horizon equation has several roots"));
        }
        let (a, b) = bracket.unwrap_or((lo, hi));
        if f(a) == 0.0 {
            a
        } else {
            brent(f, a, b, 1e-15 * hi)?
        }
    };
    let p = dims.potential_exponent();
    let dc = profile.dc(sh);
    if !(dc < 0.5 * p * dims.pow_potential(sh) / sh) {
        return Err(GeoError::domain("mass profile is too steep at the horizon"));
    }
    Ok(sh)
}

struct ProfileSystem<'a> {
    p: f64,
    dims: DimensionPair,
    profile: &'a dyn MassProfile,
}

impl ProfileSystem<'_> {
    fn zeta_rate(&self, s: f64, zeta: f64) -> Result<f64> {
        let dc = self.profile.dc(s);
        if dc < 0.0 {
            return Err(GeoError::EnergyCondition(dc));
        }
        let rate = 0.5 * self.p / s;
        if dc == 0.0 {
            return Ok(rate);
        }
        let ch = zeta.cosh();
        Ok(rate - dc * ch * ch / self.dims.pow_potential(s))
    }
}

impl OdeSystem<3> for ProfileSystem<'_> {
    fn rhs(&self, _tau: f64, y: &[f64; 3]) -> Result<[f64; 3]> {
        let (s, zeta) = (y[0], y[2]);
        if !(s > 0.0) {
            return Err(GeoError::domain("profile left s > 0"));
        }
        Ok([zeta.tanh(), 1.0 / zeta.cosh(), self.zeta_rate(s, zeta)?])
    }
}

/// Principal curvatures from the tangent `(sdot, tdot)` and `sddot`.
pub fn principal_curvatures_from_tangent(s: f64, tdot: f64, sddot: f64, n: usize) -> Result<Vec<f64>> {
    if !(s > 0.0) {
        return Err(GeoError::domain("orbit radius must be positive"));
    }
    let tdot = tdot.abs();
    if tdot * tdot < DEGENERATE {
        return Err(GeoError::DegenerateTangent(tdot * tdot));
    }
    let mut out = alloc::vec![tdot / s; n];
    out[n - 1] = -sddot / tdot;
    Ok(out)
}

fn check_tangent(s: f64, sdot: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(GeoError::domain("orbit radius must be positive"));
    }
    if !(sdot.abs() <= 1.0) {
        return Err(GeoError::domain("|sdot| must not exceed one"));
    }
    let w = (1.0 - sdot) * (1.0 + sdot);
    if w < DEGENERATE {
        return Err(GeoError::DegenerateTangent(w));
    }
    Ok(w.sqrt())
}

/// `(kappa, ..., kappa, kappa_n)` with `kappa = sqrt(1 - sdot^2)/s` and
/// `kappa_n = -sddot / sqrt(1 - sdot^2)`.
pub fn principal_curvatures_rotational(s: f64, sdot: f64, sddot: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(GeoError::domain("rotational hypersurfaces need n >= 2"));
    }
    let tdot = check_tangent(s, sdot)?;
    principal_curvatures_from_tangent(s, tdot, sddot, n)
}

/// `C(n-1, p) kappa^p + C(n-1, p-1) kappa^{p-1} kappa_n`.
pub fn sigma_p_rotational(s: f64, sdot: f64, sddot: f64, n: usize, p: usize) -> Result<f64> {
    if n < 2 || p > n {
        return Err(GeoError::domain("need n >= 2 and p <= n"));
    }
    let tdot = check_tangent(s, sdot)?;
    Ok(sigma_p_rotational_spectrum(tdot / s, -sddot / tdot, n, p))
}

/// `C(s, sdot) = s^{n/k-2} (1 - sdot^2)`.
pub fn first_integral(s: f64, sdot: f64, dims: DimensionPair) -> Result<f64> {
    if !(s > 0.0) {
        return Err(GeoError::domain("orbit radius must be positive"));
    }
    Ok(dims.pow_potential(s) * (1.0 - sdot) * (1.0 + sdot))
}

/// Integrator for a (possibly generalized) rotational profile, starting
/// orthogonally at the horizon.
pub struct ProfileIntegrator<'a> {
    sys: ProfileSystem<'a>,
    ctrl: StepControl,
    horizon: f64,
}

impl<'a> ProfileIntegrator<'a> {
    pub fn new(dims: DimensionPair, profile: &'a dyn MassProfile, ctrl: StepControl) -> Result<Self> {
        ctrl.validate()?;
        let horizon = generalized_horizon(dims, profile)?;
        Ok(ProfileIntegrator { sys: ProfileSystem { p: dims.potential_exponent(), dims, profile }, ctrl, horizon })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    fn sample(&self, tau: f64, y: &[f64; 3]) -> Result<ProfileSample> {
        let (s, t, zeta) = (y[0], y[1], y[2]);
        let tdot = 1.0 / zeta.cosh();
        let sddot = tdot * tdot * self.sys.zeta_rate(s, zeta)?;
        let dims = self.sys.dims;
        let (n, k) = (dims.n(), dims.k());
        let kappa = tdot / s;
        let kappa_n = -tdot * self.sys.zeta_rate(s, zeta)?;
        let scale = self.horizon.powi(2 * k as i32);
        let sigma = sigma_p_rotational_spectrum(kappa, kappa_n, n, 2 * k) * scale;
        Ok(ProfileSample {
            tau,
            s,
            sdot: zeta.tanh(),
            t,
            tdot,
            sddot,
            sigma2k_residual: sigma,
            first_integral: dims.pow_potential(s) * tdot * tdot,
        })
    }

    fn stepper(&self) -> Result<DormandPrince<'_, ProfileSystem<'a>, 3>> {
        DormandPrince::new(&self.sys, 0.0, [self.horizon, 0.0, 0.0], self.ctrl)
    }

    fn finish(&self, samples: Vec<ProfileSample>) -> ProfileCurve {
        let drift = samples
            .iter()
            .map(|x| {
                let target = 2.0 * self.sys.profile.c(x.s);
                (x.first_integral - target).abs() / target
            })
            .fold(0.0, f64::max);
        ProfileCurve {
            dims: self.sys.dims,
            c: self.sys.profile.c(self.horizon),
            samples,
            max_drift: drift,
        }
    }

    /// Integrates to arc length `tau_max`, recording every accepted step.
    pub fn run(&self, tau_max: f64) -> Result<ProfileCurve> {
        if !(tau_max > 0.0) || !tau_max.is_finite() {
            return Err(GeoError::domain("tau_max must be positive"));
        }
        let mut dp = self.stepper()?;
        let mut samples = alloc::vec![self.sample(0.0, dp.y())?];
        while dp.x() < tau_max {
            if dp.step(tau_max)? == 0.0 && dp.x() < tau_max {
                return Err(GeoError::Integration { tau: dp.x(), reason: "no progress" });
            }
            samples.push(self.sample(dp.x(), dp.y())?);
        }
        Ok(self.finish(samples))
    }

    /// Samples at the given arc lengths (sorted ascending, nonnegative).
    pub fn at_taus(&self, taus: &[f64]) -> Result<ProfileCurve> {
        let mut dp = self.stepper()?;
        let mut samples = Vec::with_capacity(taus.len());
        let mut last = 0.0;
        for &tau in taus {
            if !(tau >= last) || !tau.is_finite() {
                return Err(GeoError::domain("arc lengths must be finite, nonnegative and sorted"));
            }
            while dp.x() < tau {
                dp.step(tau)?;
            }
            samples.push(self.sample(dp.x(), dp.y())?);
            last = tau;
        }
        Ok(self.finish(samples))
    }

    /// Samples where the orbit radius equals each of `radii` (sorted ascending, at least the horizon).
    pub fn at_radii(&self, radii: &[f64]) -> Result<ProfileCurve> {
        let mut dp = self.stepper()?;
        let mut samples = Vec::with_capacity(radii.len());
        let mut last = self.horizon;
        for &r in radii {
            if !(r >= last) || !r.is_finite() {
                return Err(GeoError::domain("radii must be finite, sorted and outside the horizon"));
            }
            let tol = 4.0 * f64::EPSILON * r;
            if r - dp.y()[0] > tol {
                dp.advance_to_level(|_, y| y[0], r, tol, f64::INFINITY)?;
            }
            samples.push(self.sample(dp.x(), dp.y())?);
            last = r;
        }
        Ok(self.finish(samples))
    }
}

/// Integrates the model profile `sddot = (n - 2k)(1 - sdot^2)/(2ks)` from the
/// horizon `(s, sdot, t) = (r_{k,m}, 0, 0)` up to arc length `tau_max`.
pub fn integrate_profile(dims: DimensionPair, m: f64, tau_max: f64, ctrl: &StepControl) -> Result<ProfileCurve> {
    let c = ConstantMass::new(m)?;
    ProfileIntegrator::new(dims, &c, *ctrl)?.run(tau_max)
}

/// Integrates the profile with first integral `s^{n/k-2}(1 - sdot^2) = 2c(s)`.
pub fn integrate_generalized(
    dims: DimensionPair,
    profile: &dyn MassProfile,
    tau_max: f64,
    ctrl: &StepControl,
) -> Result<ProfileCurve> {
    ProfileIntegrator::new(dims, profile, *ctrl)?.run(tau_max)
}

/// `sddot` of the model at a given tangent: `(n - 2k)(1 - sdot^2)/(2ks)`.
pub fn model_sddot(dims: DimensionPair, s: f64, tdot: f64) -> f64 {
    0.5 * dims.potential_exponent() * tdot * tdot / s
}

/// `C(n-1, 2k-1) kappa^{2k-1} tdot`, the radial flux density of a rotational slice.
pub(crate) fn flux_density(dims: DimensionPair, sample: &ProfileSample) -> f64 {
    let k = dims.k();
    let kappa = sample.tdot.abs() / sample.s;
    binomial(dims.n() - 1, 2 * k - 1) * kappa.powi(2 * k as i32 - 1) * sample.tdot.abs()
}
