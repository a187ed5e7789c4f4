#[cfg(not(any(test, feature = "std")))]
#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::{sigmas_graph, GraphFunction};
use crate::numerics::lstsq::weighted_least_squares;
use crate::numerics::roots::brent;
use crate::numerics::SplitMix64;
use crate::symcurv::matrix_sigmas;
use crate::{GeoError, Result};

/// A round horizon cycle `|x - center| = radius` in the base plane.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HorizonCycle {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl HorizonCycle {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.len() < 2 || !(radius > 0.0) || center.iter().any(|c| !c.is_finite()) {
            return Err(GeoError::domain("horizon cycle needs n >= 2 and a positive radius"));
        }
        Ok(HorizonCycle { center, radius })
    }

    pub fn centered(n: usize, radius: f64) -> Result<Self> {
        HorizonCycle::new(alloc::vec![0.0; n], radius)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Deterministic unit directions: the coordinate axes with both signs
    /// (in the plane case, equally spaced angles), then pseudo-random ones.
    pub fn directions(&self, count: usize) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut out = Vec::with_capacity(count);
        if n == 2 {
            for i in 0..count {
                let a = core::f64::consts::TAU * i as f64 / count as f64;
                out.push(alloc::vec![a.cos(), a.sin()]);
            }
            return out;
        }
        for i in 0..(2 * n).min(count) {
            let mut d = alloc::vec![0.0; n];
            d[i / 2] = if i % 2 == 0 { 1.0 } else { -1.0 };
            out.push(d);
        }
        let mut rng = SplitMix64(0x5eed_cafe);
        while out.len() < count {
            let d: Vec<f64> = (0..n).map(|_| 2.0 * rng.next_f64() - 1.0).collect();
            let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.1 && norm <= 1.0 {
                out.push(d.iter().map(|v| v / norm).collect());
            }
        }
        out
    }

    pub fn point(&self, direction: &[f64], offset: f64) -> Vec<f64> {
        self.center.iter().zip(direction).map(|(c, d)| c + (self.radius + offset) * d).collect()
    }
}

/// Two sheets glued along a horizon cycle: the upper sheet is `u_+`, the
/// lower sheet is `2 u_0 - u_-` where `u_0` is the common boundary height.
pub struct DoubledSurface<'a> {
    upper: &'a dyn GraphFunction,
    lower: &'a dyn GraphFunction,
    horizon: HorizonCycle,
    seam: f64,
}

const TRACE_SAMPLES: usize = 64;
const TRACE_TOL: f64 = 1e-10;

fn trace(u: &dyn GraphFunction, horizon: &HorizonCycle) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for d in horizon.directions(TRACE_SAMPLES) {
        let v = u.value(&horizon.point(&d, 0.0))?;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((0.5 * (lo + hi), hi - lo))
}

impl<'a> DoubledSurface<'a> {
    /// Glues two sheets whose boundary traces on `horizon` are the same constant.
    pub fn from_sheets(upper: &'a dyn GraphFunction, lower: &'a dyn GraphFunction, horizon: HorizonCycle) -> Result<Self> {
        if upper.dim() != horizon.dim() || lower.dim() != horizon.dim() {
            return Err(GeoError::domain("sheet and horizon dimensions differ"));
        }
        let (up, spread_up) = trace(upper, &horizon)?;
        let (down, spread_down) = trace(lower, &horizon)?;
        let scale = up.abs().max(1.0);
        let spread = spread_up.max(spread_down).max((up - down).abs());
        if spread > TRACE_TOL * scale {
            return Err(GeoError::NotAHorizon(spread));
        }
        Ok(DoubledSurface { upper, lower, horizon, seam: up })
    }

    pub fn horizon(&self) -> &HorizonCycle {
        &self.horizon
    }

    pub fn seam_height(&self) -> f64 {
        self.seam
    }

    pub fn upper_height(&self, x: &[f64]) -> Result<f64> {
        self.upper.value(x)
    }

    pub fn lower_height(&self, x: &[f64]) -> Result<f64> {
        Ok(2.0 * self.seam - self.lower.value(x)?)
    }

    fn sheet(&self, upper: bool) -> &dyn GraphFunction {
        if upper {
            self.upper
        } else {
            self.lower
        }
    }
}

/// Doubles a one-ended graph across its horizon by reflection through the seam height.
pub fn reflect_double<'a>(u: &'a dyn GraphFunction, horizon: HorizonCycle) -> Result<DoubledSurface<'a>> {
    DoubledSurface::from_sheets(u, u, horizon)
}

/// Checks of the horizon conditions for a graph over the exterior of a cycle.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HorizonConditions {
    /// The graph is defined at every sampled exterior point.
    pub graph_over_exterior: bool,
    /// The boundary trace is constant, so the horizon lies in a plane parallel to the base.
    pub horizon_in_plane: bool,
    /// `|grad u|` grows without bound towards the horizon.
    pub orthogonal_meeting: bool,
    /// `sigma_2k = 0` and `sigma_{2k+1} != 0` at every sample.
    pub null_nondegenerate: bool,
    pub max_sigma_2k: f64,
    pub min_abs_sigma_2k1: f64,
}

impl HorizonConditions {
    pub fn all(&self) -> bool {
        self.graph_over_exterior && self.horizon_in_plane && self.orthogonal_meeting && self.null_nondegenerate
    }
}

/// Samples `u` on the exterior of `horizon` at the given radial offsets and checks the horizon conditions.
pub fn horizon_conditions(
    u: &dyn GraphFunction,
    horizon: &HorizonCycle,
    k: usize,
    offsets: &[f64],
    directions: usize,
) -> Result<HorizonConditions> {
    let n = horizon.dim();
    if 2 * k + 1 > n {
        return Err(GeoError::domain("need 2k + 1 <= n"));
    }
    let dirs = horizon.directions(directions.max(1));
    let r = horizon.radius;
    let mut over = true;
    let mut max_s = 0.0f64;
    let mut min_s1 = f64::INFINITY;
    for d in &dirs {
        for &o in offsets {
            let x = horizon.point(d, o);
            match sigmas_graph(u, &x) {
                Ok(s) => {
                    max_s = max_s.max(s[2 * k].abs() * r.powi(2 * k as i32));
                    min_s1 = min_s1.min(s[2 * k + 1].abs() * r.powi(2 * k as i32 + 1));
                }
                Err(_) => over = false,
            }
        }
    }
    let in_plane = matches!(trace(u, horizon), Ok((_, spread)) if spread <= TRACE_TOL * r.max(1.0));
    let mut orthogonal = true;
    let mut prev = 0.0;
    for j in 2..=8 {
        let eps = r * 10f64.powi(-j);
        let x = horizon.point(&dirs[0], eps);
        match u.jet(&x) {
            Ok(jet) => {
                let g = jet.gradient.norm();
                orthogonal &= g > prev;
                prev = g;
            }
            Err(_) => break,
        }
    }
    orthogonal &= prev > 1e3;
    Ok(HorizonConditions {
        graph_over_exterior: over,
        horizon_in_plane: in_plane,
        orthogonal_meeting: orthogonal,
        null_nondegenerate: over && max_s < 1e-8 && min_s1 > 1e-12,
        max_sigma_2k: max_s,
        min_abs_sigma_2k1: min_s1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegularityOptions {
    /// Number of horizon sample points.
    pub samples: usize,
    /// Spacing of the one-sided normal levels, relative to the horizon radius.
    pub normal_step: f64,
    /// Number of one-sided normal levels.
    pub levels: usize,
    /// Degree of the one-sided polynomial fit.
    pub degree: usize,
    /// Tangential difference step, relative to the horizon radius.
    pub tangent_step: f64,
}

impl Default for RegularityOptions {
    fn default() -> Self {
        RegularityOptions { samples: 8, normal_step: 0.004, levels: 10, degree: 6, tangent_step: 0.01 }
    }
}

/// Certificate data at one horizon point, in the chart over its tangent plane.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegularitySample {
    pub point: Vec<f64>,
    pub d_plus: f64,
    pub d_minus: f64,
    /// One-sided second normal derivatives measured on each sheet.
    pub vnn_plus: f64,
    pub vnn_minus: f64,
    /// Values forced by the null constraint given the remaining second derivatives.
    pub vnn_solved_plus: f64,
    pub vnn_solved_minus: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegularityReport {
    pub samples: Vec<RegularitySample>,
    pub max_gap: f64,
    /// Largest disagreement between measured and constraint-solved `v_nn`.
    pub max_constraint_mismatch: f64,
}

/// `(D, sigma_dagger)` with `sigma_2k(B) = D v_nn + sigma_dagger`, where the last
/// index is the normal direction and `B_nn = v_nn / w`.
pub fn normal_linearization(b: &DMatrix<f64>, w: f64, k: usize) -> Result<(f64, f64)> {
    let n = b.nrows();
    if !b.is_square() || n == 0 || 2 * k > n {
        return Err(GeoError::domain("need a square matrix of order at least 2k"));
    }
    let mut b0 = b.clone();
    b0[(n - 1, n - 1)] = 0.0;
    let s0 = matrix_sigmas(&b0)?[2 * k];
    b0[(n - 1, n - 1)] = 1.0 / w;
    let s1 = matrix_sigmas(&b0)?[2 * k];
    Ok((s1 - s0, s0))
}

struct Chart<'s, 'a> {
    surface: &'s DoubledSurface<'a>,
    direction: Vec<f64>,
    frame: Vec<Vec<f64>>,
}

impl Chart<'_, '_> {
    fn new<'s, 'a>(surface: &'s DoubledSurface<'a>, direction: Vec<f64>) -> Chart<'s, 'a> {
        // Orthonormal complement of the radial direction by Gram-Schmidt.
        let n = direction.len();
        let mut frame: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
        for i in 0..n {
            let mut e = alloc::vec![0.0; n];
            e[i] = 1.0;
            let mut basis = alloc::vec![direction.clone()];
            basis.extend(frame.iter().cloned());
            for _ in 0..2 {
                for b in &basis {
                    let dot: f64 = e.iter().zip(b).map(|(x, y)| x * y).sum();
                    for (x, y) in e.iter_mut().zip(b) {
                        *x -= dot * y;
                    }
                }
            }
            let norm = e.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1e-6 && frame.len() < n - 1 {
                frame.push(e.iter().map(|v| v / norm).collect());
            }
        }
        Chart { surface, direction, frame }
    }

    fn base_point(&self, tangential: &[f64], v: f64) -> Vec<f64> {
        let h = &self.surface.horizon;
        let mut x: Vec<f64> = h.center.iter().zip(&self.direction).map(|(c, d)| c + (h.radius + v) * d).collect();
        for (y, e) in tangential.iter().zip(&self.frame) {
            for (xi, ei) in x.iter_mut().zip(e) {
                *xi += y * ei;
            }
        }
        x
    }

    /// Normal displacement `v(y', y_n)` of the sheet selected by the sign of `y_n`.
    fn v(&self, tangential: &[f64], yn: f64, upper: bool) -> Result<f64> {
        let r = self.surface.horizon.radius;
        let t2: f64 = tangential.iter().map(|y| y * y).sum();
        if t2 >= r * r {
            return Err(GeoError::domain("tangential offset leaves the horizon chart"));
        }
        let v_lo = -t2 / ((r * r - t2).sqrt() + r);
        if yn == 0.0 {
            return Ok(v_lo);
        }
        let sheet = self.surface.sheet(upper);
        let target = self.surface.seam + yn.abs();
        let g = |w: f64| -> f64 {
            match sheet.value(&self.base_point(tangential, v_lo + w * w)) {
                Ok(h) => h - target,
                Err(_) => f64::NAN,
            }
        };
        let mut hi = yn.abs().sqrt().min(yn.abs()).max(1e-8 * r.sqrt());
        let mut tries = 0;
        while !(g(hi) > 0.0) {
            hi *= 2.0;
            tries += 1;
            if tries > 80 {
                return Err(GeoError::Root("chart level not bracketed"));
            }
        }
        let w = brent(g, 0.0, hi, 1e-15 * hi)?;
        Ok(v_lo + w * w)
    }
}

fn fit_one_sided(ys: &[f64], vals: &[f64], degree: usize) -> Result<DVector<f64>> {
    let design = DMatrix::from_fn(ys.len(), degree, |i, j| ys[i].powi(j as i32 + 1));
    let rhs = DVector::from_column_slice(vals);
    let w = alloc::vec![1.0; ys.len()];
    Ok(DVector::from_vec(weighted_least_squares(&design, &rhs, &w, 1e12)?.coefficients))
}

fn side_hessian(
    chart: &Chart<'_, '_>,
    tangential_hessian: &DMatrix<f64>,
    opts: &RegularityOptions,
    upper: bool,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let n = chart.direction.len();
    let r = chart.surface.horizon.radius;
    let hn = opts.normal_step * r;
    let ht = opts.tangent_step * r;
    let sign = if upper { 1.0 } else { -1.0 };
    let ys: Vec<f64> = (1..=opts.levels).map(|j| sign * hn * j as f64).collect();
    let zero = alloc::vec![0.0; n - 1];
    let normal: Vec<f64> = ys.iter().map(|&y| chart.v(&zero, y, upper)).collect::<Result<_>>()?;
    let fit = fit_one_sided(&ys, &normal, opts.degree)?;
    let mut hess = DMatrix::zeros(n, n);
    let mut grad = DVector::zeros(n);
    hess.view_mut((0, 0), (n - 1, n - 1)).copy_from(tangential_hessian);
    hess[(n - 1, n - 1)] = 2.0 * fit[1];
    grad[n - 1] = fit[0];
    let mut y = zero.clone();
    for a in 0..n - 1 {
        let mut dv = Vec::with_capacity(ys.len());
        for &yn in &ys {
            let mut at = |o: f64| {
                y[a] = o * ht;
                let v = chart.v(&y, yn, upper);
                y[a] = 0.0;
                v
            };
            dv.push((8.0 * (at(1.0)? - at(-1.0)?) - (at(2.0)? - at(-2.0)?)) / (12.0 * ht));
        }
        let mixed = fit_one_sided(&ys, &dv, opts.degree.min(opts.levels - 1).max(1))?;
        hess[(a, n - 1)] = mixed[0];
        hess[(n - 1, a)] = mixed[0];
    }
    Ok((hess, grad))
}

/// Second-order matching data at horizon samples of a doubled surface.
///
/// In the chart over the tangent plane at each sample, the tangential second
/// derivatives come from the horizon cycle, the normal derivatives from
/// one-sided polynomial fits on each sheet. The null constraint is affine in
/// `v_nn` with slope `D`; both the measured and the constraint-solved `v_nn`
/// are reported.
pub fn regularity_certificate(surface: &DoubledSurface<'_>, k: usize, opts: &RegularityOptions) -> Result<RegularityReport> {
    let n = surface.horizon.dim();
    if k == 0 || 2 * k > n - 1 {
        return Err(GeoError::domain("need 2 <= 2k <= n - 1"));
    }
    if opts.samples == 0 || opts.levels < opts.degree || opts.degree < 2 {
        return Err(GeoError::domain("need samples > 0 and levels >= degree >= 2"));
    }
    if !(opts.normal_step > 0.0 && opts.tangent_step > 0.0 && opts.tangent_step < 0.25) {
        return Err(GeoError::domain("chart steps must be positive and small"));
    }
    let r = surface.horizon.radius;
    let ht = opts.tangent_step * r;
    let mut samples = Vec::with_capacity(opts.samples);
    let mut max_gap = 0.0f64;
    let mut mismatch = 0.0f64;
    for dir in surface.horizon.directions(opts.samples) {
        let chart = Chart::new(surface, dir.clone());
        let (_, tang) = crate::numerics::fd::gradient_hessian(|y| chart.v(y, 0.0, true), &alloc::vec![0.0; n - 1], ht)?;
        let mut out = [(0.0, 0.0, 0.0); 2];
        for (slot, upper) in [(0, true), (1, false)] {
            let (hess, grad) = side_hessian(&chart, &tang, opts, upper)?;
            let w = (1.0 + grad.norm_squared()).sqrt();
            let b = &hess / w;
            let (d, dagger) = normal_linearization(&b, w, k)?;
            if d.abs() * r.powi(2 * k as i32 - 1) < 1e-10 {
                return Err(GeoError::EllipticityFailure(d));
            }
            let c = -(&grad * (grad.transpose() * &hess)) / (w * w * w);
            let a = &b + &c;
            let higher = matrix_sigmas(&a)?[2 * k] - matrix_sigmas(&b)?[2 * k];
            let measured = hess[(n - 1, n - 1)];
            out[slot] = (d, measured, -(dagger + higher) / d);
        }
        let gap = (out[0].1 - out[1].1).abs();
        max_gap = max_gap.max(gap);
        mismatch = mismatch.max((out[0].1 - out[0].2).abs()).max((out[1].1 - out[1].2).abs());
        samples.push(RegularitySample {
            point: surface.horizon.point(&dir, 0.0),
            d_plus: out[0].0,
            d_minus: out[1].0,
            vnn_plus: out[0].1,
            vnn_minus: out[1].1,
            vnn_solved_plus: out[0].2,
            vnn_solved_minus: out[1].2,
            gap,
        });
    }
    Ok(RegularityReport { samples, max_gap, max_constraint_mismatch: mismatch })
}
