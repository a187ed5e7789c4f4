//! Asymptotic expansions of the flat end: regime classification in `q`, the
//! binomial coefficient ladder, the model series for `t(s)` and least-squares
//! extraction of `(a, a1, a2, c)` from end samples.

#[cfg(not(any(test, feature = "std")))]
#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector};
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

use crate::graphgeom::{Domain, GraphFunction, Jet};
use crate::model::ModelParams;
use crate::numerics::lstsq::weighted_least_squares;
use crate::numerics::quadrature::{integrate, QuadConfig};
use crate::{DimensionPair, GeoError, Result};

/// Expansion regime of the end, determined by `q = n/(2k) - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RegimeTag {
    QGt1,
    QEq1,
    /// `q` in `(1/(2m+2), 1/(2m+1))`.
    I1(u32),
    /// `q` in `(1/(2m+3), 1/(2m+2)]`.
    I2(u32),
    /// `q = 1/(2m+3)`.
    QPoint(u32),
}

impl RegimeTag {
    /// Index of the last ladder term kept in the expansion.
    pub fn max_order(&self) -> usize {
        match *self {
            RegimeTag::QGt1 | RegimeTag::QEq1 => 0,
            RegimeTag::I1(m) => m as usize,
            RegimeTag::I2(m) | RegimeTag::QPoint(m) => m as usize + 1,
        }
    }

    pub fn has_a2(&self) -> bool {
        matches!(self, RegimeTag::I2(_))
    }
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegimeTag::QGt1 => write!(f, "Q_GT_1"),
            RegimeTag::QEq1 => write!(f, "Q_EQ_1"),
            RegimeTag::I1(m) => write!(f, "I1({m})"),
            RegimeTag::I2(m) => write!(f, "I2({m})"),
            RegimeTag::QPoint(m) => write!(f, "QPOINT({m})"),
        }
    }
}

pub fn q_of(dims: DimensionPair) -> f64 {
    dims.q()
}

/// Assigns the regime for `q`; `q` must be at least `1/(2k)`.
pub fn classify_regime(q: Ratio<i64>, k: usize) -> Result<RegimeTag> {
    let zero = Ratio::zero();
    if q <= zero || k == 0 || q < Ratio::new(1, 2 * k as i64) {
        return Err(GeoError::domain("q lies outside the admissible range"));
    }
    let one = Ratio::one();
    if q > one {
        return Ok(RegimeTag::QGt1);
    }
    if q == one {
        return Ok(RegimeTag::QEq1);
    }
    let r = q.recip();
    let fl = r.floor().to_integer();
    if r.is_integer() {
        // r >= 2 here.
        return Ok(if fl % 2 == 1 {
            RegimeTag::QPoint(((fl - 3) / 2) as u32)
        } else {
            RegimeTag::I2(((fl - 2) / 2) as u32)
        });
    }
    Ok(if fl % 2 == 1 {
        RegimeTag::I1(((fl - 1) / 2) as u32)
    } else {
        RegimeTag::I2(((fl - 2) / 2) as u32)
    })
}

/// Coefficients of `(1 - x)^{-1/2} = sum B_j x^j`.
pub fn b_coeff(j: usize) -> Ratio<i64> {
    let mut b = Ratio::one();
    for i in 0..j {
        b *= Ratio::new(2 * i as i64 + 1, 2 * i as i64 + 2);
    }
    b
}

/// `C_j = B_j / (1 - (2j+1) q)`, defined while `(2j+1) q < 1`.
pub fn c_coeff(j: usize, q: Ratio<i64>) -> Result<Ratio<i64>> {
    let denom = Ratio::one() - Ratio::from_integer(2 * j as i64 + 1) * q;
    if denom <= Ratio::zero() {
        return Err(GeoError::domain("(2j+1)q must be below one"));
    }
    Ok(b_coeff(j) / denom)
}

fn to_f64(r: Ratio<i64>) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Partial sum `C_0 a s^{1-q} + ... + C_j a^{2j+1} s^{1-(2j+1)q}`.
pub fn p_poly(j: usize, a: f64, s: f64, q: Ratio<i64>) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..=j {
        let c = c_coeff(i, q)?;
        let e = Ratio::one() - Ratio::from_integer(2 * i as i64 + 1) * q;
        total += to_f64(c) * a.powi(2 * i as i32 + 1) * s.powf(to_f64(e));
    }
    Ok(total)
}

/// Radial shape of a series term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TermKind {
    Power(Ratio<i64>),
    Log,
}

impl TermKind {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            TermKind::Power(e) => s.powf(to_f64(*e)),
            TermKind::Log => s.ln(),
        }
    }

    /// First and second derivatives in `s`.
    fn derivatives(&self, s: f64) -> (f64, f64) {
        match self {
            TermKind::Power(e) => {
                let e = to_f64(*e);
                (e * s.powf(e - 1.0), e * (e - 1.0) * s.powf(e - 2.0))
            }
            TermKind::Log => (1.0 / s, -1.0 / (s * s)),
        }
    }
}

/// One term `coeff * a^{a_power} * kind(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SeriesTerm {
    pub j: usize,
    pub coeff: Ratio<i64>,
    pub a_power: i32,
    pub kind: TermKind,
}

impl SeriesTerm {
    pub fn eval(&self, a: f64, s: f64) -> f64 {
        to_f64(self.coeff) * a.powi(self.a_power) * self.kind.eval(s)
    }
}

/// Radial shapes of the ladder terms for a regime, indexed by `j`.
fn ladder_kinds(q: Ratio<i64>, regime: RegimeTag) -> Vec<TermKind> {
    (0..=regime.max_order())
        .map(|j| {
            let e = Ratio::one() - Ratio::from_integer(2 * j as i64 + 1) * q;
            if e.is_zero() {
                TermKind::Log
            } else {
                TermKind::Power(e)
            }
        })
        .collect()
}

/// Term-by-term integral of the model slope, without the additive constant.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSeries {
    pub dims: DimensionPair,
    pub regime: RegimeTag,
    pub a: f64,
    pub terms: Vec<SeriesTerm>,
}

impl ModelSeries {
    pub fn eval(&self, s: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(self.a, s)).sum()
    }

    /// Decay exponent of the first omitted term, `(2J+3) q`.
    pub fn remainder_exponent(&self) -> f64 {
        let j = self.terms.last().map_or(0, |t| t.j);
        (2 * j + 3) as f64 * self.dims.q()
    }
}

/// Model series truncated at `order` (the regime maximum when `None`).
pub fn model_series(dims: DimensionPair, m: f64, order: Option<usize>) -> Result<ModelSeries> {
    let params = ModelParams::new(dims, m)?;
    let q = dims.q_ratio();
    let regime = classify_regime(q, dims.k())?;
    let max = regime.max_order();
    let order = order.unwrap_or(max);
    if order > max {
        return Err(GeoError::domain("series order exceeds the validity of the regime"));
    }
    let kinds = ladder_kinds(q, regime);
    let terms = (0..=order)
        .map(|j| {
            let coeff = match kinds[j] {
                TermKind::Log => b_coeff(j),
                TermKind::Power(e) => b_coeff(j) / e,
            };
            SeriesTerm { j, coeff, a_power: 2 * j as i32 + 1, kind: kinds[j] }
        })
        .collect();
    Ok(ModelSeries { dims, regime, a: (2.0 * params.m()).sqrt(), terms })
}

/// Additive constant `a1` with `t(s) = a1 + series(s) + o(1)` for the model profile.
pub fn model_constant(dims: DimensionPair, m: f64) -> Result<f64> {
    let series = model_series(dims, m, None)?;
    let rh = ModelParams::new(dims, m)?.horizon_radius();
    let q = dims.q();
    let a = series.a;
    let big_j = series.terms.len() - 1;
    let e = series.remainder_exponent();
    let b_next = to_f64(b_coeff(big_j + 1));
    let b: Vec<f64> = (0..=big_j).map(|j| to_f64(b_coeff(j))).collect();

    // a sigma^{-q} [(1-z)^{-1/2} - sum_{j<=J} B_j z^j], with z = (r_h/sigma)^{2q} and 1 - z supplied.
    let remainder = |sigma: f64, one_minus_z: f64| -> f64 {
        let z = 1.0 - one_minus_z;
        let bracket = if z < 0.5 {
            let mut coef = b_next;
            let mut zp = z.powi(big_j as i32 + 1);
            let mut sum = 0.0;
            let mut j = big_j + 1;
            loop {
                let term = coef * zp;
                sum += term;
                if term.abs() <= 1e-17 * sum.abs() || j > 4000 {
                    break;
                }
                coef *= (2 * j + 1) as f64 / (2 * j + 2) as f64;
                zp *= z;
                j += 1;
            }
            sum
        } else {
            let partial: f64 = b.iter().rev().fold(0.0, |acc, bj| acc * z + bj);
            one_minus_z.powf(-0.5) - partial
        };
        a * sigma.powf(-q) * bracket
    };
    let cfg = QuadConfig { rel_tol: 1e-13, abs_tol: 1e-14, max_intervals: 4000 };

    let limit = 2.0 * a * rh.powf(-q) * (rh / (2.0 * q)).sqrt();
    let near = integrate(
        |xi: f64| {
            let d = xi * xi / rh;
            if d < 1e-300 {
                return limit;
            }
            let omz = -(-2.0 * q * d.ln_1p()).exp_m1();
            2.0 * xi * remainder(rh + xi * xi, omz)
        },
        0.0,
        rh.sqrt(),
        &cfg,
    )?
    .value;

    let beta = 1.0 / (e - 1.0);
    let far_limit = b_next * a.powi(2 * big_j as i32 + 3) * (2.0 * rh).powf(1.0 - e) * beta;
    let far = integrate(
        |v: f64| {
            let sigma = 2.0 * rh * v.powf(-beta);
            if !(sigma < 1e100) {
                return far_limit;
            }
            let omz = -(2.0 * q * (rh / sigma).ln()).exp_m1();
            remainder(sigma, omz) * 2.0 * rh * beta * v.powf(-beta - 1.0)
        },
        0.0,
        1.0,
        &cfg,
    )?
    .value;

    Ok(near + far - series.eval(rh))
}

/// Options for [`fit_expansion`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitOptions {
    /// Samples with `|x|` below this radius are ignored.
    pub fit_radius: f64,
    pub max_condition: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { fit_radius: 0.0, max_condition: 1e12 }
    }
}

impl FitOptions {
    /// Fit radius `50 (2m)^{k/(n-2k)}` for a mass guess.
    pub fn for_mass_guess(dims: DimensionPair, m_guess: f64) -> Self {
        FitOptions { fit_radius: 50.0 * (2.0 * m_guess).powf(dims.horizon_exponent()), ..Default::default() }
    }
}

/// Log-spaced sampling radii for fitting a model-like end of mass `m_guess`:
/// from the default fit radius out to where the smallest kept term is still resolved.
pub fn suggested_radii(dims: DimensionPair, m_guess: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 || !(m_guess > 0.0) {
        return Err(GeoError::domain("need a positive mass guess and at least two radii"));
    }
    let lo = FitOptions::for_mass_guess(dims, m_guess).fit_radius;
    let hi = lo * 10f64.powf((1.0 / dims.q()).min(4.0));
    Ok((0..count).map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64)).collect())
}

/// A point of the end together with its height.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EndSample {
    pub x: Vec<f64>,
    pub u: f64,
}

/// Fitted end `u = a1 + sum_j ladder_j kind_j(|x|) + <c, x> |x|^{-1-q}`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExpansionParams {
    pub dims: DimensionPair,
    pub regime: RegimeTag,
    pub a: f64,
    pub a1: f64,
    pub a2: Option<f64>,
    pub c: Vec<f64>,
    /// Fitted coefficients of the radial ladder, leading term first.
    pub ladder: Vec<f64>,
    pub residual_norm: f64,
    pub condition: f64,
    pub samples_used: usize,
}

impl ExpansionParams {
    /// Model mass parameter `a^2 / 2`.
    pub fn mass(&self) -> f64 {
        0.5 * self.a * self.a
    }

    /// Gauss-Bonnet-Chern mass `(a^2/2)^k`.
    pub fn gbc_mass(&self) -> f64 {
        self.mass().powi(self.dims.k() as i32)
    }

    fn kinds(&self) -> Vec<TermKind> {
        ladder_kinds(self.dims.q_ratio(), self.regime)
    }

    /// The fitted end as a graph over `|x| >= inner_radius`.
    pub fn graph(&self, inner_radius: f64) -> ExpansionGraph {
        ExpansionGraph { params: self.clone(), kinds: self.kinds(), inner_radius }
    }
}

pub fn fit_expansion(samples: &[EndSample], dims: DimensionPair, opts: &FitOptions) -> Result<ExpansionParams> {
    let n = dims.n();
    let q_r = dims.q_ratio();
    let q = dims.q();
    let regime = classify_regime(q_r, dims.k())?;
    let kinds = ladder_kinds(q_r, regime);
    let cols = 1 + kinds.len() + n;

    let mut used = Vec::new();
    for smp in samples {
        if smp.x.len() != n || !smp.u.is_finite() {
            return Err(GeoError::domain("sample dimension does not match n"));
        }
        let r = norm(&smp.x);
        if r >= opts.fit_radius && r > 0.0 {
            used.push((smp, r));
        }
    }
    if used.len() < 3 * cols {
        return Err(GeoError::domain("need at least three samples per fitted coefficient"));
    }

    let rows = used.len();
    let mut design = DMatrix::zeros(rows, cols);
    let mut rhs = DVector::zeros(rows);
    let mut weights = Vec::with_capacity(rows);
    for (i, (smp, r)) in used.iter().enumerate() {
        design[(i, 0)] = 1.0;
        for (j, kind) in kinds.iter().enumerate() {
            design[(i, 1 + j)] = kind.eval(*r);
        }
        let decay = r.powf(-1.0 - q);
        for a in 0..n {
            design[(i, 1 + kinds.len() + a)] = smp.x[a] * decay;
        }
        rhs[i] = smp.u;
        weights.push(r.powf(q + 1.0));
    }
    let fit = weighted_least_squares(&design, &rhs, &weights, opts.max_condition)?;
    let coef = &fit.coefficients;
    let ladder: Vec<f64> = coef[1..1 + kinds.len()].to_vec();
    let a = match regime {
        RegimeTag::QEq1 => ladder[0],
        _ => (1.0 - q) * ladder[0],
    };
    if !(a > 0.0) {
        return Err(GeoError::InvalidEnd(a));
    }
    let a2 = regime.has_a2().then(|| ladder[regime.max_order()]);
    Ok(ExpansionParams {
        dims,
        regime,
        a,
        a1: coef[0],
        a2,
        c: coef[1 + kinds.len()..].to_vec(),
        ladder,
        residual_norm: fit.residual_norm,
        condition: fit.condition,
        samples_used: rows,
    })
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Closed-form graph of a fitted expansion, with exact derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionGraph {
    params: ExpansionParams,
    kinds: Vec<TermKind>,
    inner_radius: f64,
}

impl ExpansionGraph {
    pub fn params(&self) -> &ExpansionParams {
        &self.params
    }
}

impl GraphFunction for ExpansionGraph {
    fn dim(&self) -> usize {
        self.params.dims.n()
    }

    fn domain(&self) -> Domain {
        Domain::Exterior { center: alloc::vec![0.0; self.dim()], radius: self.inner_radius, guard: 0.0 }
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        if !self.domain().admits_value(x) {
            return Err(GeoError::OutOfDomain);
        }
        let s = norm(x);
        let q = self.params.dims.q();
        let radial: f64 = self.kinds.iter().zip(&self.params.ladder).map(|(k, c)| c * k.eval(s)).sum();
        let cx: f64 = self.params.c.iter().zip(x).map(|(c, y)| c * y).sum();
        Ok(self.params.a1 + radial + cx * s.powf(-1.0 - q))
    }

    fn jet(&self, x: &[f64]) -> Result<Jet> {
        let value = self.value(x)?;
        let n = self.dim();
        let s = norm(x);
        if !(s > 0.0) {
            return Err(GeoError::OutOfDomain);
        }
        let xv = DVector::from_column_slice(x);
        let xhat = &xv / s;
        let id = DMatrix::<f64>::identity(n, n);
        let proj = &xhat * xhat.transpose();

        // Radial part f(s): grad = f' xhat, Hess = f'' xhat xhat^T + (f'/s)(I - xhat xhat^T).
        let (mut d1, mut d2) = (0.0, 0.0);
        for (k, c) in self.kinds.iter().zip(&self.params.ladder) {
            let (f1, f2) = k.derivatives(s);
            d1 += c * f1;
            d2 += c * f2;
        }
        let mut gradient = &xhat * d1;
        let mut hessian = &proj * d2 + (&id - &proj) * (d1 / s);

        // <c, x> g(s) with g = s^{-1-q}.
        let q = self.params.dims.q();
        let e = -1.0 - q;
        let g = s.powf(e);
        let g1 = e * s.powf(e - 1.0);
        let g2 = e * (e - 1.0) * s.powf(e - 2.0);
        let c = DVector::from_column_slice(&self.params.c);
        let cx = c.dot(&xv);
        gradient += &c * g + &xhat * (cx * g1);
        let cross = &c * xhat.transpose() + &xhat * c.transpose();
        hessian += cross * g1 + (&proj * g2 + (&id - &proj) * (g1 / s)) * cx;
        Ok(Jet { value, gradient, hessian })
    }
}
