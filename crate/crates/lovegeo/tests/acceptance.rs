//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use lovegeo::commands::model_end_samples;
use lovegeo::config::{ConfigLayer, RunConfig};
use lovegeo_core::asymptotics::{
    b_coeff, classify_regime, fit_expansion, model_series, FitOptions, RegimeTag, TermKind,
};
use lovegeo_core::graphgeom::{
    regularity_certificate, reflect_double, symmetrized_shape_operator, DoubledSurface, HorizonCycle, RadialGraph,
    RegularityOptions, ShiftedRadial,
};
use lovegeo_core::massflux::{calibrate_mass_constant, flux_rotational, model_penrose, penrose_sweep};
use lovegeo_core::model::{AdSModelParams, ModelParams};
use lovegeo_core::numerics::{ode::StepControl, SplitMix64};
use lovegeo_core::rotational::{integrate_profile, ConstantMass, TanhStep};
use lovegeo_core::symcurv::{
    is_elliptic, matrix_sigmas, newton_tensor, sigma_p_minors, DefiniteSign, DimensionPair,
};
use nalgebra::DMatrix;
use num_rational::Ratio;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const MASSES: [f64; 3] = [0.5, 1.0, 2.0];
const GRID_MASSES: [f64; 4] = [0.1, 0.5, 1.0, 10.0];

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn model_grid() -> impl Iterator<Item = (DimensionPair, f64)> {
    DimensionPair::all_up_to(12).into_iter().flat_map(|d| GRID_MASSES.into_iter().map(move |m| (d, m)))
}

fn constraint_suite() -> Outcome {
    let start = Instant::now();
    let ctrl = StepControl::default();
    let (mut worst_sigma, mut worst_drift) = (0.0f64, 0.0f64);
    for dims in DimensionPair::all_up_to(10) {
        for m in MASSES {
            let rh = ModelParams::new(dims, m).map_err(|e| e.to_string())?.horizon_radius();
            let curve = integrate_profile(dims, m, 100.0 * rh, &ctrl).map_err(|e| e.to_string())?;
            let c0 = curve.samples[0].first_integral;
            let drift = curve.samples.iter().map(|s| (s.first_integral - c0).abs() / c0.abs()).fold(0.0, f64::max);
            let sigma = curve.max_abs_sigma2k();
            check(sigma < 1e-8 && drift < 1e-8, || format!("{dims:?} m={m}: sigma {sigma:e}, drift {drift:e}"))?;
            worst_sigma = worst_sigma.max(sigma);
            worst_drift = worst_drift.max(drift);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("max sigma_2k {worst_sigma:.1e}, max drift {worst_drift:.1e}, {secs:.2} s"))
}

fn closed_form() -> Outcome {
    let ctrl = StepControl::default();
    let mut worst = 0.0f64;
    for (dims, m) in model_grid() {
        let model = ModelParams::new(dims, m).map_err(|e| e.to_string())?;
        let rh = model.horizon_radius();
        let curve = integrate_profile(dims, m, 100.0 * rh, &ctrl).map_err(|e| e.to_string())?;
        for s in &curve.samples {
            let exact = model.profile_t(s.s).map_err(|e| e.to_string())?;
            let err = (s.t - exact).abs() / rh.max(exact.abs());
            check(err < 1e-7, || format!("{dims:?} m={m} at s={}: {} vs {exact}", s.s, s.t))?;
            worst = worst.max(err);
        }
    }
    let flamm = ModelParams::new(DimensionPair::new(3, 1).unwrap(), 1.0).unwrap().profile_t(4.0).unwrap();
    check((flamm - 4.0).abs() < 1e-7, || format!("Flamm t(4) = {flamm}"))?;
    let cosh = ModelParams::new(DimensionPair::new(4, 1).unwrap(), 0.5).unwrap();
    for s in [1.5, 2.0, 7.0] {
        let t = cosh.profile_t(s).unwrap();
        check((t - f64::acosh(s)).abs() < 1e-7, || format!("(4,1,0.5) t({s}) = {t}"))?;
    }
    Ok(format!("max profile error {worst:.1e}, Flamm t(4) = {flamm:.12}"))
}

fn regularity() -> Outcome {
    let opts = RegularityOptions { samples: 3, ..Default::default() };
    let mut worst = 0.0f64;
    for (dims, m) in model_grid() {
        let model = ModelParams::new(dims, m).map_err(|e| e.to_string())?;
        let rh = model.horizon_radius();
        let u = RadialGraph::new(dims.n(), model, 1e-12).map_err(|e| e.to_string())?;
        let h = HorizonCycle::centered(dims.n(), rh).map_err(|e| e.to_string())?;
        let double = reflect_double(&u, h).map_err(|e| e.to_string())?;
        let rep = regularity_certificate(&double, dims.k(), &opts).map_err(|e| e.to_string())?;
        check(rep.max_gap < 1e-6, || format!("{dims:?} m={m}: gap {:e}", rep.max_gap))?;
        worst = worst.max(rep.max_gap);
    }
    let dims = DimensionPair::new(3, 1).unwrap();
    let upper_model = ModelParams::new(dims, 1.0).unwrap();
    let rh = upper_model.horizon_radius();
    let upper = RadialGraph::new(3, upper_model, 1e-12).unwrap();
    let shifted = ShiftedRadial::with_inner_radius(ModelParams::new(dims, 2.0).unwrap(), rh).unwrap();
    let lower = RadialGraph::new(3, shifted, 1e-12).unwrap();
    let double = DoubledSurface::from_sheets(&upper, &lower, HorizonCycle::centered(3, rh).unwrap()).unwrap();
    let rep = regularity_certificate(&double, 1, &opts).map_err(|e| e.to_string())?;
    check(rep.max_gap > 1e-2, || format!("mismatched control gap {:e}", rep.max_gap))?;
    Ok(format!("max model gap {worst:.1e}, mismatched control gap {:.3e}", rep.max_gap))
}

fn ellipticity() -> Outcome {
    let mut rng = SplitMix64(0xe11);
    let mut count = 0usize;
    for (dims, m) in model_grid() {
        let n = dims.n();
        let model = ModelParams::new(dims, m).map_err(|e| e.to_string())?;
        let rh = model.horizon_radius();
        let u = RadialGraph::new(n, model, 1e-12).map_err(|e| e.to_string())?;
        for i in 0..100 {
            let mut x: Vec<f64> = (0..n).map(|_| rng.next_f64() - 0.5).collect();
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let r = rh * (1.0 + 1e-3 * 10f64.powf(5.0 * i as f64 / 99.0));
            x.iter_mut().for_each(|v| *v *= r / norm);
            let a = symmetrized_shape_operator(&u, &x).map_err(|e| e.to_string())?;
            let v = is_elliptic(&a, dims.k()).map_err(|e| e.to_string())?;
            check(v.is_elliptic(), || format!("{dims:?} m={m} at r={r}: {v:?}"))?;
            count += 1;
        }
    }
    for n in 3..=8 {
        let v = is_elliptic(&DMatrix::zeros(n, n), 1).map_err(|e| e.to_string())?;
        check(v.definite_sign == DefiniteSign::Indefinite && !v.is_elliptic(), || format!("zero matrix: {v:?}"))?;
    }
    Ok(format!("{count} samples elliptic, zero matrix indefinite"))
}

fn run_config(dims: DimensionPair, m: f64) -> RunConfig {
    let layer = ConfigLayer { n: Some(dims.n()), k: Some(dims.k()), m: Some(m), ..Default::default() };
    RunConfig::resolve(layer, None, None).expect("valid configuration")
}

fn flux_mass() -> Outcome {
    let ctrl = StepControl::default();
    let (mut drift, mut cal, mut cross) = (0.0f64, 0.0f64, 0.0f64);
    for (dims, m) in model_grid() {
        let rh = ModelParams::new(dims, m).map_err(|e| e.to_string())?.horizon_radius();
        let f = flux_rotational(dims, &ConstantMass::new(m).unwrap(), 50.0 * rh, &ctrl).map_err(|e| e.to_string())?;
        check(f.drift < 1e-6, || format!("{dims:?} m={m}: drift {:e}", f.drift))?;
        drift = drift.max(f.drift);
    }
    for dims in DimensionPair::all_up_to(10) {
        let lambda = calibrate_mass_constant(dims).map_err(|e| e.to_string())?;
        for m in MASSES {
            let rh = ModelParams::new(dims, m).unwrap().horizon_radius();
            let f = flux_rotational(dims, &ConstantMass::new(m).unwrap(), 50.0 * rh, &ctrl).map_err(|e| e.to_string())?;
            let target = m.powi(dims.k() as i32);
            let err = (lambda * f.flux / target - 1.0).abs();
            check(err < 1e-4, || format!("{dims:?} m={m}: calibrated mass off by {err:e}"))?;
            cal = cal.max(err);

            let cfg = run_config(dims, m);
            let samples = model_end_samples(&cfg, 120).map_err(|e| e.to_string())?;
            let fit = fit_expansion(&samples, dims, &FitOptions::for_mass_guess(dims, m)).map_err(|e| e.to_string())?;
            let err = (fit.gbc_mass() / f.mass - 1.0).abs();
            check(err < 1e-3, || format!("{dims:?} m={m}: fit {} vs flux {}", fit.gbc_mass(), f.mass))?;
            cross = cross.max(err);
        }
    }
    Ok(format!("max drift {drift:.1e}, calibrated error {cal:.1e}, fit vs flux {cross:.1e}"))
}

fn regime_oracle(q: Ratio<i64>) -> RegimeTag {
    let one = Ratio::from_integer(1);
    if q > one {
        return RegimeTag::QGt1;
    }
    if q == one {
        return RegimeTag::QEq1;
    }
    let odd = |j: i64| Ratio::from_integer(2 * j + 1) * q;
    let growing = (0..).take_while(|&j| odd(j) < one).count() as i64;
    let m = (growing - 1) as u32;
    if odd(growing) == one {
        RegimeTag::QPoint(m)
    } else if Ratio::from_integer(2 * growing) * q > one {
        RegimeTag::I1(m)
    } else {
        RegimeTag::I2(m)
    }
}

fn binomial_series(j: usize) -> Ratio<i64> {
    // (1 - x)^{-1/2}: coefficient binom(2j, j) / 4^j
    let mut c = 1i64;
    for i in 0..j as i64 {
        c = c * (2 * j as i64 - i) / (i + 1);
    }
    Ratio::new(c, 4i64.pow(j as u32))
}

fn regimes() -> Outcome {
    let mut count = 0;
    for dims in DimensionPair::all_up_to(20) {
        let q = dims.q_ratio();
        let got = classify_regime(q, dims.k()).map_err(|e| e.to_string())?;
        let want = regime_oracle(q);
        check(got == want, || format!("{dims:?}: {got} vs {want}"))?;
        let series = model_series(dims, 1.0, None).map_err(|e| e.to_string())?;
        for t in &series.terms {
            let b = binomial_series(t.j);
            check(b_coeff(t.j) == b, || format!("B_{} mismatch", t.j))?;
            let e = Ratio::from_integer(1) - Ratio::from_integer(2 * t.j as i64 + 1) * q;
            let want = match t.kind {
                TermKind::Power(p) => {
                    check(p == e, || format!("{dims:?} j={}: exponent {p}", t.j))?;
                    b / e
                }
                TermKind::Log => {
                    check(e == Ratio::from_integer(0), || format!("{dims:?} j={}: spurious log", t.j))?;
                    b
                }
            };
            check(t.coeff == want, || format!("{dims:?} j={}: {} vs {want}", t.j, t.coeff))?;
        }
        count += 1;
    }
    let mut worst = 0.0f64;
    for dims in DimensionPair::all_up_to(12) {
        for m in MASSES {
            let samples = model_end_samples(&run_config(dims, m), 120).map_err(|e| e.to_string())?;
            let opts = FitOptions::for_mass_guess(dims, m);
            let fit = fit_expansion(&samples, dims, &opts).map_err(|e| e.to_string())?;
            let err = (fit.a / (2.0 * m).sqrt() - 1.0).abs();
            check(err < 1e-3, || format!("{dims:?} m={m}: a = {}", fit.a))?;
            worst = worst.max(err);
        }
    }
    Ok(format!("{count} dimension pairs classified, max a error {worst:.1e}"))
}

fn penrose() -> Outcome {
    let mut worst = 0.0f64;
    for (dims, m) in model_grid() {
        let r = model_penrose(dims, m).map_err(|e| e.to_string())?;
        let rel = r.gap.abs() / r.mass;
        check(rel < 1e-6, || format!("{dims:?} m={m}: gap {:e}", r.gap))?;
        worst = worst.max(rel);
    }
    let ctrl = StepControl::default();
    let mut slowest = 0.0f64;
    let mut least = f64::INFINITY;
    for (n, k) in [(3, 1), (5, 2), (6, 1), (7, 3)] {
        let dims = DimensionPair::new(n, k).unwrap();
        let rh = ModelParams::new(dims, 1.0).unwrap().horizon_radius();
        let center = rh * 4f64.powf(1.0 / dims.potential_exponent());
        let family: Vec<TanhStep> =
            (0..20).map(|i| TanhStep::new(1.0, i as f64 / 19.0, center, rh).unwrap()).collect();
        let start = Instant::now();
        let members = penrose_sweep(dims, &family, &ctrl).map_err(|e| e.to_string())?;
        let secs = start.elapsed().as_secs_f64();
        check(secs < 120.0, || format!("{dims:?}: sweep took {secs:.1} s"))?;
        slowest = slowest.max(secs);
        for s in &members {
            let rel = s.report.gap / s.report.mass;
            check(rel >= -1e-6, || format!("{dims:?}: member gap {:e}", s.report.gap))?;
            least = least.min(rel);
        }
    }
    Ok(format!("max equality gap {worst:.1e}, least sweep gap/mass {least:.1e}, slowest sweep {slowest:.2} s"))
}

fn ads() -> Outcome {
    let p = AdSModelParams::new(DimensionPair::new(3, 1).unwrap(), 1.0).map_err(|e| e.to_string())?;
    let h = p.horizon();
    check((h - 1.0).abs() < 1e-12, || format!("horizon {h}"))?;
    let v = p.potential(h).map_err(|e| e.to_string())?;
    check(v.abs() < 1e-12, || format!("potential at root {v:e}"))?;
    let slope = p.profile_slope(2.0).map_err(|e| e.to_string())?;
    check((slope - 0.1).abs() < 1e-12, || format!("slope at 2 = {slope}"))?;
    Ok(format!("horizon {h}, V(root) {v:.1e}, slope(2) {slope}"))
}

fn subset_sum(values: &[f64], p: usize) -> (f64, f64) {
    let n = values.len();
    let (mut sum, mut scale) = (0.0, 0.0);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == p {
            let prod: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| values[i]).product();
            sum += prod;
            scale += prod.abs();
        }
    }
    (sum, scale)
}

fn minor_sum(a: &DMatrix<f64>, p: usize) -> f64 {
    let n = a.nrows();
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == p)
        .map(|mask| {
            let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            a.select_rows(&idx).select_columns(&idx).determinant()
        })
        .sum()
}

fn oracles() -> Outcome {
    let mut rng = SplitMix64(0x0a11);
    let mut worst = 0.0f64;
    for trial in 0..1000 {
        let n = 1 + trial % 8;
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = 4.0 * rng.next_f64() - 2.0;
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        let eig = a.clone().symmetric_eigenvalues();
        let eig: Vec<f64> = eig.iter().copied().collect();
        let sigmas = matrix_sigmas(&a).map_err(|e| e.to_string())?;
        let mut rel = |got: f64, want: f64, scale: f64, what: &str| -> Result<(), String> {
            let err = (got - want).abs() / scale.max(1e-300);
            worst = worst.max(err);
            check(err < 1e-10, || format!("trial {trial} n={n} {what}: {got} vs {want}"))
        };
        for p in 0..=n {
            let (want, scale) = subset_sum(&eig, p);
            rel(sigmas[p], want, scale.max(1.0), &format!("sigma_{p}"))?;
            if n <= 6 && p >= 1 {
                let minors = sigma_p_minors(&a, p).map_err(|e| e.to_string())?;
                rel(minors, minor_sum(&a, p), scale.max(1.0), &format!("minors_{p}"))?;
            }
            if p < n {
                let np = newton_tensor(&a, p).map_err(|e| e.to_string())?;
                let (_, next_scale) = subset_sum(&eig, p + 1);
                rel((np * &a).trace(), (p + 1) as f64 * sigmas[p + 1], (p + 1) as f64 * next_scale.max(1.0), "trace identity")?;
            }
        }
        let nn = newton_tensor(&a, n).map_err(|e| e.to_string())?;
        let (_, scale) = subset_sum(&eig.iter().map(|v| v.abs()).collect::<Vec<_>>(), n);
        let norm = a.norm().powi(n as i32).max(scale).max(1.0);
        rel(nn.amax(), 0.0, norm, "Cayley-Hamilton")?;
    }
    Ok(format!("1000 matrices, max relative error {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("constraint suite", constraint_suite),
        ("closed-form agreement", closed_form),
        ("horizon regularity", regularity),
        ("ellipticity", ellipticity),
        ("flux and mass", flux_mass),
        ("asymptotic regimes", regimes),
        ("penrose equality and direction", penrose),
        ("anti-de Sitter slice", ads),
        ("symmetric function oracles", oracles),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {}: PASS  {name} ({msg}) [{secs:.2} s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {msg} [{secs:.2} s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
