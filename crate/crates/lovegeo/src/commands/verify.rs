use std::path::Path;

use lovegeo_core::graphgeom::{
    horizon_conditions, regularity_certificate, shape_operator, sigmas_graph, DoubledSurface, GraphFunction, GridGraph,
    HorizonCycle, RadialGraph, RegularityOptions, ShiftedRadial,
};
use lovegeo_core::model::ModelParams;
use lovegeo_core::rotational::integrate_profile;
use lovegeo_core::symcurv::is_elliptic;
use nalgebra::DMatrix;
use serde::Serialize;

use super::{integrator_control, samples_from_file, spectrum, Outcome};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::format::json;
use crate::io::{read_surface, write_text, ProfileFile, SurfaceInput};
use crate::report::Verdict;

/// Largest admissible `v_nn` gap across the doubled horizon.
const REGULARITY_TOL: f64 = 1e-6;

#[derive(Serialize)]
struct Bundle<'a> {
    n: usize,
    k: usize,
    verdicts: &'a [Verdict],
}

pub(super) fn run(cfg: &RunConfig, input: Option<&Path>, lower: Option<&Path>) -> Result<Outcome, CliError> {
    let surface = match input {
        Some(p) => read_surface(p, cfg.dims)?,
        None => {
            let rh = ModelParams::new(cfg.dims, cfg.m)?.horizon_radius();
            let curve = integrate_profile(cfg.dims, cfg.m, cfg.tau_factor * rh, &integrator_control())?;
            SurfaceInput::Profile(ProfileFile::from_curve(&curve))
        }
    };
    let lower = lower.map(|p| ProfileFile::read(p, cfg.dims)).transpose()?;
    let verdicts = match &surface {
        SurfaceInput::Profile(file) => verify_profile(cfg, file, lower.as_ref())?,
        SurfaceInput::Grid(grid) => verify_grid(cfg, grid)?,
    };
    let bundle = Bundle { n: cfg.dims.n(), k: cfg.dims.k(), verdicts: &verdicts };
    let path = write_text(&cfg.out_dir.join("verdicts.json"), &json(&bundle))?;
    Ok((verdicts, vec![path]))
}

/// Mean of `C/2` when the first integral is constant to `tol_rel`.
fn model_constant(file: &ProfileFile, tol_rel: f64) -> Option<f64> {
    let (lo, hi) = file
        .samples
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r.first_integral), hi.max(r.first_integral)));
    ((hi - lo) <= tol_rel * hi).then_some(0.25 * (lo + hi))
}

fn verify_profile(cfg: &RunConfig, file: &ProfileFile, lower: Option<&ProfileFile>) -> Result<Vec<Verdict>, CliError> {
    let dims = file.dims()?;
    if dims != cfg.dims {
        return Err(CliError::Config("profile dimensions disagree with the configuration".into()));
    }
    let samples = samples_from_file(file, cfg.tol_rel)?;
    let max_sigma = samples.iter().map(|s| s.sigma2k_residual.abs()).fold(0.0, f64::max);
    let mut failures = 0usize;
    for s in &samples {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(spectrum(dims, s)));
        if !is_elliptic(&a, dims.k())?.is_elliptic() {
            failures += 1;
        }
    }
    let first = &file.samples[0];
    let orthogonal = first.sdot.abs() <= 1e-12 && first.t.abs() <= 1e-12 * first.s;
    let mut verdicts = vec![
        Verdict::at_most("sigma2k_residual", max_sigma, cfg.tol_abs),
        Verdict::flag("ellipticity", failures == 0)
            .with_detail(format!("{failures} of {} samples fail", samples.len())),
        Verdict::flag("orthogonal_horizon", orthogonal),
    ];

    let Some(c) = model_constant(file, cfg.tol_rel) else {
        return Ok(verdicts);
    };
    let upper_model = ModelParams::new(dims, c)?;
    let rh = upper_model.horizon_radius();
    let lower_c = match lower {
        Some(f) => model_constant(f, cfg.tol_rel)
            .ok_or_else(|| CliError::Config("lower sheet must have a constant first integral".into()))?,
        None => c,
    };
    let upper = RadialGraph::new(dims.n(), ShiftedRadial::with_inner_radius(upper_model, rh)?, 1e-12)?;
    let lower_graph =
        RadialGraph::new(dims.n(), ShiftedRadial::with_inner_radius(ModelParams::new(dims, lower_c)?, rh)?, 1e-12)?;
    let cycle = HorizonCycle::centered(dims.n(), rh)?;
    let hc = horizon_conditions(&upper, &cycle, dims.k(), &[0.01 * rh, 0.1 * rh, rh, 10.0 * rh], 16)?;
    verdicts.push(Verdict::flag("horizon_conditions", hc.all()));
    let double = DoubledSurface::from_sheets(&upper, &lower_graph, cycle)?;
    let rep = regularity_certificate(&double, dims.k(), &RegularityOptions::default())?;
    verdicts.push(Verdict::at_most("regularity_gap", rep.max_gap, REGULARITY_TOL));
    Ok(verdicts)
}

fn verify_grid(cfg: &RunConfig, grid: &GridGraph) -> Result<Vec<Verdict>, CliError> {
    let n = grid.dim();
    if n != cfg.dims.n() {
        return Err(CliError::Config("grid dimension disagrees with n".into()));
    }
    let k = cfg.dims.k();
    // Interior nodes, thinned to at most about 256 points.
    let inner: Vec<usize> = grid.extents.iter().map(|e| e.saturating_sub(4)).collect();
    if inner.contains(&0) {
        return Err(CliError::Config("grid too small for interior derivatives".into()));
    }
    let total: usize = inner.iter().product();
    let stride = ((total as f64 / 256.0).powf(1.0 / n as f64).ceil() as usize).max(1);
    let mut max_sigma = 0.0f64;
    let mut failures = 0usize;
    let mut count = 0usize;
    let mut idx = vec![0usize; n];
    'outer: loop {
        let x: Vec<f64> = (0..n).map(|a| grid.origin[a] + (idx[a] + 2) as f64 * grid.spacing).collect();
        let sig = sigmas_graph(grid, &x)?;
        max_sigma = max_sigma.max(sig[2 * k].abs());
        if !is_elliptic(&shape_operator(grid, &x)?.a, k)?.is_elliptic() {
            failures += 1;
        }
        count += 1;
        for a in (0..n).rev() {
            idx[a] += stride;
            if idx[a] < inner[a] {
                continue 'outer;
            }
            idx[a] = 0;
        }
        break;
    }
    Ok(vec![
        Verdict::at_most("sigma2k_residual", max_sigma, cfg.tol_abs),
        Verdict::flag("ellipticity", failures == 0).with_detail(format!("{failures} of {count} nodes fail")),
        Verdict::flag("horizon_conditions", false).with_detail("a grid graph has no horizon cycle"),
    ])
}
