use std::path::Path;

use lovegeo_core::asymptotics::{fit_expansion, suggested_radii, EndSample, ExpansionParams, FitOptions};
use lovegeo_core::massflux::{flux_graph, flux_rotational, FluxReport};
use lovegeo_core::model::ModelParams;
use lovegeo_core::numerics::SplitMix64;
use lovegeo_core::rotational::ConstantMass;
use serde::Serialize;

use super::{integrator_control, Outcome};
use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;
use crate::format::json;
use crate::io::{csv_table, read_samples, write_text};
use crate::report::Verdict;

/// Agreement required between the flux and fitted masses.
const CROSS_ROUTE_TOL: f64 = 1e-3;
/// Homological drift allowed between `R` and `2R`.
const DRIFT_TOL: f64 = 1e-6;

#[derive(Debug, Serialize)]
struct MassOutput<'a> {
    flux: &'a FluxReport,
    expansion: &'a ExpansionParams,
    cross_route_rel: f64,
}

/// Model end samples along log-spaced radii in deterministic directions.
pub fn model_end_samples(cfg: &RunConfig, count: usize) -> Result<Vec<EndSample>, CliError> {
    let dims = cfg.dims;
    let radii = match cfg.fit_radius {
        Some(lo) => {
            let hi = lo * 10f64.powf((1.0 / dims.q()).min(4.0));
            (0..count).map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64)).collect()
        }
        None => suggested_radii(dims, cfg.m, count)?,
    };
    let heights = ModelParams::new(dims, cfg.m)?.profile_t_many(&radii)?;
    let mut rng = SplitMix64(0x5eed);
    Ok(radii
        .iter()
        .zip(heights)
        .map(|(r, u)| {
            let mut x: Vec<f64> = (0..dims.n()).map(|_| rng.next_f64() - 0.5).collect();
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v *= r / norm);
            EndSample { x, u }
        })
        .collect())
}

fn radius(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(super) fn run(cfg: &RunConfig, input: Option<&Path>) -> Result<Outcome, CliError> {
    let dims = cfg.dims;
    let (fit, flux) = match input {
        None => {
            let samples = model_end_samples(cfg, 120)?;
            let opts = FitOptions { fit_radius: cfg.fit_radius.unwrap_or(0.0), ..Default::default() };
            let fit = fit_expansion(&samples, dims, &opts)?;
            let r0 = samples.iter().map(|s| radius(&s.x)).fold(f64::INFINITY, f64::min);
            let flux = flux_rotational(dims, &ConstantMass::new(cfg.m)?, r0, &integrator_control())?;
            (fit, flux)
        }
        Some(path) => {
            let samples = read_samples(path, dims.n())?;
            let opts = FitOptions { fit_radius: cfg.fit_radius.unwrap_or(0.0), ..Default::default() };
            let fit = fit_expansion(&samples, dims, &opts)?;
            let (lo, hi) = samples
                .iter()
                .map(|s| radius(&s.x))
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
            let graph = fit.graph(lo);
            let flux = flux_graph(&graph, dims, hi, cfg.quad_order)?;
            (fit, flux)
        }
    };
    let cross = (fit.gbc_mass() / flux.mass - 1.0).abs();
    let text = match cfg.format {
        OutputFormat::Json => json(&MassOutput { flux: &flux, expansion: &fit, cross_route_rel: cross }),
        OutputFormat::Csv => csv_table(
            &["n", "k", "a", "a1", "fit_mass", "flux_radius", "flux", "flux_mass", "drift", "residual_norm", "condition"],
            [vec![
                dims.n() as f64,
                dims.k() as f64,
                fit.a,
                fit.a1,
                fit.gbc_mass(),
                flux.radius,
                flux.flux,
                flux.mass,
                flux.drift,
                fit.residual_norm,
                fit.condition,
            ]],
        ),
    };
    let path = write_text(&cfg.output_path("mass"), &text)?;
    let mut verdicts = vec![Verdict::at_most("cross_route_mass", cross, CROSS_ROUTE_TOL)];
    if input.is_none() {
        verdicts.push(Verdict::at_most("flux_drift", flux.drift, DRIFT_TOL));
    }
    Ok((verdicts, vec![path]))
}
