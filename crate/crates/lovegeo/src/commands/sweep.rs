use std::path::Path;

use lovegeo_core::massflux::{penrose_sweep, SweepMember};
use lovegeo_core::model::ModelParams;
use lovegeo_core::rotational::TanhStep;
use serde::Serialize;

use super::{integrator_control, Outcome};
use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;
use crate::format::json;
use crate::io::{csv_table, write_text, SweepSpec};
use crate::report::Verdict;

#[derive(Debug, Serialize)]
struct SweepOutput<'a> {
    n: usize,
    k: usize,
    members: &'a [SweepMember],
}

/// Steps of height `0..=m` placed where `s^{n/k-2}` is four times its horizon value.
pub(crate) fn default_family(cfg: &RunConfig) -> Result<Vec<TanhStep>, CliError> {
    let rh = ModelParams::new(cfg.dims, cfg.m)?.horizon_radius();
    let center = rh * 4f64.powf(1.0 / cfg.dims.potential_exponent());
    let last = (cfg.members - 1).max(1) as f64;
    (0..cfg.members)
        .map(|i| Ok(TanhStep::new(cfg.m, cfg.m * i as f64 / last, center, rh)?))
        .collect()
}

pub(super) fn run(cfg: &RunConfig, input: Option<&Path>) -> Result<Outcome, CliError> {
    let family = match input {
        Some(p) => SweepSpec::read(p)?,
        None => default_family(cfg)?,
    };
    let members = penrose_sweep(cfg.dims, &family, &integrator_control())?;
    let (n, k) = (cfg.dims.n(), cfg.dims.k());
    let text = match cfg.format {
        OutputFormat::Json => json(&SweepOutput { n, k, members: &members }),
        OutputFormat::Csv => csv_table(
            &["n", "k", "m0", "delta", "center", "width", "horizon", "mass", "area", "bound", "gap", "verdict"],
            members.iter().map(|m| {
                vec![
                    n as f64,
                    k as f64,
                    m.profile.m0,
                    m.profile.delta,
                    m.profile.center,
                    m.profile.width,
                    m.horizon,
                    m.report.mass,
                    m.report.area,
                    m.report.bound,
                    m.report.gap,
                    m.report.holds as u8 as f64,
                ]
            }),
        ),
    };
    let path = write_text(&cfg.output_path("sweep"), &text)?;
    let worst = members.iter().map(|m| -m.report.gap / m.report.mass).fold(f64::NEG_INFINITY, f64::max);
    let min_sigma = members.iter().map(|m| m.min_sigma2k).fold(f64::INFINITY, f64::min);
    let verdicts = vec![
        Verdict::at_most("penrose_gap", worst, 1e-6),
        Verdict::flag("energy_condition", min_sigma >= -1e-10),
    ];
    Ok((verdicts, vec![path]))
}
