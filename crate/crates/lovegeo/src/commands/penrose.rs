use std::path::Path;

use lovegeo_core::massflux::{flux_rotational, mass_constant, penrose_check, sphere_area, PenroseReport};
use lovegeo_core::model::ModelParams;
use lovegeo_core::numerics::binomial;
use lovegeo_core::rotational::ConstantMass;
use serde::Serialize;

use super::{integrator_control, samples_from_file, Outcome};
use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;
use crate::format::json;
use crate::io::{csv_table, write_text, ProfileFile};
use crate::report::Verdict;

#[derive(Debug, Serialize)]
struct PenroseOutput<'a> {
    n: usize,
    k: usize,
    horizon: f64,
    report: &'a PenroseReport,
}

pub(super) fn run(cfg: &RunConfig, input: Option<&Path>) -> Result<Outcome, CliError> {
    let dims = cfg.dims;
    let (n, k) = (dims.n(), dims.k());
    let (horizon, mass, exact) = match input {
        None => {
            let rh = ModelParams::new(dims, cfg.m)?.horizon_radius();
            let flux = flux_rotational(dims, &ConstantMass::new(cfg.m)?, 50.0 * rh, &integrator_control())?;
            (rh, flux.mass, true)
        }
        Some(path) => {
            let file = ProfileFile::read(path, dims)?;
            if file.dims()? != dims {
                return Err(CliError::Config("profile dimensions disagree with the configuration".into()));
            }
            let samples = samples_from_file(&file, cfg.tol_rel)?;
            let far = samples.last().expect("profile files are nonempty");
            let kappa = far.tdot / far.s;
            let flux = binomial(n - 1, 2 * k - 1) * kappa.powi(2 * k as i32 - 1) * far.tdot * sphere_area(far.s, n - 1);
            (samples[0].s, mass_constant(dims) * flux, false)
        }
    };
    let report = penrose_check(mass, sphere_area(horizon, n - 1), dims)?;
    let text = match cfg.format {
        OutputFormat::Json => json(&PenroseOutput { n, k, horizon, report: &report }),
        OutputFormat::Csv => csv_table(
            &["n", "k", "horizon", "mass", "area", "bound", "gap", "verdict"],
            [vec![n as f64, k as f64, horizon, report.mass, report.area, report.bound, report.gap, report.holds as u8 as f64]],
        ),
    };
    let path = write_text(&cfg.output_path("penrose"), &text)?;
    let mut verdicts = vec![Verdict::flag("penrose_bound", report.holds)];
    if exact {
        verdicts.push(Verdict::at_most("equality_gap", report.gap.abs() / report.mass, 1e-6));
    }
    Ok((verdicts, vec![path]))
}
