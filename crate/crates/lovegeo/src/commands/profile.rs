use lovegeo_core::model::ModelParams;
use lovegeo_core::rotational::integrate_profile;

use super::{integrator_control, Outcome};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::io::{write_text, ProfileFile};
use crate::report::Verdict;

pub(super) fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rh = ModelParams::new(cfg.dims, cfg.m)?.horizon_radius();
    let curve = integrate_profile(cfg.dims, cfg.m, cfg.tau_factor * rh, &integrator_control())?;
    let path = write_text(&cfg.output_path("profile"), &ProfileFile::from_curve(&curve).render(cfg.format))?;
    let verdicts = vec![
        Verdict::at_most("sigma2k_residual", curve.max_abs_sigma2k(), cfg.tol_abs),
        Verdict::at_most("first_integral_drift", curve.max_drift, cfg.tol_rel),
        Verdict::at_most("speed_defect", curve.max_speed_defect(), cfg.tol_abs),
    ];
    Ok((verdicts, vec![path]))
}
