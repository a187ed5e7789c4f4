//! Subcommands. Each returns its verdicts and the files it wrote.

mod ads;
mod fit;
mod mass;
mod penrose;
mod profile;
mod sweep;
mod verify;

use std::path::PathBuf;
use std::time::Instant;

use lovegeo_core::numerics::ode::StepControl;
use lovegeo_core::rotational::ProfileSample;
use lovegeo_core::symcurv::sigma_p_eigen;
use lovegeo_core::DimensionPair;

use crate::config::{ConfigLayer, RunConfig};
use crate::error::CliError;
use crate::io::ProfileFile;
use crate::report::{RunReport, Verdict};

pub use ads::ads_table;
pub use mass::model_end_samples;

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Common {
    #[command(flatten)]
    pub layer: ConfigLayer,
    /// Flat TOML file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, clap::Subcommand)]
pub enum Command {
    /// Integrate the model profile and write it with its residual columns.
    Profile {
        #[command(flatten)]
        common: Common,
    },
    /// Check the constraint, ellipticity, horizon conditions and regularity of a surface.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Profile or grid file; the model from the configuration when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Profile file for the lower sheet of the double.
        #[arg(long)]
        lower: Option<PathBuf>,
    },
    /// Flux mass and fitted expansion of an end.
    Mass {
        #[command(flatten)]
        common: Common,
        /// End samples `x1..xn,u`; the model from the configuration when absent.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Mass against the horizon-area bound.
    Penrose {
        #[command(flatten)]
        common: Common,
        /// Profile file; the model from the configuration when absent.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Penrose reports over a family of monotone first-integral profiles.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// TOML file of `[[member]]` tables; a default family when absent.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Horizon, potential and height table of the anti-de Sitter slice.
    Ads {
        #[command(flatten)]
        common: Common,
    },
    /// Fit the end expansion to samples `x1..xn,u`.
    Fit {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Profile { .. } => "profile",
            Command::Verify { .. } => "verify",
            Command::Mass { .. } => "mass",
            Command::Penrose { .. } => "penrose",
            Command::Sweep { .. } => "sweep",
            Command::Ads { .. } => "ads",
            Command::Fit { .. } => "fit",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Profile { common }
            | Command::Verify { common, .. }
            | Command::Mass { common, .. }
            | Command::Penrose { common, .. }
            | Command::Sweep { common, .. }
            | Command::Ads { common }
            | Command::Fit { common, .. } => common,
        }
    }
}

pub(crate) type Outcome = (Vec<Verdict>, Vec<PathBuf>);

/// Resolves the configuration and runs `cmd`.
pub fn run(cmd: &Command, env_out: Option<PathBuf>) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let common = cmd.common();
    let cfg = RunConfig::resolve(common.layer.clone(), common.config.as_deref(), env_out)?;
    let (verdicts, outputs) = match cmd {
        Command::Profile { .. } => profile::run(&cfg)?,
        Command::Verify { input, lower, .. } => verify::run(&cfg, input.as_deref(), lower.as_deref())?,
        Command::Mass { input, .. } => mass::run(&cfg, input.as_deref())?,
        Command::Penrose { input, .. } => penrose::run(&cfg, input.as_deref())?,
        Command::Sweep { input, .. } => sweep::run(&cfg, input.as_deref())?,
        Command::Ads { .. } => ads::run(&cfg)?,
        Command::Fit { input, .. } => fit::run(&cfg, input)?,
    };
    Ok(RunReport { command: cmd.name().into(), wall_time_s: start.elapsed().as_secs_f64(), verdicts, outputs })
}

pub(crate) fn integrator_control() -> StepControl {
    StepControl::default()
}

/// Rebuilds full samples from a profile file: `tdot` from the first integral and
/// `sddot` from `zeta' = p/(2s) - c'(s) cosh^2(zeta) / s^p` with `c = C/2`.
/// A first integral constant to `flat_tol` relative is taken as exactly constant.
pub fn samples_from_file(file: &ProfileFile, flat_tol: f64) -> Result<Vec<ProfileSample>, CliError> {
    let dims = file.dims()?;
    let p = dims.potential_exponent();
    let recs = &file.samples;
    let (lo, hi) = recs.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r.first_integral), hi.max(r.first_integral)));
    if !(lo > 0.0) || recs.iter().any(|r| !(r.s > 0.0)) {
        return Err(CliError::Config("profile needs positive radii and first integral".into()));
    }
    let constant = (hi - lo) <= flat_tol * hi;
    let half = |i: usize| 0.5 * recs[i].first_integral;
    let dc = |i: usize| -> f64 {
        if constant || recs.len() < 2 {
            return 0.0;
        }
        let (a, b) = if i == 0 { (0, 1) } else if i + 1 == recs.len() { (i - 1, i) } else { (i - 1, i + 1) };
        let ds = recs[b].s - recs[a].s;
        if ds.abs() > 0.0 {
            (half(b) - half(a)) / ds
        } else {
            0.0
        }
    };
    let rh = recs[0].s;
    let (n, k) = (dims.n(), dims.k());
    recs.iter()
        .enumerate()
        .map(|(i, r)| {
            let sp = dims.pow_potential(r.s);
            let tdot = (r.first_integral / sp).sqrt();
            let zeta_rate = 0.5 * p / r.s - dc(i) / (tdot * tdot * sp);
            let kappa = tdot / r.s;
            let mut spectrum = vec![kappa; n];
            spectrum[n - 1] = -tdot * zeta_rate;
            let sigma = sigma_p_eigen(&spectrum, 2 * k)? * rh.powi(2 * k as i32);
            Ok(ProfileSample {
                tau: r.tau,
                s: r.s,
                sdot: r.sdot,
                t: r.t,
                tdot,
                sddot: tdot * tdot * zeta_rate,
                sigma2k_residual: sigma,
                first_integral: r.first_integral,
            })
        })
        .collect()
}

/// `(kappa, ..., kappa, kappa_n)` of a rebuilt sample.
pub(crate) fn spectrum(dims: DimensionPair, s: &ProfileSample) -> Vec<f64> {
    let mut out = vec![s.tdot / s.s; dims.n()];
    out[dims.n() - 1] = -s.sddot / s.tdot;
    out
}
