//! Run configuration: a flat TOML file, the `LOVEGEO_OUT` default and flags, in increasing precedence.

use std::path::{Path, PathBuf};

use lovegeo_core::model::ModelParams;
use lovegeo_core::DimensionPair;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// One layer of settings; unset keys fall through to the next layer.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    /// Base dimension n of the hypersurface.
    #[arg(long)]
    pub n: Option<usize>,
    /// Lovelock degree k.
    #[arg(long)]
    pub k: Option<usize>,
    /// Model mass parameter m.
    #[arg(long, allow_negative_numbers = true)]
    pub m: Option<f64>,
    /// Relative tolerance for verdicts.
    #[arg(long, allow_negative_numbers = true)]
    pub tol_rel: Option<f64>,
    /// Absolute tolerance for verdicts (normalized curvature units).
    #[arg(long, allow_negative_numbers = true)]
    pub tol_abs: Option<f64>,
    /// Smallest sample radius used by expansion fits.
    #[arg(long, allow_negative_numbers = true)]
    pub fit_radius: Option<f64>,
    /// Gauss points per angle for cycle quadrature.
    #[arg(long)]
    pub quad_order: Option<usize>,
    /// Arc length of integrated profiles, in horizon radii.
    #[arg(long, allow_negative_numbers = true)]
    pub tau_factor: Option<f64>,
    /// Lower end of radial tables.
    #[arg(long, allow_negative_numbers = true)]
    pub r_min: Option<f64>,
    /// Upper end of radial tables.
    #[arg(long, allow_negative_numbers = true)]
    pub r_max: Option<f64>,
    /// Number of rows in radial tables.
    #[arg(long)]
    pub points: Option<usize>,
    /// Members of the default sweep family.
    #[arg(long)]
    pub members: Option<usize>,
    /// Output directory; falls back to `LOVEGEO_OUT`, then the working directory
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Output file format
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

impl ConfigLayer {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
        toml::from_str(&text).map_err(|e| CliError::parse(path, e.message()))
    }

    /// Keys set in `self` win over `base`.
    pub fn over(self, base: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            n: self.n.or(base.n),
            k: self.k.or(base.k),
            m: self.m.or(base.m),
            tol_rel: self.tol_rel.or(base.tol_rel),
            tol_abs: self.tol_abs.or(base.tol_abs),
            fit_radius: self.fit_radius.or(base.fit_radius),
            quad_order: self.quad_order.or(base.quad_order),
            tau_factor: self.tau_factor.or(base.tau_factor),
            r_min: self.r_min.or(base.r_min),
            r_max: self.r_max.or(base.r_max),
            points: self.points.or(base.points),
            members: self.members.or(base.members),
            out_dir: self.out_dir.or(base.out_dir),
            format: self.format.or(base.format),
        }
    }
}

/// Validated settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dims: DimensionPair,
    pub m: f64,
    pub tol_rel: f64,
    pub tol_abs: f64,
    pub fit_radius: Option<f64>,
    pub quad_order: usize,
    pub tau_factor: f64,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub points: usize,
    pub members: usize,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive")))
    }
}

impl RunConfig {
    /// Merges flags over the optional config file over `env_out` and validates.
    pub fn resolve(flags: ConfigLayer, file: Option<&Path>, env_out: Option<PathBuf>) -> Result<Self, CliError> {
        let file_layer = match file {
            Some(p) => ConfigLayer::from_file(p)?,
            None => ConfigLayer::default(),
        };
        let env_layer = ConfigLayer { out_dir: env_out, ..Default::default() };
        let c = flags.over(file_layer).over(env_layer);

        let n = c.n.ok_or_else(|| CliError::Config("missing n".into()))?;
        let k = c.k.ok_or_else(|| CliError::Config("missing k".into()))?;
        let dims = DimensionPair::new(n, k)?;
        let m = c.m.unwrap_or(1.0);
        ModelParams::new(dims, m)?;
        let quad_order = c.quad_order.unwrap_or(if n <= 4 { 32 } else { 12 });
        if quad_order == 0 {
            return Err(CliError::Config("quad_order must be positive".into()));
        }
        let points = c.points.unwrap_or(19);
        if points < 2 {
            return Err(CliError::Config("points must be at least 2".into()));
        }
        let members = c.members.unwrap_or(20);
        if members == 0 {
            return Err(CliError::Config("members must be positive".into()));
        }
        Ok(RunConfig {
            dims,
            m,
            tol_rel: positive("tol_rel", c.tol_rel.unwrap_or(1e-8))?,
            tol_abs: positive("tol_abs", c.tol_abs.unwrap_or(1e-8))?,
            fit_radius: c.fit_radius.map(|r| positive("fit_radius", r)).transpose()?,
            quad_order,
            tau_factor: positive("tau_factor", c.tau_factor.unwrap_or(100.0))?,
            r_min: c.r_min.map(|r| positive("r_min", r)).transpose()?,
            r_max: c.r_max.map(|r| positive("r_max", r)).transpose()?,
            points,
            members,
            out_dir: c.out_dir.unwrap_or_else(|| PathBuf::from(".")),
            format: c.format.unwrap_or(OutputFormat::Csv),
        })
    }

    pub fn output_path(&self, stem: &str) -> PathBuf {
        self.out_dir.join(format!("{stem}.{}", self.format.extension()))
    }
}
