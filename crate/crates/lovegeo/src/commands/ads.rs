use lovegeo_core::model::AdSModelParams;

use super::Outcome;
use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;
use crate::format::json;
use crate::io::{csv_table, write_text};
use crate::report::Verdict;

pub const ADS_COLUMNS: [&str; 5] = ["r", "horizon", "potential", "slope", "t"];

/// Rows `r, horizon, V(r), dt/dr, t(r)` on an even grid starting at or above the horizon.
pub fn ads_table(cfg: &RunConfig) -> Result<(f64, Vec<Vec<f64>>), CliError> {
    let ads = AdSModelParams::new(cfg.dims, cfg.m)?;
    let h = ads.horizon();
    let r_min = cfg.r_min.unwrap_or(h);
    let r_max = cfg.r_max.unwrap_or(10.0 * h);
    if r_min < h * (1.0 - 1e-12) {
        return Err(CliError::Config(format!("r_min = {r_min} lies inside the horizon {h}")));
    }
    if !(r_max > r_min) {
        return Err(CliError::Config("r_max must exceed r_min".into()));
    }
    let step = (r_max - r_min) / (cfg.points - 1) as f64;
    let rows = (0..cfg.points)
        .map(|i| {
            let r = (r_min + i as f64 * step).max(h);
            let slope = if r > h { ads.profile_slope(r)? } else { f64::INFINITY };
            Ok(vec![r, h, ads.potential(r)?, slope, ads.profile_t(r)?])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok((h, rows))
}

pub(super) fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (h, rows) = ads_table(cfg)?;
    let ads = AdSModelParams::new(cfg.dims, cfg.m)?;
    let text = match cfg.format {
        OutputFormat::Csv => csv_table(&ADS_COLUMNS, rows),
        OutputFormat::Json => {
            let table: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .iter()
                .map(|row| {
                    ADS_COLUMNS
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.to_string(), serde_json::Value::from(*v)))
                        .collect()
                })
                .collect();
            json(&table)
        }
    };
    let path = write_text(&cfg.output_path("ads"), &text)?;
    let verdicts = vec![Verdict::at_most("horizon_potential", ads.potential(h)?.abs(), 1e-12)];
    Ok((verdicts, vec![path]))
}
