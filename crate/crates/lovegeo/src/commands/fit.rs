use std::path::Path;

use lovegeo_core::asymptotics::{fit_expansion, FitOptions};

use super::Outcome;
use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;
use crate::format::json;
use crate::io::{csv_table, read_samples, write_text};
use crate::report::Verdict;

pub(super) fn run(cfg: &RunConfig, input: &Path) -> Result<Outcome, CliError> {
    let samples = read_samples(input, cfg.dims.n())?;
    let opts = FitOptions { fit_radius: cfg.fit_radius.unwrap_or(0.0), ..Default::default() };
    let fit = fit_expansion(&samples, cfg.dims, &opts)?;
    let text = match cfg.format {
        OutputFormat::Json => json(&fit),
        OutputFormat::Csv => {
            let mut header: Vec<String> =
                ["a", "a1", "a2", "mass", "gbc_mass", "residual_norm", "condition"].map(String::from).to_vec();
            header.extend((1..=cfg.dims.n()).map(|i| format!("c{i}")));
            let mut row = vec![fit.a, fit.a1, fit.a2.unwrap_or(f64::NAN), fit.mass(), fit.gbc_mass(), fit.residual_norm, fit.condition];
            row.extend(&fit.c);
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            csv_table(&header, [row])
        }
    };
    let path = write_text(&cfg.output_path("fit"), &text)?;
    let verdicts = vec![Verdict::flag("positive_a", fit.a > 0.0)
        .with_detail(format!("regime {}, {} samples", fit.regime, fit.samples_used))];
    Ok((verdicts, vec![path]))
}
