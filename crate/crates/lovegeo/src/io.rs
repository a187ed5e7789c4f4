//! Readers and writers for profiles, grid graphs, end samples, sweep specs and tables.

use std::fs;
use std::path::{Path, PathBuf};

use lovegeo_core::asymptotics::EndSample;
use lovegeo_core::graphgeom::GridGraph;
use lovegeo_core::rotational::{ProfileCurve, TanhStep};
use lovegeo_core::DimensionPair;
use serde::{Deserialize, Serialize};

use crate::config::OutputFormat;
use crate::error::CliError;
use crate::format::{json, num};

pub fn read_text(path: &Path) -> Result<String, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    if text.trim().is_empty() {
        return Err(CliError::parse(path, "file is empty"));
    }
    Ok(text)
}

pub fn write_text(path: &Path, text: &str) -> Result<PathBuf, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.to_path_buf(), source })?;
    }
    fs::write(path, text).map_err(|source| CliError::Write { path: path.to_path_buf(), source })?;
    Ok(path.to_path_buf())
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Writes a header row and numeric rows.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row.iter().map(|x| num(*x))).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

fn parse_f64(path: &Path, field: &str) -> Result<f64, CliError> {
    field.trim().parse().map_err(|_| CliError::parse(path, format!("not a number: {field:?}")))
}

fn csv_rows(path: &Path, text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header: Vec<String> =
        r.headers().map_err(|e| CliError::parse(path, e))?.iter().map(|h| h.trim().to_string()).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::parse(path, e))?;
        rows.push(rec.iter().map(|f| parse_f64(path, f)).collect::<Result<Vec<_>, _>>()?);
    }
    if rows.is_empty() {
        return Err(CliError::parse(path, "no data rows"));
    }
    Ok((header, rows))
}

pub const PROFILE_COLUMNS: [&str; 6] = ["tau", "s", "sdot", "t", "sigma2k_residual", "first_integral"];

/// One row of a profile file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub tau: f64,
    pub s: f64,
    pub sdot: f64,
    pub t: f64,
    pub sigma2k_residual: f64,
    pub first_integral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileFile {
    pub n: usize,
    pub k: usize,
    pub samples: Vec<ProfileRecord>,
}

impl ProfileFile {
    pub fn from_curve(curve: &ProfileCurve) -> Self {
        let samples = curve
            .samples
            .iter()
            .map(|s| ProfileRecord {
                tau: s.tau,
                s: s.s,
                sdot: s.sdot,
                t: s.t,
                sigma2k_residual: s.sigma2k_residual,
                first_integral: s.first_integral,
            })
            .collect();
        ProfileFile { n: curve.dims.n(), k: curve.dims.k(), samples }
    }

    pub fn dims(&self) -> Result<DimensionPair, CliError> {
        Ok(DimensionPair::new(self.n, self.k)?)
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => json(self),
            OutputFormat::Csv => csv_table(
                &PROFILE_COLUMNS,
                self.samples.iter().map(|r| vec![r.tau, r.s, r.sdot, r.t, r.sigma2k_residual, r.first_integral]),
            ),
        }
    }

    /// Reads a profile; CSV files carry no dimensions, so `dims` supplies them.
    pub fn read(path: &Path, dims: DimensionPair) -> Result<Self, CliError> {
        let text = read_text(path)?;
        if is_json(path) {
            let file: ProfileFile = serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))?;
            if file.samples.is_empty() {
                return Err(CliError::parse(path, "no samples"));
            }
            file.dims()?;
            return Ok(file);
        }
        let (header, rows) = csv_rows(path, &text)?;
        if header != PROFILE_COLUMNS {
            return Err(CliError::parse(path, format!("expected columns {}", PROFILE_COLUMNS.join(","))));
        }
        let samples = rows
            .into_iter()
            .map(|r| {
                if r.len() != 6 {
                    return Err(CliError::parse(path, "profile rows need six fields"));
                }
                Ok(ProfileRecord {
                    tau: r[0],
                    s: r[1],
                    sdot: r[2],
                    t: r[3],
                    sigma2k_residual: r[4],
                    first_integral: r[5],
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(ProfileFile { n: dims.n(), k: dims.k(), samples })
    }
}

/// Grid file body; values are row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFile {
    pub n: usize,
    pub spacing: f64,
    pub origin: Vec<f64>,
    pub extents: Vec<usize>,
    pub values: Vec<f64>,
}

impl GridFile {
    pub fn from_grid(g: &GridGraph) -> Self {
        GridFile {
            n: g.origin.len(),
            spacing: g.spacing,
            origin: g.origin.clone(),
            extents: g.extents.clone(),
            values: g.values.clone(),
        }
    }

    pub fn into_grid(self) -> Result<GridGraph, CliError> {
        if self.origin.len() != self.n || self.extents.len() != self.n {
            return Err(CliError::Config("grid header disagrees with n".into()));
        }
        Ok(GridGraph::new(self.spacing, self.origin, self.extents, self.values)?)
    }

    /// CSV: a header line `n,spacing,origin_1..,extent_1..`, its values, then a `value` column.
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => json(self),
            OutputFormat::Csv => {
                let mut out = String::from("n,spacing");
                for i in 1..=self.n {
                    out.push_str(&format!(",origin_{i}"));
                }
                for i in 1..=self.n {
                    out.push_str(&format!(",extent_{i}"));
                }
                out.push('\n');
                out.push_str(&format!("{},{}", self.n, num(self.spacing)));
                for o in &self.origin {
                    out.push(',');
                    out.push_str(&num(*o));
                }
                for e in &self.extents {
                    out.push_str(&format!(",{e}"));
                }
                out.push_str("\nvalue\n");
                for v in &self.values {
                    out.push_str(&num(*v));
                    out.push('\n');
                }
                out
            }
        }
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = read_text(path)?;
        if is_json(path) {
            return serde_json::from_str(&text).map_err(|e| CliError::parse(path, e));
        }
        Self::parse_csv(path, &text)
    }

    fn parse_csv(path: &Path, text: &str) -> Result<Self, CliError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| CliError::parse(path, "missing header"))?;
        if !header.starts_with("n,spacing") {
            return Err(CliError::parse(path, "grid header must start with n,spacing"));
        }
        let meta: Vec<&str> = lines.next().ok_or_else(|| CliError::parse(path, "missing grid metadata"))?.split(',').collect();
        let n: usize = meta[0].trim().parse().map_err(|_| CliError::parse(path, "bad n"))?;
        if n == 0 || meta.len() != 2 + 2 * n || header.split(',').count() != meta.len() {
            return Err(CliError::parse(path, "grid metadata has the wrong number of fields"));
        }
        let spacing = parse_f64(path, meta[1])?;
        let origin = meta[2..2 + n].iter().map(|f| parse_f64(path, f)).collect::<Result<Vec<_>, _>>()?;
        let extents = meta[2 + n..]
            .iter()
            .map(|f| f.trim().parse::<usize>().map_err(|_| CliError::parse(path, "bad extent")))
            .collect::<Result<Vec<_>, _>>()?;
        if lines.next() != Some("value") {
            return Err(CliError::parse(path, "expected a value column"));
        }
        let values = lines.map(|l| parse_f64(path, l)).collect::<Result<Vec<_>, _>>()?;
        Ok(GridFile { n, spacing, origin, extents, values })
    }
}

/// A surface handed to `verify`.
#[derive(Debug, Clone)]
pub enum SurfaceInput {
    Profile(ProfileFile),
    Grid(GridGraph),
}

pub fn read_surface(path: &Path, dims: DimensionPair) -> Result<SurfaceInput, CliError> {
    let text = read_text(path)?;
    let is_grid = if is_json(path) {
        let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))?;
        v.get("values").is_some()
    } else {
        text.trim_start().starts_with("n,spacing")
    };
    if is_grid {
        Ok(SurfaceInput::Grid(GridFile::read(path)?.into_grid()?))
    } else {
        Ok(SurfaceInput::Profile(ProfileFile::read(path, dims)?))
    }
}

/// CSV of end samples with columns `x1..xn,u`.
pub fn render_samples(samples: &[EndSample]) -> String {
    let n = samples.first().map_or(0, |s| s.x.len());
    let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    header.push("u".into());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_table(
        &header,
        samples.iter().map(|s| {
            let mut row = s.x.clone();
            row.push(s.u);
            row
        }),
    )
}

pub fn read_samples(path: &Path, n: usize) -> Result<Vec<EndSample>, CliError> {
    let text = read_text(path)?;
    let (header, rows) = csv_rows(path, &text)?;
    let mut expected: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    expected.push("u".into());
    if header != expected {
        return Err(CliError::parse(path, format!("expected columns {}", expected.join(","))));
    }
    rows.into_iter()
        .map(|mut r| {
            if r.len() != n + 1 {
                return Err(CliError::parse(path, "sample rows need n + 1 fields"));
            }
            let u = r.pop().unwrap_or_default();
            Ok(EndSample { x: r, u })
        })
        .collect()
}

/// TOML sweep specification: a list of `[[member]]` tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(rename = "member")]
    pub members: Vec<SweepMemberSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepMemberSpec {
    pub m0: f64,
    pub delta: f64,
    pub center: f64,
    pub width: f64,
}

impl SweepSpec {
    pub fn read(path: &Path) -> Result<Vec<TanhStep>, CliError> {
        let text = read_text(path)?;
        let spec: SweepSpec = toml::from_str(&text).map_err(|e| CliError::parse(path, e.message()))?;
        if spec.members.is_empty() {
            return Err(CliError::parse(path, "sweep has no members"));
        }
        spec.members
            .iter()
            .map(|m| {
                TanhStep::new(m.m0, m.delta, m.center, m.width).map_err(|e| CliError::parse(path, e))
            })
            .collect()
    }
}
