use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::config::{ExperimentConfig, OutputFormat};
use super::sweep::SweepRow;

pub const CSV_HEADER: &str = "delta,n,kind,trial,e_train,e_test,bias,variance,r_star,theta,seed,ms";

/// JSON document: the rows plus the config that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDocument {
    pub config: Option<ExperimentConfig>,
    pub rows: Vec<SweepRow>,
}

/// 17 significant digits, enough to round-trip any `f64`.
fn number(out: &mut String, v: Option<f64>) {
    if let Some(v) = v {
        if v.is_finite() {
            let _ = write!(out, "{v:.16e}");
        } else {
            let _ = write!(out, "{v}");
        }
    }
}

fn integer<I: std::fmt::Display>(out: &mut String, v: Option<I>) {
    if let Some(v) = v {
        let _ = write!(out, "{v}");
    }
}

pub fn render_csv(rows: &[SweepRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::EmptyOutput);
    }
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        number(&mut out, Some(r.delta));
        out.push(',');
        integer(&mut out, r.n);
        out.push(',');
        out.push_str(r.kind().as_str());
        out.push(',');
        integer(&mut out, r.trial);
        for v in [r.e_train, r.e_test, r.bias, r.variance, r.r_star, r.theta] {
            out.push(',');
            number(&mut out, v);
        }
        out.push(',');
        integer(&mut out, r.seed);
        out.push(',');
        number(&mut out, r.ms);
        out.push('\n');
    }
    Ok(out)
}

pub fn render_json(rows: &[SweepRow], config: Option<&ExperimentConfig>) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::EmptyOutput);
    }
    let doc = OutputDocument {
        config: config.cloned(),
        rows: rows.to_vec(),
    };
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn render(rows: &[SweepRow], format: OutputFormat, config: Option<&ExperimentConfig>) -> Result<String> {
    match format {
        OutputFormat::Csv => render_csv(rows),
        OutputFormat::Json => render_json(rows, config),
    }
}

/// Write rows to `path`; refuses an empty row list.
pub fn write_output(
    rows: &[SweepRow],
    format: OutputFormat,
    path: &Path,
    config: Option<&ExperimentConfig>,
) -> Result<()> {
    let text = render(rows, format, config)?;
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn read_json_output(text: &str) -> Result<OutputDocument> {
    serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("bad output document: {e}")))
}
