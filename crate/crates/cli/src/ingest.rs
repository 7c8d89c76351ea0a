//! Delimited text input. The first non-blank line is a header; the delimiter
//! is a comma if the header contains one, whitespace otherwise. Column names
//! match case-insensitively; extra columns are ignored.

use std::path::Path;

use hokcov::Dataset;

use crate::error::{CliError, CliResult};

/// Names of the columns to read.
#[derive(Debug, Clone, PartialEq)]
pub struct Columns {
    pub x: String,
    pub y: String,
    pub z: String,
    pub value: String,
}

impl Default for Columns {
    fn default() -> Self {
        Self {
            x: "x".into(),
            y: "y".into(),
            z: "z".into(),
            value: "value".into(),
        }
    }
}

fn split(line: &str, comma: bool) -> Vec<&str> {
    if comma {
        line.split(',').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

/// Parses a dataset of dimension `dim` from text.
pub fn parse_dataset(text: &str, dim: usize, columns: &Columns) -> CliResult<Dataset> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::data("input is empty"))?;
    let comma = header.contains(',');
    let names: Vec<String> = split(header, comma)
        .iter()
        .map(|h| h.trim_matches('"').to_ascii_lowercase())
        .collect();

    let mut wanted = vec![&columns.x, &columns.y, &columns.z];
    wanted.truncate(dim);
    wanted.push(&columns.value);
    let idx: Vec<usize> = wanted
        .iter()
        .map(|w| {
            names
                .iter()
                .position(|n| *n == w.to_ascii_lowercase())
                .ok_or_else(|| {
                    CliError::data(format!(
                        "missing column `{w}` (header has: {})",
                        names.join(", ")
                    ))
                })
        })
        .collect::<CliResult<_>>()?;

    let mut coords = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in lines {
        let fields = split(line, comma);
        let row = lineno + 1;
        if fields.len() != names.len() {
            return Err(CliError::data(format!(
                "row {row}: expected {} fields, found {}",
                names.len(),
                fields.len()
            )));
        }
        let mut nums = Vec::with_capacity(idx.len());
        for (&i, col) in idx.iter().zip(&wanted) {
            let raw = fields[i].trim_matches('"');
            let v: f64 = raw.parse().map_err(|_| {
                CliError::data(format!("row {row}: column `{col}` has non-numeric value `{raw}`"))
            })?;
            if !v.is_finite() {
                return Err(CliError::data(format!(
                    "row {row}: column `{col}` is not finite"
                )));
            }
            nums.push(v);
        }
        values.push(nums.pop().expect("value column"));
        coords.push(nums);
    }
    if values.len() < 2 {
        return Err(CliError::data(format!(
            "need at least 2 data rows, found {}",
            values.len()
        )));
    }
    Ok(Dataset::new(dim, &coords, values)?)
}

pub fn ingest(path: &Path, dim: usize, columns: &Columns) -> CliResult<Dataset> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    parse_dataset(&text, dim, columns)
}
