//! Serialized model record: `key = value` lines with the fields family, r,
//! s, nugget, sill, range, decay, beta, Q and evaluations. Absent values are
//! written as `none`.

use std::fmt::Write as _;
use std::path::Path;

use hokcov::{CovarianceModel, Family, ParameterVector};

use crate::error::{CliError, CliResult};

pub const RECORD_KEYS: [&str; 10] = [
    "family",
    "r",
    "s",
    "nugget",
    "sill",
    "range",
    "decay",
    "beta",
    "Q",
    "evaluations",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ModelRecord {
    pub family: Family,
    pub params: ParameterVector,
    pub beta: Option<f64>,
    pub objective: Option<f64>,
    pub evaluations: Option<usize>,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "none".to_string(), |v| v.to_string())
}

impl ModelRecord {
    pub fn from_model(model: &CovarianceModel) -> Self {
        Self {
            family: model.family(),
            params: *model.params(),
            beta: None,
            objective: None,
            evaluations: None,
        }
    }

    pub fn model(&self) -> CliResult<CovarianceModel> {
        Ok(CovarianceModel::new(self.family, self.params)?)
    }

    pub fn to_text(&self) -> String {
        let p = &self.params;
        let values = [
            self.family.name().to_string(),
            opt(self.family.r()),
            opt(self.family.s()),
            p.nugget.to_string(),
            p.sill.to_string(),
            p.range.to_string(),
            opt(p.decay),
            opt(self.beta),
            opt(self.objective),
            opt(self.evaluations),
        ];
        let mut out = String::new();
        for (k, v) in RECORD_KEYS.iter().zip(values) {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn from_text(text: &str) -> CliResult<Self> {
        let mut fields: [Option<String>; 10] = Default::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::config(format!("model record line {}: expected `key = value`", i + 1))
            })?;
            let k = k.trim();
            let slot = RECORD_KEYS
                .iter()
                .position(|r| *r == k)
                .ok_or_else(|| CliError::config(format!("model record: unknown key `{k}`")))?;
            fields[slot] = Some(v.trim().to_string());
        }
        let field = |i: usize| -> CliResult<Option<&str>> {
            match fields[i].as_deref() {
                None => Err(CliError::config(format!(
                    "model record: missing `{}`",
                    RECORD_KEYS[i]
                ))),
                Some("none") => Ok(None),
                Some(v) => Ok(Some(v)),
            }
        };
        let num = |i: usize| -> CliResult<Option<f64>> {
            field(i)?
                .map(|v| {
                    v.parse::<f64>().map_err(|_| {
                        CliError::config(format!("model record: bad {} `{v}`", RECORD_KEYS[i]))
                    })
                })
                .transpose()
        };
        let int = |i: usize| -> CliResult<Option<u64>> {
            field(i)?
                .map(|v| {
                    v.parse::<u64>().map_err(|_| {
                        CliError::config(format!("model record: bad {} `{v}`", RECORD_KEYS[i]))
                    })
                })
                .transpose()
        };
        let name = field(0)?.ok_or_else(|| CliError::config("model record: family is none"))?;
        let r = int(1)?.unwrap_or(1) as u32;
        let s = int(2)?.unwrap_or(0) as u32;
        let family = Family::from_parts(name, r, s)?;
        let required = |i: usize| {
            num(i)?.ok_or_else(|| {
                CliError::config(format!("model record: {} is none", RECORD_KEYS[i]))
            })
        };
        let mut params = ParameterVector::new(required(3)?, required(4)?, required(5)?);
        params.decay = num(6)?;
        params.validate()?;
        Ok(Self {
            family,
            params,
            beta: num(7)?,
            objective: num(8)?,
            evaluations: int(9)?.map(|v| v as usize),
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::config(format!("cannot read model record {}: {e}", path.display()))
        })?;
        Self::from_text(&text)
    }
}
