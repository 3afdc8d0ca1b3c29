//! Problem files and inline inputs.

use std::fs;
use std::path::Path;

use lfd_core::{parse_scalar, Mode, Scalar, ScalarRef, SequencePrefix, WeightSequence};
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

/// JSON problem file. Numbers may be JSON numbers or strings holding `p/q`,
/// integers or decimals.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub a: Option<Value>,
    pub l: Option<Value>,
    pub b: Option<Value>,
    pub v: Option<Vec<Value>>,
    pub x: Option<Vec<Value>>,
    pub y: Option<Vec<Value>>,
    pub z: Option<Vec<Value>>,
    #[serde(rename = "N", alias = "n")]
    pub n: Option<usize>,
    pub mode: Option<Mode>,
    pub space: Option<String>,
    pub dual: Option<String>,
}

impl ProblemFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read problem file {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("problem file {}: {e}", path.display())))
    }
}

fn value_text(field: &str, v: &Value) -> Result<String, CliError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(CliError::Usage(format!(
            "field `{field}`: expected a number or numeric string, got {other}"
        ))),
    }
}

/// Reads a sequence given inline as `1,1/2,-3` or as `@path`. Files may hold a
/// JSON array, a JSON report with a `sequence` field, or one value per line
/// (the last comma-separated column is used, so `k,value` output reads back).
pub fn read_sequence_arg(field: &str, arg: &str) -> Result<Vec<String>, CliError> {
    let Some(path) = arg.strip_prefix('@') else {
        return Ok(arg
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("field `{field}`: cannot read {path}: {e}")))?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        let json: Value = serde_json::from_str(trimmed)
            .map_err(|e| CliError::Usage(format!("field `{field}`: {path}: {e}")))?;
        let items = match &json {
            Value::Array(items) => items,
            Value::Object(map) => match map.get("sequence") {
                Some(Value::Array(items)) => items,
                _ => {
                    return Err(CliError::Usage(format!(
                        "field `{field}`: {path} has no `sequence` array"
                    )))
                }
            },
            _ => unreachable!(),
        };
        return items.iter().map(|v| value_text(field, v)).collect();
    }
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| l.rsplit(',').next().unwrap_or(l).trim().to_string())
        .collect())
}

/// Raw inputs after merging the problem file with inline flags; inline flags
/// win.
#[derive(Debug, Default)]
pub struct Inputs {
    pub a: Option<String>,
    pub l: Option<String>,
    pub b: Option<String>,
    pub v: Option<Vec<String>>,
    pub x: Option<Vec<String>>,
    pub y: Option<Vec<String>>,
    pub z: Option<Vec<String>>,
    pub n: Option<usize>,
    pub mode: Option<Mode>,
    pub space: Option<String>,
    pub dual: Option<String>,
}

impl Inputs {
    pub fn from_file(file: ProblemFile) -> Result<Self, CliError> {
        let scalar = |name: &str, v: Option<Value>| v.map(|v| value_text(name, &v)).transpose();
        let seq = |name: &str, v: Option<Vec<Value>>| {
            v.map(|items| {
                items
                    .iter()
                    .map(|i| value_text(name, i))
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()
        };
        Ok(Inputs {
            a: scalar("a", file.a)?,
            l: scalar("l", file.l)?,
            b: scalar("b", file.b)?,
            v: seq("v", file.v)?,
            x: seq("x", file.x)?,
            y: seq("y", file.y)?,
            z: seq("z", file.z)?,
            n: file.n,
            mode: file.mode,
            space: file.space,
            dual: file.dual,
        })
    }

    fn text<'a>(field: &str, value: &'a Option<String>) -> Result<&'a str, CliError> {
        value
            .as_deref()
            .ok_or_else(|| CliError::Usage(format!("missing field `{field}`")))
    }

    pub fn scalar<S: Scalar>(&self, field: &str) -> Result<S, CliError>
    where
        for<'a> &'a S: ScalarRef<S>,
    {
        let raw = match field {
            "a" => &self.a,
            "l" => &self.l,
            "b" => &self.b,
            _ => unreachable!("unknown scalar field {field}"),
        };
        parse_field(field, Self::text(field, raw)?)
    }

    fn raw_sequence(&self, field: &str) -> Result<&[String], CliError> {
        let raw = match field {
            "v" => &self.v,
            "x" => &self.x,
            "y" => &self.y,
            "z" => &self.z,
            _ => unreachable!("unknown sequence field {field}"),
        };
        raw.as_deref()
            .ok_or_else(|| CliError::Usage(format!("missing field `{field}`")))
    }

    /// Truncation: `N` if given, else the length of `field`.
    pub fn truncation(&self, field: &str) -> Result<usize, CliError> {
        match self.n {
            Some(n) => Ok(n),
            None => Ok(self.raw_sequence(field)?.len()),
        }
    }

    /// The first `n` entries of a sequence field. Shorter inputs are an
    /// invariant violation.
    pub fn sequence<S: Scalar>(
        &self,
        field: &'static str,
        n: usize,
    ) -> Result<SequencePrefix<S>, CliError>
    where
        for<'a> &'a S: ScalarRef<S>,
    {
        let raw = self.raw_sequence(field)?;
        if raw.len() < n {
            return Err(CliError::Core(lfd_core::Error::LengthMismatch {
                what: field,
                needed: n,
                got: raw.len(),
            }));
        }
        raw[..n]
            .iter()
            .enumerate()
            .map(|(i, t)| parse_field(&format!("{field}[{i}]"), t))
            .collect::<Result<Vec<S>, _>>()
            .map(SequencePrefix::new)
    }

    /// Weights default to all ones when `v` is absent.
    pub fn weights<S: Scalar>(&self, n: usize) -> Result<WeightSequence<S>, CliError>
    where
        for<'a> &'a S: ScalarRef<S>,
    {
        if self.v.is_none() {
            return Ok(WeightSequence::unit(n));
        }
        Ok(WeightSequence::new(self.sequence("v", n)?.into_terms())?)
    }
}

fn parse_field<S: Scalar>(field: &str, text: &str) -> Result<S, CliError>
where
    for<'a> &'a S: ScalarRef<S>,
{
    parse_scalar(text).map_err(|e| CliError::Usage(format!("field `{field}`: {e}")))
}
