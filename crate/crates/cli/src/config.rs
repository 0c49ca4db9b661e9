//! Experiment configuration files.
//!
//! A config file holds either one experiment object or an array of them (a
//! batch). Every entry runs the subcommand named on the command line.

use std::collections::BTreeSet;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use focklab::entire::EntireFunction;
use focklab::norms::Exponent;
use focklab::weights::Weight;

use crate::CliError;

/// Terms used for the `exp:` symbol shorthand.
pub const EXP_SHORTHAND_TERMS: usize = 40;

/// A symbol as written in the config: shorthand text or series JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymbolSpec {
    Text(String),
    Number(f64),
    Pairs(Vec<[f64; 2]>),
}

impl SymbolSpec {
    pub fn build(&self) -> Result<EntireFunction, String> {
        match self {
            SymbolSpec::Number(c) => constant(*c, 0.0),
            SymbolSpec::Pairs(p) => EntireFunction::from_pairs(p).map_err(|e| e.to_string()),
            SymbolSpec::Text(t) => parse_symbol(t),
        }
    }
}

fn constant(re: f64, im: f64) -> Result<EntireFunction, String> {
    if !(re.is_finite() && im.is_finite()) {
        return Err(format!("constant {re} + {im}i is not finite"));
    }
    Ok(EntireFunction::constant(Complex64::new(re, im)))
}

fn number(s: &str) -> Result<f64, String> {
    s.trim().parse().map_err(|_| format!("`{s}` is not a number"))
}

/// `z`, `z^k`, `c` (the constant 1), `c:<re>[,<im>]`, `exp:<lambda>[,<terms>]`
/// or a plain number.
fn parse_symbol(text: &str) -> Result<EntireFunction, String> {
    let t = text.trim();
    if t == "z" {
        return Ok(EntireFunction::monomial(1));
    }
    if t == "c" {
        return constant(1.0, 0.0);
    }
    if let Some(k) = t.strip_prefix("z^") {
        let k: usize = k.trim().parse().map_err(|_| format!("bad exponent in `{t}`"))?;
        return Ok(EntireFunction::monomial(k));
    }
    if let Some(rest) = t.strip_prefix("c:") {
        return match rest.split_once(',') {
            Some((re, im)) => constant(number(re)?, number(im)?),
            None => constant(number(rest)?, 0.0),
        };
    }
    if let Some(rest) = t.strip_prefix("exp:") {
        let (lambda, terms) = match rest.split_once(',') {
            Some((l, n)) => (number(l)?, n.trim().parse().map_err(|_| format!("bad term count in `{t}`"))?),
            None => (number(rest)?, EXP_SHORTHAND_TERMS),
        };
        if !lambda.is_finite() || terms == 0 {
            return Err(format!("bad truncated exponential `{t}`"));
        }
        return Ok(EntireFunction::truncated_exp(Complex64::new(lambda, 0.0), terms));
    }
    if let Ok(c) = t.parse::<f64>() {
        return constant(c, 0.0);
    }
    Err(format!("unrecognized symbol `{t}` (expected z^k, c, c:<re>,<im>, exp:<lambda> or series JSON)"))
}

/// Operation parameters; each subcommand reads the ones it needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius_cap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_range: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidate_budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe_spacing: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operator: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Output file stem; defaults to the subcommand (or `<subcommand>-<i>` in
    /// a batch).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// If present, must match the subcommand.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<SymbolSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<SymbolSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Exponent>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<Exponent>,
    #[serde(default, skip_serializing_if = "Params::is_empty")]
    pub params: Params,
}

impl Params {
    fn is_empty(&self) -> bool {
        *self == Params::default()
    }
}

impl ExperimentConfig {
    pub fn weight(&self) -> Result<Weight, String> {
        let spec = self.weight.as_deref().ok_or("missing field `weight`")?;
        spec.parse().map_err(|e: focklab::weights::WeightError| e.to_string())
    }

    pub fn symbol(&self, field: &str) -> Result<EntireFunction, String> {
        let s = match field {
            "g" => &self.g,
            _ => &self.f,
        };
        s.as_ref()
            .ok_or_else(|| format!("missing field `{field}`"))?
            .build()
            .map_err(|e| format!("{field}: {e}"))
    }

    pub fn exponent(&self, field: &str, default: Option<Exponent>) -> Result<Exponent, String> {
        let v = if field == "p" { self.p } else { self.q };
        v.or(default).ok_or_else(|| format!("missing field `{field}`"))
    }

    pub fn finite_exponent(&self, field: &str, default: Option<f64>) -> Result<f64, String> {
        match self.exponent(field, default.map(Exponent::Finite))? {
            Exponent::Finite(v) => Ok(v),
            Exponent::Infinite => Err(format!("`{field}` must be finite here")),
        }
    }
}

/// One parsed entry with its resolved output stem.
#[derive(Debug, Clone)]
pub struct Entry {
    pub name: String,
    pub config: ExperimentConfig,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        && !name.starts_with('.')
}

/// Parses a config file into batch entries with distinct output stems.
pub fn parse_entries(text: &str, operation: &str) -> Result<Vec<Entry>, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid JSON: {e}")))?;
    let (items, batch) = match value {
        Value::Array(items) => (items, true),
        v @ Value::Object(_) => (vec![v], false),
        _ => return Err(CliError::Config("config must be an object or an array of objects".into())),
    };
    if items.is_empty() {
        return Err(CliError::Config("empty batch".into()));
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(items.len());
    for (i, item) in items.into_iter().enumerate() {
        let config: ExperimentConfig =
            serde_json::from_value(item).map_err(|e| CliError::Config(format!("entry {i}: {e}")))?;
        if let Some(op) = &config.operation {
            if op != operation {
                return Err(CliError::Config(format!(
                    "entry {i}: operation `{op}` does not match subcommand `{operation}`"
                )));
            }
        }
        // resolve references up front so a bad entry stops the whole batch
        if config.weight.is_some() {
            config.weight().map_err(|e| CliError::Config(format!("entry {i}: {e}")))?;
        }
        for (field, s) in [("g", &config.g), ("f", &config.f)] {
            if s.is_some() {
                config.symbol(field).map_err(|e| CliError::Config(format!("entry {i}: {e}")))?;
            }
        }
        let name = match &config.name {
            Some(n) => n.clone(),
            None if batch => format!("{operation}-{i}"),
            None => operation.to_string(),
        };
        if !valid_name(&name) {
            return Err(CliError::Config(format!("entry {i}: invalid name `{name}`")));
        }
        if !seen.insert(name.clone()) {
            return Err(CliError::Config(format!("duplicate entry name `{name}`")));
        }
        out.push(Entry { name, config });
    }
    Ok(out)
}

pub fn read_entries(path: &Path, operation: &str) -> Result<Vec<Entry>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_entries(&text, operation)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_shorthands() {
        let g = |s: &str| SymbolSpec::Text(s.into()).build().unwrap();
        assert_eq!(g("z^5"), EntireFunction::monomial(5));
        assert_eq!(g("z"), EntireFunction::monomial(1));
        assert_eq!(g("c"), EntireFunction::constant(Complex64::new(1.0, 0.0)));
        assert_eq!(g("c:2,-1"), EntireFunction::constant(Complex64::new(2.0, -1.0)));
        assert_eq!(g("0").is_zero(), true);
        assert_eq!(g("exp:0.5,10").coeffs().len(), 10);
        assert!(SymbolSpec::Text("w^2".into()).build().is_err());
        let pairs = SymbolSpec::Pairs(vec![[0.0, 0.0], [1.0, 0.0]]);
        assert_eq!(pairs.build().unwrap(), EntireFunction::monomial(1));
    }

    #[test]
    fn batch_names_are_distinct() {
        let e = parse_entries(r#"[{"weight":"gaussian"},{"weight":"power:4"}]"#, "norm").unwrap();
        assert_eq!(e[1].name, "norm-1");
        let dup = parse_entries(r#"[{"name":"a"},{"name":"a"}]"#, "norm");
        assert!(matches!(dup, Err(CliError::Config(_))));
        let bad = parse_entries(r#"{"name":"../x"}"#, "norm");
        assert!(matches!(bad, Err(CliError::Config(_))));
    }

    #[test]
    fn exponents_accept_inf_and_reject_nonpositive() {
        let e = parse_entries(r#"{"p":"inf","q":2}"#, "norm").unwrap();
        assert_eq!(e[0].config.p, Some(Exponent::Infinite));
        assert!(parse_entries(r#"{"p":0}"#, "norm").is_err());
        assert!(parse_entries(r#"{"params":{"bogus":1}}"#, "norm").is_err());
    }
}
