//! Report envelope, config hashing, one-parameter sweeps and CSV rendering.

use crate::args::Experiment;
use crate::error::CliError;
use crate::experiments::Outcome;
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

/// Everything that determines a report's content.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub seed: Option<u64>,
    pub mem_budget: u64,
    pub experiment: Experiment,
}

impl ResolvedConfig {
    /// SHA-256 of the canonical JSON encoding, framed like a git blob
    /// (`"blob <len>\0"` prefix).
    pub fn content_hash(&self) -> Result<String, CliError> {
        let body = serde_json::to_vec(self)?;
        let mut h = Sha256::new();
        h.update(format!("blob {}\0", body.len()).as_bytes());
        h.update(&body);
        Ok(hex::encode(h.finalize()))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub experiment: &'static str,
    pub seed: Option<u64>,
    pub config_hash: String,
    pub config: ResolvedConfig,
    pub warnings: Vec<String>,
    pub violations: Vec<String>,
    pub result: Value,
}

impl Report {
    pub fn new(config: ResolvedConfig, outcome: Outcome) -> Result<Self, CliError> {
        Ok(Report {
            experiment: config.experiment.name(),
            seed: config.seed,
            config_hash: config.content_hash()?,
            warnings: outcome.warnings,
            violations: outcome.violations,
            result: outcome.result,
            config,
        })
    }
}

/// A parsed `--sweep name=v1,v2,...`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub parameter: String,
    pub values: Vec<Value>,
}

impl Sweep {
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let (name, list) = spec
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("sweep {spec:?} is not of the form name=v1,v2,...")))?;
        let values: Vec<Value> = list
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(|v| serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_owned())))
            .collect();
        if values.is_empty() {
            return Err(CliError::Usage(format!("sweep {spec:?} lists no values")));
        }
        Ok(Sweep { parameter: name.trim().replace('_', "-"), values })
    }

    /// One experiment per value, differing from `base` only in the swept
    /// parameter. The parameter must name exactly one field of the experiment.
    pub fn expand(&self, base: &Experiment) -> Result<Vec<Experiment>, CliError> {
        let encoded = serde_json::to_value(base)?;
        let mut paths = Vec::new();
        find_key(&encoded, &self.parameter, &mut Vec::new(), &mut paths);
        let path = match paths.as_slice() {
            [p] => p.clone(),
            [] => return Err(CliError::Usage(format!("{} has no parameter {:?}", base.name(), self.parameter))),
            _ => return Err(CliError::Usage(format!("parameter {:?} is ambiguous", self.parameter))),
        };
        self.values
            .iter()
            .map(|v| {
                let mut e = encoded.clone();
                *lookup_mut(&mut e, &path) = v.clone();
                serde_json::from_value(e)
                    .map_err(|err| CliError::Usage(format!("{} = {v}: {err}", self.parameter)))
            })
            .collect()
    }
}

fn find_key(v: &Value, key: &str, prefix: &mut Vec<String>, out: &mut Vec<Vec<String>>) {
    if let Value::Object(map) = v {
        for (k, child) in map {
            prefix.push(k.clone());
            if k == key {
                out.push(prefix.clone());
            }
            find_key(child, key, prefix, out);
            prefix.pop();
        }
    }
}

fn lookup_mut<'a>(v: &'a mut Value, path: &[String]) -> &'a mut Value {
    path.iter().fold(v, |node, k| &mut node[k.as_str()])
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, child, out);
            }
        }
        Value::Null => out.push((prefix.to_owned(), String::new())),
        Value::String(s) => out.push((prefix.to_owned(), s.clone())),
        other => out.push((prefix.to_owned(), other.to_string())),
    }
}

/// One CSV row per report: the swept value (if any), seed, config hash,
/// violation count and every leaf of the result.
pub fn to_csv(reports: &[Report], sweep: Option<&Sweep>) -> Result<Vec<u8>, CliError> {
    let rows: Vec<Vec<(String, String)>> = reports
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = Vec::new();
            if let Some(s) = sweep {
                let v = &s.values[i];
                row.push((s.parameter.clone(), v.as_str().map_or_else(|| v.to_string(), str::to_owned)));
            }
            row.push(("seed".into(), r.seed.map_or_else(String::new, |s| s.to_string())));
            row.push(("config_hash".into(), r.config_hash.clone()));
            row.push(("violations".into(), r.violations.len().to_string()));
            flatten("", &r.result, &mut row);
            row
        })
        .collect();
    let mut header: Vec<String> = Vec::new();
    for row in &rows {
        for (k, _) in row {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for row in &rows {
        let lookup: Map<String, Value> = row.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        w.write_record(header.iter().map(|k| lookup.get(k).and_then(Value::as_str).unwrap_or("")))?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}
