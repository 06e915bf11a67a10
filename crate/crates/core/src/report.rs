//! Experiment reports and their JSON / flat CSV renderings.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};
use serde_json::{json, Value};

pub const FORMAT_VERSION: u32 = 1;

fn as_decimal_string<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapRow {
    pub center: [f64; 3],
    pub radius: f64,
    pub empirical: f64,
    pub reference: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SphereExperiment {
    Orbit,
    Axes,
    Characters,
}

/// Summary of one sphere experiment at word length `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub kind: SphereExperiment,
    pub n: usize,
    /// `d_n = |H_n|`, serialized as a decimal string.
    #[serde(serialize_with = "as_decimal_string")]
    pub degree: u64,
    pub point_count: u64,
    /// Words acting as the identity (contributing no isolated fixed point).
    pub identity_words: u64,
    /// Total weight divided by `d_n`.
    pub mass: f64,
    /// Indexed by `l` from 0.
    pub weyl_rms: Vec<f64>,
    pub caps: Vec<CapRow>,
    /// Character averages, indexed by `l` from 0.
    #[serde(rename = "char")]
    pub char_avg: Vec<f64>,
    pub estimated_s: f64,
    pub flags: Vec<String>,
}

impl ExperimentReport {
    pub fn worst_cap_residual(&self) -> f64 {
        self.caps.iter().map(|c| c.residual.abs()).fold(0.0, f64::max)
    }

    pub fn to_json(&self, config: &BTreeMap<String, String>) -> Value {
        envelope(serde_json::to_value(self).expect("report serializes"), config)
    }

    /// `(statistic, value)` rows for the flat CSV variant.
    pub fn flat_rows(&self) -> Vec<(String, String)> {
        let mut rows = vec![
            ("degree".to_string(), self.degree.to_string()),
            ("point_count".to_string(), self.point_count.to_string()),
            ("identity_words".to_string(), self.identity_words.to_string()),
            ("mass".to_string(), fmt_f64(self.mass)),
            ("estimated_s".to_string(), fmt_f64(self.estimated_s)),
        ];
        for (l, v) in self.weyl_rms.iter().enumerate() {
            rows.push((format!("weyl_rms[{l}]"), fmt_f64(*v)));
        }
        for (i, c) in self.caps.iter().enumerate() {
            rows.push((format!("cap[{i}].empirical"), fmt_f64(c.empirical)));
            rows.push((format!("cap[{i}].reference"), fmt_f64(c.reference)));
            rows.push((format!("cap[{i}].residual"), fmt_f64(c.residual)));
        }
        for (l, v) in self.char_avg.iter().enumerate() {
            rows.push((format!("char[{l}]"), fmt_f64(*v)));
        }
        rows
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellRow {
    pub cell: String,
    pub measure: f64,
    pub empirical: f64,
    pub reference: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HeckeExperiment {
    FixedPoints,
    Orbit,
}

/// Summary of one Hecke experiment for `T_p^n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeckeReport {
    pub kind: HeckeExperiment,
    pub p: u64,
    pub n: u32,
    /// `(p+1)^n`, serialized as a decimal string.
    #[serde(serialize_with = "as_decimal_string")]
    pub degree: u64,
    /// Multiplicity of each primitive level `j` in `T_p^n`.
    pub decomposition: BTreeMap<u32, u64>,
    /// Exact total weight over the degree, as `"num/den"`.
    pub ratio: String,
    pub mass: f64,
    /// Unweighted number of incidences (fixed points) or of aggregated branches (orbits).
    pub unweighted_count: u64,
    pub cells: Vec<CellRow>,
    pub estimated_s: f64,
    pub notes: Vec<String>,
}

impl HeckeReport {
    pub fn worst_cell_residual(&self) -> f64 {
        self.cells.iter().map(|c| c.residual.abs()).fold(0.0, f64::max)
    }

    pub fn to_json(&self, config: &BTreeMap<String, String>) -> Value {
        envelope(serde_json::to_value(self).expect("report serializes"), config)
    }

    pub fn flat_rows(&self) -> Vec<(String, String)> {
        let mut rows = vec![
            ("degree".to_string(), self.degree.to_string()),
            ("ratio".to_string(), self.ratio.clone()),
            ("mass".to_string(), fmt_f64(self.mass)),
            ("unweighted_count".to_string(), self.unweighted_count.to_string()),
            ("estimated_s".to_string(), fmt_f64(self.estimated_s)),
        ];
        for (j, m) in &self.decomposition {
            rows.push((format!("multiplicity[{j}]"), m.to_string()));
        }
        for (i, c) in self.cells.iter().enumerate() {
            rows.push((format!("cell[{i}].empirical"), fmt_f64(c.empirical)));
            rows.push((format!("cell[{i}].reference"), fmt_f64(c.reference)));
            rows.push((format!("cell[{i}].residual"), fmt_f64(c.residual)));
        }
        rows
    }
}

fn envelope(mut body: Value, config: &BTreeMap<String, String>) -> Value {
    if let Value::Object(map) = &mut body {
        map.insert("format_version".into(), json!(FORMAT_VERSION));
        map.insert("config".into(), json!(config));
    }
    body
}

/// Shortest round-trip representation.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}
