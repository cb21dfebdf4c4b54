//! JSON report schemas. Every report names its units; discrete reports also
//! flag that their value is an upper bound.

use std::fs;
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::input::CovarianceBlocks;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Nats,
    Bits,
}

impl Units {
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Bits => nats / std::f64::consts::LN_2,
        }
    }

    pub fn to_nats(self, value: f64) -> f64 {
        match self {
            Units::Nats => value,
            Units::Bits => value * std::f64::consts::LN_2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub argv: Vec<String>,
    pub timestamp_unix: u64,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleProjections {
    /// One row per observation, `k` features each.
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcaReport {
    pub command: String,
    pub units: Units,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
    pub model: CovarianceBlocks,
    pub k: usize,
    pub rho: Vec<f64>,
    pub u_k: Vec<Vec<f64>>,
    pub v_k: Vec<Vec<f64>>,
    /// `U_k^T K_X^{-1/2}`.
    pub x_map: Vec<Vec<f64>>,
    /// `V_k^T K_Y^{-1/2}`.
    pub y_map: Vec<Vec<f64>>,
    pub clamped_singular_values: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<SampleProjections>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProjection {
    /// `k × dim_x`.
    pub u: Vec<Vec<f64>>,
    /// `k × dim_y`.
    pub v: Vec<Vec<f64>>,
    /// Per-row factor relative to the CCA map.
    pub scaling_u: Vec<f64>,
    pub scaling_v: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianReport {
    pub command: String,
    pub units: Units,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
    pub model: CovarianceBlocks,
    pub gamma: f64,
    pub version: String,
    pub rho: Vec<f64>,
    pub total_information: f64,
    pub c_gamma: f64,
    pub k: usize,
    pub gamma_i: Vec<f64>,
    pub water_level: f64,
    /// Variances of the latent noise `Z`, one per active component.
    pub noise_variance: Vec<f64>,
    pub projection: LinearProjection,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapFeature {
    pub labels: Vec<usize>,
    /// Symbols whose argmax was tied; resolved to the smallest label.
    pub ties: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverTelemetry {
    pub source: String,
    pub lambda: f64,
    pub iterations: usize,
    pub restart: usize,
    pub restarts_used: usize,
    pub lambdas_evaluated: usize,
    pub converged: bool,
    pub seed: u64,
    pub restarts: usize,
    /// In nats.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteReport {
    pub command: String,
    pub units: Units,
    pub value_is_upper_bound: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
    pub cards: Vec<usize>,
    /// Flat, last source fastest.
    pub pmf: Vec<f64>,
    pub multi: bool,
    pub gamma: f64,
    pub c_gamma_upper_bound: f64,
    pub achieved_gamma: f64,
    /// `I(X;Y)`, or the total correlation for more than two sources.
    pub dependence: f64,
    pub card_w: usize,
    /// `q(w | cell)`, one row per cell of `pmf`.
    pub coupling: Vec<Vec<f64>>,
    pub q_w: Vec<f64>,
    pub map_features: Vec<MapFeature>,
    /// `I(u(X); v(Y))` of the MAP features (two sources only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature_information: Option<f64>,
    pub solver: SolverTelemetry,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyCca {
    pub bit_covariance: Vec<Vec<f64>>,
    pub rho: Vec<f64>,
    /// `Σ -½ ln(1 - ρ_i²)`, the dependence visible to linear features.
    pub feature_information: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyCica {
    pub gamma: f64,
    pub upper_bound: f64,
    pub achieved_gamma: f64,
    pub u_labels: Vec<usize>,
    pub v_labels: Vec<usize>,
    pub feature_information: f64,
    pub solver: SolverTelemetry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyReport {
    pub command: String,
    pub units: Units,
    pub value_is_upper_bound: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
    pub a0: f64,
    /// Symbol `s` encodes the bit pair `(s / 2, s % 2)`.
    pub pmf: Vec<Vec<f64>>,
    pub mutual_information: f64,
    pub cca: ToyCca,
    pub cica: ToyCica,
}

/// Pretty JSON with a trailing newline.
pub fn render<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

pub fn write_report<T: Serialize>(path: &Path, report: &T) -> Result<(), CliError> {
    fs::write(path, render(report)).map_err(|e| CliError::io(path, e))
}
