//! Reading sample matrices, covariance blocks and pmf tables.

use std::collections::HashSet;
use std::fs::File;
use std::path::Path;

use cica_core::{
    validate_gaussian, validate_multi, GaussianJoint, MultiDiscreteJoint, DEFAULT_EPS_PD,
};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::CliError;

fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(|e| CliError::io(path, e))
}

fn reader(path: &Path) -> Result<csv::Reader<File>, CliError> {
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(open(path)?))
}

/// Observations, one per row, under a mandatory header.
pub fn read_samples(path: &Path) -> Result<DMatrix<f64>, CliError> {
    let mut rdr = reader(path)?;
    let width = rdr.headers().map_err(|e| CliError::parse(path, e))?.len();
    let mut values = Vec::new();
    let mut rows = 0;
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| CliError::parse(path, e))?;
        if record.len() != width {
            return Err(CliError::parse(
                path,
                format!("row {} has {} fields", line + 1, record.len()),
            ));
        }
        for field in &record {
            let v: f64 = field.parse().map_err(|_| {
                CliError::parse(path, format!("row {}: {field:?} is not a number", line + 1))
            })?;
            values.push(v);
        }
        rows += 1;
    }
    if rows == 0 || width == 0 {
        return Err(CliError::parse(path, "no observations"));
    }
    Ok(DMatrix::from_row_slice(rows, width, &values))
}

/// Covariance blocks as written to and read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceBlocks {
    pub k_x: Vec<Vec<f64>>,
    pub k_y: Vec<Vec<f64>>,
    pub k_xy: Vec<Vec<f64>>,
}

pub fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn from_rows(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>, CliError> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(CliError::Validation(format!("{what}: ragged matrix")));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

impl CovarianceBlocks {
    pub fn from_joint(joint: &GaussianJoint) -> Self {
        CovarianceBlocks {
            k_x: to_rows(joint.k_x()),
            k_y: to_rows(joint.k_y()),
            k_xy: to_rows(joint.k_xy()),
        }
    }

    pub fn validate(&self) -> Result<GaussianJoint, CliError> {
        Ok(validate_gaussian(
            &from_rows(&self.k_x, "k_x")?,
            &from_rows(&self.k_y, "k_y")?,
            &from_rows(&self.k_xy, "k_xy")?,
            DEFAULT_EPS_PD,
        )?)
    }
}

pub fn read_covariance(path: &Path) -> Result<GaussianJoint, CliError> {
    let blocks: CovarianceBlocks =
        serde_json::from_reader(open(path)?).map_err(|e| CliError::parse(path, e))?;
    blocks.validate()
}

/// A pmf table with columns `index_1, …, index_M, probability`. Alphabet
/// sizes are one more than the largest index seen; absent cells have zero
/// mass.
pub fn read_pmf(path: &Path) -> Result<MultiDiscreteJoint, CliError> {
    let mut rdr = reader(path)?;
    let width = rdr.headers().map_err(|e| CliError::parse(path, e))?.len();
    if width < 3 {
        return Err(CliError::parse(
            path,
            "need at least two index columns and a probability",
        ));
    }
    let sources = width - 1;
    let mut entries: Vec<(Vec<usize>, f64)> = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| CliError::parse(path, e))?;
        if record.len() != width {
            return Err(CliError::parse(
                path,
                format!("row {} has {} fields", line + 1, record.len()),
            ));
        }
        let bad = |f: &str| CliError::parse(path, format!("row {}: bad field {f:?}", line + 1));
        let index = record
            .iter()
            .take(sources)
            .map(|f| f.parse::<usize>().map_err(|_| bad(f)))
            .collect::<Result<Vec<_>, _>>()?;
        let p: f64 = record[sources].parse().map_err(|_| bad(&record[sources]))?;
        entries.push((index, p));
    }
    if entries.is_empty() {
        return Err(CliError::parse(path, "empty pmf"));
    }
    let cards: Vec<usize> = (0..sources)
        .map(|i| entries.iter().map(|(s, _)| s[i]).max().unwrap_or(0) + 1)
        .collect();
    let states = cards.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c));
    let Some(states) = states.filter(|&s| s <= 1 << 24) else {
        return Err(CliError::Validation("pmf alphabet too large".into()));
    };
    let mut pmf = vec![0.0; states];
    let mut seen = HashSet::new();
    for (index, p) in entries {
        let cell = index
            .iter()
            .zip(&cards)
            .fold(0, |acc, (&s, &c)| acc * c + s);
        if !seen.insert(cell) {
            return Err(CliError::Validation(format!(
                "duplicate pmf entry {index:?}"
            )));
        }
        pmf[cell] = p;
    }
    Ok(validate_multi(&cards, &pmf)?)
}
