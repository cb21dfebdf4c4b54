//! Validated joint models.
//!
//! Every constructor checks the full set of invariants, so downstream code can
//! take a [`GaussianJoint`] or [`DiscreteJoint`] at face value.

use nalgebra::{DMatrix, SymmetricEigen};
use std::fmt;

use crate::error::{Error, Result};

/// Default lower bound on the eigenvalues of `K_X` and `K_Y`.
pub const DEFAULT_EPS_PD: f64 = 1e-10;

const SYMMETRY_TOL: f64 = 1e-9;
const BLOCK_PSD_TOL: f64 = 1e-9;
const SUM_TOL: f64 = 1e-12;
const NEGATIVE_CLAMP: f64 = 1e-14;

/// An information quantity in nats. Always nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct InfoValue(f64);

impl InfoValue {
    pub const ZERO: InfoValue = InfoValue(0.0);

    /// Wraps a value computed in nats. Round-off negatives are clamped to 0.
    pub fn from_nats(nats: f64) -> Self {
        debug_assert!(
            nats.is_nan() || nats > -1e-8,
            "information value {nats} is significantly negative"
        );
        InfoValue(nats.max(0.0))
    }

    pub fn nats(self) -> f64 {
        self.0
    }

    pub fn bits(self) -> f64 {
        self.0 / std::f64::consts::LN_2
    }
}

impl fmt::Display for InfoValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} nats", self.0)
    }
}

/// Covariance blocks of a zero-mean jointly Gaussian pair `(X, Y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianJoint {
    k_x: DMatrix<f64>,
    k_y: DMatrix<f64>,
    k_xy: DMatrix<f64>,
    eps_pd: f64,
}

impl GaussianJoint {
    pub fn dim_x(&self) -> usize {
        self.k_x.nrows()
    }

    pub fn dim_y(&self) -> usize {
        self.k_y.nrows()
    }

    pub fn k_x(&self) -> &DMatrix<f64> {
        &self.k_x
    }

    pub fn k_y(&self) -> &DMatrix<f64> {
        &self.k_y
    }

    pub fn k_xy(&self) -> &DMatrix<f64> {
        &self.k_xy
    }

    /// The tolerance the model was validated with.
    pub fn eps_pd(&self) -> f64 {
        self.eps_pd
    }

    /// Full covariance `[[K_X, K_XY], [K_XY^T, K_Y]]`.
    pub fn full_covariance(&self) -> DMatrix<f64> {
        let (dx, dy) = (self.dim_x(), self.dim_y());
        let mut full = DMatrix::zeros(dx + dy, dx + dy);
        full.view_mut((0, 0), (dx, dx)).copy_from(&self.k_x);
        full.view_mut((dx, dx), (dy, dy)).copy_from(&self.k_y);
        full.view_mut((0, dx), (dx, dy)).copy_from(&self.k_xy);
        full.view_mut((dx, 0), (dy, dx))
            .copy_from(&self.k_xy.transpose());
        full
    }
}

fn check_finite(m: &DMatrix<f64>, what: &'static str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

fn symmetrize(m: &DMatrix<f64>, which: &'static str) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "{which} is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    let scale = m.amax().max(1.0);
    let asymmetry = (m - m.transpose()).amax();
    if asymmetry > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric { which, asymmetry });
    }
    Ok((m + m.transpose()) * 0.5)
}

pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Validates covariance blocks and builds a [`GaussianJoint`].
pub fn validate_gaussian(
    k_x: &DMatrix<f64>,
    k_y: &DMatrix<f64>,
    k_xy: &DMatrix<f64>,
    eps_pd: f64,
) -> Result<GaussianJoint> {
    check_finite(k_x, "k_x")?;
    check_finite(k_y, "k_y")?;
    check_finite(k_xy, "k_xy")?;
    if k_x.nrows() == 0 || k_y.nrows() == 0 {
        return Err(Error::ShapeMismatch("empty covariance block".into()));
    }
    let k_x = symmetrize(k_x, "k_x")?;
    let k_y = symmetrize(k_y, "k_y")?;
    if k_xy.shape() != (k_x.nrows(), k_y.nrows()) {
        return Err(Error::ShapeMismatch(format!(
            "k_xy is {}x{}, expected {}x{}",
            k_xy.nrows(),
            k_xy.ncols(),
            k_x.nrows(),
            k_y.nrows()
        )));
    }
    for (which, m) in [("k_x", &k_x), ("k_y", &k_y)] {
        let min_eigenvalue = min_eigenvalue(m);
        if min_eigenvalue <= eps_pd {
            return Err(Error::NotPositiveDefinite {
                which,
                min_eigenvalue,
            });
        }
    }
    let joint = GaussianJoint {
        k_x,
        k_y,
        k_xy: k_xy.clone(),
        eps_pd,
    };
    let min_eigenvalue = min_eigenvalue(&joint.full_covariance());
    if min_eigenvalue < -BLOCK_PSD_TOL {
        return Err(Error::InconsistentBlock { min_eigenvalue });
    }
    Ok(joint)
}

/// Checks a flat probability table: rejects real negatives, clamps round-off
/// negatives, checks the sum, and renormalizes only if something was clamped.
fn validate_table(table: &[f64]) -> Result<Vec<f64>> {
    if table.is_empty() {
        return Err(Error::ShapeMismatch("empty probability table".into()));
    }
    let mut pmf = Vec::with_capacity(table.len());
    let mut clamped = false;
    for (index, &value) in table.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite("pmf"));
        }
        if value < -NEGATIVE_CLAMP {
            return Err(Error::NegativeMass { index, value });
        }
        clamped |= value < 0.0;
        pmf.push(value.max(0.0));
    }
    let sum: f64 = pmf.iter().sum();
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(Error::NotNormalized { sum });
    }
    if clamped {
        pmf.iter_mut().for_each(|p| *p /= sum);
    }
    Ok(pmf)
}

/// Joint pmf `p(x, y)` on a finite product alphabet, stored row-major
/// (`x` major).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteJoint {
    card_x: usize,
    card_y: usize,
    pmf: Vec<f64>,
}

impl DiscreteJoint {
    pub fn card_x(&self) -> usize {
        self.card_x
    }

    pub fn card_y(&self) -> usize {
        self.card_y
    }

    pub fn p(&self, x: usize, y: usize) -> f64 {
        self.pmf[x * self.card_y + y]
    }

    /// Flat row-major table.
    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.pmf.chunks(self.card_y).map(<[f64]>::to_vec).collect()
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        self.pmf
            .chunks(self.card_y)
            .map(|row| row.iter().sum())
            .collect()
    }

    pub fn marginal_y(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.card_y];
        for row in self.pmf.chunks(self.card_y) {
            for (o, p) in out.iter_mut().zip(row) {
                *o += p;
            }
        }
        out
    }

    /// Relabels both alphabets: the mass of `(x, y)` moves to
    /// `(perm_x[x], perm_y[y])`.
    pub fn relabel(&self, perm_x: &[usize], perm_y: &[usize]) -> Result<DiscreteJoint> {
        if perm_x.len() != self.card_x || perm_y.len() != self.card_y {
            return Err(Error::ShapeMismatch("permutation length".into()));
        }
        let mut table = vec![0.0; self.pmf.len()];
        for (x, &nx) in perm_x.iter().enumerate() {
            for (y, &ny) in perm_y.iter().enumerate() {
                if nx >= self.card_x || ny >= self.card_y {
                    return Err(Error::ShapeMismatch(
                        "permutation entry out of range".into(),
                    ));
                }
                table[nx * self.card_y + ny] = self.p(x, y);
            }
        }
        let rows: Vec<Vec<f64>> = table.chunks(self.card_y).map(<[f64]>::to_vec).collect();
        validate_discrete(&rows)
    }

    /// The same table viewed as a two-source [`MultiDiscreteJoint`].
    pub fn to_multi(&self) -> MultiDiscreteJoint {
        MultiDiscreteJoint {
            cards: vec![self.card_x, self.card_y],
            pmf: self.pmf.clone(),
        }
    }
}

/// Validates a `card_x × card_y` table given as rows.
pub fn validate_discrete(rows: &[Vec<f64>]) -> Result<DiscreteJoint> {
    let card_x = rows.len();
    let card_y = rows.first().map_or(0, Vec::len);
    if card_x == 0 || card_y == 0 {
        return Err(Error::ShapeMismatch("empty probability table".into()));
    }
    if rows.iter().any(|r| r.len() != card_y) {
        return Err(Error::ShapeMismatch("ragged probability table".into()));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(DiscreteJoint {
        card_x,
        card_y,
        pmf: validate_table(&flat)?,
    })
}

/// Joint pmf of `M ≥ 2` discrete sources, flattened row-major (last source
/// fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct MultiDiscreteJoint {
    cards: Vec<usize>,
    pmf: Vec<f64>,
}

impl MultiDiscreteJoint {
    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn num_sources(&self) -> usize {
        self.cards.len()
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn num_states(&self) -> usize {
        self.pmf.len()
    }

    /// Symbol of each source for flat cell index `cell`.
    pub fn symbols(&self, mut cell: usize) -> Vec<usize> {
        let mut out = vec![0; self.cards.len()];
        for (slot, &card) in out.iter_mut().zip(&self.cards).rev() {
            *slot = cell % card;
            cell /= card;
        }
        out
    }

    /// Flat cell index of a symbol tuple.
    pub fn cell(&self, symbols: &[usize]) -> usize {
        symbols
            .iter()
            .zip(&self.cards)
            .fold(0, |acc, (&s, &card)| acc * card + s)
    }

    /// Moves the mass of cell `c` to cell `perm[c]`; no renormalization, so
    /// values are carried over exactly.
    pub(crate) fn permute_cells(&self, perm: &[usize]) -> MultiDiscreteJoint {
        let mut pmf = vec![0.0; self.pmf.len()];
        for (c, &p) in self.pmf.iter().enumerate() {
            pmf[perm[c]] = p;
        }
        MultiDiscreteJoint {
            cards: self.cards.clone(),
            pmf,
        }
    }

    pub fn marginal(&self, source: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.cards[source]];
        for (cell, p) in self.pmf.iter().enumerate() {
            out[self.symbols(cell)[source]] += p;
        }
        out
    }

    /// Back to a [`DiscreteJoint`] when `M = 2`.
    pub fn to_pair(&self) -> Option<DiscreteJoint> {
        (self.cards.len() == 2).then(|| DiscreteJoint {
            card_x: self.cards[0],
            card_y: self.cards[1],
            pmf: self.pmf.clone(),
        })
    }
}

/// Validates a flat row-major table over the alphabets `cards`.
pub fn validate_multi(cards: &[usize], pmf: &[f64]) -> Result<MultiDiscreteJoint> {
    if cards.len() < 2 {
        return Err(Error::ShapeMismatch(format!(
            "need at least 2 sources, got {}",
            cards.len()
        )));
    }
    if cards.contains(&0) {
        return Err(Error::ShapeMismatch("zero alphabet size".into()));
    }
    let states: usize = cards.iter().product();
    if states != pmf.len() {
        return Err(Error::ShapeMismatch(format!(
            "table has {} entries, alphabets need {states}",
            pmf.len()
        )));
    }
    Ok(MultiDiscreteJoint {
        cards: cards.to_vec(),
        pmf: validate_table(pmf)?,
    })
}
