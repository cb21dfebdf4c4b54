use crate::error::{Error, Result};
use crate::model::{DiscreteJoint, MultiDiscreteJoint};

const SLICE_TOL: f64 = 1e-10;

/// A latent `W` attached to a fixed joint pmf through `q(w | x_1…x_M)`.
///
/// The conditional table is flat, indexed `cell * card_w + w` where `cell` is
/// the flat index of the joint table. Induced marginals are computed once at
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    card_w: usize,
    joint: MultiDiscreteJoint,
    q: Vec<f64>,
    q_w: Vec<f64>,
    /// Per source: `p(x_i = s, w)` indexed `s * card_w + w`.
    source_w: Vec<Vec<f64>>,
}

impl Coupling {
    /// Largest latent alphabet accepted for a joint with `states` cells.
    pub fn max_card_w(states: usize) -> usize {
        states + 1
    }

    pub fn new(joint: MultiDiscreteJoint, card_w: usize, q: Vec<f64>) -> Result<Self> {
        let states = joint.num_states();
        if card_w == 0 || card_w > Self::max_card_w(states) {
            return Err(Error::InvalidOption(format!(
                "card_w = {card_w} outside 1..={}",
                Self::max_card_w(states)
            )));
        }
        if q.len() != states * card_w {
            return Err(Error::ShapeMismatch(format!(
                "conditional table has {} entries, expected {}",
                q.len(),
                states * card_w
            )));
        }
        for slice in q.chunks(card_w) {
            if slice.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::NonFinite("conditional table"));
            }
            let sum: f64 = slice.iter().sum();
            if (sum - 1.0).abs() > SLICE_TOL {
                return Err(Error::NotNormalized { sum });
            }
        }
        let m = joint.num_sources();
        let mut q_w = vec![0.0; card_w];
        let mut source_w: Vec<Vec<f64>> = joint
            .cards()
            .iter()
            .map(|&c| vec![0.0; c * card_w])
            .collect();
        for (cell, &p) in joint.pmf().iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let symbols = joint.symbols(cell);
            for w in 0..card_w {
                let r = p * q[cell * card_w + w];
                q_w[w] += r;
                for i in 0..m {
                    source_w[i][symbols[i] * card_w + w] += r;
                }
            }
        }
        Ok(Coupling {
            card_w,
            joint,
            q,
            q_w,
            source_w,
        })
    }

    /// `W` constant (all mass on label 0).
    pub fn constant(joint: &MultiDiscreteJoint, card_w: usize) -> Result<Self> {
        let mut q = vec![0.0; joint.num_states() * card_w];
        q.iter_mut().step_by(card_w.max(1)).for_each(|v| *v = 1.0);
        Self::new(joint.clone(), card_w, q)
    }

    /// `W` equal to the full source tuple, one label per cell of positive mass.
    pub fn copy_all(joint: &MultiDiscreteJoint, card_w: usize) -> Result<Self> {
        let support = joint.pmf().iter().filter(|&&p| p > 0.0).count();
        if support > card_w {
            return Err(Error::InvalidOption(format!(
                "copying {support} support cells needs card_w >= {support}"
            )));
        }
        let mut q = vec![0.0; joint.num_states() * card_w];
        let mut label = 0;
        for (cell, &p) in joint.pmf().iter().enumerate() {
            if p > 0.0 {
                q[cell * card_w + label] = 1.0;
                label += 1;
            } else {
                q[cell * card_w] = 1.0;
            }
        }
        Self::new(joint.clone(), card_w, q)
    }

    pub fn card_w(&self) -> usize {
        self.card_w
    }

    pub fn joint(&self) -> &MultiDiscreteJoint {
        &self.joint
    }

    /// The coupled pmf as a two-source joint, when `M = 2`.
    pub fn pair(&self) -> Option<DiscreteJoint> {
        self.joint.to_pair()
    }

    /// `q(w | cell)`.
    pub fn q(&self, cell: usize, w: usize) -> f64 {
        self.q[cell * self.card_w + w]
    }

    /// `q(w | x, y)` for two-source couplings.
    pub fn q_w_given_xy(&self, x: usize, y: usize, w: usize) -> f64 {
        let card_y = self.joint.cards()[1];
        self.q((x * card_y) + y, w)
    }

    /// Flat conditional table, `cell * card_w + w`.
    pub fn table(&self) -> &[f64] {
        &self.q
    }

    /// Marginal `q(w)`.
    pub fn q_w(&self) -> &[f64] {
        &self.q_w
    }

    /// Joint `p(x_i, w)` indexed `s * card_w + w`.
    pub fn source_w_joint(&self, source: usize) -> Vec<f64> {
        self.source_w[source].clone()
    }

    /// `p(w | x_i = s)` as rows over `s`. Symbols of zero mass get a uniform row.
    pub fn q_w_given_source(&self, source: usize) -> Vec<Vec<f64>> {
        self.source_w[source]
            .chunks(self.card_w)
            .map(|row| {
                let total: f64 = row.iter().sum();
                if total > 0.0 {
                    row.iter().map(|r| r / total).collect()
                } else {
                    vec![1.0 / self.card_w as f64; self.card_w]
                }
            })
            .collect()
    }

    pub fn q_w_given_x(&self) -> Vec<Vec<f64>> {
        self.q_w_given_source(0)
    }

    pub fn q_w_given_y(&self) -> Vec<Vec<f64>> {
        self.q_w_given_source(1)
    }
}
