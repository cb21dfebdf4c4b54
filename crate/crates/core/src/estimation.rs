//! Fitting joint models from samples, and drawing samples from them.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::model::{
    validate_discrete, validate_gaussian, DiscreteJoint, GaussianJoint, DEFAULT_EPS_PD,
};

const DEFAULT_RIDGE_SCALE: f64 = 1e-8;

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Fits a zero-mean [`GaussianJoint`] to paired samples (one observation
/// per row).
///
/// Means are always removed and the covariance uses the unbiased `1/(N-1)`
/// normalization. `ridge` is added to the diagonals of `K_X` and `K_Y`; `None`
/// selects `1e-8 · trace(K)/dim` per block. Rows are put in a canonical order
/// before accumulation, so the result does not depend on row order.
pub fn estimate_gaussian(
    x_samples: &DMatrix<f64>,
    y_samples: &DMatrix<f64>,
    ridge: Option<f64>,
) -> Result<GaussianJoint> {
    let (n, dx) = x_samples.shape();
    let dy = y_samples.ncols();
    if y_samples.nrows() != n {
        return Err(Error::ShapeMismatch(format!(
            "x has {n} rows, y has {}",
            y_samples.nrows()
        )));
    }
    if dx == 0 || dy == 0 {
        return Err(Error::ShapeMismatch(
            "samples need at least one column".into(),
        ));
    }
    let needed = dx + dy + 1;
    if n < needed {
        return Err(Error::TooFewSamples { got: n, needed });
    }
    if x_samples
        .iter()
        .chain(y_samples.iter())
        .any(|v| !v.is_finite())
    {
        return Err(Error::NonFinite("samples"));
    }

    let d = dx + dy;
    let mut rows: Vec<Vec<f64>> = (0..n)
        .map(|r| {
            x_samples
                .row(r)
                .iter()
                .chain(y_samples.row(r).iter())
                .copied()
                .collect()
        })
        .collect();
    rows.sort_by(|a, b| lexicographic(a, b));

    let mut mean = vec![0.0; d];
    for row in &rows {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let mut cov = DMatrix::<f64>::zeros(d, d);
    let mut centered = vec![0.0; d];
    for row in &rows {
        for ((c, v), m) in centered.iter_mut().zip(row).zip(&mean) {
            *c = v - m;
        }
        for i in 0..d {
            for j in i..d {
                cov[(i, j)] += centered[i] * centered[j];
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            let v = cov[(i, j)] / (n as f64 - 1.0);
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }

    let mut k_x = cov.view((0, 0), (dx, dx)).into_owned();
    let mut k_y = cov.view((dx, dx), (dy, dy)).into_owned();
    let k_xy = cov.view((0, dx), (dx, dy)).into_owned();
    let ridge_x = ridge.unwrap_or(DEFAULT_RIDGE_SCALE * k_x.trace() / dx as f64);
    let ridge_y = ridge.unwrap_or(DEFAULT_RIDGE_SCALE * k_y.trace() / dy as f64);
    if ridge_x < 0.0 || ridge_y < 0.0 {
        return Err(Error::InvalidOption("ridge must be nonnegative".into()));
    }
    for i in 0..dx {
        k_x[(i, i)] += ridge_x;
    }
    for i in 0..dy {
        k_y[(i, i)] += ridge_y;
    }
    validate_gaussian(&k_x, &k_y, &k_xy, DEFAULT_EPS_PD)
}

/// Empirical pmf of symbol pairs with additive `smoothing` per cell.
pub fn estimate_pmf(
    pairs: &[(usize, usize)],
    cards: (usize, usize),
    smoothing: f64,
) -> Result<DiscreteJoint> {
    let (card_x, card_y) = cards;
    if card_x == 0 || card_y == 0 {
        return Err(Error::ShapeMismatch("zero alphabet size".into()));
    }
    if pairs.is_empty() {
        return Err(Error::TooFewSamples { got: 0, needed: 1 });
    }
    if !(smoothing.is_finite() && smoothing >= 0.0) {
        return Err(Error::InvalidOption("smoothing must be nonnegative".into()));
    }
    let mut counts = vec![0u64; card_x * card_y];
    for &(x, y) in pairs {
        if x >= card_x {
            return Err(Error::IndexOutOfRange {
                column: 0,
                index: x,
                card: card_x,
            });
        }
        if y >= card_y {
            return Err(Error::IndexOutOfRange {
                column: 1,
                index: y,
                card: card_y,
            });
        }
        counts[x * card_y + y] += 1;
    }
    let total = pairs.len() as f64 + smoothing * counts.len() as f64;
    let rows: Vec<Vec<f64>> = counts
        .chunks(card_y)
        .map(|row| {
            row.iter()
                .map(|&c| (c as f64 + smoothing) / total)
                .collect()
        })
        .collect();
    validate_discrete(&rows)
}

/// Draws `n` paired samples from a [`GaussianJoint`], returned as
/// `(n × dim_x, n × dim_y)` matrices.
pub fn sample_gaussian<R: Rng + ?Sized>(
    joint: &GaussianJoint,
    n: usize,
    rng: &mut R,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let full = joint.full_covariance();
    let d = full.nrows();
    // Symmetric square root; tolerates the PSD-but-singular joints that pass
    // validation.
    let eig = SymmetricEigen::new(full);
    let root = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()))
        * eig.eigenvectors.transpose();
    let z = DMatrix::<f64>::from_fn(n, d, |_, _| StandardNormal.sample(rng));
    let samples = z * root;
    let (dx, dy) = (joint.dim_x(), joint.dim_y());
    Ok((
        samples.columns(0, dx).into_owned(),
        samples.columns(dx, dy).into_owned(),
    ))
}

/// Draws `n` symbol pairs from a [`DiscreteJoint`] by inverse-CDF sampling.
pub fn sample_pmf<R: Rng + ?Sized>(
    joint: &DiscreteJoint,
    n: usize,
    rng: &mut R,
) -> Vec<(usize, usize)> {
    let cdf: Vec<f64> = joint
        .pmf()
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let last = cdf.len() - 1;
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let cell = cdf.partition_point(|&c| c <= u).min(last);
            (cell / joint.card_y(), cell % joint.card_y())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cca::cca_decompose;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_samples_are_degenerate() {
        let x = DMatrix::from_element(2, 1, 3.0);
        let y = DMatrix::from_element(2, 1, 1.0);
        assert!(matches!(
            estimate_gaussian(&x, &y, Some(0.0)),
            Err(Error::TooFewSamples { got: 2, needed: 3 })
        ));
        let x = DMatrix::from_element(50, 1, 3.0);
        let y = DMatrix::from_element(50, 1, 1.0);
        assert!(matches!(
            estimate_gaussian(&x, &y, None),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn recovers_canonical_correlations() {
        let k_x = DMatrix::from_row_slice(2, 2, &[1.0, 0.4, 0.4, 2.0]);
        let k_y = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.5]);
        let k_xy = DMatrix::from_row_slice(2, 2, &[0.6, 0.1, 0.2, 0.3]);
        let truth = validate_gaussian(&k_x, &k_y, &k_xy, DEFAULT_EPS_PD).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (xs, ys) = sample_gaussian(&truth, 100_000, &mut rng).unwrap();
        let fitted = estimate_gaussian(&xs, &ys, None).unwrap();
        let a = cca_decompose(&truth).unwrap().rho;
        let b = cca_decompose(&fitted).unwrap().rho;
        for (p, q) in a.iter().zip(&b) {
            assert!((p - q).abs() < 2e-2, "{p} vs {q}");
        }
    }

    #[test]
    fn ridge_is_added() {
        let eye = DMatrix::<f64>::identity(2, 2);
        let truth = validate_gaussian(&eye, &eye, &DMatrix::zeros(2, 2), DEFAULT_EPS_PD).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (xs, ys) = sample_gaussian(&truth, 100_000, &mut rng).unwrap();
        let fitted = estimate_gaussian(&xs, &ys, Some(0.1)).unwrap();
        assert!((fitted.k_x() - eye * 1.1).amax() < 2e-2);
    }

    #[test]
    fn row_order_is_irrelevant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs = DMatrix::from_fn(40, 2, |_, _| rng.random::<f64>());
        let ys = DMatrix::from_fn(40, 1, |_, _| rng.random::<f64>());
        let perm: Vec<usize> = (0..40).rev().map(|i| (i * 7) % 40).collect();
        let px = DMatrix::from_fn(40, 2, |r, c| xs[(perm[r], c)]);
        let py = DMatrix::from_fn(40, 1, |r, c| ys[(perm[r], c)]);
        let a = estimate_gaussian(&xs, &ys, None).unwrap();
        let b = estimate_gaussian(&px, &py, None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn pmf_examples() {
        let point = estimate_pmf(&[(0, 0); 5], (2, 2), 0.0).unwrap();
        assert_eq!(point.pmf(), &[1.0, 0.0, 0.0, 0.0]);
        let smoothed = estimate_pmf(&[(0, 0); 5], (2, 2), 1.0).unwrap();
        assert!(smoothed.pmf().iter().all(|&p| p > 0.0));
        assert!(matches!(
            estimate_pmf(&[(0, 2)], (2, 2), 0.0),
            Err(Error::IndexOutOfRange {
                column: 1,
                index: 2,
                ..
            })
        ));
        let mut pairs = vec![(0, 1), (1, 1), (1, 0)];
        let a = estimate_pmf(&pairs, (2, 2), 0.5).unwrap();
        pairs.reverse();
        assert_eq!(a, estimate_pmf(&pairs, (2, 2), 0.5).unwrap());
    }

    #[test]
    fn uniform_pairs_converge() {
        let uniform = validate_discrete(&[vec![1.0 / 6.0; 3], vec![1.0 / 6.0; 3]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let pairs = sample_pmf(&uniform, 100_000, &mut rng);
        let fitted = estimate_pmf(&pairs, (2, 3), 0.0).unwrap();
        let tv: f64 = fitted
            .pmf()
            .iter()
            .zip(uniform.pmf())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 1e-2, "total variation {tv}");
    }
}
