//! Canonical correlation analysis via the SVD of the canonical matrix.

use nalgebra::{DMatrix, DVector, SVD};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::model::GaussianJoint;
use crate::whitening::canonical_matrix;

/// Correlations at or above this are rejected: `I(ρ)` diverges.
pub const PERFECT_CORRELATION: f64 = 1.0 - 1e-9;
/// Entries within this of the column's largest magnitude count as ties.
const SIGN_TIE_TOL: f64 = 1e-12;
const ZERO_RHO: f64 = 1e-12;
const FIXED_POINT_SEED: u64 = 0x5eed_cca0;

/// Ordered canonical correlations with their singular vectors.
#[derive(Debug, Clone)]
pub struct CcaBasis {
    /// `rho[0] ≥ rho[1] ≥ … ≥ 0`, all `< 1`.
    pub rho: Vec<f64>,
    /// Left singular vectors (columns), `dim_x × n`.
    pub u: DMatrix<f64>,
    /// Right singular vectors (columns), `dim_y × n`.
    pub v: DMatrix<f64>,
    pub w_x: DMatrix<f64>,
    pub w_y: DMatrix<f64>,
}

impl CcaBasis {
    /// Number of canonical pairs, `min(dim_x, dim_y)`.
    pub fn n(&self) -> usize {
        self.rho.len()
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.n() {
            Err(Error::BadK { k, n: self.n() })
        } else {
            Ok(())
        }
    }

    pub fn u_k(&self, k: usize) -> Result<DMatrix<f64>> {
        self.check_k(k)?;
        Ok(self.u.columns(0, k).into_owned())
    }

    pub fn v_k(&self, k: usize) -> Result<DMatrix<f64>> {
        self.check_k(k)?;
        Ok(self.v.columns(0, k).into_owned())
    }

    /// `U_k^T K_X^{-1/2}`, a `k × dim_x` matrix.
    pub fn x_map(&self, k: usize) -> Result<DMatrix<f64>> {
        Ok(self.u_k(k)?.transpose() * &self.w_x)
    }

    /// `V_k^T K_Y^{-1/2}`, a `k × dim_y` matrix.
    pub fn y_map(&self, k: usize) -> Result<DMatrix<f64>> {
        Ok(self.v_k(k)?.transpose() * &self.w_y)
    }
}

/// Index of the largest-magnitude entry, ties resolved to the lowest index.
fn pivot_index(col: &[f64]) -> usize {
    let max = col.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    col.iter()
        .position(|v| v.abs() >= max - SIGN_TIE_TOL)
        .unwrap_or(0)
}

fn orient(col: &mut DVector<f64>) -> bool {
    let i = pivot_index(col.as_slice());
    if col[i] < 0.0 {
        col.neg_mut();
        true
    } else {
        false
    }
}

/// Full decomposition of the canonical matrix.
pub fn cca_decompose(joint: &GaussianJoint) -> Result<CcaBasis> {
    let whitened = canonical_matrix(joint)?;
    let svd = SVD::new(whitened.canonical.clone(), true, true);
    let u_raw = svd.u.expect("requested u");
    let v_raw = svd.v_t.expect("requested v_t").transpose();
    let sv = svd.singular_values;
    let n = sv.len();

    let mut order: Vec<usize> = (0..n).collect();
    // Stable: equal singular values keep the order the SVD returned.
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));

    let mut rho = Vec::with_capacity(n);
    let mut u = DMatrix::zeros(joint.dim_x(), n);
    let mut v = DMatrix::zeros(joint.dim_y(), n);
    for (dst, &src) in order.iter().enumerate() {
        let value = sv[src].max(0.0);
        if value >= PERFECT_CORRELATION {
            return Err(Error::PerfectCorrelation { value });
        }
        let mut uc: DVector<f64> = u_raw.column(src).into_owned();
        let mut vc: DVector<f64> = v_raw.column(src).into_owned();
        if value > ZERO_RHO {
            if orient(&mut uc) {
                vc.neg_mut();
            }
        } else {
            orient(&mut uc);
            orient(&mut vc);
        }
        u.set_column(dst, &uc);
        v.set_column(dst, &vc);
        rho.push(value);
    }
    Ok(CcaBasis {
        rho,
        u,
        v,
        w_x: whitened.w_x,
        w_y: whitened.w_y,
    })
}

/// Top-`k` CCA features `(U_k^T K_X^{-1/2} x, V_k^T K_Y^{-1/2} y)`.
pub fn cca_project(
    basis: &CcaBasis,
    k: usize,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let x_map = basis.x_map(k)?;
    let y_map = basis.y_map(k)?;
    if x.len() != x_map.ncols() || y.len() != y_map.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "feature inputs have lengths ({}, {}), expected ({}, {})",
            x.len(),
            y.len(),
            x_map.ncols(),
            y_map.ncols()
        )));
    }
    Ok((x_map * x, y_map * y))
}

/// Leading singular pair found by alternating Cauchy–Schwarz maximizers.
#[derive(Debug, Clone)]
pub struct LeadingPair {
    pub u: DVector<f64>,
    pub v: DVector<f64>,
    pub rho: f64,
    pub iterations: usize,
}

/// Alternates `u ← K v / ‖K v‖`, `v ← Kᵀ u / ‖Kᵀ u‖` from a fixed pseudo-random
/// start until successive correlation estimates differ by less than `tol`.
///
/// This never touches an SVD routine, so it can check [`cca_decompose`].
pub fn leading_pair_fixed_point(
    canonical: &DMatrix<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<LeadingPair> {
    if canonical.amax() == 0.0 {
        return Err(Error::InvalidOption(
            "leading pair of a zero canonical matrix".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(FIXED_POINT_SEED);
    let mut v: DVector<f64> =
        DVector::from_fn(canonical.ncols(), |_, _| StandardNormal.sample(&mut rng));
    v /= v.norm();
    let kt = canonical.transpose();
    let mut rho_prev = f64::NAN;
    for iteration in 1..=max_iter {
        let ku = canonical * &v;
        let ku_norm = ku.norm();
        if ku_norm == 0.0 {
            break;
        }
        let mut u = ku / ku_norm;
        let ktu = &kt * &u;
        let rho = ktu.norm();
        v = ktu / rho;
        if (rho - rho_prev).abs() < tol {
            if orient(&mut u) {
                v.neg_mut();
            }
            return Ok(LeadingPair {
                u,
                v,
                rho,
                iterations: iteration,
            });
        }
        rho_prev = rho;
    }
    Err(Error::NoConvergence {
        what: "leading-pair fixed point",
        iterations: max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::sample_gaussian;
    use crate::model::{validate_gaussian, DEFAULT_EPS_PD};

    fn diag(values: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_row_slice(values))
    }

    fn whitened(k_xy: DMatrix<f64>) -> GaussianJoint {
        let (dx, dy) = k_xy.shape();
        validate_gaussian(
            &DMatrix::identity(dx, dx),
            &DMatrix::identity(dy, dy),
            &k_xy,
            DEFAULT_EPS_PD,
        )
        .unwrap()
    }

    #[test]
    fn independent_blocks_give_identity_basis() {
        let basis = cca_decompose(&whitened(DMatrix::zeros(3, 3))).unwrap();
        assert_eq!(basis.rho, vec![0.0; 3]);
        assert!((&basis.u - DMatrix::identity(3, 3)).amax() < 1e-14);
        assert!((&basis.v - DMatrix::identity(3, 3)).amax() < 1e-14);
    }

    #[test]
    fn diagonal_model_is_sorted() {
        let basis = cca_decompose(&whitened(diag(&[0.5, 0.8]))).unwrap();
        assert!((basis.rho[0] - 0.8).abs() < 1e-14);
        assert!((basis.rho[1] - 0.5).abs() < 1e-14);
        let perm = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!((&basis.u - &perm).amax() < 1e-14);
        assert!((&basis.v - &perm).amax() < 1e-14);
    }

    #[test]
    fn perfect_correlation_is_rejected() {
        let err = cca_decompose(&whitened(diag(&[1.0 - 1e-12]))).unwrap_err();
        assert!(matches!(err, Error::PerfectCorrelation { .. }), "{err:?}");
    }

    #[test]
    fn projection_examples() {
        let basis = cca_decompose(&whitened(diag(&[0.8, 0.5]))).unwrap();
        let zero = DVector::zeros(2);
        let (u, v) = cca_project(&basis, 2, &zero, &zero).unwrap();
        assert_eq!(u, zero);
        assert_eq!(v, zero);
        let x = DVector::from_row_slice(&[1.0, 0.0]);
        let (u, _) = cca_project(&basis, 1, &x, &zero).unwrap();
        assert!((u[0] - 1.0).abs() < 1e-14);
        assert!(matches!(
            cca_project(&basis, 3, &x, &zero),
            Err(Error::BadK { k: 3, n: 2 })
        ));
        assert!(matches!(
            cca_project(&basis, 0, &x, &zero),
            Err(Error::BadK { .. })
        ));
    }

    #[test]
    fn fixed_point_on_diagonal() {
        let pair = leading_pair_fixed_point(&diag(&[0.8, 0.5]), 1e-15, 10_000).unwrap();
        assert!((pair.rho - 0.8).abs() < 1e-10);
        assert!((pair.u[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn fixed_point_on_rank_one() {
        let a = DVector::from_row_slice(&[0.6, 0.8]);
        let b = DVector::from_row_slice(&[0.0, -1.0, 0.0]);
        let k = &a * b.transpose() * 0.3;
        let pair = leading_pair_fixed_point(&k, 1e-15, 100).unwrap();
        assert!((pair.rho - 0.3).abs() < 1e-14);
        assert!((pair.u.dot(&a).abs() - 1.0).abs() < 1e-12);
        assert!((pair.v.dot(&b).abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_point_on_degenerate_spectrum() {
        match leading_pair_fixed_point(&diag(&[0.6, 0.6]), 1e-14, 1000) {
            Ok(pair) => assert!((pair.rho - 0.6).abs() < 1e-10),
            Err(Error::NoConvergence { .. }) => {}
            Err(e) => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn fixed_point_rejects_zero() {
        assert!(leading_pair_fixed_point(&DMatrix::zeros(2, 2), 1e-12, 10).is_err());
    }

    #[test]
    fn projected_features_have_canonical_correlations() {
        let k_x = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]);
        let k_y = DMatrix::from_row_slice(2, 2, &[1.5, -0.2, -0.2, 0.8]);
        let k_xy = DMatrix::from_row_slice(2, 2, &[0.9, 0.1, -0.2, 0.4]);
        let joint = validate_gaussian(&k_x, &k_y, &k_xy, DEFAULT_EPS_PD).unwrap();
        let basis = cca_decompose(&joint).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (xs, ys) = sample_gaussian(&joint, 100_000, &mut rng).unwrap();
        let fu = xs * basis.x_map(2).unwrap().transpose();
        let fv = ys * basis.y_map(2).unwrap().transpose();
        for i in 0..2 {
            let a = fu.column(i);
            let b = fv.column(i);
            let (ma, mb) = (a.mean(), b.mean());
            let cov: f64 = a
                .iter()
                .zip(b.iter())
                .map(|(p, q)| (p - ma) * (q - mb))
                .sum();
            let va: f64 = a.iter().map(|p| (p - ma).powi(2)).sum();
            let vb: f64 = b.iter().map(|q| (q - mb).powi(2)).sum();
            let corr = cov / (va * vb).sqrt();
            assert!(
                (corr - basis.rho[i]).abs() < 2e-2,
                "{corr} vs {}",
                basis.rho[i]
            );
        }
    }
}
