//! Symmetric inverse square roots and the canonical (whitened cross-covariance)
//! matrix `K_X^{-1/2} K_XY K_Y^{-1/2}`.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};

use crate::error::{Error, Result};
use crate::model::GaussianJoint;

/// Singular values within this distance of 1 are treated as sampling noise.
const CLAMP_BAND: f64 = 1e-6;
/// Value that clamped singular values are set to.
const CLAMPED_VALUE: f64 = 1.0 - 1e-9;

/// Whitening transforms of a [`GaussianJoint`] and its canonical matrix.
#[derive(Debug, Clone)]
pub struct WhitenedPair {
    /// `K_X^{-1/2}`
    pub w_x: DMatrix<f64>,
    /// `K_Y^{-1/2}`
    pub w_y: DMatrix<f64>,
    /// `K_X^{-1/2} K_XY K_Y^{-1/2}` after singular-value clamping.
    pub canonical: DMatrix<f64>,
    /// Number of singular values that were clamped to `1 - 1e-9`.
    pub clamped: usize,
}

/// The unique symmetric positive-definite `M` with `M k M = I`.
pub fn inv_sqrt_psd(k: &DMatrix<f64>, eps_pd: f64) -> Result<DMatrix<f64>> {
    if !k.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "inverse square root of a {}x{} matrix",
            k.nrows(),
            k.ncols()
        )));
    }
    let sym = (k + k.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let min_eigenvalue = eig.eigenvalues.min();
    if min_eigenvalue <= eps_pd {
        return Err(Error::NotPositiveDefinite {
            which: "argument",
            min_eigenvalue,
        });
    }
    let scaled: DVector<f64> = eig.eigenvalues.map(|l| 1.0 / l.sqrt());
    let q = &eig.eigenvectors;
    let m = q * DMatrix::from_diagonal(&scaled) * q.transpose();
    Ok((&m + m.transpose()) * 0.5)
}

/// Whitens both blocks and forms the canonical matrix.
///
/// Singular values in `[1 - 1e-6, 1 + 1e-6]` are clamped to `1 - 1e-9` (with a
/// warning); anything larger is an error.
pub fn canonical_matrix(joint: &GaussianJoint) -> Result<WhitenedPair> {
    let w_x = inv_sqrt_psd(joint.k_x(), joint.eps_pd())?;
    let w_y = inv_sqrt_psd(joint.k_y(), joint.eps_pd())?;
    let raw = &w_x * joint.k_xy() * &w_y;

    let svd = SVD::new(raw.clone(), true, true);
    let max_sv = svd.singular_values.max();
    if max_sv > 1.0 + CLAMP_BAND {
        return Err(Error::SingularValueOutOfRange { value: max_sv });
    }
    let clamped = svd
        .singular_values
        .iter()
        .filter(|&&s| s >= 1.0 - CLAMP_BAND)
        .count();
    let canonical = if clamped == 0 {
        raw
    } else {
        log::warn!("clamping {clamped} canonical correlation(s) near 1 to {CLAMPED_VALUE}");
        let sv = svd.singular_values.map(|s| {
            if s >= 1.0 - CLAMP_BAND {
                CLAMPED_VALUE
            } else {
                s
            }
        });
        let u = svd.u.as_ref().expect("requested u");
        let v_t = svd.v_t.as_ref().expect("requested v_t");
        u * DMatrix::from_diagonal(&sv) * v_t
    };
    Ok(WhitenedPair {
        w_x,
        w_y,
        canonical,
        clamped,
    })
}
