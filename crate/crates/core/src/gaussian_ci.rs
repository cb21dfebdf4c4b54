//! Relaxed Wyner common information of jointly Gaussian pairs.
//!
//! After whitening, a Gaussian pair splits into `n` independent scalar pairs
//! with correlations `ρ_i`. The vector problem is then
//!
//! ```text
//! C_γ = min { Σ C_{γ_i}(ρ_i) : Σ γ_i = γ }
//! ```
//!
//! with the scalar closed form
//!
//! ```text
//! C_{γ_i}(ρ) = ½ log⁺ [(1+ρ)(1-s)] / [(1-ρ)(1+s)],   s = √(1 - e^{-2γ_i})
//! ```
//!
//! Its derivative `-1/s` does not depend on `ρ`, so every component that is
//! not saturated (`γ_i < I(ρ_i)`) receives the same budget: the water level.

use crate::cca::{cca_decompose, CcaBasis};
use crate::error::{Error, Result};
use crate::model::{GaussianJoint, InfoValue};

/// Correlations below this are treated as exactly 0.
const RHO_FLOOR: f64 = 1e-12;
const BISECTION_CAP: usize = 200;
const ACTIVE_MARGIN: f64 = 1e-12;

fn check_rho(rho: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::RhoOutOfRange(rho));
    }
    Ok(if rho < RHO_FLOOR { 0.0 } else { rho })
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidGamma(gamma))
    }
}

fn check_descending(rho: &[f64]) -> Result<Vec<f64>> {
    let cleaned = rho
        .iter()
        .map(|&r| check_rho(r))
        .collect::<Result<Vec<_>>>()?;
    if cleaned.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::UnsortedRho);
    }
    Ok(cleaned)
}

fn info_of(rho: f64) -> f64 {
    -0.5 * (-rho * rho).ln_1p()
}

/// `I(ρ) = ½ ln 1/(1-ρ²)`, the mutual information of a scalar Gaussian pair.
pub fn mutual_info_rho(rho: f64) -> Result<InfoValue> {
    Ok(InfoValue::from_nats(info_of(check_rho(rho)?)))
}

/// Closed-form `C_γ` of a scalar Gaussian pair with correlation `rho`.
pub fn scalar_relaxed_ci(rho: f64, gamma: f64) -> Result<InfoValue> {
    let rho = check_rho(rho)?;
    check_gamma(gamma)?;
    if gamma >= info_of(rho) {
        return Ok(InfoValue::ZERO);
    }
    // s = √(1 - e^{-2γ}), 1 - s = e^{-2γ} / (1 + s)
    let s = (-(-2.0 * gamma).exp_m1()).sqrt();
    let one_minus_s = (-2.0 * gamma).exp() / (1.0 + s);
    let value = 0.5 * ((1.0 + rho).ln() + one_minus_s.ln() - (-rho).ln_1p() - s.ln_1p());
    Ok(InfoValue::from_nats(value.max(0.0)))
}

/// Water-filled split of a total budget across canonical components.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaAllocation {
    pub gamma_total: f64,
    /// Budget of each component, in the order of the correlations.
    pub gamma_i: Vec<f64>,
    pub c_gamma: InfoValue,
    /// Common budget of the unsaturated components.
    pub water_level: f64,
    /// Number of components with `water_level < I(ρ_i)`.
    pub active_count: usize,
}

/// Minimizes `Σ C_{γ_i}(ρ_i)` subject to `Σ γ_i = gamma_total` by water-filling.
pub fn waterfill(rho: &[f64], gamma_total: f64) -> Result<GammaAllocation> {
    let rho = check_descending(rho)?;
    check_gamma(gamma_total)?;
    let infos: Vec<f64> = rho.iter().map(|&r| info_of(r)).collect();
    let total: f64 = infos.iter().sum();
    let max_info = infos.iter().copied().fold(0.0, f64::max);

    let water_level = if gamma_total >= total {
        max_info
    } else {
        let filled = |level: f64| infos.iter().map(|&i| i.min(level)).sum::<f64>();
        let (mut lo, mut hi) = (0.0, max_info);
        for _ in 0..BISECTION_CAP {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if filled(mid) < gamma_total {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };

    let gamma_i: Vec<f64> = if gamma_total >= total {
        infos.clone()
    } else {
        infos.iter().map(|&i| i.min(water_level)).collect()
    };
    let c_gamma = rho
        .iter()
        .zip(&gamma_i)
        .map(|(&r, &g)| scalar_relaxed_ci(r, g).map(InfoValue::nats))
        .sum::<Result<f64>>()?;
    let active_count = infos
        .iter()
        .filter(|&&i| water_level < i - ACTIVE_MARGIN)
        .count();
    Ok(GammaAllocation {
        gamma_total,
        gamma_i,
        c_gamma: InfoValue::from_nats(c_gamma),
        water_level,
        active_count,
    })
}

/// `C_γ` of a Gaussian joint, together with its CCA basis.
pub fn relaxed_ci_gaussian(
    joint: &GaussianJoint,
    gamma: f64,
) -> Result<(GammaAllocation, CcaBasis)> {
    check_gamma(gamma)?;
    let basis = cca_decompose(joint)?;
    let allocation = waterfill(&basis.rho, gamma)?;
    Ok((allocation, basis))
}

/// Number of extracted components `k(γ)`.
///
/// With thresholds `T_ℓ = ℓ I(ρ_ℓ) + Σ_{i>ℓ} I(ρ_i)` (1-based, nonincreasing
/// in `ℓ`), `k = ℓ` exactly when `T_{ℓ+1} ≤ γ < T_ℓ`, so `k` counts the
/// thresholds strictly above `γ`. A `γ` sitting on a threshold gets the
/// smaller count.
pub fn component_count(rho: &[f64], gamma: f64) -> Result<usize> {
    let rho = check_descending(rho)?;
    check_gamma(gamma)?;
    let infos: Vec<f64> = rho.iter().map(|&r| info_of(r)).collect();
    let n = infos.len();
    let mut tail = 0.0;
    let mut count = 0;
    for l in (1..=n).rev() {
        let threshold = l as f64 * infos[l - 1] + tail;
        if gamma < threshold {
            count += 1;
        }
        tail += infos[l - 1];
    }
    Ok(count)
}

/// One point of the `C_γ` trade-off curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianCurvePoint {
    pub gamma: f64,
    pub c_gamma: InfoValue,
    pub k: usize,
}

/// Evaluates `C_γ` and `k(γ)` over an ascending grid.
pub fn ci_curve(joint: &GaussianJoint, grid: &[f64]) -> Result<Vec<GaussianCurvePoint>> {
    if grid.iter().any(|g| !g.is_finite() || *g < 0.0) || grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::UnsortedGrid);
    }
    let basis = cca_decompose(joint)?;
    grid.iter()
        .map(|&gamma| {
            let allocation = waterfill(&basis.rho, gamma)?;
            Ok(GaussianCurvePoint {
                gamma,
                c_gamma: allocation.c_gamma,
                k: component_count(&basis.rho, gamma)?,
            })
        })
        .collect()
}
