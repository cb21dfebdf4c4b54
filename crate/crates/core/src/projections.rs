//! Projecting the common-information latent back onto each source.
//!
//! Three rules turn a latent `W` into features:
//!
//! * MAP: `u(x) = argmax_w p(w|x)`
//! * conditional expectation: `u(x) = E[W | X = x]`
//! * marginal integration: `u(x) = Σ_y p(y) E[W | X = x, Y = y]`
//!
//! For Gaussian models the optimal latent is
//! `W = U_k^T K_X^{-1/2} X + V_k^T K_Y^{-1/2} Y + Z` and every rule yields a
//! row-scaled copy of the top-`k` CCA map.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::cca::{cca_decompose, CcaBasis};
use crate::discrete::{mutual_information, Coupling};
use crate::error::{Error, Result};
use crate::gaussian_ci::{component_count, waterfill, GammaAllocation};
use crate::model::{validate_discrete, DiscreteJoint, GaussianJoint, InfoValue};

const TIE_TOL: f64 = 1e-12;

/// Which projection rule to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProjectionVersion {
    Map,
    CondExp,
    Marginal,
}

impl ProjectionVersion {
    pub const ALL: [ProjectionVersion; 3] = [Self::Map, Self::CondExp, Self::Marginal];

    pub fn name(self) -> &'static str {
        match self {
            Self::Map => "map",
            Self::CondExp => "cond-exp",
            Self::Marginal => "marginal",
        }
    }
}

impl std::str::FromStr for ProjectionVersion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "map" => Ok(Self::Map),
            "cond-exp" | "cond_exp" => Ok(Self::CondExp),
            "marginal" => Ok(Self::Marginal),
            other => Err(Error::InvalidOption(format!(
                "unknown projection version {other:?}"
            ))),
        }
    }
}

/// A feature map of one source.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureMap {
    /// Gaussian case: `u(x) = matrix · x`. `scaling[i]` is the factor relating
    /// row `i` to the corresponding CCA row.
    Linear {
        matrix: DMatrix<f64>,
        scaling: Vec<f64>,
    },
    /// MAP labels per symbol, plus the symbols whose argmax was tied.
    Labels {
        labels: Vec<usize>,
        ties: Vec<usize>,
    },
    /// Real-valued feature per symbol.
    Values(Vec<f64>),
}

impl FeatureMap {
    pub fn labels(&self) -> Option<&[usize]> {
        match self {
            FeatureMap::Labels { labels, .. } => Some(labels),
            _ => None,
        }
    }

    pub fn matrix(&self) -> Option<&DMatrix<f64>> {
        match self {
            FeatureMap::Linear { matrix, .. } => Some(matrix),
            _ => None,
        }
    }
}

/// Features of both sources under one rule.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionOutputs {
    pub version: ProjectionVersion,
    pub u_of_x: FeatureMap,
    pub v_of_y: FeatureMap,
}

/// The Gaussian latent `W = A X + B Y + Z` with `A = U_k^T K_X^{-1/2}`,
/// `B = V_k^T K_Y^{-1/2}` and `Z ~ N(0, noise_cov)`.
#[derive(Debug, Clone)]
pub struct GaussianLatentSpec {
    pub k: usize,
    pub u_k: DMatrix<f64>,
    pub v_k: DMatrix<f64>,
    /// Diagonal, `k × k`.
    pub noise_cov: DMatrix<f64>,
    pub allocation: GammaAllocation,
    pub basis: CcaBasis,
}

impl GaussianLatentSpec {
    /// `A = U_k^T K_X^{-1/2}`, `k × dim_x`.
    pub fn x_map(&self) -> DMatrix<f64> {
        self.u_k.transpose() * &self.basis.w_x
    }

    /// `B = V_k^T K_Y^{-1/2}`, `k × dim_y`.
    pub fn y_map(&self) -> DMatrix<f64> {
        self.v_k.transpose() * &self.basis.w_y
    }

    /// Covariance of the stacked vector `(X, Y, W)`.
    pub fn joint_covariance(&self, joint: &GaussianJoint) -> DMatrix<f64> {
        let (dx, dy, k) = (joint.dim_x(), joint.dim_y(), self.k);
        let full_xy = joint.full_covariance();
        let mut lift = DMatrix::zeros(k, dx + dy);
        lift.view_mut((0, 0), (k, dx)).copy_from(&self.x_map());
        lift.view_mut((0, dx), (k, dy)).copy_from(&self.y_map());
        let cross = &full_xy * lift.transpose();
        let k_w = &lift * &cross + &self.noise_cov;
        let n = dx + dy + k;
        let mut out = DMatrix::zeros(n, n);
        out.view_mut((0, 0), (dx + dy, dx + dy)).copy_from(&full_xy);
        out.view_mut((0, dx + dy), (dx + dy, k)).copy_from(&cross);
        out.view_mut((dx + dy, 0), (k, dx + dy))
            .copy_from(&cross.transpose());
        out.view_mut((dx + dy, dx + dy), (k, k)).copy_from(&k_w);
        out
    }

    /// `(I(X,Y;W), I(X;Y|W))` of the construction, from log-determinants.
    pub fn information(&self, joint: &GaussianJoint) -> (InfoValue, InfoValue) {
        let (dx, dy, k) = (joint.dim_x(), joint.dim_y(), self.k);
        let c = self.joint_covariance(joint);
        let logdet = |idx: &[usize]| -> f64 {
            if idx.is_empty() {
                return 0.0;
            }
            let sub = c.select_rows(idx).select_columns(idx);
            sub.symmetric_eigenvalues().iter().map(|l| l.ln()).sum()
        };
        let xs: Vec<usize> = (0..dx).collect();
        let ys: Vec<usize> = (dx..dx + dy).collect();
        let ws: Vec<usize> = (dx + dy..dx + dy + k).collect();
        let cat = |parts: &[&[usize]]| parts.concat();
        let xy = cat(&[&xs, &ys]);
        let all = cat(&[&xs, &ys, &ws]);
        let xw = cat(&[&xs, &ws]);
        let yw = cat(&[&ys, &ws]);
        let i_xy_w = 0.5 * (logdet(&xy) + logdet(&ws) - logdet(&all));
        let i_x_y_given_w = 0.5 * (logdet(&xw) + logdet(&yw) - logdet(&ws) - logdet(&all));
        (
            InfoValue::from_nats(i_xy_w),
            InfoValue::from_nats(i_x_y_given_w),
        )
    }
}

/// Noise variance that makes the component `W_i = X̂_i + Ŷ_i + Z_i` leave
/// exactly `gamma_i` of residual dependence.
///
/// The scalar optimum writes `X̂ = √α S + √(1-α) N_1`, `Ŷ = √α S + √(1-α) N_2`
/// with `corr(N_1, N_2) = ρ̃ = √(1 - e^{-2γ_i})` and `α = (ρ - ρ̃)/(1 - ρ̃)`.
/// Its posterior `S | X̂, Ŷ` depends on `X̂ + Ŷ` only, which gives
/// `σ² = (1+ρ) ((1+ρ)/α - 2)` after rescaling.
fn component_noise(rho: f64, gamma_i: f64) -> f64 {
    let rho_tilde = (-(-2.0 * gamma_i).exp_m1()).sqrt();
    let alpha = (rho - rho_tilde) / (1.0 - rho_tilde);
    (1.0 + rho) * ((1.0 + rho) / alpha - 2.0)
}

/// Builds the Gaussian latent for budget `gamma`.
pub fn gaussian_latent(joint: &GaussianJoint, gamma: f64) -> Result<GaussianLatentSpec> {
    let basis = cca_decompose(joint)?;
    let allocation = waterfill(&basis.rho, gamma)?;
    let k = component_count(&basis.rho, gamma)?;
    let noise: Vec<f64> = (0..k)
        .map(|i| component_noise(basis.rho[i], allocation.gamma_i[i]))
        .collect();
    Ok(GaussianLatentSpec {
        k,
        u_k: basis.u.columns(0, k).into_owned(),
        v_k: basis.v.columns(0, k).into_owned(),
        noise_cov: DMatrix::from_diagonal(&DVector::from_vec(noise)),
        allocation,
        basis,
    })
}

fn row_scaling(map: &DMatrix<f64>, reference: &DMatrix<f64>) -> Vec<f64> {
    (0..map.nrows())
        .map(|i| {
            let r = reference.row(i);
            map.row(i).dot(&r) / r.norm_squared()
        })
        .collect()
}

fn solve_right(lhs: &DMatrix<f64>, spd: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    // lhs · spd^{-1} = (spd^{-1} · lhsᵀ)ᵀ
    let chol = Cholesky::new(spd.clone()).ok_or(Error::NotPositiveDefinite {
        which: "covariance block",
        min_eigenvalue: f64::NAN,
    })?;
    Ok(chol.solve(&lhs.transpose()).transpose())
}

/// Feature maps of a Gaussian joint at budget `gamma`.
///
/// MAP and conditional expectation both read `E[W | X] = K_WX K_X^{-1} X` off
/// the latent covariance. Marginal integration averages
/// `E[W | X, Y] = A X + B Y` over the zero-mean `Y`, leaving `A X`.
pub fn project_gaussian(
    joint: &GaussianJoint,
    gamma: f64,
    version: ProjectionVersion,
) -> Result<ProjectionOutputs> {
    let spec = gaussian_latent(joint, gamma)?;
    let a = spec.x_map();
    let b = spec.y_map();
    let (u, v) = match version {
        ProjectionVersion::Map | ProjectionVersion::CondExp => {
            let k_wx = &a * joint.k_x() + &b * joint.k_xy().transpose();
            let k_wy = &a * joint.k_xy() + &b * joint.k_y();
            (
                solve_right(&k_wx, joint.k_x())?,
                solve_right(&k_wy, joint.k_y())?,
            )
        }
        ProjectionVersion::Marginal => (a.clone(), b.clone()),
    };
    Ok(ProjectionOutputs {
        version,
        u_of_x: FeatureMap::Linear {
            scaling: row_scaling(&u, &a),
            matrix: u,
        },
        v_of_y: FeatureMap::Linear {
            scaling: row_scaling(&v, &b),
            matrix: v,
        },
    })
}

fn argmax_labels(rows: &[Vec<f64>]) -> FeatureMap {
    let mut labels = Vec::with_capacity(rows.len());
    let mut ties = Vec::new();
    for (symbol, row) in rows.iter().enumerate() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut hits = row.iter().enumerate().filter(|(_, &p)| p >= max - TIE_TOL);
        let (label, _) = hits.next().expect("nonempty row");
        if hits.next().is_some() {
            ties.push(symbol);
        }
        labels.push(label);
    }
    FeatureMap::Labels { labels, ties }
}

/// MAP labels `argmax_w p(w | x_i)` for every source of a coupling.
pub fn map_features(c: &Coupling) -> Vec<FeatureMap> {
    (0..c.joint().num_sources())
        .map(|i| argmax_labels(&c.q_w_given_source(i)))
        .collect()
}

fn require_pair(c: &Coupling) -> Result<DiscreteJoint> {
    c.pair().ok_or_else(|| {
        Error::ShapeMismatch(format!(
            "two-source projection of a {}-source coupling",
            c.joint().num_sources()
        ))
    })
}

/// MAP features `u(x) = argmax_w p(w|x)`, `v(y) = argmax_w p(w|y)`; ties go
/// to the smallest label and are listed in the output.
pub fn project_discrete_map(c: &Coupling) -> Result<ProjectionOutputs> {
    require_pair(c)?;
    let mut maps = map_features(c).into_iter();
    Ok(ProjectionOutputs {
        version: ProjectionVersion::Map,
        u_of_x: maps.next().expect("source 0"),
        v_of_y: maps.next().expect("source 1"),
    })
}

/// Any rule on a discrete coupling. Conditional expectation and marginal
/// integration need `embedding[w]`, a real value for each latent label.
pub fn project_discrete(
    c: &Coupling,
    version: ProjectionVersion,
    embedding: Option<&[f64]>,
) -> Result<ProjectionOutputs> {
    if version == ProjectionVersion::Map {
        return project_discrete_map(c);
    }
    let pair = require_pair(c)?;
    let card_w = c.card_w();
    let embedding = match embedding {
        Some(e) if e.len() == card_w => e,
        _ => return Err(Error::MissingEmbedding { card_w }),
    };
    let mean = |row: &[f64]| row.iter().zip(embedding).map(|(p, e)| p * e).sum::<f64>();
    let (u, v) = match version {
        ProjectionVersion::CondExp => (
            c.q_w_given_x().iter().map(|r| mean(r)).collect(),
            c.q_w_given_y().iter().map(|r| mean(r)).collect(),
        ),
        _ => {
            let (px, py) = (pair.marginal_x(), pair.marginal_y());
            let cell_mean = |x: usize, y: usize| {
                (0..card_w)
                    .map(|w| c.q_w_given_xy(x, y, w) * embedding[w])
                    .sum::<f64>()
            };
            let u = (0..pair.card_x())
                .map(|x| (0..pair.card_y()).map(|y| py[y] * cell_mean(x, y)).sum())
                .collect();
            let v = (0..pair.card_y())
                .map(|y| (0..pair.card_x()).map(|x| px[x] * cell_mean(x, y)).sum())
                .collect();
            (u, v)
        }
    };
    Ok(ProjectionOutputs {
        version,
        u_of_x: FeatureMap::Values(u),
        v_of_y: FeatureMap::Values(v),
    })
}

/// `I(u(X); v(Y))` for label maps `u`, `v`.
pub fn feature_mutual_information(
    joint: &DiscreteJoint,
    u: &[usize],
    v: &[usize],
) -> Result<InfoValue> {
    if u.len() != joint.card_x() || v.len() != joint.card_y() {
        return Err(Error::ShapeMismatch("feature map length".into()));
    }
    let nu = u.iter().max().map_or(0, |m| m + 1);
    let nv = v.iter().max().map_or(0, |m| m + 1);
    let mut rows = vec![vec![0.0; nv]; nu];
    for x in 0..joint.card_x() {
        for y in 0..joint.card_y() {
            rows[u[x]][v[y]] += joint.p(x, y);
        }
    }
    let sum: f64 = rows.iter().flatten().sum();
    rows.iter_mut().flatten().for_each(|p| *p /= sum);
    Ok(mutual_information(&validate_discrete(&rows)?))
}

/// Symbol index of the pair `(b0 ⊕ b1, b1)`.
fn toy_symbol(b0: usize, b1: usize) -> usize {
    2 * (b0 ^ b1) + b1
}

/// The 4×4 binary example: `(X̃_1, Ỹ_1)` doubly symmetric with crossover
/// `a0`, `X̃_2`, `Ỹ_2` independent uniform bits, and
/// `X = (X̃_1 ⊕ X̃_2, X̃_2)`, `Y = (Ỹ_1 ⊕ Ỹ_2, Ỹ_2)`.
///
/// Symbol `s` of either source encodes the bit pair `(s / 2, s % 2)`.
pub fn toy_binary_example(a0: f64) -> Result<DiscreteJoint> {
    if !(0.0..=0.5).contains(&a0) {
        return Err(Error::A0OutOfRange(a0));
    }
    let mut rows = vec![vec![0.0; 4]; 4];
    for x1 in 0..2 {
        for x2 in 0..2 {
            for y1 in 0..2 {
                for y2 in 0..2 {
                    let flip = if x1 == y1 { 1.0 - a0 } else { a0 };
                    rows[toy_symbol(x1, x2)][toy_symbol(y1, y2)] += 0.5 * flip * 0.25;
                }
            }
        }
    }
    validate_discrete(&rows)
}

/// Covariance of the bit vector `(X_1, X_2, Y_1, Y_2)` for a 4×4 joint whose
/// symbols encode bit pairs as in [`toy_binary_example`].
pub fn toy_bit_covariance(joint: &DiscreteJoint) -> Result<DMatrix<f64>> {
    if joint.card_x() != 4 || joint.card_y() != 4 {
        return Err(Error::ShapeMismatch("expected a 4x4 joint".into()));
    }
    let bits = |x: usize, y: usize| [(x >> 1) & 1, x & 1, (y >> 1) & 1, y & 1].map(|b| b as f64);
    let mut mean = [0.0; 4];
    for x in 0..4 {
        for y in 0..4 {
            for (m, b) in mean.iter_mut().zip(bits(x, y)) {
                *m += joint.p(x, y) * b;
            }
        }
    }
    let mut cov = DMatrix::zeros(4, 4);
    for x in 0..4 {
        for y in 0..4 {
            let b = bits(x, y);
            for i in 0..4 {
                for j in 0..4 {
                    cov[(i, j)] += joint.p(x, y) * (b[i] - mean[i]) * (b[j] - mean[j]);
                }
            }
        }
    }
    Ok(cov)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::binary_entropy;
    use crate::gaussian_ci::mutual_info_rho;
    use crate::model::{validate_gaussian, DEFAULT_EPS_PD};
    use std::f64::consts::LN_2;

    fn diag_model() -> GaussianJoint {
        let eye = DMatrix::<f64>::identity(2, 2);
        let k_xy = DMatrix::from_diagonal(&DVector::from_row_slice(&[0.8, 0.5]));
        validate_gaussian(&eye, &eye, &k_xy, DEFAULT_EPS_PD).unwrap()
    }

    fn general_model() -> GaussianJoint {
        let k_x = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.0, -0.2, 0.1, -0.2, 1.5]);
        let k_y = DMatrix::from_row_slice(2, 2, &[1.0, 0.25, 0.25, 0.7]);
        let k_xy = DMatrix::from_row_slice(3, 2, &[0.7, 0.1, -0.2, 0.3, 0.2, 0.4]);
        validate_gaussian(&k_x, &k_y, &k_xy, DEFAULT_EPS_PD).unwrap()
    }

    #[test]
    fn latent_component_counts() {
        let j = diag_model();
        let total = mutual_info_rho(0.8).unwrap().nats() + mutual_info_rho(0.5).unwrap().nats();
        let empty = gaussian_latent(&j, total + 0.01).unwrap();
        assert_eq!(empty.k, 0);
        assert_eq!(empty.u_k.ncols(), 0);
        let one = gaussian_latent(&j, 0.4).unwrap();
        assert_eq!(one.k, 1);
        assert!((one.u_k.column(0) - DVector::from_row_slice(&[1.0, 0.0])).amax() < 1e-14);
        assert_eq!(gaussian_latent(&j, 0.0).unwrap().k, 2);
    }

    #[test]
    fn latent_meets_budget_and_objective() {
        let j = general_model();
        let total: f64 = cca_decompose(&j)
            .unwrap()
            .rho
            .iter()
            .map(|&r| mutual_info_rho(r).unwrap().nats())
            .sum();
        for frac in [0.0, 0.1, 0.35, 0.7, 1.2] {
            let gamma = frac * total;
            let spec = gaussian_latent(&j, gamma).unwrap();
            let (objective, residual) = spec.information(&j);
            assert!(
                (objective.nats() - spec.allocation.c_gamma.nats()).abs() < 1e-8,
                "gamma {gamma}: {} vs {}",
                objective.nats(),
                spec.allocation.c_gamma.nats()
            );
            assert!((residual.nats() - gamma.min(total)).abs() < 1e-8);
        }
    }

    #[test]
    fn cond_exp_on_diagonal_model() {
        let out = project_gaussian(&diag_model(), 0.4, ProjectionVersion::CondExp).unwrap();
        let m = out.u_of_x.matrix().unwrap();
        assert_eq!(m.shape(), (1, 2));
        assert!(m[(0, 0)] > 0.0 && m[(0, 1)].abs() < 1e-12);
        let FeatureMap::Linear { scaling, .. } = &out.u_of_x else {
            panic!()
        };
        assert!((scaling[0] - 1.8).abs() < 1e-12);
    }

    #[test]
    fn versions_agree_up_to_row_scaling() {
        let j = general_model();
        let map = project_gaussian(&j, 0.05, ProjectionVersion::Map).unwrap();
        let ce = project_gaussian(&j, 0.05, ProjectionVersion::CondExp).unwrap();
        let mg = project_gaussian(&j, 0.05, ProjectionVersion::Marginal).unwrap();
        let (a, b, c) = (
            map.u_of_x.matrix().unwrap(),
            ce.u_of_x.matrix().unwrap(),
            mg.u_of_x.matrix().unwrap(),
        );
        assert!((a - b).amax() < 1e-10);
        for i in 0..b.nrows() {
            let cos = b.row(i).dot(&c.row(i)) / (b.row(i).norm() * c.row(i).norm());
            assert!(cos >= 1.0 - 1e-10);
        }
    }

    #[test]
    fn empty_projection_above_total_information() {
        let out = project_gaussian(&diag_model(), 10.0, ProjectionVersion::CondExp).unwrap();
        assert_eq!(out.u_of_x.matrix().unwrap().nrows(), 0);
    }

    #[test]
    fn constant_latent_gives_constant_map() {
        let joint = validate_discrete(&[vec![0.3, 0.2], vec![0.1, 0.4]]).unwrap();
        let c = Coupling::constant(&joint.to_multi(), 3).unwrap();
        let out = project_discrete_map(&c).unwrap();
        assert_eq!(out.u_of_x.labels().unwrap(), &[0, 0]);
        assert_eq!(out.v_of_y.labels().unwrap(), &[0, 0]);
    }

    #[test]
    fn map_ties_are_flagged() {
        let joint = validate_discrete(&[vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap();
        let c = Coupling::new(joint.to_multi(), 2, vec![0.5; 8]).unwrap();
        let out = project_discrete_map(&c).unwrap();
        let FeatureMap::Labels { labels, ties } = out.u_of_x else {
            panic!()
        };
        assert_eq!(labels, vec![0, 0]);
        assert_eq!(ties, vec![0, 1]);
    }

    #[test]
    fn discrete_expectations_need_embedding() {
        let joint = validate_discrete(&[vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
        let c = Coupling::copy_all(&joint.to_multi(), 4).unwrap();
        assert!(matches!(
            project_discrete(&c, ProjectionVersion::CondExp, None),
            Err(Error::MissingEmbedding { card_w: 4 })
        ));
        let e = [0.0, 1.0, 2.0, 3.0];
        let ce = project_discrete(&c, ProjectionVersion::CondExp, Some(&e)).unwrap();
        let FeatureMap::Values(u) = ce.u_of_x else {
            panic!()
        };
        // x = 0 splits 0.4 / 0.1 between labels 0 and 1.
        assert!((u[0] - 0.2).abs() < 1e-12);
        let mg = project_discrete(&c, ProjectionVersion::Marginal, Some(&e)).unwrap();
        let FeatureMap::Values(u) = mg.u_of_x else {
            panic!()
        };
        assert!((u[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn toy_example_structure() {
        let joint = toy_binary_example(0.1).unwrap();
        let cov = toy_bit_covariance(&joint).unwrap();
        assert!((cov - DMatrix::<f64>::identity(4, 4) * 0.25).amax() < 1e-12);
        let expected = LN_2 - binary_entropy(0.1);
        assert!((mutual_information(&joint).nats() - expected).abs() < 1e-12);
        let flat = toy_binary_example(0.5).unwrap();
        assert!(mutual_information(&flat).nats() < 1e-15);
        assert!(toy_binary_example(0.7).is_err());
    }

    #[test]
    fn xor_features_recover_the_dependence() {
        let joint = toy_binary_example(0.1).unwrap();
        let xor = [0, 1, 1, 0];
        let leading = [0, 0, 1, 1];
        let good = feature_mutual_information(&joint, &xor, &xor)
            .unwrap()
            .nats();
        assert!((good - (LN_2 - binary_entropy(0.1))).abs() < 1e-12);
        let useless = feature_mutual_information(&joint, &leading, &leading)
            .unwrap()
            .nats();
        assert!(useless < 1e-15);
    }
}
