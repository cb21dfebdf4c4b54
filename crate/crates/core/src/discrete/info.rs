//! Exact information functionals on finite alphabets (nats, `0 ln 0 = 0`).

use crate::error::{Error, Result};
use crate::model::{DiscreteJoint, InfoValue};

use super::coupling::Coupling;

const SUM_TOL: f64 = 1e-12;

fn xlogx(p: f64) -> f64 {
    if p > 0.0 {
        p * p.ln()
    } else {
        0.0
    }
}

/// `-Σ p ln p` of an unnormalized nonnegative table.
pub(crate) fn raw_entropy(table: &[f64]) -> f64 {
    -table.iter().map(|&p| xlogx(p)).sum::<f64>()
}

/// Binary entropy `h_b(p)` in nats.
pub fn binary_entropy(p: f64) -> f64 {
    -xlogx(p) - xlogx(1.0 - p)
}

/// Shannon entropy of a pmf.
pub fn entropy(pmf: &[f64]) -> Result<InfoValue> {
    if pmf.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::NotNormalized { sum: f64::NAN });
    }
    let sum: f64 = pmf.iter().sum();
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(Error::NotNormalized { sum });
    }
    Ok(InfoValue::from_nats(raw_entropy(pmf)))
}

/// `I(X;Y) = Σ p(x,y) ln p(x,y) / (p(x) p(y))`.
pub fn mutual_information(joint: &DiscreteJoint) -> InfoValue {
    let px = joint.marginal_x();
    let py = joint.marginal_y();
    let mut total = 0.0;
    for (x, &pxv) in px.iter().enumerate() {
        for (y, &pyv) in py.iter().enumerate() {
            let p = joint.p(x, y);
            if p > 0.0 {
                total += p * (p / (pxv * pyv)).ln();
            }
        }
    }
    InfoValue::from_nats(total)
}

/// Residual dependence given the latent.
///
/// For two sources this is `I(X;Y|W)`; for `M` sources it is the conditional
/// total correlation `Σ H(X_i|W) - H(X_1…X_M|W)`. Computed directly as
/// `Σ p(x,w) ln [p(x,w) p(w)^{M-1} / Π_i p(x_i,w)]`.
pub fn conditional_mi_given_w(c: &Coupling) -> InfoValue {
    let joint = c.joint();
    let m = joint.num_sources();
    let card_w = c.card_w();
    let q_w = c.q_w();
    let source_w: Vec<Vec<f64>> = (0..m).map(|i| c.source_w_joint(i)).collect();
    let mut total = 0.0;
    for (cell, &p) in joint.pmf().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let symbols = joint.symbols(cell);
        for w in 0..card_w {
            let r = p * c.q(cell, w);
            if r <= 0.0 {
                continue;
            }
            let mut log_ratio = r.ln() + (m as f64 - 1.0) * q_w[w].ln();
            for (i, &s) in symbols.iter().enumerate() {
                log_ratio -= source_w[i][s * card_w + w].ln();
            }
            total += r * log_ratio;
        }
    }
    InfoValue::from_nats(total)
}

/// `I(X_1…X_M; W) = Σ p(x) q(w|x) ln q(w|x) / q(w)`.
pub fn coupling_information(c: &Coupling) -> InfoValue {
    let joint = c.joint();
    let q_w = c.q_w();
    let mut total = 0.0;
    for (cell, &p) in joint.pmf().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for (w, &qw) in q_w.iter().enumerate() {
            let q = c.q(cell, w);
            if q > 0.0 {
                total += p * q * (q / qw).ln();
            }
        }
    }
    InfoValue::from_nats(total)
}

/// Wyner common information of a doubly symmetric binary source with
/// crossover probability `a0`:
/// `1 + h_b(a0) - 2 h_b((1 - √(1-2a0))/2)` bits, returned in nats.
pub fn dsbs_wyner(a0: f64) -> Result<InfoValue> {
    if !(0.0..=0.5).contains(&a0) {
        return Err(Error::A0OutOfRange(a0));
    }
    let a1 = (1.0 - (1.0 - 2.0 * a0).sqrt()) / 2.0;
    // h_b in nats already carries the ln 2 factor of the bits formula.
    let value = std::f64::consts::LN_2 + binary_entropy(a0) - 2.0 * binary_entropy(a1);
    Ok(InfoValue::from_nats(value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_discrete;
    use std::f64::consts::LN_2;

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&[1.0, 0.0]).unwrap().nats(), 0.0);
        assert!((entropy(&[0.5, 0.5]).unwrap().nats() - LN_2).abs() < 1e-15);
        assert!((entropy(&[0.9, 0.1]).unwrap().nats() - 0.3250829733914482).abs() < 1e-12);
        assert!(entropy(&[0.5, 0.4]).is_err());
    }

    #[test]
    fn mutual_information_examples() {
        let product = validate_discrete(&[vec![0.12, 0.28], vec![0.18, 0.42]]).unwrap();
        assert!(mutual_information(&product).nats() < 1e-15);
        let dsbs = validate_discrete(&[vec![0.45, 0.05], vec![0.05, 0.45]]).unwrap();
        assert!((mutual_information(&dsbs).nats() - 0.3680642071684971).abs() < 1e-12);
        let copy = validate_discrete(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        assert!((mutual_information(&copy).nats() - LN_2).abs() < 1e-15);
    }

    #[test]
    fn conditional_mi_extremes() {
        let dsbs = validate_discrete(&[vec![0.45, 0.05], vec![0.05, 0.45]]).unwrap();
        let constant = Coupling::constant(&dsbs.to_multi(), 3).unwrap();
        let a = conditional_mi_given_w(&constant).nats();
        assert!((a - mutual_information(&dsbs).nats()).abs() < 1e-15);
        assert_eq!(coupling_information(&constant).nats(), 0.0);
        let copy = Coupling::copy_all(&dsbs.to_multi(), 4).unwrap();
        assert!(conditional_mi_given_w(&copy).nats().abs() < 1e-15);
        let h_xy = raw_entropy(dsbs.pmf());
        assert!((coupling_information(&copy).nats() - h_xy).abs() < 1e-14);
    }

    #[test]
    fn dsbs_examples() {
        assert!(dsbs_wyner(0.5).unwrap().nats().abs() < 1e-15);
        assert!((dsbs_wyner(0.0).unwrap().nats() - LN_2).abs() < 1e-15);
        assert!((dsbs_wyner(0.1).unwrap().nats() - 0.6049515261814267).abs() < 1e-12);
        assert!(dsbs_wyner(0.6).is_err());
    }

    #[test]
    fn wyner_construction_is_conditionally_independent() {
        // X = W ⊕ N1, Y = W ⊕ N2 with N_i ~ Bern(a1) reproduces DSBS(a0) and
        // attains the closed form.
        let a0: f64 = 0.1;
        let a1 = (1.0 - (1.0 - 2.0 * a0).sqrt()) / 2.0;
        let joint = validate_discrete(&[
            vec![0.5 * (1.0 - a0), 0.5 * a0],
            vec![0.5 * a0, 0.5 * (1.0 - a0)],
        ])
        .unwrap();
        let mut q = vec![0.0; 4 * 2];
        for x in 0..2 {
            for y in 0..2 {
                let mut post = [0.0; 2];
                for (w, slot) in post.iter_mut().enumerate() {
                    let fx = if x == w { 1.0 - a1 } else { a1 };
                    let fy = if y == w { 1.0 - a1 } else { a1 };
                    *slot = 0.5 * fx * fy;
                }
                let s = post[0] + post[1];
                q[(x * 2 + y) * 2] = post[0] / s;
                q[(x * 2 + y) * 2 + 1] = post[1] / s;
            }
        }
        let c = Coupling::new(joint.to_multi(), 2, q).unwrap();
        assert!(conditional_mi_given_w(&c).nats() < 1e-12);
        let expected = dsbs_wyner(a0).unwrap().nats();
        assert!((coupling_information(&c).nats() - expected).abs() < 1e-12);
    }
}
