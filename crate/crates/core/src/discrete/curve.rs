use crate::error::{Error, Result};
use crate::model::{DiscreteJoint, InfoValue};

use super::info::mutual_information;
use super::solver::{FrontierPoint, SolverOptions, Sweep};

/// One point of the discrete `C_γ` upper-bound curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub gamma: f64,
    /// Lower convex envelope of all attained points, evaluated at `gamma`.
    pub upper_bound: InfoValue,
    /// `I(X;Y|W)` of the (time-shared) coupling behind `upper_bound`.
    pub achieved_gamma: InfoValue,
}

/// Lower convex hull by constraint, as a monotone chain.
pub(crate) fn lower_hull(mut points: Vec<FrontierPoint>) -> Vec<FrontierPoint> {
    points.sort_by(|a, b| {
        a.constraint
            .total_cmp(&b.constraint)
            .then(a.objective.total_cmp(&b.objective))
    });
    let mut hull: Vec<FrontierPoint> = Vec::with_capacity(points.len());
    for p in points {
        if hull
            .last()
            .is_some_and(|last| last.constraint == p.constraint)
        {
            continue;
        }
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.constraint - a.constraint) * (p.objective - a.objective)
                - (b.objective - a.objective) * (p.constraint - a.constraint);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Evaluates `C_γ` upper bounds over an ascending grid.
///
/// All sweep points are pooled and the lower convex envelope is reported;
/// every envelope value is attained by time-sharing two couplings, so it is
/// still an upper bound.
pub fn ci_curve_discrete(
    joint: &DiscreteJoint,
    grid: &[f64],
    opts: &SolverOptions,
) -> Result<Vec<CurvePoint>> {
    if grid.iter().any(|g| !g.is_finite() || *g < 0.0) || grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::UnsortedGrid);
    }
    let info = mutual_information(joint).nats();
    let multi = joint.to_multi();
    let mut sweep = Sweep::new(&multi, opts)?;
    for &gamma in grid.iter().filter(|&&g| g < info) {
        sweep.bracket(gamma);
    }
    let frontier: Vec<FrontierPoint> = sweep
        .frontier()
        .into_iter()
        .filter(|p| p.constraint <= info)
        .collect();
    let hull = lower_hull(frontier);

    grid.iter()
        .map(|&gamma| {
            let last = hull.last().expect("constant coupling is always present");
            if gamma >= last.constraint {
                return Ok(CurvePoint {
                    gamma,
                    upper_bound: InfoValue::from_nats(last.objective),
                    achieved_gamma: InfoValue::from_nats(last.constraint),
                });
            }
            let first = hull[0];
            if gamma < first.constraint {
                if first.constraint <= gamma + opts.slack {
                    return Ok(CurvePoint {
                        gamma,
                        upper_bound: InfoValue::from_nats(first.objective),
                        achieved_gamma: InfoValue::from_nats(first.constraint),
                    });
                }
                return Err(Error::Infeasible {
                    target: gamma + opts.slack,
                    lambda_max: opts.lambda_max,
                    best_achieved: first.constraint,
                });
            }
            let j = hull.partition_point(|p| p.constraint <= gamma) - 1;
            let (a, b) = (hull[j], hull[j + 1]);
            let t = (gamma - a.constraint) / (b.constraint - a.constraint);
            Ok(CurvePoint {
                gamma,
                upper_bound: InfoValue::from_nats(a.objective + t * (b.objective - a.objective)),
                achieved_gamma: InfoValue::from_nats(gamma),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(constraint: f64, objective: f64) -> FrontierPoint {
        FrontierPoint {
            constraint,
            objective,
        }
    }

    #[test]
    fn hull_drops_points_above_envelope() {
        let hull = lower_hull(vec![
            pt(0.0, 1.0),
            pt(0.5, 0.8),
            pt(0.25, 0.4),
            pt(1.0, 0.0),
        ]);
        let xs: Vec<f64> = hull.iter().map(|p| p.constraint).collect();
        assert_eq!(xs, vec![0.0, 0.25, 1.0]);
    }

    #[test]
    fn hull_keeps_lowest_of_duplicates() {
        let hull = lower_hull(vec![pt(0.0, 1.0), pt(0.0, 0.7), pt(1.0, 0.0)]);
        assert_eq!(hull[0].objective, 0.7);
    }
}
