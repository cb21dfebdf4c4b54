//! Relaxed Wyner common information on finite alphabets.

mod coupling;
mod curve;
mod info;
mod solver;

pub use coupling::Coupling;
pub use curve::{ci_curve_discrete, CurvePoint};
pub use info::{
    binary_entropy, conditional_mi_given_w, coupling_information, dsbs_wyner, entropy,
    mutual_information,
};
pub use solver::{
    geometric_grid, minimize_lagrangian, solve_relaxed_wyner, solve_relaxed_wyner_multi,
    CandidateSource, LagrangianRun, SolveReport, SolverOptions,
};
