//! Lagrangian solver for relaxed Wyner common information on finite alphabets.
//!
//! For a multiplier `λ` the solver minimizes
//!
//! ```text
//! F_λ(q) = I(X_1…X_M; W) + λ (Σ_i H(X_i|W) - H(X_1…X_M|W))
//! ```
//!
//! over the conditional `q(w | x_1…x_M)`, one probability simplex per cell of
//! the joint table. Writing `r = p q` for the joint of sources and latent,
//!
//! ```text
//! ∂F_λ/∂r(x,w) = (1+λ) ln r(x,w) - (1 - λ(M-1)) ln r(w) - λ Σ_i ln r(x_i,w)
//! ```
//!
//! and each slice takes an exponentiated-gradient step
//! `q ← q · exp(-η ∂F_λ/∂r) / Z` with backtracking on `η`, so `F_λ` never
//! increases. At `η = 1/(1+λ)` the step is the alternating fixed-point map
//! `q ∝ (r(w)^{1-λ(M-1)} Π_i r(x_i,w)^λ)^{1/(1+λ)}`.
//!
//! Sweeping `λ` traces the lower convex envelope of the `(I(X;Y|W), I(XY;W))`
//! trade-off. Since the inner problem is nonconvex the result is only an upper
//! bound on `C_γ`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{DiscreteJoint, InfoValue, MultiDiscreteJoint};

use super::coupling::Coupling;
use super::info::{conditional_mi_given_w, coupling_information, raw_entropy};

const PROB_FLOOR: f64 = 1e-15;
const MAX_BACKTRACK: usize = 40;
const STEP_GROWTH: f64 = 2.0;
const MAX_STEP_SCALE: f64 = 4.0;

/// Tuning knobs for the Lagrangian sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Latent alphabet size; `None` uses `states + 1`.
    pub card_w: Option<usize>,
    /// Multipliers evaluated before refinement, ascending.
    pub lambdas: Vec<f64>,
    /// Random initializations per multiplier.
    pub restarts: usize,
    pub max_iter: usize,
    /// Stop once an accepted step lowers `F_λ` by less than `tol · (1 + |F_λ|)`.
    pub tol: f64,
    /// Accepted excess of `I(X;Y|W)` over the target.
    pub slack: f64,
    /// Largest multiplier tried when the grid has no feasible point.
    pub lambda_max: f64,
    /// Geometric bisection steps on `λ` around the feasibility boundary.
    pub refine_steps: usize,
    pub seed: u64,
    /// Limit on the joint alphabet size of multi-source problems.
    pub max_states: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            card_w: None,
            lambdas: geometric_grid(0.05, 50.0, 16),
            restarts: 8,
            max_iter: 20_000,
            tol: 1e-9,
            slack: 5e-3,
            lambda_max: 1e3,
            refine_steps: 6,
            seed: 0,
            max_states: 64,
        }
    }
}

/// `count` points spaced geometrically from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let ratio = (hi / lo).ln() / (count - 1) as f64;
            (0..count).map(|i| lo * (ratio * i as f64).exp()).collect()
        }
    }
}

/// Where the selected coupling came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateSource {
    /// A Lagrangian run.
    Lagrangian,
    /// `W` constant: exact whenever the target is at least `I(X;Y)`.
    Constant,
    /// `W` equal to the source tuple: always meets a zero target.
    CopyAll,
}

/// Solver telemetry. `objective` is an upper bound on `C_γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// `I(X;Y|W)` attained by the returned coupling.
    pub achieved_gamma: InfoValue,
    /// `I(X,Y;W)` attained by the returned coupling.
    pub objective: InfoValue,
    pub lambda: f64,
    /// Iterations of the selected run.
    pub iterations: usize,
    /// Restart index of the selected run.
    pub restart: usize,
    /// Inner optimizations performed over the whole sweep.
    pub restarts_used: usize,
    /// Distinct multipliers evaluated.
    pub lambdas_evaluated: usize,
    pub converged: bool,
    pub source: CandidateSource,
}

/// Outcome of one inner minimization of `F_λ`.
#[derive(Debug, Clone)]
pub struct LagrangianRun {
    pub lambda: f64,
    pub restart: usize,
    /// Conditional table over all cells, `cell * card_w + w`.
    pub q: Vec<f64>,
    pub objective: f64,
    pub constraint: f64,
    pub lagrangian: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `F_λ` after every accepted step (first entry is the initial point),
    /// when requested.
    pub trace: Option<Vec<f64>>,
}

struct Problem {
    joint: MultiDiscreteJoint,
    m: usize,
    card_w: usize,
    /// Cells of positive mass.
    cells: Vec<usize>,
    p: Vec<f64>,
    /// `symbols[a * m + i]`: symbol of source `i` in active cell `a`,
    /// pre-offset into the concatenated per-source marginal array.
    symbols: Vec<usize>,
    marginal_len: usize,
    h_joint: f64,
}

struct Eval {
    objective: f64,
    constraint: f64,
    lagrangian: f64,
}

struct Scratch {
    r_w: Vec<f64>,
    r_sw: Vec<f64>,
    log_r_w: Vec<f64>,
    log_r_sw: Vec<f64>,
}

impl Problem {
    fn new(joint: &MultiDiscreteJoint, card_w: Option<usize>) -> Result<Self> {
        let states = joint.num_states();
        let card_w = card_w.unwrap_or(Coupling::max_card_w(states));
        if card_w == 0 || card_w > Coupling::max_card_w(states) {
            return Err(Error::InvalidOption(format!(
                "card_w = {card_w} outside 1..={}",
                Coupling::max_card_w(states)
            )));
        }
        let m = joint.num_sources();
        let offsets: Vec<usize> = joint
            .cards()
            .iter()
            .scan(0, |acc, &c| {
                let o = *acc;
                *acc += c;
                Some(o)
            })
            .collect();
        let marginal_len: usize = joint.cards().iter().sum();
        let mut cells = Vec::new();
        let mut p = Vec::new();
        let mut symbols = Vec::new();
        for (cell, &mass) in joint.pmf().iter().enumerate() {
            if mass > 0.0 {
                cells.push(cell);
                p.push(mass);
                symbols.extend(
                    joint
                        .symbols(cell)
                        .iter()
                        .zip(&offsets)
                        .map(|(s, o)| (s + o) * card_w),
                );
            }
        }
        Ok(Problem {
            joint: joint.clone(),
            m,
            card_w,
            h_joint: raw_entropy(&p),
            cells,
            p,
            symbols,
            marginal_len,
        })
    }

    fn scratch(&self) -> Scratch {
        Scratch {
            r_w: vec![0.0; self.card_w],
            r_sw: vec![0.0; self.marginal_len * self.card_w],
            log_r_w: vec![0.0; self.card_w],
            log_r_sw: vec![0.0; self.marginal_len * self.card_w],
        }
    }

    /// Evaluates `F_λ` and leaves the marginals (and their logs) in `s`.
    fn evaluate(&self, q: &[f64], lambda: f64, s: &mut Scratch) -> Eval {
        let k = self.card_w;
        s.r_w.iter_mut().for_each(|v| *v = 0.0);
        s.r_sw.iter_mut().for_each(|v| *v = 0.0);
        let mut h_xw = 0.0;
        for (a, &pa) in self.p.iter().enumerate() {
            let qa = &q[a * k..(a + 1) * k];
            let syms = &self.symbols[a * self.m..(a + 1) * self.m];
            for (w, &qv) in qa.iter().enumerate() {
                let r = pa * qv;
                h_xw -= r * r.ln();
                s.r_w[w] += r;
                for &base in syms {
                    s.r_sw[base + w] += r;
                }
            }
        }
        let mut h_w = 0.0;
        for (l, &r) in s.log_r_w.iter_mut().zip(&s.r_w) {
            *l = r.ln();
            h_w -= r * *l;
        }
        let mut h_sw = 0.0;
        for (l, &r) in s.log_r_sw.iter_mut().zip(&s.r_sw) {
            if r > 0.0 {
                *l = r.ln();
                h_sw -= r * *l;
            } else {
                *l = 0.0;
            }
        }
        let objective = h_w + self.h_joint - h_xw;
        let constraint = h_sw - (self.m as f64 - 1.0) * h_w - h_xw;
        Eval {
            objective,
            constraint,
            lagrangian: objective + lambda * constraint,
        }
    }

    /// Exponentiated-gradient step of size `eta` from `q` into `out`, using
    /// marginals already in `s`.
    fn step(&self, q: &[f64], lambda: f64, eta: f64, s: &Scratch, out: &mut [f64]) {
        let k = self.card_w;
        let coef_w = 1.0 - lambda * (self.m as f64 - 1.0);
        for a in 0..self.p.len() {
            let qa = &q[a * k..(a + 1) * k];
            let oa = &mut out[a * k..(a + 1) * k];
            let syms = &self.symbols[a * self.m..(a + 1) * self.m];
            let mut max_exp = f64::NEG_INFINITY;
            for w in 0..k {
                let mut g = (1.0 + lambda) * qa[w].ln() - coef_w * s.log_r_w[w];
                for &base in syms {
                    g -= lambda * s.log_r_sw[base + w];
                }
                let e = qa[w].ln() - eta * g;
                oa[w] = e;
                max_exp = max_exp.max(e);
            }
            let mut z = 0.0;
            for v in oa.iter_mut() {
                *v = (*v - max_exp).exp();
                z += *v;
            }
            let mut z2 = 0.0;
            for v in oa.iter_mut() {
                *v = (*v / z).max(PROB_FLOOR);
                z2 += *v;
            }
            oa.iter_mut().for_each(|v| *v /= z2);
        }
    }

    fn random_init(&self, seed: u64, restart: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(restart as u64);
        let k = self.card_w;
        let mut q: Vec<f64> = (0..self.p.len() * k)
            .map(|_| Exp1.sample(&mut rng))
            .map(|v: f64| v.max(PROB_FLOOR))
            .collect();
        for slice in q.chunks_mut(k) {
            let z: f64 = slice.iter().sum();
            slice.iter_mut().for_each(|v| *v /= z);
        }
        q
    }

    /// Expands an active-cell table to the full joint table; cells without
    /// mass get a uniform conditional.
    fn full_table(&self, q: &[f64]) -> Vec<f64> {
        let k = self.card_w;
        let mut full = vec![1.0 / k as f64; self.joint.num_states() * k];
        for (a, &cell) in self.cells.iter().enumerate() {
            full[cell * k..(cell + 1) * k].copy_from_slice(&q[a * k..(a + 1) * k]);
        }
        full
    }

    fn run(
        &self,
        lambda: f64,
        restart: usize,
        opts: &SolverOptions,
        record_trace: bool,
    ) -> LagrangianRun {
        let mut q = self.random_init(opts.seed, restart);
        let mut next = vec![0.0; q.len()];
        let mut s = self.scratch();
        let mut trial = self.scratch();
        let mut current = self.evaluate(&q, lambda, &mut s);
        let mut trace = record_trace.then(|| vec![current.lagrangian]);
        let base_eta = 1.0 / (1.0 + lambda);
        let mut eta = base_eta;
        let mut converged = false;
        let mut iterations = 0;

        while iterations < opts.max_iter {
            iterations += 1;
            let mut accepted = None;
            for _ in 0..MAX_BACKTRACK {
                self.step(&q, lambda, eta, &s, &mut next);
                let e = self.evaluate(&next, lambda, &mut trial);
                if e.lagrangian <= current.lagrangian {
                    accepted = Some(e);
                    break;
                }
                eta *= 0.5;
            }
            let Some(e) = accepted else {
                // No descent at any step size: stationary to machine precision.
                converged = true;
                break;
            };
            let decrease = current.lagrangian - e.lagrangian;
            std::mem::swap(&mut q, &mut next);
            std::mem::swap(&mut s, &mut trial);
            current = e;
            if let Some(t) = trace.as_mut() {
                t.push(current.lagrangian);
            }
            if decrease <= opts.tol * (1.0 + current.lagrangian.abs()) {
                converged = true;
                break;
            }
            eta = (eta * STEP_GROWTH).min(MAX_STEP_SCALE * base_eta);
        }
        LagrangianRun {
            lambda,
            restart,
            q: self.full_table(&q),
            objective: current.objective.max(0.0),
            constraint: current.constraint.max(0.0),
            lagrangian: current.lagrangian,
            iterations,
            converged,
            trace,
        }
    }
}

/// Minimizes `F_λ` once from the random start of `restart`.
///
/// Exposed for diagnostics; [`solve_relaxed_wyner`] drives it over a sweep.
pub fn minimize_lagrangian(
    joint: &MultiDiscreteJoint,
    lambda: f64,
    restart: usize,
    opts: &SolverOptions,
    record_trace: bool,
) -> Result<LagrangianRun> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidOption(format!("lambda = {lambda}")));
    }
    let problem = Problem::new(joint, opts.card_w)?;
    Ok(problem.run(lambda, restart, opts, record_trace))
}

struct LambdaRuns {
    lambda: f64,
    runs: Vec<LagrangianRun>,
    /// Index of the run with the smallest `F_λ`.
    best: usize,
}

impl LambdaRuns {
    fn constraint(&self) -> f64 {
        self.runs[self.best].constraint
    }
}

/// Cell permutation into a canonical labeling: the symbols of each source are
/// sorted by the descending multiset of cell masses they carry. Relabeled
/// inputs then share random starts, up to ties between symbols whose mass
/// multisets coincide.
fn canonical_cells(joint: &MultiDiscreteJoint) -> Vec<usize> {
    let cards = joint.cards();
    let mut keys: Vec<Vec<Vec<f64>>> = cards.iter().map(|&c| vec![Vec::new(); c]).collect();
    for (cell, &p) in joint.pmf().iter().enumerate() {
        for (i, &s) in joint.symbols(cell).iter().enumerate() {
            keys[i][s].push(p);
        }
    }
    let new_label: Vec<Vec<usize>> = keys
        .into_iter()
        .map(|mut ks| {
            for k in ks.iter_mut() {
                k.sort_by(|a, b| b.total_cmp(a));
            }
            let mut order: Vec<usize> = (0..ks.len()).collect();
            order.sort_by(|&a, &b| {
                ks[a]
                    .iter()
                    .zip(&ks[b])
                    .map(|(x, y)| y.total_cmp(x))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            let mut label = vec![0; order.len()];
            for (new, &old) in order.iter().enumerate() {
                label[old] = new;
            }
            label
        })
        .collect();
    (0..joint.num_states())
        .map(|cell| {
            let mapped: Vec<usize> = joint
                .symbols(cell)
                .iter()
                .enumerate()
                .map(|(i, &s)| new_label[i][s])
                .collect();
            joint.cell(&mapped)
        })
        .collect()
}

/// Cache of inner runs keyed by multiplier.
pub(crate) struct Sweep<'a> {
    /// The caller's joint; `problem` works on its canonical relabeling.
    joint: MultiDiscreteJoint,
    to_canonical: Vec<usize>,
    problem: Problem,
    opts: &'a SolverOptions,
    evaluated: Vec<LambdaRuns>,
}

/// A `(constraint, objective)` pair attained by a concrete coupling.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FrontierPoint {
    pub constraint: f64,
    pub objective: f64,
}

impl<'a> Sweep<'a> {
    pub(crate) fn new(joint: &MultiDiscreteJoint, opts: &'a SolverOptions) -> Result<Self> {
        if opts.restarts == 0 || opts.max_iter == 0 {
            return Err(Error::InvalidOption(
                "restarts and max_iter must be positive".into(),
            ));
        }
        if opts.lambdas.iter().any(|l| !(l.is_finite() && *l > 0.0))
            || opts.lambdas.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::InvalidOption(
                "lambda grid must be positive and strictly ascending".into(),
            ));
        }
        if !(opts.slack >= 0.0 && opts.tol > 0.0) {
            return Err(Error::InvalidOption("slack and tol".into()));
        }
        let to_canonical = canonical_cells(joint);
        Ok(Sweep {
            problem: Problem::new(&joint.permute_cells(&to_canonical), opts.card_w)?,
            joint: joint.clone(),
            to_canonical,
            opts,
            evaluated: Vec::new(),
        })
    }

    fn eval(&mut self, lambda: f64) -> usize {
        if let Some(i) = self.evaluated.iter().position(|e| e.lambda == lambda) {
            return i;
        }
        let problem = &self.problem;
        let opts = self.opts;
        let runs: Vec<LagrangianRun> = (0..opts.restarts)
            .into_par_iter()
            .map(|restart| problem.run(lambda, restart, opts, false))
            .collect();
        let mut best = 0;
        for (i, r) in runs.iter().enumerate() {
            if r.lagrangian < runs[best].lagrangian {
                best = i;
            }
        }
        self.evaluated.push(LambdaRuns { lambda, runs, best });
        self.evaluated.len() - 1
    }

    fn eval_grid(&mut self) {
        for &lambda in &self.opts.lambdas.clone() {
            self.eval(lambda);
        }
    }

    /// Narrows in on the smallest multiplier whose best run meets `target`.
    fn refine(&mut self, target: f64) {
        self.eval_grid();
        let feasible = |s: &Self, i: usize| s.evaluated[i].constraint() <= target;
        let mut order: Vec<usize> = (0..self.evaluated.len()).collect();
        order.sort_by(|&a, &b| {
            self.evaluated[a]
                .lambda
                .total_cmp(&self.evaluated[b].lambda)
        });
        let mut hi = order.iter().copied().find(|&i| feasible(self, i));
        if hi.is_none() {
            let mut lambda = order.last().map_or(1.0, |&i| self.evaluated[i].lambda) * 2.0;
            while lambda <= self.opts.lambda_max {
                let i = self.eval(lambda);
                if feasible(self, i) {
                    hi = Some(i);
                    break;
                }
                lambda *= 2.0;
            }
        }
        let Some(hi) = hi else { return };
        let mut hi_lambda = self.evaluated[hi].lambda;
        let Some(mut lo_lambda) = self
            .evaluated
            .iter()
            .map(|e| e.lambda)
            .filter(|&l| l < hi_lambda)
            .max_by(f64::total_cmp)
        else {
            return;
        };
        for _ in 0..self.opts.refine_steps {
            let mid = (lo_lambda * hi_lambda).sqrt();
            let i = self.eval(mid);
            if feasible(self, i) {
                hi_lambda = mid;
            } else {
                lo_lambda = mid;
            }
        }
    }

    fn runs(&self) -> impl Iterator<Item = &LagrangianRun> {
        let mut order: Vec<&LambdaRuns> = self.evaluated.iter().collect();
        order.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        order.into_iter().flat_map(|e| e.runs.iter())
    }

    fn any_converged(&self) -> bool {
        self.runs().any(|r| r.converged)
    }

    /// Every point attained so far, including the two trivial couplings.
    pub(crate) fn frontier(&self) -> Vec<FrontierPoint> {
        let mut points: Vec<FrontierPoint> = self
            .runs()
            .map(|r| FrontierPoint {
                constraint: r.constraint,
                objective: r.objective,
            })
            .collect();
        if let Ok(c) = Coupling::constant(&self.problem.joint, self.problem.card_w) {
            points.push(FrontierPoint {
                constraint: conditional_mi_given_w(&c).nats(),
                objective: 0.0,
            });
        }
        if let Ok(c) = Coupling::copy_all(&self.problem.joint, self.problem.card_w) {
            points.push(FrontierPoint {
                constraint: 0.0,
                objective: coupling_information(&c).nats(),
            });
        }
        points
    }

    fn total_runs(&self) -> usize {
        self.evaluated.iter().map(|e| e.runs.len()).sum()
    }

    pub(crate) fn solve(&mut self, gamma: f64) -> Result<(Coupling, SolveReport)> {
        let target = gamma + self.opts.slack;
        self.refine(gamma);

        // Exact penalty: excess over `gamma` costs `lambda_max` per nat, which
        // is steeper than the trade-off curve anywhere the sweep reaches.
        let penalty = self.opts.lambda_max;
        let score =
            |constraint: f64, objective: f64| objective + penalty * (constraint - gamma).max(0.0);
        let mut best: Option<(&LagrangianRun, f64)> = None;
        for run in self.runs() {
            let sc = score(run.constraint, run.objective);
            if run.constraint <= target && best.is_none_or(|(_, b)| sc < b) {
                best = Some((run, sc));
            }
        }
        let best_achieved = self
            .runs()
            .map(|r| r.constraint)
            .fold(f64::INFINITY, f64::min);
        let selected = best.map(|(run, _)| run.clone());

        let joint = &self.joint;
        let card_w = self.problem.card_w;
        let mut candidates: Vec<(Coupling, CandidateSource, Option<LagrangianRun>)> = Vec::new();
        if let Some(run) = selected {
            let mut q = vec![0.0; run.q.len()];
            for (cell, &canon) in self.to_canonical.iter().enumerate() {
                q[cell * card_w..(cell + 1) * card_w]
                    .copy_from_slice(&run.q[canon * card_w..(canon + 1) * card_w]);
            }
            candidates.push((
                Coupling::new(joint.clone(), card_w, q)?,
                CandidateSource::Lagrangian,
                Some(run),
            ));
        }
        if let Ok(c) = Coupling::constant(joint, card_w) {
            candidates.push((c, CandidateSource::Constant, None));
        }
        if let Ok(c) = Coupling::copy_all(joint, card_w) {
            candidates.push((c, CandidateSource::CopyAll, None));
        }

        let mut chosen: Option<(Coupling, CandidateSource, Option<LagrangianRun>, f64, f64)> = None;
        for (c, source, run) in candidates {
            let achieved = conditional_mi_given_w(&c).nats();
            let objective = coupling_information(&c).nats();
            if achieved > target {
                continue;
            }
            if chosen
                .as_ref()
                .is_none_or(|ch| score(achieved, objective) < score(ch.3, ch.4))
            {
                chosen = Some((c, source, run, achieved, objective));
            }
        }
        let Some((coupling, source, run, achieved, objective)) = chosen else {
            return Err(Error::Infeasible {
                target,
                lambda_max: self.opts.lambda_max,
                best_achieved,
            });
        };
        if source == CandidateSource::Lagrangian && !self.any_converged() {
            return Err(Error::NoConvergence {
                what: "relaxed Wyner solver",
                iterations: self.opts.max_iter,
            });
        }
        let report = SolveReport {
            achieved_gamma: InfoValue::from_nats(achieved),
            objective: InfoValue::from_nats(objective),
            lambda: run.as_ref().map_or(0.0, |r| r.lambda),
            iterations: run.as_ref().map_or(0, |r| r.iterations),
            restart: run.as_ref().map_or(0, |r| r.restart),
            restarts_used: self.total_runs(),
            lambdas_evaluated: self.evaluated.len(),
            converged: run.as_ref().is_none_or(|r| r.converged),
            source,
        };
        Ok((coupling, report))
    }

    /// Extends the sweep so that `gamma` is bracketed by attained points.
    pub(crate) fn bracket(&mut self, gamma: f64) {
        self.refine(gamma);
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidGamma(gamma))
    }
}

/// Upper-bounds `C_γ(X;Y)` and returns the coupling that attains the bound.
///
/// The returned coupling always satisfies `I(X;Y|W) ≤ gamma + opts.slack`.
pub fn solve_relaxed_wyner(
    joint: &DiscreteJoint,
    gamma: f64,
    opts: &SolverOptions,
) -> Result<(Coupling, SolveReport)> {
    check_gamma(gamma)?;
    Sweep::new(&joint.to_multi(), opts)?.solve(gamma)
}

/// Multi-source version: the constraint is the conditional total correlation
/// `Σ H(X_i|W) - H(X_1…X_M|W) ≤ γ`.
pub fn solve_relaxed_wyner_multi(
    joint: &MultiDiscreteJoint,
    gamma: f64,
    opts: &SolverOptions,
) -> Result<(Coupling, SolveReport)> {
    check_gamma(gamma)?;
    if joint.num_states() > opts.max_states {
        return Err(Error::TooLarge {
            states: joint.num_states(),
            max_states: opts.max_states,
        });
    }
    Sweep::new(joint, opts)?.solve(gamma)
}
