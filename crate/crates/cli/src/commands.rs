use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use cica_core::discrete::entropy;
use cica_core::{
    canonical_matrix, cca_decompose, ci_curve, estimate_gaussian, feature_mutual_information,
    gaussian_latent, map_features, mutual_info_rho, mutual_information, project_gaussian,
    solve_relaxed_wyner, solve_relaxed_wyner_multi, toy_binary_example, toy_bit_covariance,
    validate_gaussian, Coupling, Error, FeatureMap, GaussianJoint, ProjectionVersion, SolveReport,
    SolverOptions, DEFAULT_EPS_PD,
};
use nalgebra::DMatrix;

use crate::input::{read_covariance, read_pmf, read_samples, to_rows, CovarianceBlocks};
use crate::report::*;
use crate::{
    CcaArgs, Cli, CliError, Command, DiscreteArgs, GaussianArgs, ModelSource, ToyArgs, VersionArg,
};

struct Context {
    meta: Option<Meta>,
}

/// Runs one parsed invocation. `argv` is recorded in report metadata.
pub fn run(cli: &Cli, argv: &[String]) -> Result<(), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?;
    let meta = (!cli.no_meta).then(|| Meta {
        tool: "cica".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        argv: argv.to_vec(),
        timestamp_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        threads: pool.current_num_threads(),
    });
    let ctx = Context { meta };
    pool.install(|| match &cli.command {
        Command::Cca(a) => cmd_cca(&ctx, a),
        Command::Gaussian(a) => cmd_gaussian(&ctx, a),
        Command::Discrete(a) => cmd_discrete(&ctx, a),
        Command::Toy(a) => cmd_toy(&ctx, a),
    })
}

type Samples = (DMatrix<f64>, DMatrix<f64>);

fn load_model(source: &ModelSource) -> Result<(GaussianJoint, Option<Samples>), CliError> {
    match (&source.cov, &source.x, &source.y) {
        (Some(cov), None, None) => Ok((read_covariance(cov)?, None)),
        (None, Some(x), Some(y)) => {
            let xs = read_samples(x)?;
            let ys = read_samples(y)?;
            let joint = estimate_gaussian(&xs, &ys, source.ridge)?;
            Ok((joint, Some((xs, ys))))
        }
        _ => Err(CliError::Parse("give either --x and --y, or --cov".into())),
    }
}

fn centered_features(samples: &DMatrix<f64>, map: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let mean = samples.row_mean();
    let mut centered = samples.clone();
    for mut row in centered.row_iter_mut() {
        row -= &mean;
    }
    to_rows(&(centered * map.transpose()))
}

fn cmd_cca(ctx: &Context, args: &CcaArgs) -> Result<(), CliError> {
    let (joint, samples) = load_model(&args.source)?;
    let basis = cca_decompose(&joint)?;
    let x_map = basis.x_map(args.k)?;
    let y_map = basis.y_map(args.k)?;
    let clamped = canonical_matrix(&joint)?.clamped;
    let mut warnings = Vec::new();
    if clamped > 0 {
        warnings.push(format!(
            "{clamped} canonical correlation(s) clamped below 1"
        ));
    }
    let samples = samples.map(|(xs, ys)| SampleProjections {
        u: centered_features(&xs, &x_map),
        v: centered_features(&ys, &y_map),
    });
    let report = CcaReport {
        command: "cca".into(),
        units: Units::Nats,
        meta: ctx.meta.clone(),
        model: CovarianceBlocks::from_joint(&joint),
        k: args.k,
        rho: basis.rho.clone(),
        u_k: to_rows(&basis.u_k(args.k)?),
        v_k: to_rows(&basis.v_k(args.k)?),
        x_map: to_rows(&x_map),
        y_map: to_rows(&y_map),
        clamped_singular_values: clamped,
        samples,
        warnings,
    };
    write_report(&args.out, &report)
}

fn budget(units: Units, gamma: f64) -> Result<f64, CliError> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::InvalidGamma(gamma).into());
    }
    Ok(units.to_nats(gamma))
}

fn linear_parts(map: &FeatureMap) -> (Vec<Vec<f64>>, Vec<f64>) {
    match map {
        FeatureMap::Linear { matrix, scaling } => (to_rows(matrix), scaling.clone()),
        _ => unreachable!("Gaussian projections are linear"),
    }
}

fn version_of(v: VersionArg) -> ProjectionVersion {
    match v {
        VersionArg::Map => ProjectionVersion::Map,
        VersionArg::CondExp => ProjectionVersion::CondExp,
        VersionArg::Marginal => ProjectionVersion::Marginal,
    }
}

fn cmd_gaussian(ctx: &Context, args: &GaussianArgs) -> Result<(), CliError> {
    let (joint, _) = load_model(&args.source)?;
    let units = args.units;
    let gamma = budget(units, args.gamma)?;
    let version = version_of(args.version);
    let spec = gaussian_latent(&joint, gamma)?;
    let projection = project_gaussian(&joint, gamma, version)?;
    let rho = spec.basis.rho.clone();
    let total: f64 = rho
        .iter()
        .map(|&r| mutual_info_rho(r).map(|i| i.nats()))
        .sum::<Result<f64, _>>()?;
    let mut warnings = Vec::new();
    if spec.k == 0 {
        warnings.push(
            "gamma is at least the total information: no components, empty projection".into(),
        );
    }
    let (u, scaling_u) = linear_parts(&projection.u_of_x);
    let (v, scaling_v) = linear_parts(&projection.v_of_y);
    let report = GaussianReport {
        command: "gaussian".into(),
        units,
        meta: ctx.meta.clone(),
        model: CovarianceBlocks::from_joint(&joint),
        gamma: args.gamma,
        version: version.name().into(),
        rho,
        total_information: units.from_nats(total),
        c_gamma: units.from_nats(spec.allocation.c_gamma.nats()),
        k: spec.k,
        gamma_i: spec
            .allocation
            .gamma_i
            .iter()
            .map(|&g| units.from_nats(g))
            .collect(),
        water_level: units.from_nats(spec.allocation.water_level),
        noise_variance: spec.noise_cov.diagonal().iter().copied().collect(),
        projection: LinearProjection {
            u,
            v,
            scaling_u,
            scaling_v,
        },
        warnings,
    };
    if let Some(path) = &args.curve {
        write_curve(path, &joint, total, args.curve_points, units)?;
    }
    write_report(&args.out, &report)
}

fn write_curve(
    path: &Path,
    joint: &GaussianJoint,
    total: f64,
    points: usize,
    units: Units,
) -> Result<(), CliError> {
    if points < 2 {
        return Err(CliError::Validation(
            "--curve-points must be at least 2".into(),
        ));
    }
    let grid: Vec<f64> = (0..points)
        .map(|i| total * i as f64 / (points - 1) as f64)
        .collect();
    let curve = ci_curve(joint, &grid)?;
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    let io = |e: csv::Error| CliError::io(path, e);
    w.write_record(["gamma", "c_gamma", "k"]).map_err(io)?;
    for p in curve {
        w.write_record([
            units.from_nats(p.gamma).to_string(),
            units.from_nats(p.c_gamma.nats()).to_string(),
            p.k.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn solver_options(seed: u64, restarts: usize, card_w: Option<usize>) -> SolverOptions {
    SolverOptions {
        seed,
        restarts,
        card_w,
        ..SolverOptions::default()
    }
}

fn telemetry(r: &SolveReport, opts: &SolverOptions) -> SolverTelemetry {
    SolverTelemetry {
        source: format!("{:?}", r.source).to_lowercase(),
        lambda: r.lambda,
        iterations: r.iterations,
        restart: r.restart,
        restarts_used: r.restarts_used,
        lambdas_evaluated: r.lambdas_evaluated,
        converged: r.converged,
        seed: opts.seed,
        restarts: opts.restarts,
        slack: opts.slack,
    }
}

/// Wraps solver errors with a JSON dump of the configuration that failed.
fn solver_failure(error: Error, gamma: f64, opts: &SolverOptions) -> CliError {
    match error {
        Error::NoConvergence { .. } | Error::Infeasible { .. } => {
            let dump = serde_json::json!({
                "error": error.to_string(),
                "gamma_nats": gamma,
                "seed": opts.seed,
                "restarts": opts.restarts,
                "max_iter": opts.max_iter,
                "tol": opts.tol,
                "slack": opts.slack,
                "lambda_max": opts.lambda_max,
                "lambdas": opts.lambdas,
                "card_w": opts.card_w,
            });
            CliError::Solver {
                error,
                telemetry: serde_json::to_string_pretty(&dump).expect("telemetry serializes"),
            }
        }
        other => other.into(),
    }
}

fn map_feature(map: &FeatureMap) -> MapFeature {
    match map {
        FeatureMap::Labels { labels, ties } => MapFeature {
            labels: labels.clone(),
            ties: ties.clone(),
        },
        _ => unreachable!("MAP features are labels"),
    }
}

fn solver_warnings(r: &SolveReport, features: &[MapFeature]) -> Vec<String> {
    let mut warnings = Vec::new();
    if !r.converged {
        warnings.push("selected run stopped at the iteration cap".into());
    }
    for (i, f) in features.iter().enumerate() {
        if !f.ties.is_empty() {
            warnings.push(format!("source {i}: MAP ties at symbols {:?}", f.ties));
        }
    }
    warnings
}

fn cmd_discrete(ctx: &Context, args: &DiscreteArgs) -> Result<(), CliError> {
    let joint = read_pmf(&args.pmf)?;
    let units = args.units;
    let gamma = budget(units, args.gamma)?;
    let pair = joint.to_pair();
    if !args.multi && pair.is_none() {
        return Err(CliError::Validation(format!(
            "pmf has {} index columns; pass --multi for more than two sources",
            joint.num_sources()
        )));
    }
    let opts = solver_options(args.seed, args.restarts, args.card_w);
    let solved = match (&pair, args.multi) {
        (Some(p), false) => solve_relaxed_wyner(p, gamma, &opts),
        _ => solve_relaxed_wyner_multi(&joint, gamma, &opts),
    };
    let (coupling, solve) = solved.map_err(|e| solver_failure(e, gamma, &opts))?;

    let dependence = match &pair {
        Some(p) => mutual_information(p).nats(),
        None => {
            let marginals: f64 = (0..joint.num_sources())
                .map(|i| entropy(&joint.marginal(i)).map(|h| h.nats()))
                .sum::<Result<f64, _>>()?;
            marginals - entropy(joint.pmf())?.nats()
        }
    };
    let features: Vec<MapFeature> = map_features(&coupling).iter().map(map_feature).collect();
    let feature_information = match &pair {
        Some(p) => Some(units.from_nats(
            feature_mutual_information(p, &features[0].labels, &features[1].labels)?.nats(),
        )),
        None => None,
    };
    let report = DiscreteReport {
        command: "discrete".into(),
        units,
        value_is_upper_bound: true,
        meta: ctx.meta.clone(),
        cards: joint.cards().to_vec(),
        pmf: joint.pmf().to_vec(),
        multi: args.multi,
        gamma: args.gamma,
        c_gamma_upper_bound: units.from_nats(solve.objective.nats()),
        achieved_gamma: units.from_nats(solve.achieved_gamma.nats()),
        dependence: units.from_nats(dependence),
        card_w: coupling.card_w(),
        coupling: coupling_rows(&coupling),
        q_w: coupling.q_w().to_vec(),
        warnings: solver_warnings(&solve, &features),
        map_features: features,
        feature_information,
        solver: telemetry(&solve, &opts),
    };
    write_report(&args.out, &report)
}

fn coupling_rows(c: &Coupling) -> Vec<Vec<f64>> {
    c.table().chunks(c.card_w()).map(<[f64]>::to_vec).collect()
}

fn cmd_toy(ctx: &Context, args: &ToyArgs) -> Result<(), CliError> {
    let units = args.units;
    let gamma = budget(units, args.gamma)?;
    let joint = toy_binary_example(args.a0)?;
    let cov = toy_bit_covariance(&joint)?;
    let bits = validate_gaussian(
        &cov.view((0, 0), (2, 2)).into_owned(),
        &cov.view((2, 2), (2, 2)).into_owned(),
        &cov.view((0, 2), (2, 2)).into_owned(),
        DEFAULT_EPS_PD,
    )?;
    let rho = cca_decompose(&bits)?.rho;
    let cca_information: f64 = rho
        .iter()
        .map(|&r| mutual_info_rho(r.min(1.0 - 1e-9)).map(|i| i.nats()))
        .sum::<Result<f64, _>>()?;

    let opts = solver_options(args.seed, args.restarts, None);
    let (coupling, solve) =
        solve_relaxed_wyner(&joint, gamma, &opts).map_err(|e| solver_failure(e, gamma, &opts))?;
    let maps = map_features(&coupling);
    let (u, v) = (map_feature(&maps[0]).labels, map_feature(&maps[1]).labels);
    let feature_information = feature_mutual_information(&joint, &u, &v)?.nats();
    let report = ToyReport {
        command: "toy".into(),
        units,
        value_is_upper_bound: true,
        meta: ctx.meta.clone(),
        a0: args.a0,
        pmf: joint.rows(),
        mutual_information: units.from_nats(mutual_information(&joint).nats()),
        cca: ToyCca {
            bit_covariance: to_rows(&cov),
            rho,
            feature_information: units.from_nats(cca_information),
        },
        cica: ToyCica {
            gamma: args.gamma,
            upper_bound: units.from_nats(solve.objective.nats()),
            achieved_gamma: units.from_nats(solve.achieved_gamma.nats()),
            u_labels: u,
            v_labels: v,
            feature_information: units.from_nats(feature_information),
            solver: telemetry(&solve, &opts),
        },
    };
    write_report(&args.out, &report)
}
