use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cica_cli::report::{CcaReport, DiscreteReport, GaussianReport, ToyReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

fn cica(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cica"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const DIAG: &str = r#"{"k_x": [[1,0],[0,1]], "k_y": [[1,0],[0,1]], "k_xy": [[0.5,0],[0,0.8]]}"#;
const DSBS: &str = "x,y,p\n0,0,0.45\n0,1,0.05\n1,0,0.05\n1,1,0.45\n";

#[test]
fn cca_on_the_diagonal_model() {
    let dir = TempDir::new().unwrap();
    let cov = write(&dir, "diag.json", DIAG);
    let out = dir.path().join("cca.json");
    let o = cica(&["cca", "--cov", s(&cov), "-k", "1", "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: CcaReport = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r.rho, vec![0.8, 0.5]);
    assert_eq!(r.x_map.len(), 1);
    assert_eq!(r.x_map[0], vec![0.0, 1.0]);
}

#[test]
fn cca_exit_codes() {
    let dir = TempDir::new().unwrap();
    let cov = write(&dir, "diag.json", DIAG);
    let out = dir.path().join("cca.json");
    let o = cica(&["cca", "-k", "1", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    let o = cica(&["cca", "--cov", s(&cov), "-k", "3", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(3));
    let missing = dir.path().join("absent.json");
    assert_eq!(
        cica(&["cca", "--cov", s(&missing), "-k", "1", "--out", s(&out)])
            .status
            .code(),
        Some(2)
    );
    let garbled = write(&dir, "bad.json", "{\"k_x\": [[1]]");
    assert_eq!(
        cica(&["cca", "--cov", s(&garbled), "-k", "1", "--out", s(&out)])
            .status
            .code(),
        Some(2)
    );
    let indefinite = write(
        &dir,
        "neg.json",
        r#"{"k_x": [[-1]], "k_y": [[1]], "k_xy": [[0]]}"#,
    );
    assert_eq!(
        cica(&["cca", "--cov", s(&indefinite), "-k", "1", "--out", s(&out)])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn cca_from_samples_projects_each_row() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut xs = String::from("a,b\n");
    let mut ys = String::from("c\n");
    for _ in 0..500 {
        let z: f64 = rng.random::<f64>() - 0.5;
        let (n1, n2, n3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
        xs.push_str(&format!("{},{}\n", z + 0.3 * n1, n2));
        ys.push_str(&format!("{}\n", z + 0.3 * n3));
    }
    let (x, y) = (write(&dir, "x.csv", &xs), write(&dir, "y.csv", &ys));
    let out = dir.path().join("cca.json");
    let o = cica(&[
        "cca",
        "--x",
        s(&x),
        "--y",
        s(&y),
        "-k",
        "1",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: CcaReport = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let samples = r.samples.unwrap();
    assert_eq!(samples.u.len(), 500);
    assert!(r.rho[0] > 0.5);
    // Whitened features have unit sample variance.
    let var: f64 = samples.u.iter().map(|f| f[0] * f[0]).sum::<f64>() / 499.0;
    assert!((var - 1.0).abs() < 1e-6);
}

#[test]
fn gaussian_scalar_closed_form_and_units() {
    let dir = TempDir::new().unwrap();
    let cov = write(
        &dir,
        "s.json",
        r#"{"k_x": [[1]], "k_y": [[1]], "k_xy": [[0.5]]}"#,
    );
    let out = dir.path().join("g.json");
    let curve = dir.path().join("curve.csv");
    let o = cica(&[
        "gaussian",
        "--cov",
        s(&cov),
        "--gamma",
        "0",
        "--out",
        s(&out),
        "--curve",
        s(&curve),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let nats: GaussianReport = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!((nats.c_gamma - 0.5493061443340549).abs() < 1e-12);
    assert_eq!(nats.k, 1);
    let text = fs::read_to_string(&curve).unwrap();
    assert_eq!(text.lines().next(), Some("gamma,c_gamma,k"));
    assert_eq!(text.lines().count(), 102);

    let o = cica(&[
        "gaussian",
        "--cov",
        s(&cov),
        "--gamma",
        "0",
        "--units",
        "bits",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success());
    let bits: GaussianReport = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(bits.units, cica_cli::Units::Bits);
    assert!((bits.c_gamma - nats.c_gamma / std::f64::consts::LN_2).abs() < 1e-15);
}

#[test]
fn gaussian_budget_above_total_information() {
    let dir = TempDir::new().unwrap();
    let cov = write(&dir, "diag.json", DIAG);
    let out = dir.path().join("g.json");
    let o = cica(&[
        "gaussian",
        "--cov",
        s(&cov),
        "--gamma",
        "1.0",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success());
    let r: GaussianReport = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r.k, 0);
    assert!(r.projection.u.is_empty());
    assert_eq!(r.warnings.len(), 1);
}

#[test]
fn gaussian_perfect_correlation_exits_4() {
    let dir = TempDir::new().unwrap();
    let cov = write(
        &dir,
        "p.json",
        r#"{"k_x": [[1]], "k_y": [[1]], "k_xy": [[1]]}"#,
    );
    let out = dir.path().join("g.json");
    let o = cica(&[
        "gaussian",
        "--cov",
        s(&cov),
        "--gamma",
        "0",
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn discrete_dsbs_and_product() {
    let dir = TempDir::new().unwrap();
    let pmf = write(&dir, "dsbs.csv", DSBS);
    let out = dir.path().join("d.json");
    let o = cica(&[
        "discrete",
        "--pmf",
        s(&pmf),
        "--gamma",
        "0",
        "--seed",
        "7",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: DiscreteReport = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(r.value_is_upper_bound);
    assert!((r.c_gamma_upper_bound - 0.6049515261814267).abs() < 2e-2);
    assert_eq!(r.coupling.len(), 4);

    let product = write(
        &dir,
        "prod.csv",
        "x,y,p\n0,0,0.06\n0,1,0.14\n1,0,0.24\n1,1,0.56\n",
    );
    let o = cica(&[
        "discrete",
        "--pmf",
        s(&product),
        "--gamma",
        "0",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success());
    let r: DiscreteReport = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(r.c_gamma_upper_bound <= 1e-6);
    assert!(r.feature_information.unwrap() <= 1e-12);
}

#[test]
fn discrete_multi_and_input_errors() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("d.json");
    let triple = write(&dir, "t.csv", "a,b,c,p\n0,0,0,0.5\n1,1,1,0.5\n");
    assert_eq!(
        cica(&[
            "discrete",
            "--pmf",
            s(&triple),
            "--gamma",
            "0",
            "--out",
            s(&out)
        ])
        .status
        .code(),
        Some(3)
    );
    let o = cica(&[
        "discrete",
        "--pmf",
        s(&triple),
        "--gamma",
        "0",
        "--multi",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: DiscreteReport = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!((r.c_gamma_upper_bound - std::f64::consts::LN_2).abs() < 2e-2);
    assert!(r.feature_information.is_none());

    let garbled = write(&dir, "g.csv", "x,y,p\n0,zero,0.5\n");
    assert_eq!(
        cica(&[
            "discrete",
            "--pmf",
            s(&garbled),
            "--gamma",
            "0",
            "--out",
            s(&out)
        ])
        .status
        .code(),
        Some(2)
    );
    let unnormalized = write(&dir, "u.csv", "x,y,p\n0,0,0.5\n1,1,0.4\n");
    assert_eq!(
        cica(&[
            "discrete",
            "--pmf",
            s(&unnormalized),
            "--gamma",
            "0",
            "--out",
            s(&out)
        ])
        .status
        .code(),
        Some(3)
    );
}

#[test]
fn solver_failure_exits_5_with_telemetry() {
    let dir = TempDir::new().unwrap();
    let pmf = write(&dir, "dsbs.csv", DSBS);
    let out = dir.path().join("d.json");
    let o = cica(&[
        "discrete",
        "--pmf",
        s(&pmf),
        "--gamma",
        "0",
        "--card-w",
        "1",
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(5));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("\"lambda_max\""), "{stderr}");
    assert!(!out.exists());
}

#[test]
fn toy_report_contrasts_cca_and_cica() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("toy.json");
    let o = cica(&["toy", "--a0", "0.1", "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: ToyReport = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(r.cca.rho.iter().all(|&p| p <= 1e-10));
    assert_eq!(r.cca.feature_information, 0.0);
    assert!(r.cica.feature_information >= 0.3180642071684971);
    assert_eq!(
        cica(&["toy", "--a0", "0.7", "--out", s(&out)])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn reports_repeat_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    let pmf = write(&dir, "dsbs.csv", DSBS);
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for (threads, out) in [("1", &a), ("3", &b)] {
        let o = cica(&[
            "--no-meta",
            "--threads",
            threads,
            "discrete",
            "--pmf",
            s(&pmf),
            "--gamma",
            "0.01",
            "--seed",
            "5",
            "--out",
            s(out),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}
