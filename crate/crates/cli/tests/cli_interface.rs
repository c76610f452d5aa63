//! Interface contracts: CSV determinism and table shapes, JSON problem
//! files, the command-line surface and its exit codes.

use std::process::Command;

use fracspec_cli::examples::Overrides;
use fracspec_cli::problem::ProblemFile;
use fracspec_cli::runner::run_example;
use fracspec_core::muntz::MuntzBasis;
use fracspec_core::pipeline::SolveConfig;
use fracspec_core::solve_pde;

fn overrides_small() -> Overrides {
    Overrides {
        n: Some(8),
        k: Some(4),
        n_t: Some(21),
        k_t: Some(21),
        ..Default::default()
    }
}

#[test]
fn csv_output_is_byte_identical_across_runs() {
    let a = run_example(2, &overrides_small()).unwrap();
    let b = run_example(2, &overrides_small()).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.filename, y.filename);
        assert_eq!(x.contents, y.contents, "{} differs between runs", x.filename);
    }
}

#[test]
fn tables_carry_their_published_shapes() {
    let header_of = |artifacts: &[fracspec_cli::tables::Artifact], name: &str| -> String {
        let artifact = artifacts
            .iter()
            .find(|a| a.filename == name)
            .unwrap_or_else(|| panic!("missing artifact {name}"));
        artifact.contents.lines().next().unwrap().to_string()
    };

    let ex1 = run_example(1, &Overrides { t_end: Some(1.0), k: Some(3), k_t: Some(11), ..Default::default() }).unwrap();
    assert_eq!(
        header_of(&ex1, "ex1_T1.csv"),
        "K,Rerr(delta=0.1),AO(delta=0.1),Rerr(delta=0.25),AO(delta=0.25),Rerr(delta=0.5),AO(delta=0.5)"
    );

    let ex2 = run_example(2, &overrides_small()).unwrap();
    assert_eq!(
        header_of(&ex2, "ex2.csv"),
        "T,Merr(K=4),Merr(Crank-Nicolson reference)"
    );

    let ex7 = run_example(
        7,
        &Overrides {
            n: Some(25),
            k: Some(4),
            n_t: Some(21),
            k_t: Some(11),
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(
        header_of(&ex7, "ex7.csv"),
        "N,Rerr(u) K=4,Rerr(du/dx1) K=4"
    );

    // Full default headers mirror the published tables' row/column layout.
    let ex2_full = run_example(2, &Overrides { n_t: Some(11), ..Default::default() }).unwrap();
    assert_eq!(
        header_of(&ex2_full, "ex2.csv"),
        "T,Merr(K=3),Merr(K=4),Merr(K=5),Merr(Crank-Nicolson reference)"
    );
}

#[test]
fn unknown_example_is_a_validation_error() {
    let err = run_example(9, &Overrides::default()).unwrap_err();
    let msg = format!("{err}");
    assert!(msg.contains("1..=8"), "{msg}");
}

#[test]
fn json_problem_file_solves_like_the_builtin_benchmark() {
    // The single-harmonic benchmark expressed as a problem file.
    let json = r#"{
        "domain": [10.0],
        "t_end": 0.5,
        "leading_order": { "ceiling": 1, "shape": { "affine": { "a": 0.8, "b": 0.4 } } },
        "terms": [
            { "side": "rhs_spatial", "symbol": "laplacian",
              "coefficient": { "re": 0.01 }, "order": null }
        ],
        "forcing": [
            { "spatial": { "sine": { "terms": [ { "scale": 1.0, "mode": [1] } ] } },
              "time": { "caputo": { "profile": [[2.0, 1.0, 0.0]],
                         "order": { "ceiling": 1, "shape": { "affine": { "a": 0.8, "b": 0.4 } } } } } },
            { "spatial": { "sine": { "terms": [ { "scale": 0.000986960440108936, "mode": [1] } ] } },
              "time": { "profile": [[2.0, 1.0, 0.0]] } }
        ],
        "boundary": "homogeneous_dirichlet",
        "initial": [ { "polynomial": { "terms": [ { "powers": [0], "scale": 0.0 } ] } } ],
        "solver": { "n": 6, "k": 5, "delta": 0.25 }
    }"#;
    let file = ProblemFile::parse(json).unwrap();
    let problem = file.to_problem().unwrap();
    let basis = MuntzBasis::for_order(&problem.leading_order, 5, 0.25).unwrap();
    let solution = solve_pde(&problem, &basis, &SolveConfig::new(6, 64)).unwrap();
    // Exact solution t^2 sin(pi x / 10); beta0 pi^2 / L^2 = 9.8696e-4.
    for &x in &[2.0, 5.0, 8.0] {
        let got = solution.eval(&[x], 0.5).unwrap();
        let want = 0.25 * (std::f64::consts::PI * x / 10.0).sin();
        assert!(
            (got.re - want).abs() < 1e-10 && got.im.abs() < 1e-12,
            "u({x}) = {got} vs {want}"
        );
    }
}

#[test]
fn repository_problem_files_parse_and_validate() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../problems");
    for entry in std::fs::read_dir(dir).expect("problems directory") {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let json = std::fs::read_to_string(&path).unwrap();
        let parsed = ProblemFile::parse(&json)
            .unwrap_or_else(|e| panic!("{} failed to parse: {e}", path.display()));
        parsed
            .to_problem()
            .unwrap_or_else(|e| panic!("{} failed to validate: {e}", path.display()));
    }
}

fn fracspec_binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracspec"))
}

#[test]
fn cli_exit_codes_follow_the_contract() {
    // Unknown example id: validation error, exit 2.
    let out = fracspec_binary()
        .args(["run", "9", "--out"])
        .arg(std::env::temp_dir().join("fracspec_test_out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{out:?}");

    // Unreadable problem file: I/O error, exit 4.
    let out = fracspec_binary()
        .args(["solve", "/definitely/not/a/file.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "{out:?}");

    // Oracle on an unsupported id: validation error, exit 2.
    let out = fracspec_binary().args(["oracle", "5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn cli_run_writes_artifacts_and_respects_thread_cap() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracspec_binary()
        .args(["run", "2", "--K", "4", "--N", "6", "--nt", "11"])
        .arg("--out")
        .arg(dir.path())
        .env("FRACSPEC_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let csv = std::fs::read_to_string(dir.path().join("ex2.csv")).unwrap();
    assert!(csv.starts_with("T,Merr(K=4)"));
    assert!(csv.contains("\r\n"));
}
