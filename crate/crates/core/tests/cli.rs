use std::path::Path;
use std::process::Command;

use semiqft::io::ResultDocument;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_semiqft"))
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

/// Structural equality with floats compared to 1e-12, since the last digit
/// of a residual depends on the optimisation level.
fn close(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => match (x.as_f64(), y.as_f64()) {
            (Some(x), Some(y)) if x.fract() != 0.0 || y.fract() != 0.0 => (x - y).abs() < 1e-12,
            _ => x == y,
        },
        (Value::Array(x), Value::Array(y)) => {
            x.len() == y.len() && x.iter().zip(y).all(|(x, y)| close(x, y))
        }
        (Value::Object(x), Value::Object(y)) => {
            x.len() == y.len() && x.iter().all(|(k, v)| y.get(k).is_some_and(|w| close(v, w)))
        }
        _ => a == b,
    }
}

#[test]
fn documents_match_golden_files() {
    for (args, file) in [
        (
            &["qft", "--n", "3", "--t", "2", "--input", "000", "--exact"][..],
            "qft_n3_t2_000.json",
        ),
        (&["decompose", "--k", "4"][..], "decompose_k4.json"),
        (
            &[
                "shor", "--N", "15", "--x", "11", "--t", "2", "--shots", "1", "--seed", "7",
            ][..],
            "shor_15_11_seed7.json",
        ),
    ] {
        let (code, stdout, _) = run(args);
        assert_eq!(code, 0);
        let (got, want): (Value, Value) = (
            serde_json::from_str(&stdout).unwrap(),
            serde_json::from_str(&golden(file)).unwrap(),
        );
        assert!(close(&got, &want), "{file}\n{stdout}");
        let doc = ResultDocument::from_json(&stdout).unwrap();
        assert_eq!(doc.to_json() + "\n", stdout);
    }
}

#[test]
fn emitted_qasm_matches_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    for (args, file) in [
        (
            &["qft", "--n", "3", "--t", "2", "--input", "000", "--exact"][..],
            "semiclassical_z8_zero.qasm",
        ),
        (
            &["qft", "--n", "3", "--input", "000", "--exact"][..],
            "standard_z8_zero.qasm",
        ),
        (&["decompose", "--k", "4"][..], "controlled_r4.qasm"),
    ] {
        let path = dir.path().join(file);
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--emit-qasm", path.to_str().unwrap()]);
        assert_eq!(run(&full).0, 0);
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            golden(file),
            "{file}"
        );
    }
    let semi = golden("semiclassical_z8_zero.qasm");
    assert_eq!(semi.lines().filter(|l| l.starts_with("cx ")).count(), 2);
    assert!(semi.lines().any(|l| l.starts_with("if(")));
    let standard = golden("standard_z8_zero.qasm");
    assert_eq!(standard.lines().filter(|l| l.starts_with("cx ")).count(), 6);
}

#[test]
fn json_flag_writes_the_document() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let (code, stdout, _) = run(&[
        "qft",
        "--n",
        "4",
        "--input",
        "random",
        "--shots",
        "200",
        "--seed",
        "3",
        "--json",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(&path).unwrap() + "\n", stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["qft", "--n", "3", "--input", "0101"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(
        run(&[
            "qft",
            "--n",
            "3",
            "--mode",
            "semiclassical",
            "--input",
            "000"
        ])
        .0,
        2
    );
    assert_eq!(
        run(&[
            "qft",
            "--n",
            "3",
            "--t",
            "2",
            "--register",
            "recycled",
            "--input",
            "random"
        ])
        .0,
        2
    );
    assert_eq!(run(&["shor", "--N", "15", "--x", "5", "--t", "2"]).0, 2);
    assert_eq!(run(&["shor", "--N", "25", "--x", "2", "--t", "2"]).0, 2);
    assert_eq!(
        run(&["compare", "--noise-p", "1.5", "--trajectories", "10"]).0,
        2
    );
    let (code, _, stderr) = run(&["shor", "--N", "15", "--x", "14", "--t", "2", "--shots", "5"]);
    assert_eq!(code, 4, "{stderr}");
    let (code, _, stderr) = run(&[
        "qft", "--n", "12", "--input", "random", "--t", "1", "--exact",
    ]);
    assert_eq!(code, 0, "{stderr}");
    let (help_code, help, _) = run(&["--help"]);
    assert_eq!(help_code, 0);
    assert!(help.contains("decompose"));
}

#[test]
fn branch_cap_maps_to_capacity_exit() {
    let outcome = semiqft::cli::parse_and_run([
        "semiqft", "qft", "--n", "20", "--t", "1", "--input", "random", "--exact",
    ]);
    assert_eq!(outcome.exit_code, 3, "{:?}", outcome.message);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let args = [
        "compare",
        "--noise-p",
        "0.05",
        "--trajectories",
        "300",
        "--seed",
        "5",
        "--fourier",
        "5",
    ];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    let doc = ResultDocument::from_json(&a.1).unwrap();
    let report = doc.comparison.unwrap();
    assert_eq!((report.cx_semiclassical, report.cx_standard), (2, 6));
}
