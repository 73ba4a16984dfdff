use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use neuc_mds::datasets::{squared_distances, PointCloud};
use neuc_mds::metrics::frobenius_sq;
use neuc_mds::selection::select_neuc;
use neuc_mds::linalg::centered_eig;
use neuc_mds_cli::format::{read_embedding, read_matrix, write_matrix};
use neuc_mds_cli::{MatrixFormat, EXIT_DATA, EXIT_USAGE};
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_neuc-mds"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("spawn neuc-mds")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    run(dir, args).status.code().expect("exit code")
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).expect("valid JSON")
}

fn csv(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn write_text(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn collinear_points_embed_exactly_in_one_axis() {
    let dir = TempDir::new().unwrap();
    write_text(dir.path(), "d.txt", "3\n0 1 9\n1 0 4\n9 4 0\n");
    let report = json(&ok(
        dir.path(),
        &["embed", "--input", "d.txt", "--output", "e.txt", "--k", "1"],
    ));
    assert!(report["stress_sq"].as_f64().unwrap() <= 1e-9);
    assert_eq!(report["k"], 1);

    let e = read_embedding(&dir.path().join("e.txt")).unwrap();
    assert_eq!((e.n, e.k()), (3, 1));
    assert_eq!(e.signature, vec![1]);
    assert!((e.axis_values[0] - 14.0 / 3.0).abs() < 1e-12);
    let x = &e.coords;
    for (i, j, dij) in [(0, 1, 1.0), (0, 2, 9.0), (1, 2, 4.0)] {
        let got: f64 = (x[i] - x[j]).powi(2);
        assert!((got - dij).abs() < 1e-12, "{i},{j}: {got}");
    }
}

#[test]
fn full_rank_embedding_recovers_input() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &["generate", "--kind", "balls", "--n", "30", "--seed", "3", "--output", "d.bin", "--format", "bin"],
    );
    ok(
        dir.path(),
        &[
            "embed", "--input", "d.bin", "--output", "e.txt", "--k", "30", "--report", "r.json",
            "--dhat", "dhat.bin", "--format", "bin",
        ],
    );
    let d = read_matrix(&dir.path().join("d.bin")).unwrap();
    let report = json(&std::fs::read_to_string(dir.path().join("r.json")).unwrap());
    assert!(report["stress_sq"].as_f64().unwrap() <= 1e-8 * frobenius_sq(&d));
    let d_hat = read_matrix(&dir.path().join("dhat.bin")).unwrap();
    assert_eq!(d_hat.n(), 30);
}

#[test]
fn neuc_beats_cmds_on_random_simplex() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &["generate", "--kind", "simplex", "--n", "120", "--seed", "5", "--output", "d.txt"],
    );
    let stress = |method: &str| {
        let r = json(&ok(
            dir.path(),
            &["embed", "--input", "d.txt", "--output", "e.txt", "--k", "10", "--method", method],
        ));
        r["stress"].as_f64().unwrap()
    };
    let (cmds, neuc) = (stress("cmds"), stress("neuc"));
    assert!(neuc < cmds, "neuc {neuc} vs cmds {cmds}");
}

#[test]
fn sweep_on_psd_input_matches_between_cmds_and_neuc() {
    let dir = TempDir::new().unwrap();
    let d = squared_distances(&PointCloud::uniform(25, 4, 11));
    write_matrix(&dir.path().join("d.bin"), &d, MatrixFormat::Bin).unwrap();
    let out = ok(
        dir.path(),
        &["sweep", "--input", "d.bin", "--k-list", "1:7:2", "--method", "cmds,neuc"],
    );
    let rows = csv(&out);
    assert_eq!(rows[0].len(), 11);
    assert_eq!(rows[0][0], "k");
    assert_eq!(rows.len(), 1 + 4 * 2);
    for pair in rows[1..].chunks(2) {
        assert_eq!(pair[0][1], "cmds");
        assert_eq!(pair[1][1], "neuc");
        assert_eq!(pair[0][0], pair[1][0]);
        assert_eq!(pair[0][2..], pair[1][2..], "k = {}", pair[0][0]);
    }
}

#[test]
fn rmt_theory_reproduces_reference_table() {
    let dir = TempDir::new().unwrap();
    let out = ok(dir.path(), &["rmt", "--n", "1000", "--mode", "cmds"]);
    let rows = csv(&out);
    assert_eq!(
        rows[0],
        ["c", "mode", "r", "theory", "norm_constant", "norm_per_n", "empirical", "rel_err"]
    );
    let expected = [
        (0.05, 0.8432, 0.0078),
        (0.10, 0.7322, 0.0265),
        (0.15, 0.6513, 0.0512),
        (0.20, 0.5933, 0.0785),
        (0.25, 0.5531, 0.1055),
        (0.30, 0.5269, 0.1304),
        (0.35, 0.5112, 0.1512),
        (0.40, 0.5033, 0.1670),
        (0.45, 0.5004, 0.1768),
    ];
    assert_eq!(rows.len(), 1 + expected.len());
    let round4 = |s: &str| (s.parse::<f64>().unwrap() * 1e4).round() / 1e4;
    for (row, (c, constant, per_n)) in rows[1..].iter().zip(expected) {
        assert_eq!(row[0].parse::<f64>().unwrap(), c);
        assert_eq!(round4(&row[4]), constant, "c = {c}");
        assert_eq!(round4(&row[5]), per_n, "c = {c}");
        assert_eq!(row[6], "");
    }
}

#[test]
fn rmt_with_trials_reports_empirical_error() {
    let dir = TempDir::new().unwrap();
    let out = ok(
        dir.path(),
        &["rmt", "--n", "300", "--c-list", "0.2", "--trials", "2", "--seed", "4"],
    );
    let rows = csv(&out);
    assert_eq!(rows.len(), 3);
    for row in &rows[1..] {
        let rel: f64 = row[7].parse().unwrap();
        assert!(rel < 0.1, "{row:?}");
    }
}

#[test]
fn generate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let gen = |seed: &str, name: &str| {
        ok(
            dir.path(),
            &["generate", "--kind", "simplex", "--n", "40", "--seed", seed, "--output", name, "--format", "bin"],
        );
        std::fs::read(dir.path().join(name)).unwrap()
    };
    let a = gen("9", "a.bin");
    assert_eq!(a, gen("9", "b.bin"));
    assert_ne!(a, gen("10", "c.bin"));
}

#[test]
fn text_and_binary_outputs_agree_bitwise() {
    let dir = TempDir::new().unwrap();
    for fmt in ["text", "bin"] {
        ok(
            dir.path(),
            &["generate", "--kind", "balls", "--n", "35", "--seed", "2", "--output", fmt, "--format", fmt],
        );
    }
    let t = read_matrix(&dir.path().join("text")).unwrap();
    let b = read_matrix(&dir.path().join("bin")).unwrap();
    let bits = |m: &neuc_mds::DissimilarityMatrix| m.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&t), bits(&b));
    assert!(std::fs::read(dir.path().join("bin")).unwrap().starts_with(b"NMDS\x01"));
}

#[test]
fn select_reports_without_coordinates() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &["generate", "--kind", "simplex", "--n", "30", "--seed", "1", "--output", "d.txt"],
    );
    let out = json(&ok(dir.path(), &["select", "--input", "d.txt", "--k", "6"]));
    let d = read_matrix(&dir.path().join("d.txt")).unwrap();
    let lambda = centered_eig(&d).unwrap().eigenvalues;
    let sel = select_neuc(&lambda, 6).unwrap();
    let chosen: Vec<usize> = out["chosen"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap() as usize)
        .collect();
    assert_eq!(chosen, sel.chosen);
    assert_eq!(out["r"].as_u64().unwrap() as usize, sel.r);
    assert_eq!(out["s"].as_u64().unwrap() as usize, sel.s);
    // serde_json's default float parser may be off by one ulp.
    let close = |v: &Value, x: f64| (v.as_f64().unwrap() - x).abs() <= 1e-15 * x.abs();
    assert!(close(&out["bound_c1"], sel.bound_c1));
    assert!(close(&out["bound_c2"], sel.bound_c2));
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
}

#[test]
fn perturb_and_landmark_pipeline() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &[
            "perturb", "--kind", "noise", "--n", "60", "--dim", "5", "--seed", "8", "--output", "d.bin",
            "--format", "bin", "--points-output", "p.txt",
        ],
    );
    ok(
        dir.path(),
        &["perturb", "--kind", "knn", "--input", "p.txt", "--k-nn", "6", "--output", "knn.txt"],
    );
    ok(
        dir.path(),
        &["perturb", "--kind", "missing", "--input", "p.txt", "--keep-prob", "0.9", "--output", "miss.txt"],
    );
    assert_eq!(read_matrix(&dir.path().join("knn.txt")).unwrap().n(), 60);
    assert_eq!(read_matrix(&dir.path().join("miss.txt")).unwrap().n(), 60);

    let report = json(&ok(
        dir.path(),
        &["landmark", "--input", "d.bin", "--landmarks", "20", "--k", "4", "--seed", "1", "--output", "e.txt"],
    ));
    assert_eq!(report["n"], 60);
    assert!(report["c1"].is_null());
    let e = read_embedding(&dir.path().join("e.txt")).unwrap();
    assert_eq!((e.n, e.k(), e.coords.len()), (60, 4, 240));
}

#[test]
fn exit_codes_and_no_partial_output() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    write_text(p, "good.txt", "2\n0 1\n1 0\n");
    write_text(p, "asym.txt", "2\n0 1\n2 0\n");
    write_text(p, "garbled.txt", "2\n0 1\n1 nope\n");
    std::fs::write(p.join("trunc.bin"), b"NMDS\x01\x02\0\0\0\0\0\0\0").unwrap();

    assert_eq!(code(p, &["embed", "--input", "good.txt", "--output", "o1", "--k", "1"]), 0);
    assert_eq!(code(p, &[]), EXIT_USAGE);
    assert_eq!(code(p, &["embed", "--input", "good.txt"]), EXIT_USAGE);
    assert_eq!(code(p, &["embed", "--input", "good.txt", "--output", "o2", "--k", "3"]), EXIT_USAGE);
    assert_eq!(code(p, &["embed", "--input", "good.txt", "--output", "o2", "--k", "1", "--method", "x"]), EXIT_USAGE);
    assert_eq!(code(p, &["sweep", "--input", "good.txt", "--k-list", "2:1"]), EXIT_USAGE);
    assert_eq!(code(p, &["rmt", "--n", "10", "--c-list", "1.5"]), EXIT_USAGE);
    assert_eq!(code(p, &["perturb", "--kind", "knn", "--n", "10", "--output", "o2"]), EXIT_USAGE);
    assert_eq!(code(p, &["landmark", "--input", "good.txt", "--landmarks", "1", "--k", "1", "--output", "o2"]), EXIT_USAGE);
    assert_eq!(code(p, &["embed", "--input", "missing.txt", "--output", "o2", "--k", "1"]), EXIT_DATA);
    assert_eq!(code(p, &["embed", "--input", "asym.txt", "--output", "o2", "--k", "1"]), EXIT_DATA);
    assert_eq!(code(p, &["embed", "--input", "trunc.bin", "--output", "o2", "--k", "1"]), EXIT_DATA);

    let out = run(p, &["embed", "--input", "garbled.txt", "--output", "o2", "--k", "1"]);
    assert_eq!(out.status.code(), Some(EXIT_DATA));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("line 3, column 3"), "{msg}");
    let out = run(p, &["embed", "--input", "asym.txt", "--output", "o2", "--k", "1"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("(0, 1)"));

    assert!(!p.join("o2").exists());
    assert_eq!(code(p, &["--help"]), 0);
}
