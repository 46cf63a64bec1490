//! End-to-end tests of the binary: formats, exit codes, reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lowrank-rect"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .env_remove("LOWRANK_RECT_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lowrank-rect-test-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn gen_eq_prints_the_two_block_matrix() {
    let dir = temp_dir("gen-eq");
    let out = run(&dir, &["gen", "eq", "--n", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "2 2\n+-\n-+\n");
}

#[test]
fn gen_kl_writes_matrix_and_factorization() {
    let dir = temp_dir("gen-kl");
    let out = run(
        &dir,
        &["gen", "kl", "--r", "1", "--out", "kl.txt", "--fact-out", "kl-fact.txt"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let matrix = std::fs::read_to_string(dir.join("kl.txt")).unwrap();
    assert!(matrix.starts_with("8 8\n"));
    assert_eq!(matrix.lines().count(), 9);
    let fact = std::fs::read_to_string(dir.join("kl-fact.txt")).unwrap();
    assert!(fact.starts_with("8 8 9\n"));
    assert_eq!(fact.lines().count(), 17);
}

#[test]
fn gen_rectpart_has_bounded_rank() {
    let dir = temp_dir("gen-rectpart");
    let out = run(
        &dir,
        &["gen", "rectpart", "--n", "32", "--m", "32", "--k", "6", "--seed", "7", "--out", "m.txt"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.join("m.txt")).unwrap();
    let m = lowrank_rect::matrix::parse_sign_matrix(&text).unwrap();
    assert!(lowrank_rect::matrix::rank::<f64>(&m) <= 6);
}

#[test]
fn rect_reports_are_reproducible_across_thread_counts() {
    let dir = temp_dir("rect-threads");
    assert!(run(
        &dir,
        &["gen", "rectpart", "--n", "12", "--m", "12", "--k", "5", "--seed", "3", "--out", "m.txt"],
    )
    .status
    .success());
    let base = [
        "rect",
        "m.txt",
        "--seed",
        "42",
        "--attempts",
        "2000",
        "--print-rectangle",
    ];
    let one = run(&dir, &[&base[..], &["--threads", "1"]].concat());
    assert!(one.status.success(), "{}", stderr(&one));
    let eight = run(&dir, &[&base[..], &["--threads", "8"]].concat());
    assert!(eight.status.success(), "{}", stderr(&eight));
    assert_eq!(out_bytes(&one), out_bytes(&eight), "reports differ across thread counts");
    let text = stdout(&one);
    for key in ["variant=", "r=", "delta=", "T=", "attempts=", "best_objective=", "mass=", "error_mass=", "seed=42", "rng_algorithm=", "rows=", "cols="] {
        assert!(text.contains(key), "missing {key} in:\n{text}");
    }
    // Reruns are bit-identical too.
    let again = run(&dir, &[&base[..], &["--threads", "8"]].concat());
    assert_eq!(out_bytes(&eight), out_bytes(&again));
}

fn out_bytes(out: &Output) -> &[u8] {
    &out.stdout
}

#[test]
fn rect_honors_the_threads_environment_variable() {
    let dir = temp_dir("rect-env");
    assert!(run(
        &dir,
        &["gen", "rectpart", "--n", "10", "--m", "10", "--k", "4", "--seed", "6", "--out", "m.txt"],
    )
    .status
    .success());
    let flagged = run(&dir, &["rect", "m.txt", "--seed", "9", "--attempts", "500", "--threads", "2"]);
    let via_env = bin()
        .current_dir(&dir)
        .args(["rect", "m.txt", "--seed", "9", "--attempts", "500"])
        .env("LOWRANK_RECT_THREADS", "4")
        .output()
        .unwrap();
    assert!(flagged.status.success());
    assert!(via_env.status.success());
    assert_eq!(flagged.stdout, via_env.stdout);
}

#[test]
fn protocol_writes_a_valid_tree() {
    let dir = temp_dir("protocol");
    assert!(run(&dir, &["gen", "kl", "--r", "1", "--out", "kl.txt"]).status.success());
    let out = run(&dir, &["protocol", "kl.txt", "--seed", "11", "--out", "kl.tree"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    for key in ["leaves=", "worst_case_cost=", "depth=", "rank=", "log2_rank=", "cost_lower_bound_ok=true", "tree_file=kl.tree"] {
        assert!(text.contains(key), "missing {key} in:\n{text}");
    }
    // The serialized tree evaluates back to the matrix.
    let tree_text = std::fs::read_to_string(dir.join("kl.tree")).unwrap();
    let tree = lowrank_rect::protocol::parse_tree(&tree_text, 8, 8).unwrap();
    let matrix_text = std::fs::read_to_string(dir.join("kl.txt")).unwrap();
    let m = lowrank_rect::matrix::parse_sign_matrix(&matrix_text).unwrap();
    for x in 0..8 {
        for y in 0..8 {
            assert_eq!(tree.evaluate(x, y).unwrap(), m.sign(x, y));
        }
    }
}

#[test]
fn disc_modes_report_values_and_bounds() {
    let dir = temp_dir("disc");
    assert!(run(&dir, &["gen", "eq", "--n", "4", "--out", "eq.txt"]).status.success());

    let brute = run(&dir, &["disc", "eq.txt", "--mode", "brute"]);
    assert!(brute.status.success(), "{}", stderr(&brute));
    let text = stdout(&brute);
    assert!(text.contains("mode=brute"));
    assert!(text.contains("value=") && text.contains("bound=") && text.contains("rank=4"));

    let game = run(&dir, &["disc", "eq.txt", "--mode", "game", "--iterations", "300"]);
    assert!(game.status.success(), "{}", stderr(&game));
    assert!(stdout(&game).contains("mode=game"));

    // Witness on a minus-majority matrix reports the hypothesis violation.
    let witness = run(&dir, &["disc", "eq.txt", "--mode", "witness", "--trials", "100"]);
    assert_eq!(witness.status.code(), Some(2));
    assert!(stderr(&witness).contains("majority class is -1"));

    // All-plus matrix satisfies the hypothesis.
    std::fs::write(dir.join("ones.txt"), "2 2\n++\n++\n").unwrap();
    let witness = run(&dir, &["disc", "ones.txt", "--mode", "witness", "--trials", "200", "--seed", "4"]);
    assert!(witness.status.success(), "{}", stderr(&witness));
    let text = stdout(&witness);
    assert!(text.contains("mode=witness") && text.contains("mean="));
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = temp_dir("exit-codes");

    // Usage errors: 1.
    assert_eq!(run(&dir, &[]).status.code(), Some(1));
    assert_eq!(run(&dir, &["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&dir, &["gen", "kl"]).status.code(), Some(1));
    assert_eq!(run(&dir, &["gen", "kl", "--r", "x"]).status.code(), Some(1));
    assert_eq!(run(&dir, &["rect", "m.txt", "--bogus", "1"]).status.code(), Some(1));

    // Domain errors: 2 (malformed file with line/column diagnostics; guards).
    std::fs::write(dir.join("bad.txt"), "2 2\n+-\n+x\n").unwrap();
    let bad = run(&dir, &["rect", "bad.txt"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("3:2"), "diagnostics missing: {}", stderr(&bad));

    std::fs::write(dir.join("big.txt"), {
        let mut s = String::from("25 25\n");
        for _ in 0..25 {
            s.push_str(&"+".repeat(25));
            s.push('\n');
        }
        s
    })
    .unwrap();
    let guard = run(&dir, &["disc", "big.txt", "--mode", "brute"]);
    assert_eq!(guard.status.code(), Some(2));
    assert!(stderr(&guard).contains("too large"));

    // I/O errors: 3.
    assert_eq!(run(&dir, &["rect", "missing.txt"]).status.code(), Some(3));
}

#[test]
fn malformed_measures_are_rejected_with_diagnostics() {
    let dir = temp_dir("measure");
    assert!(run(&dir, &["gen", "eq", "--n", "2", "--out", "m.txt"]).status.success());
    std::fs::write(dir.join("mu.txt"), "2 2\n0.25 0.25\n0.25 nope\n").unwrap();
    let out = run(&dir, &["rect", "m.txt", "--measure", "mu.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("3:6"), "got: {}", stderr(&out));

    std::fs::write(dir.join("mu2.txt"), "2 2\n0.25 0.25\n0.25 0.30\n").unwrap();
    let out = run(&dir, &["rect", "m.txt", "--measure", "mu2.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("not 1"), "got: {}", stderr(&out));
}
