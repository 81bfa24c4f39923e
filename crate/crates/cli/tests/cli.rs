use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("christol-cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn christol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_christol")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = christol(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn failure(args: &[&str]) -> (i32, Value) {
    let out = christol(args);
    let code = out.status.code().expect("exited normally");
    let err: Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    (code, err)
}

#[test]
fn bound_on_pascal() {
    let report: Value = serde_json::from_str(&ok(&["bound", "--poly", &data("pascal_poly.json")])).unwrap();
    assert_eq!(report["N_closed"], 6);
    assert_eq!(report["N_box"], 4);
    assert_eq!(report["N_diag"], 4);
    assert_eq!(report["N_effective"], 4);
    let christol: Value =
        serde_json::from_str(&ok(&["bound", "--poly", &data("pascal_poly.json"), "--task", "christol"])).unwrap();
    assert_eq!(christol["N_effective"], 4);
}

#[test]
fn pascal_coefficients_follow_lucas() {
    assert_eq!(ok(&["coeff", "--branch", &data("pascal2.json"), "--index", "3,5"]), "0\n");
    assert_eq!(ok(&["coeff", "--branch", &data("pascal2.json"), "--index", "2,5"]), "1\n");
    // binom(i + j, i) mod 2 is 1 exactly when i and j share no binary digit
    let two_100 = "1267650600228229401496703205376";
    let two_100_plus_1 = "1267650600228229401496703205377";
    let disjoint = format!("{two_100},1");
    let overlapping = format!("{two_100},{two_100_plus_1}");
    assert_eq!(ok(&["coeff", "--branch", &data("pascal2.json"), "--index", &disjoint]), "1\n");
    assert_eq!(ok(&["coeff", "--branch", &data("pascal2.json"), "--index", &overlapping]), "0\n");
}

#[test]
fn catalan_diagonal_matches_the_integers() {
    let d: Value = serde_json::from_str(&ok(&["diagonal", "--branch", &data("catalan3.json"), "--order", "12"])).unwrap();
    let mut got = vec![0u64; 12];
    for term in d["terms"].as_array().unwrap() {
        got[term["e"][0].as_u64().unwrap() as usize] = term["c"][0].as_u64().unwrap();
    }
    let mut catalan = vec![1u64];
    for n in 1..12 {
        catalan.push(catalan[n - 1] * 2 * (2 * n as u64 - 1) / (n as u64 + 1));
    }
    let want: Vec<u64> = catalan.iter().map(|c| c % 3).collect();
    assert_eq!(got, want);
}

#[test]
fn solve_output_round_trips_through_series_input() {
    let solved = tmp("catalan_solved.json");
    ok(&["solve", "--branch", &data("catalan3.json"), "--prec", "24", "-o", solved.to_str().unwrap()]);
    let via_series = ok(&["diagonal", "--series", solved.to_str().unwrap()]);
    let via_branch = ok(&["diagonal", "--branch", &data("catalan3.json"), "--order", "12"]);
    assert_eq!(via_series, via_branch);
}

#[test]
fn certificates_verify_and_corruption_is_caught() {
    let g = tmp("pascal5_diag.json");
    let c = tmp("pascal5_cert.json");
    ok(&["diagonal", "--branch", &data("pascal5.json"), "--order", "100", "-o", g.to_str().unwrap()]);
    ok(&["annihilator", "--branch", &data("pascal5.json"), "--order", "60", "-o", c.to_str().unwrap()]);
    let cert: Value = serde_json::from_str(&std::fs::read_to_string(&c).unwrap()).unwrap();
    assert_eq!(cert["N"], 1);
    assert_eq!(cert["bound"]["N_effective"], 4);
    assert!(cert["verified_order"].as_u64().unwrap() >= 120);
    ok(&["verify", "--cert", c.to_str().unwrap(), "--series", g.to_str().unwrap(), "--order", "100"]);

    let mut bad = cert.clone();
    let c0 = bad["coeffs"][0][0][0].as_u64().unwrap();
    bad["coeffs"][0][0][0] = ((c0 + 1) % 5).into();
    let bad_path = tmp("pascal5_cert_bad.json");
    std::fs::write(&bad_path, bad.to_string()).unwrap();
    let (code, err) = failure(&["verify", "--cert", bad_path.to_str().unwrap(), "--series", g.to_str().unwrap(), "--order", "100"]);
    assert_eq!(code, 1);
    assert_eq!(err["error"], "RelationCheckFailed");
}

#[test]
fn annihilator_of_a_series_file() {
    let g = tmp("catalan_diag.json");
    ok(&["diagonal", "--branch", &data("catalan3.json"), "--order", "300", "-o", g.to_str().unwrap()]);
    let cert: Value = serde_json::from_str(&ok(&["annihilator", "--series", g.to_str().unwrap(), "--nmax", "3"])).unwrap();
    // over F_3, g = 1 + tC satisfies g^2 = 1 - t, hence
    // t^6 C^9 - ((1 - t)^3 + t^2) C^3 + (1 - t) C = 0
    let want = serde_json::json!([[[1], [2]], [[2], [0], [2], [1]], [[0], [0], [0], [0], [0], [0], [1]]]);
    assert_eq!(cert["N"], 2);
    assert_eq!(cert["coeffs"], want);
    assert!(cert["bound"].is_null());
    let (code, err) = failure(&["annihilator", "--series", g.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(err["error"], "MalformedInput");
}

#[test]
fn unknown_keys_are_rejected() {
    let (code, err) = failure(&["coeff", "--branch", &data("unknown_key.json"), "--index", "1,1"]);
    assert_eq!(code, 2);
    assert_eq!(err["error"], "MalformedInput");
    assert!(err["detail"].as_str().unwrap().contains("colour"));
}

#[test]
fn unreadable_files_and_bad_indices_are_input_errors() {
    let (code, err) = failure(&["bound", "--poly", &data("does_not_exist.json")]);
    assert_eq!((code, err["error"].as_str().unwrap()), (2, "MalformedInput"));
    let (code, _) = failure(&["coeff", "--branch", &data("pascal2.json"), "--index", "3,-5"]);
    assert_eq!(code, 2);
    let (code, _) = failure(&["coeff", "--branch", &data("pascal2.json"), "--index", "3"]);
    assert_eq!(code, 2);
}

#[test]
fn singular_branch_is_a_domain_error_with_a_hint() {
    let (code, err) = failure(&["solve", "--branch", &data("singular.json"), "--prec", "4"]);
    assert_eq!(code, 1);
    assert_eq!(err["error"], "SingularBranch");
    assert!(err["hint"].as_str().unwrap().contains("--series"));
}

#[test]
fn automaton_exports() {
    let m: Value = serde_json::from_str(&ok(&["automaton", "--branch", &data("pascal2.json")])).unwrap();
    let states = m["states"].as_array().unwrap().len();
    assert!(states >= 1);
    assert_eq!(m["transitions"].as_array().unwrap().len(), 4 * states);
    let dot = ok(&["automaton", "--branch", &data("pascal2.json"), "--format", "dot"]);
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("->").count(), 1 + 4 * states);
    let (code, err) = failure(&["automaton", "--branch", &data("pascal5.json"), "--max-states", "1"]);
    assert_eq!(code, 1);
    assert_eq!(err["error"], "StateBudgetExceeded");
}

#[test]
fn output_is_byte_stable_across_runs_and_thread_counts() {
    let jobs: [&[&str]; 4] = [
        &["bound", "--poly", &data("pascal_poly.json")],
        &["automaton", "--branch", &data("catalan3.json")],
        &["annihilator", "--branch", &data("catalan3.json"), "--order", "120"],
        &["solve", "--branch", &data("pascal5.json"), "--prec", "20"],
    ];
    for job in jobs {
        let reference = ok(job);
        for threads in ["1", "3", "8"] {
            let mut args = vec!["--threads", threads];
            args.extend_from_slice(job);
            assert_eq!(ok(&args), reference, "{job:?} with {threads} threads");
        }
    }
}
