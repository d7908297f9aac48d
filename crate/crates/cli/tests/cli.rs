use std::process::{Command, Output};

fn orbitstat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbitstat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = orbitstat(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn result<'a>(report: &'a serde_json::Value, label: &str) -> &'a serde_json::Value {
    report["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["label"] == label)
        .unwrap_or_else(|| panic!("no result '{label}' in {report}"))
}

#[test]
fn factor_lists_the_irreducible_factors() {
    let out = orbitstat(&["factor", "--q", "2", "--f", "t^4+t"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("factorization = t * (t+1) * (t^2+t+1)\n"), "{text}");
    for g in ["t", "t+1", "t^2+t+1"] {
        assert!(text.contains(&format!("factor {g} = multiplicity 1")), "{text}");
    }
}

#[test]
fn necklace_rows_are_all_equal() {
    let report = json(&["necklace", "--q", "2", "--kmax", "4"]);
    assert_eq!(report["ok"], true);
    let rows = report["results"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r["value"].as_str().unwrap().ends_with("equal = true")));
}

#[test]
fn eval_both_methods_agree_on_a_double_root() {
    let report = json(&["eval", "--q", "2", "--f", "t^2", "--mu", "2:1", "--method", "both"]);
    assert_eq!(report["agreement"], true);
    for method in ["formula", "oracle"] {
        let v = result(&report, method);
        assert_eq!((v["num"].as_str(), v["den"].as_str()), (Some("1"), Some("2")));
        assert_eq!(v["decimal"], "0.500000");
    }
}

#[test]
fn eval_accepts_character_polynomials_over_extension_fields() {
    let report = json(&["--q", "9", "eval", "--f", "t^4+t", "--chi", "X1^2 - X2", "--method", "both"]);
    assert_eq!(report["agreement"], true);
    let symbolic = json(&["--q", "3", "eval", "--f", "t^3+t^2", "--mu", "1:2", "--method", "symbolic"]);
    assert_eq!(symbolic["agreement"], true);
}

#[test]
fn ensemble_mean_matches_the_symmetric_group() {
    let report = json(&["ensemble", "--q", "3", "--d", "4", "--mu", "1:1,2:1", "--method", "both"]);
    assert_eq!(report["agreement"], true);
    assert_eq!(result(&report, "count")["value"], "81");
    let mean = result(&report, "mean");
    assert_eq!((mean["num"].as_str(), mean["den"].as_str()), (Some("1"), Some("2")));
}

#[test]
fn ensemble_results_do_not_depend_on_threads() {
    let base = ["ensemble", "--q", "2", "--d", "7", "--chi", "X1^3 - X3", "--filter", "maxmult=2"];
    let one = orbitstat(&[&base[..], &["--threads", "1"]].concat());
    let four = orbitstat(&[&base[..], &["--threads", "4"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn young_histogram_agrees_with_enumeration() {
    let report = json(&["young", "--blocks", "1^2,2^2", "--histogram", "--method", "both"]);
    assert_eq!(report["agreement"], true);
    let total: u64 = report["results"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["label"].as_str().unwrap().starts_with("count "))
        .map(|e| e["value"].as_str().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(result(&report, "|H|")["value"], total.to_string());
}

#[test]
fn young_expectation_agrees_with_enumeration() {
    let report = json(&["young", "--blocks", "2^2,3^1", "--chi", "binom(2:1) + X3", "--method", "both"]);
    assert_eq!(report["agreement"], true);
}

#[test]
fn verify_passes_at_reduced_scale() {
    let out = orbitstat(&["verify", "--q", "3", "--dmax", "4"]);
    let text = stdout(&out);
    assert!(out.status.success(), "{text}");
    assert_eq!(text.matches("PASS [").count(), 10, "{text}");
    assert!(!text.contains("FAIL"));
}

#[test]
fn oversized_verify_is_refused() {
    let out = orbitstat(&["verify", "--dmax", "99"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cap is"), "{err}");
}

#[test]
fn bad_inputs_exit_nonzero() {
    for args in [
        &["factor", "--q", "6", "--f", "t"][..],
        &["factor", "--f", "t"],
        &["eval", "--q", "2", "--f", "t^2+", "--mu", "1:1"],
        &["eval", "--q", "2", "--f", "t^9", "--mu", "1:1", "--method", "oracle", "--cap-bruteforce", "100"],
        &["young", "--blocks", "1^2"],
        &["ensemble", "--q", "2", "--d", "3", "--mu", "1:1", "--filter", "squarefree", "--method", "closed"],
    ] {
        let out = orbitstat(args);
        assert!(!out.status.success(), "{args:?} succeeded");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["young", "--blocks", "1^3,2^1", "--histogram", "--method", "both", "--format", "json"];
    assert_eq!(orbitstat(&args).stdout, orbitstat(&args).stdout);
}

#[test]
fn timing_is_reported_only_on_request() {
    let plain = stdout(&orbitstat(&["factor", "--q", "5", "--f", "t^5-t"]));
    let timed = stdout(&orbitstat(&["factor", "--q", "5", "--f", "t^5-t", "--timing"]));
    assert!(!plain.contains("elapsed_ms"));
    assert!(timed.contains("elapsed_ms"));
}
