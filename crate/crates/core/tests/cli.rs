use std::process::{Command, Output};

use lintest::adversaries::{materialize, FaultSpec};
use lintest::campaign::run_trials;
use lintest::ratio::Ratio;
use lintest::testers::{self_test, Budget};
use lintest::{LinearSpec, VectorDomainParams};
use serde_json::Value;

fn lintest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lintest"))
        .args(args)
        .env_remove("LINTEST_SCAN_BITS")
        .env_remove("LINTEST_PAIR_SCAN_BITS")
        .output()
        .expect("running lintest")
}

fn report(args: &[&str]) -> Value {
    let out = lintest(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn without_wall_time(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_time_ms");
    v
}

#[test]
fn calibrate_prints_the_standard_budget() {
    let r = report(&["calibrate", "--epsilon", "1/8"]);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["calibration"]["p1"], "1/16");
    assert_eq!(r["calibration"]["p2"], "13/1536");
    assert_eq!(r["budget"]["k1"], 96);
    assert_eq!(r["budget"]["k2"], 709);
    let r = report(&[
        "calibrate",
        "--epsilon",
        "0.25",
        "--alpha",
        "1/2",
        "--beta",
        "1/32",
    ]);
    assert_eq!(r["calibration"]["beta"], "1/32");
}

#[test]
fn correct_program_never_fails() {
    let r = report(&[
        "selftest",
        "--n",
        "16",
        "--b",
        "7",
        "--epsilon",
        "1/8",
        "--fault",
        "correct",
        "--trials",
        "100",
        "--seed",
        "1",
    ]);
    assert_eq!(r["summary"]["failures"], 0);
    assert_eq!(r["summary"]["trials"], 100);
    assert_eq!(r["trials"].as_array().unwrap().len(), 100);
    assert!(r["summary"]["total_queries"].as_u64().unwrap() <= 100 * (2 * 96 + 3 * 709));
}

#[test]
fn far_program_fails_and_exits_zero() {
    let r = report(&[
        "selftest",
        "--n",
        "16",
        "--b",
        "7",
        "--epsilon",
        "1/8",
        "--fault",
        "random-additive:0.25:1",
        "--trials",
        "1000",
        "--seed",
        "1",
    ]);
    let rate = r["summary"]["fail_rate"].as_f64().unwrap();
    assert!(rate >= 0.75, "{rate}");
    assert_eq!(r["adversary"]["epsilon0"], "1/4");
    let first = &r["trials"][0]["verdict"];
    assert_eq!(first["outcome"], "FAIL");
    assert!(first["witness"]["lhs"].is_array());
}

#[test]
fn reports_are_reproducible_and_match_the_library() {
    let args = [
        "selftest",
        "--n",
        "12",
        "--b",
        "-3",
        "--fault",
        "sign-balanced-paired:1/8:2",
        "--fault-seed",
        "5",
        "--trials",
        "60",
        "--seed",
        "42",
    ];
    let a = without_wall_time(report(&args));
    let mut parallel = args.to_vec();
    parallel.extend(["--parallel", "3"]);
    let b = without_wall_time(report(&parallel));
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );

    let f = LinearSpec::scalar(-3);
    let spec = FaultSpec::parse_compact("sign-balanced-paired:1/8:2")
        .unwrap()
        .with_seed(5);
    let adv = materialize(&spec, &f, VectorDomainParams::new(12, 1).unwrap()).unwrap();
    let budget = Budget::for_epsilon(Ratio::new(1, 8)).unwrap();
    let records = run_trials(60, 42, None, |rng| {
        Ok((self_test(&f, &adv.oracle, &budget, rng)?, None))
    })
    .unwrap();
    for (rec, json) in records.iter().zip(a["trials"].as_array().unwrap()) {
        assert_eq!(json["seed"], rec.seed);
        assert_eq!(
            json["verdict"]["outcome"],
            if rec.verdict.failed() { "FAIL" } else { "PASS" }
        );
        assert_eq!(json["verdict"]["queries_used"], rec.verdict.queries_used);
    }
    let fails = records.iter().filter(|r| r.verdict.failed()).count();
    assert_eq!(a["summary"]["failures"], fails as u64);
}

#[test]
fn every_command_runs() {
    let r = report(&["proptest", "--n", "8", "--b", "5", "--trials", "3"]);
    assert_eq!(r["trials"][0]["learned_b"], "5");
    let r = report(&[
        "homtest", "--n", "10", "--m", "3", "--b", "1,-2,3", "--trials", "2",
    ]);
    assert_eq!(r["summary"]["failures"], 0);
    let r = report(&[
        "check",
        "--n",
        "16",
        "--b",
        "3",
        "--fault",
        "single-point:1234:5",
        "--input",
        "1234",
        "--trials",
        "20",
    ]);
    assert!(r["summary"]["failures"].as_u64().unwrap() >= 15);
    let r = report(&[
        "analyze",
        "--n",
        "8",
        "--b",
        "5",
        "--fault",
        "sign-balanced-paired:1/4",
    ]);
    let checks = r["analysis"]["bound_checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["holds"] == true));
    assert_eq!(r["analysis"]["profile"]["epsilon0"], "1/4");
    assert_eq!(r["analysis"]["pairing_fail_prob"], "0");
}

#[test]
fn config_files_and_fault_files() {
    let dir = tempfile::tempdir().unwrap();
    let fault = dir.path().join("fault.json");
    std::fs::write(
        &fault,
        r#"{"kind":"single-point","magnitude":"5","sites":{"explicit":[[77]]}}"#,
    )
    .unwrap();
    let r = report(&[
        "selftest",
        "--n",
        "8",
        "--fault-file",
        fault.to_str().unwrap(),
        "--k1",
        "5",
        "--k2",
        "5",
    ]);
    assert_eq!(r["adversary"]["epsilon0"], "1/256");
    assert!(r.get("calibration").is_none());

    let config = dir.path().join("run.json");
    std::fs::write(
        &config,
        r#"{"command":"homtest","n":12,"m":2,"b":["3","-4"],"fault":{"kind":"random-additive","fraction":"1/4"},"trials":50,"seed":9}"#,
    )
    .unwrap();
    let out_path = dir.path().join("report.json");
    let out = lintest(&[
        "run",
        config.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("homtest: "));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(r["config"]["b"], serde_json::json!(["3", "-4"]));
    assert!(r["summary"]["failures"].as_u64().unwrap() >= 40);
    // The echoed config reruns to the same report.
    std::fs::write(&config, serde_json::to_string(&r["config"]).unwrap()).unwrap();
    let again = report(&["run", config.to_str().unwrap()]);
    assert_eq!(without_wall_time(again), without_wall_time(r));
}

#[test]
fn configuration_errors_exit_nonzero() {
    for args in [
        vec!["selftest", "--m", "2", "--b", "1,2"],
        vec!["homtest", "--m", "2"],
        vec!["selftest", "--fault", "random-additive:1/3", "--n", "8"],
        vec!["selftest", "--epsilon", "2/3"],
        vec!["check", "--n", "8"],
        vec!["analyze", "--n", "24"],
        vec!["selftest", "--fault", "nonsense"],
        vec!["run", "/nonexistent/config.json"],
    ] {
        let out = lintest(&args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(
            String::from_utf8_lossy(&out.stderr).contains("error"),
            "{args:?}"
        );
    }
}

#[test]
fn scan_limit_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_lintest"))
        .args(["analyze", "--n", "8"])
        .env("LINTEST_SCAN_BITS", "4")
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("limit of 4 bits"));
    let r = report(&[
        "analyze",
        "--n",
        "16",
        "--scan-bits",
        "16",
        "--pair-scan-bits",
        "8",
    ]);
    assert!(r["analysis"].get("split_fail_prob").is_none());
}
