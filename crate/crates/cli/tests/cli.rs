use assert_cmd::Command;
use predicates::prelude::*;
use serde_json::Value;

/// The binary with no INTCPX_* variables leaking in from the caller.
fn bare() -> Command {
    let mut cmd = Command::cargo_bin("intcpx").unwrap();
    for var in [
        "INTCPX_TABLE",
        "INTCPX_LIMIT",
        "INTCPX_HORIZON",
        "INTCPX_POLICY",
        "INTCPX_FORMAT",
        "INTCPX_THREADS",
    ] {
        cmd.env_remove(var);
    }
    cmd
}

fn intcpx() -> Command {
    let mut cmd = bare();
    cmd.args(["--limit", "100000"]);
    cmd
}

fn json_of(args: &[&str]) -> Value {
    let out = intcpx()
        .args(["--format", "json"])
        .args(args)
        .output()
        .unwrap();
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn cpx_of_eleven() {
    intcpx()
        .args(["cpx", "11"])
        .assert()
        .success()
        .stdout("8\n");
}

#[test]
fn cpx_beyond_the_table() {
    // 3^30 needs the oracle, not the table.
    intcpx()
        .args(["cpx", "205891132094649"])
        .assert()
        .success()
        .stdout("90\n");
}

#[test]
fn counterexample_none() {
    intcpx()
        .args(["counterexample", "--q", "64", "--m", "70"])
        .assert()
        .code(0)
        .stdout("none\n");
    intcpx()
        .args(["counterexample", "--q", "32", "--m", "35"])
        .assert()
        .code(0)
        .stdout("none\n");
}

#[test]
fn counterexample_found_is_a_failure() {
    // 14 = 2(2·3 + 1).
    intcpx()
        .args(["counterexample", "--q", "4", "--m", "14"])
        .assert()
        .code(1)
        .stdout(predicate::str::contains("14 = 2(2·3^1+1)·3^0"));
}

#[test]
fn stable_one() {
    intcpx()
        .args(["stable", "1"])
        .assert()
        .success()
        .stdout(predicate::str::contains("UnstableCertified K=1"));
    let v = json_of(&["stable", "1"]);
    assert_eq!(v["kind"], "UnstableCertified");
    assert_eq!(v["K"]["value"], 1);
    assert_eq!(v["stable_complexity"], 0);
    assert_eq!(v["certificate"], "certified");
    assert_eq!(v["horizon"], 12);
}

#[test]
fn unresolved_under_strict_exits_three() {
    intcpx().args(["stable-cpx", "856"]).assert().code(3);
    intcpx()
        .args(["--policy", "assume", "stable-cpx", "856"])
        .assert()
        .success()
        .stdout("21 (horizon-assumed)\n");
}

#[test]
fn environment_and_flag_precedence() {
    intcpx()
        .env("INTCPX_POLICY", "assume")
        .args(["stable-cpx", "856"])
        .assert()
        .success();
    intcpx()
        .env("INTCPX_POLICY", "assume")
        .args(["--policy", "strict", "stable-cpx", "856"])
        .assert()
        .code(3);
    intcpx()
        .env("INTCPX_FORMAT", "json")
        .args(["cpx", "11"])
        .assert()
        .stdout(predicate::str::contains("\"complexity\": 8"));
}

#[test]
fn usage_errors_exit_two() {
    intcpx().args(["cpx"]).assert().code(2);
    intcpx().args(["cpx", "0"]).assert().code(2);
    intcpx().args(["ldp", "parse", "x1+"]).assert().code(2);
    intcpx().args(["expr", "200000"]).assert().code(2);
    intcpx()
        .args(["--format", "csv", "expr", "11"])
        .assert()
        .code(2);
}

#[test]
fn defects_are_exact_in_json() {
    let v = json_of(&["defect", "2188"]);
    assert_eq!(v["complexity"], 22);
    assert_eq!(v["defect"]["C"], 22);
    assert_eq!(v["defect"]["n"], "2188");
    assert!(v["defect"]["approx"]
        .as_str()
        .unwrap()
        .starts_with("0.9987"));
}

#[test]
fn pair_commands() {
    intcpx()
        .args(["ldp", "gap", "2(1094x1+1)", "--c", "25"])
        .assert()
        .success()
        .stdout("2\n");
    intcpx()
        .args(["ldp", "eval", "(2x1+1)x2+1", "--at", "1,2"])
        .assert()
        .success()
        .stdout("64\n");
    intcpx()
        .args(["ldp", "substantial", "(2x1+1)x2+1"])
        .assert()
        .success()
        .stdout(predicate::str::starts_with("substantial"));
    let v = json_of(&["ldp", "parse", "2(1094x1+1)"]);
    assert_eq!(v["poly"], "2188x1 + 2");
    assert_eq!(v["C"], 25);
}

#[test]
fn exceptions_of_x_plus_one() {
    let v = json_of(&["exceptions", "x1+1", "--bounds", "3"]);
    assert_eq!(v["check"], "exceptional set");
    assert_eq!(v["result"]["tuples"], serde_json::json!([[1], [2], [3]]));
}

#[test]
fn covering_pass_and_fail() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &good,
        r#"[{"expression":"2","C":2},{"expression":"3","C":3}]"#,
    )
    .unwrap();
    std::fs::write(&bad, r#"[{"expression":"2","C":2}]"#).unwrap();
    let run = |f: &std::path::Path| {
        intcpx()
            .args(["verify-covering", "--s", "2:2", "--n", "10000", "--file"])
            .arg(f)
            .assert()
    };
    run(&good).code(0);
    run(&bad).code(1).stdout(predicate::str::contains(
        "leader 3 not efficiently represented",
    ));
}

#[test]
fn convergence_and_stabilization() {
    intcpx()
        .args(["converge", "--a", "2", "--k-max", "8"])
        .assert()
        .success()
        .stdout(predicate::str::contains(
            "strictly_increasing=true bounded_by_target=true",
        ));
    intcpx()
        .args(["stabilization", "--instances", "100"])
        .assert()
        .success()
        .stdout("a=2 b=41\n");
}

#[test]
fn thread_count_does_not_change_output() {
    let run = |threads: &str| {
        intcpx()
            .args([
                "--threads",
                threads,
                "--format",
                "csv",
                "enumerate",
                "--s",
                "3/2",
                "--n",
                "5000",
            ])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn table_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.icpx");
    bare()
        .args(["--limit", "5000", "table", "build", "--out"])
        .arg(&path)
        .assert()
        .success()
        .stdout("limit=5000 max_complexity=29\n");
    bare()
        .arg("--table")
        .arg(&path)
        .args(["table", "info"])
        .assert()
        .success()
        .stdout("limit=5000 max_complexity=29\n");
    // A larger request rebuilds and overwrites the cache.
    bare()
        .arg("--table")
        .arg(&path)
        .args(["--limit", "6000", "table", "info"])
        .assert()
        .stdout("limit=6000 max_complexity=29\n");
    bare()
        .env("INTCPX_TABLE", &path)
        .args(["table", "info"])
        .assert()
        .stdout("limit=6000 max_complexity=29\n");
}
