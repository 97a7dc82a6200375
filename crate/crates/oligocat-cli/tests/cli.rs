use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn scenario(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    root.join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oligocat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn temp_scenario(tag: &str, body: &str) -> String {
    let path = std::env::temp_dir().join(format!("oligocat-cli-{tag}-{}.json", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn oddness_fails_on_z2_with_a_witness() {
    let out = run(&["oddness", &scenario("z2.json")]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["status"], "fail");
    assert_eq!(r["check"], "oddness");
    let w = r["witnesses"][0]["detail"].as_str().unwrap();
    assert!(w.starts_with("2-point orbit -> 1-point orbit <- 2-point orbit: 2 orbits"), "{w}");
    assert_eq!(r["data"]["gf2_measure_exists"], false);

    let out = run(&["oddness", &scenario("finset.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["data"]["odd"], true);
}

#[test]
fn mobius_table_of_a_three_point_set() {
    let out = run(&["mobius", &scenario("finset.json"), "--object", "[3]"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["data"]["bottom_to_top"], "-1");
    assert_eq!(r["data"]["size"], 8);
    assert_eq!(r["data"]["table"].as_array().unwrap().len(), 27);
}

#[test]
fn mobius_on_partitions() {
    let out = run(&["mobius", &scenario("opfinset.json"), "--object", "[3]"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["data"]["bottom_to_top"], "2");
}

#[test]
fn phi_verify_passes() {
    let out = run(&["phi-verify", &scenario("finset.json"), "--max-points", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["data"]["complete"], true);
    assert_eq!(r["data"]["triples_checked"], 8);

    let out = run(&[
        "phi-verify",
        &scenario("finset.json"),
        "--max-points",
        "3",
        "--triple-cap",
        "10",
        "--samples",
        "5",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["data"]["complete"], false);
    assert!(r["data"]["sampled_pairs"].as_u64().unwrap() > 0);

    let out = run(&["phi-verify", &scenario("opfinset.json"), "--max-elements", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["data"]["complete"], true);
}

#[test]
fn reports_are_deterministic() {
    let args = ["report-all", &scenario("z2.json"), "--max-points", "2"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r = report(&a);
    assert_eq!(r["data"]["odd"], false);
    assert_eq!(r["data"]["scenario"], "Z/2-sets");
}

#[test]
fn report_all_on_the_partition_instance() {
    let out = run(&["report-all", &scenario("opfinset.json"), "--max-elements", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = report(&out);
    let checks: Vec<&str> = r["data"]["reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["check"].as_str().unwrap())
        .collect();
    assert!(checks.contains(&"deligne-compare"));
    assert!(checks.contains(&"phi-verify"));
}

#[test]
fn regular_solve_finds_alpha_and_beta() {
    let out = run(&["regular-solve", &scenario("finset.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["data"]["roots"], serde_json::json!(["-2", "-1"]));
    assert_eq!(r["data"]["gcd"], "2*t + 3*t^2 + t^3");
}

#[test]
fn measure_checks() {
    let out = run(&["check-measure", &scenario("finset.json")]);
    assert_eq!(out.status.code(), Some(0));
    let ids = report(&out)["data"]["base_change_identities"].clone();
    assert!(ids.as_array().unwrap().iter().any(|i| i == "2·(-1) + 4·1 + 1·(-1) = 1"));

    let out = run(&["derive-measure", &scenario("opfinset.json"), "--max-elements", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["data"]["measure"], "derived from t-power");

    let out = run(&["check-degree", &scenario("s3.json")]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn beta_is_refused_on_z2() {
    let body = std::fs::read_to_string(scenario("z2.json")).unwrap().replace("\"derived\"", "\"beta\"");
    let path = temp_scenario("beta", &body);
    let out = run(&["check-measure", &path]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["witnesses"][0]["axiom"], "precondition");

    let body = std::fs::read_to_string(scenario("finset.json")).unwrap().replace("\"derived\"", "\"beta\"");
    let path = temp_scenario("beta-ok", &body);
    let out = run(&["check-measure", &path, "--max-points", "4"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn gf2_measure_follows_oddness() {
    let body = std::fs::read_to_string(scenario("finset.json"))
        .unwrap()
        .replace("\"derived\"", "\"gf2-all-ones\"");
    let path = temp_scenario("gf2", &body);
    assert_eq!(run(&["check-measure", &path, "--ring", "gf2"]).status.code(), Some(0));
    let body = std::fs::read_to_string(scenario("z2.json"))
        .unwrap()
        .replace("\"derived\"", "\"gf2-all-ones\"");
    let path = temp_scenario("gf2-z2", &body);
    assert_eq!(run(&["check-measure", &path, "--ring", "gf2"]).status.code(), Some(1));
}

#[test]
fn atom_products_and_dichotomy() {
    let out = run(&["atom-product", &scenario("finset.json"), "--object", "[2]", "--object2", "[2]"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["data"]["count"], 7);
    let out = run(&["dichotomy", &scenario("z2.json"), "--object", "G+[1]"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["report-all", &scenario("z2.json"), "--max-points", "2"]);
    let r = report(&out);
    let d = r["data"]["reports"]
        .as_array()
        .unwrap()
        .iter()
        .find(|x| x["check"] == "dichotomy")
        .unwrap()
        .clone();
    assert_eq!(d["data"]["objects"].as_array().unwrap().len(), 3);
}

#[test]
fn compositions() {
    let out = run(&["knop-compose", &scenario("opfinset.json"), "--object", "[1]", "--object2", "[1]"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let rows = r["data"]["composites"].as_array().unwrap();
    // The split relation composed with itself picks up one factor of t.
    assert!(rows.iter().any(|row| row["b_after_a"][0]["coeff"] == "t"));

    let out = run(&["perm-compose", &scenario("finset.json"), "--object", "[2]", "--object2", "[1]"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = report(&out)["data"]["composites"].as_array().unwrap().clone();
    assert!(!rows.is_empty());
}

#[test]
fn deligne_and_nilpotent_search() {
    let out = run(&["deligne-compare", &scenario("opfinset.json"), "--max-elements", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let body = std::fs::read_to_string(scenario("finset.json")).unwrap().replace("\"derived\"", "\"alpha\"");
    let path = temp_scenario("alpha", &body);
    let out = run(&["nilpotent-search", &path, "--object", "[2]"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["data"]["dim"], 15);
    assert_eq!(r["data"]["radical_dim"], 0);
    assert_eq!(r["data"]["exhausted"], true);
    assert!(r["data"]["witness"].is_null());
}

#[test]
fn input_errors_exit_with_two() {
    let bad = temp_scenario("bad", "{ \"category\": { \"kind\": \"nope\" } }");
    assert_eq!(run(&["subobjects", &bad]).status.code(), Some(2));
    assert_eq!(run(&["subobjects", "/nonexistent/scenario.json"]).status.code(), Some(2));
    let fin = scenario("finset.json");
    assert_eq!(run(&["subobjects", &fin, "--max-points", "0"]).status.code(), Some(2));
    assert_eq!(run(&["subobjects", &fin, "--max-elements", "3"]).status.code(), Some(2));
    assert_eq!(run(&["subobjects", &fin, "--object", "[9]"]).status.code(), Some(2));
    assert_eq!(run(&["subobjects", &fin, "--object", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["deligne-compare", &fin]).status.code(), Some(2));
    assert_eq!(run(&["oddness", &scenario("opfinset.json")]).status.code(), Some(2));
    assert_eq!(run(&["check-degree", &scenario("opfinset.json"), "--ring", "rational"]).status.code(), Some(2));
}

#[test]
fn text_output() {
    let out = run(&["subobjects", &scenario("opfinset.json"), "--object", "[3]", "--text"]);
    assert_eq!(out.status.code(), Some(0));
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.starts_with("subobjects on op-finset (bound 3): PASS"));
    assert!(s.contains("count: 5"));
}
