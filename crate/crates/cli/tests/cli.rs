use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn egeq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_egeq"))
        .args(args)
        .output()
        .expect("run egeq")
}

fn json(args: &[&str]) -> Value {
    let o = egeq(args);
    serde_json::from_slice(&o.stdout).expect("json output")
}

fn text(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("egeq-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn enumerate_json_shape() {
    let v = json(&["enumerate", "2"]);
    assert_eq!(v["command"], "enumerate");
    assert_eq!(v["rows"], serde_json::json!([{ "n": 4, "a": [5, 6] }]));
    assert_eq!(v["summary"]["count"], 1);
    assert!(v["prune_counters"]["nodes"].as_u64().unwrap() > 0);
    assert_eq!(
        json(&["enumerate", "3"])["rows"].as_array().unwrap().len(),
        6
    );
    let five = text(&egeq(&["enumerate", "5", "--format", "csv"]));
    assert!(five.lines().any(|l| l == "57,58 59 60 61 62"));
}

#[test]
fn enumerate_checkpoint_resumes() {
    let dir = scratch("cp");
    let path = dir.join("k6.state");
    let p = path.to_str().unwrap();
    let first = json(&["enumerate", "6", "--checkpoint", p, "--jobs", "2"]);
    assert!(path.exists());
    // A finished state file resumes to the same answer without new work.
    let again = json(&["enumerate", "6", "--checkpoint", p]);
    assert_eq!(first["rows"], again["rows"]);
    assert_eq!(first["rows"], json(&["enumerate", "6"])["rows"]);
    let wrong = egeq(&["enumerate", "5", "--checkpoint", p]);
    assert_eq!(wrong.status.code(), Some(1));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn greedy_targets() {
    let v = json(&["greedy", "--x", "1/32"]);
    assert_eq!(v["summary"]["k"], 13);
    assert_eq!(v["rows"][12]["a"], 32);
    let v = json(&["greedy", "--n", "1"]);
    assert_eq!(v["status"], "ok");
    let o = egeq(&["greedy", "--n", "41", "--max-k", "13"]);
    assert_eq!(o.status.code(), Some(3));
    let o = egeq(&["greedy", "--n", "41", "--max-k", "14", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(text(&o).lines().last(), Some("14,70"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["enumerate", "1"][..],
        &["greedy", "--x", "2/1"],
        &["greedy", "--x", "1/0"],
        &["greedy", "--x", "one"],
        &["greedy", "--x", "1/3", "--n", "5"],
        &["greedy"],
        &["sweep", "10", "5"],
        &["multiplicity", "--subset-size", "17"],
        &["chain", "2", "3"],
        &["nonsense"],
    ] {
        assert_eq!(egeq(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn sweep_csv_columns() {
    let o = egeq(&["sweep", "55", "57"]);
    assert_eq!(
        text(&o),
        "n,k,a_k,terminated\n55,19,88,true\n56,6092,12230,true\n57,5,62,true\n"
    );
    let o = egeq(&["sweep", "56", "56", "--with-ratios"]);
    assert!(text(&o).starts_with("n,k,a_k,terminated,ak_ratio,k_over_n\n56,6092,12230,true,0.99"));
    let o = egeq(&["sweep", "56", "57", "--max-k", "100"]);
    assert_eq!(o.status.code(), Some(3));
    let v = json(&["sweep", "56", "57", "--max-k", "100", "--format", "json"]);
    assert_eq!(v["summary"]["unterminated"], serde_json::json!([56]));
}

#[test]
fn table1_output() {
    let o = egeq(&["table1", "--u-max", "11"]);
    let out = text(&o);
    let us: Vec<&str> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(us, ["0", "1", "2", "3", "4", "6", "9", "11"]);
    let all = text(&egeq(&["table1"]));
    assert!(all.starts_with("u,k0,r,status\n"));
    assert!(all.contains("\n17,66328,1048572,computed\n"));
    assert!(all.contains(
        "\n99,364550281031913286431277811782,2535300206192230667655098198606,verified-constant\n"
    ));
    assert_eq!(all.lines().count(), 17);
    let v = json(&["table1", "--format", "json"]);
    assert_eq!(
        v["summary"]["unsupported_u"].as_array().unwrap().len(),
        90 - 4
    );
}

#[test]
fn multiplicity_reports_certificates() {
    let v = json(&["multiplicity", "--subset-size", "1"]);
    assert_eq!(v["summary"]["compatible"], 16);
    assert!(v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["certificate"] == 2));
    let v = json(&["multiplicity", "--subset-size", "5"]);
    assert_eq!(v["summary"]["subsets_checked"], 4368);
    assert_eq!(v["summary"]["compatible"], 0);
}

#[test]
fn chain_outputs() {
    let o = egeq(&["chain", "8", "1"]);
    assert_eq!(text(&o), "i,k_i,last_term\n1,13,32\n");
    let o = egeq(&["chain", "8", "4"]);
    assert_eq!(text(&o).lines().last(), Some("4,5919,12230"));

    let dir = scratch("terms");
    let d = dir.to_str().unwrap();
    let v = json(&["chain", "8", "3", "--terms-dir", d, "--format", "json"]);
    assert_eq!(v["summary"]["representations"], 4);
    let step1 = fs::read_to_string(dir.join("step_1.txt")).unwrap();
    assert_eq!(step1.lines().count(), 13);
    assert_eq!(step1.lines().last(), Some("32"));
    assert_eq!(
        fs::read_to_string(dir.join("step_3.txt"))
            .unwrap()
            .lines()
            .count(),
        169
    );
    fs::remove_dir_all(dir).unwrap();

    let o = egeq(&["chain", "8", "5", "--max-k", "1000"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(text(&o).lines().count(), 4);
}

#[test]
fn payloads_are_deterministic() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timing_ms");
        v
    };
    for args in [
        &["table1", "--format", "json"][..],
        &["chain", "8", "4", "--format", "json"],
    ] {
        assert_eq!(strip(json(args)), strip(json(args)));
    }
}
