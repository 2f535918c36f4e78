use std::path::Path;
use std::process::{Command, Output};

fn hindsight(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hindsight")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn single_iteration_gives_one_snapshot() {
    let o = hindsight(&["gap", "--game", "extended_shapleys", "--iters", "1", "--classes", "external,blind_causal"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,player,deviation_class,gap,summed_gap");
    assert_eq!(lines.len(), 1 + 2 * 2);
    assert!(lines[1..].iter().all(|l| l.starts_with("1,")));
}

#[test]
fn same_spec_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = hindsight(&[
            "gap", "--game", "extended_shapleys", "--iters", "300", "--cadence", "50", "--mode", "alternating", "--seed", "7",
            "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let x = std::fs::read(&a).unwrap();
    assert!(x.len() > 100);
    assert_eq!(x, std::fs::read(&b).unwrap());
}

#[test]
fn exported_file_matches_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("shapley.efg");
    let o = hindsight(&["export", "--game", "extended_shapleys", "--bonus", "0.003", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let args = ["--iters", "200", "--cadence", "40", "--classes", "external,informed_action,blind_cf"];
    let from_file = hindsight(&[&["gap", "--game", path.to_str().unwrap()][..], &args[..]].concat());
    let builtin = hindsight(&[&["gap", "--game", "extended_shapleys"][..], &args[..]].concat());
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(stdout(&from_file), stdout(&builtin));
}

#[test]
fn export_round_trips_and_carries_bonus() {
    let o = hindsight(&["export", "--game", "extended_shapleys", "--bonus", "30"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("31"), "{}", stdout(&o));
    let o = hindsight(&["export", "--game", "extended_bos"]);
    let game = hindsight::game_library::parse_efg(&stdout(&o)).unwrap();
    assert_eq!(hindsight::game_library::write_efg(&game), stdout(&o));
}

#[test]
fn appendix_passes_and_reports_json() {
    let o = hindsight(&["verify-appendix"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("checks passed"));
    let o = hindsight(&["verify-appendix", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let arr = v.as_array().unwrap();
    assert!(arr.len() > 40);
    for r in arr {
        for key in ["check", "expected", "computed", "tolerance", "pass"] {
            assert!(r.get(key).is_some(), "{r}");
        }
    }
}

#[test]
fn perturbed_bos_fails_named_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bos.efg");
    let text = stdout(&hindsight(&["export", "--game", "extended_bos"])).replacen("{ 3, 2 }", "{ 4, 2 }", 1);
    std::fs::write(&path, text).unwrap();
    let o = hindsight(&["verify-appendix", "--json", "--bos-efg", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let failed: Vec<&str> =
        v.as_array().unwrap().iter().filter(|r| r["pass"] == false).map(|r| r["check"].as_str().unwrap()).collect();
    assert!(failed.contains(&"extended BotS blind counterfactual root->U"), "{failed:?}");
}

#[test]
fn table_renders_and_passes() {
    let o = hindsight(&["table1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("OS-CF"));
    let o = hindsight(&["table1", "--json"]);
    let cells: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let ef_af = cells.as_array().unwrap().iter().find(|c| c["row"] == "Ef" && c["col"] == "Af").unwrap();
    assert_eq!(ef_af["col_gap"].as_f64().unwrap(), 1.0);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["gap", "--game", "not_a_game"][..],
        &["gap", "--game", "macqueen", "--iters", "0"],
        &["gap", "--game", "macqueen", "--classes", "bogus"],
        &["gap", "--game", "extended_shapleys", "--bonus", "inf"],
        &["gap", "--game", "macqueen", "--seeds", "1,2"],
        &["frobnicate"],
    ] {
        let o = hindsight(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn seeds_fan_out_to_separate_files() {
    let dir = tempfile::tempdir().unwrap();
    let template = dir.path().join("run_{seed}.csv");
    let o = hindsight(&[
        "gap", "--game", "extended_mp", "--iters", "20", "--cadence", "10", "--seeds", "1,2,3", "--jobs", "2", "--out",
        template.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let files: Vec<String> = (1..=3).map(|s| std::fs::read_to_string(dir.path().join(format!("run_{s}.csv"))).unwrap()).collect();
    assert!(files.iter().all(|f| f == &files[0]));
    assert!(!Path::new(&template).exists());
}

#[test]
fn log_cadence_snapshots_geometrically() {
    let o = hindsight(&["gap", "--game", "macqueen", "--iters", "100", "--log-cadence", "1", "--classes", "external"]);
    assert_eq!(o.status.code(), Some(0));
    let ts: Vec<String> = stdout(&o).lines().skip(1).map(|l| l.split(',').next().unwrap().to_string()).collect();
    let mut uniq = ts.clone();
    uniq.dedup();
    assert_eq!(uniq, ["1", "10", "100"]);
}
