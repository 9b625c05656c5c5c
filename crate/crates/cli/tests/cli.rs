//! End-to-end runs of the `sle-passage` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin(out: &Path) -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sle-passage"));
    c.env("SLE_PASSAGE_OUT", out);
    c
}

fn run(out: &Path, args: &[&str]) -> Output {
    bin(out).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn run_dirs(out: &Path) -> Vec<PathBuf> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    dirs.sort();
    dirs
}

#[test]
fn eval_prints_fifteen_digits() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: &[(&[&str], &str)] = &[
        (
            &["eval", "two_path_one_point", "--z", "0+1i"],
            "0.800000000000000",
        ),
        (
            &["eval", "left_passage_one", "--z", "1+1i"],
            "0.853553390593274",
        ),
        (&["eval", "G", "--sigma", "1"], "0"),
        (&["eval", "G", "--sigma", "0"], "1.00000000000000"),
        (
            &["eval", "radius_cdf", "--r", "2", "--z", "0+1i"],
            "0.562500000000000",
        ),
        (&["eval", "gamma_fn", "--x", "0.5"], "1.77245385090552"),
    ];
    for (args, want) in cases {
        let o = run(tmp.path(), args);
        assert!(
            o.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert_eq!(stdout(&o).trim(), *want, "{args:?}");
    }
    assert!(
        run_dirs(tmp.path()).is_empty(),
        "eval writes no run directory"
    );
}

#[test]
fn eval_grid_writes_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        tmp.path(),
        &["eval", "left_passage_one", "--grid", "-1:1:3,0.5:1:2"],
    );
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7, "{text}");
    assert!(lines[0].starts_with("re,im,value"));
}

#[test]
fn usage_and_domain_errors_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    for args in [
        &["eval", "no_such_formula", "--z", "0+1i"][..],
        &["eval", "left_passage_one", "--z", "0-1i"],
        &["eval", "left_passage_two", "--z", "0+1i"],
        &["eval", "G", "--sigma", "1.5"],
        &["integrate", "second", "--bogus"],
        &["mc", "one-point", "--z", "0+1i", "--n", "10"],
    ] {
        let o = run(tmp.path(), args);
        assert_eq!(
            o.status.code(),
            Some(3),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn mc_run_writes_manifest_and_reruns_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let args = [
        "mc",
        "one-point",
        "--z",
        "0+1i",
        "--z",
        "1+1i",
        "--n",
        "2000",
        "--seed",
        "7",
    ];
    let o = run(tmp.path(), &args);
    assert!(o.status.code() == Some(0) || o.status.code() == Some(2));
    let dirs = run_dirs(tmp.path());
    assert_eq!(dirs.len(), 1);
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(dirs[0].join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "mc-one-point");
    assert_eq!(manifest["seeds"][0], 7);
    for name in manifest["outputs"].as_array().unwrap() {
        assert!(dirs[0].join(name.as_str().unwrap()).exists(), "{name}");
    }
    let summary = fs::read_to_string(dirs[0].join("summary.csv")).unwrap();
    assert!(summary.starts_with("# manifest: manifest.json\n"));

    let again = run(
        tmp.path(),
        &["rerun", dirs[0].join("manifest.json").to_str().unwrap()],
    );
    assert_eq!(again.status.code(), o.status.code());
    let dirs = run_dirs(tmp.path());
    assert_eq!(dirs.len(), 2);
    let records = |d: &Path| -> Vec<Value> {
        fs::read_to_string(d.join("records.jsonl"))
            .unwrap()
            .lines()
            .map(|l| {
                let mut v: Value = serde_json::from_str(l).unwrap();
                v.as_object_mut().unwrap().remove("wall_clock_s");
                v
            })
            .collect()
    };
    assert_eq!(records(&dirs[0]), records(&dirs[1]));
}

#[test]
fn integrate_second_small_budget_writes_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        tmp.path(),
        &[
            "integrate",
            "second",
            "--budget",
            "1e4",
            "--seed",
            "1",
            "--slice-w",
            "0.2+0.5i",
            "--slice-n",
            "8",
        ],
    );
    assert!(
        o.status.code() == Some(0) || o.status.code() == Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let dir = &run_dirs(tmp.path())[0];
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "integrate-second");
    let result: Value =
        serde_json::from_str(&fs::read_to_string(dir.join("result.json")).unwrap()).unwrap();
    let v = result["value"].as_f64().unwrap();
    assert!(v > 0.09 && v < 0.12, "{v}");
    let slice = fs::read_to_string(dir.join("slice.csv")).unwrap();
    assert_eq!(slice.lines().count(), 2 + 64);
}

#[test]
fn integrate_first_matches_pi_over_ten() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["integrate", "first"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("E[A] = 0.314159"), "{}", stdout(&o));
}

#[test]
fn verify_quick_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["verify", "--quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 failed"));
}
