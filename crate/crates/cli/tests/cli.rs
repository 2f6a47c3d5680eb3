use std::fs;
use std::process::{Command, Output};

fn rwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rwalk"))
        .args(args)
        .output()
        .expect("spawn rwalk")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn theorem_single_pair_passes() {
    let out = rwalk(&[
        "theorem",
        "--m",
        "1",
        "--n",
        "2",
        "--dist",
        "constant:1",
        "--trials",
        "200000",
        "--seed",
        "42",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "suite,check,m,n,dist,trials,seed,expected,p_hat,ci_low,ci_high,level,ties,passed"
    );
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("theorem,farther m=1 n=2,1,2,constant:1.0,200000,42/1/2/0,"));
    assert!(lines[1].ends_with(",true"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["rayleigh", "--n", "1", "--seed", "1"][..],
        &["estimate", "--m", "0", "--n", "0", "--seed", "1"],
        &["theorem", "--seed", "1", "--no-such-flag"],
        &["theorem", "--m", "1", "--n", "2"],
        &["theorem", "--seed", "1", "--dist", "cauchy:1"],
        &["theorem", "--seed", "1", "--format", "xml"],
        &["oracle", "--m", "1", "--n", "1"],
        &[],
    ] {
        let out = rwalk(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(rwalk(&["--help"]).status.code(), Some(0));
    assert_eq!(rwalk(&["--version"]).status.code(), Some(0));
    assert_eq!(rwalk(&["theorem", "--help"]).status.code(), Some(0));
}

#[test]
fn oracle_prints_closed_forms() {
    let out = rwalk(&["oracle", "--m", "3", "--n", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "0.375\n");
    let out = rwalk(&["oracle", "--n", "4"]);
    assert_eq!(stdout(&out), "0.2\n");
    let out = rwalk(&["oracle", "--m", "1", "--n", "2", "--quadrature"]);
    let v: f64 = stdout(&out).trim().parse().unwrap();
    assert!((v - 1.0 / 3.0).abs() < 1e-9);
}

#[test]
fn oracle_self_check_report() {
    let out = rwalk(&["oracle", "--format", "jsonl"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 8);
}

#[test]
fn lemma_constant_triple_expects_one() {
    let out = rwalk(&["lemma", "--dist", "constant:1", "--trials", "100000", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let sum = text.lines().find(|l| l.contains("sum")).expect("sum row");
    let fields: Vec<&str> = sum.split(',').collect();
    assert_eq!(fields[7], "1.0");
    assert_eq!(fields[13], "true");
}

#[test]
fn identical_across_runs_shards_and_sinks() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("report.csv");
    let base = [
        "theorem", "--m", "2", "--n", "3", "--dist", "exp:1", "--trials", "50001", "--seed", "7",
    ];
    let run = |extra: &[&str]| {
        let mut args = base.to_vec();
        args.extend_from_slice(extra);
        rwalk(&args)
    };
    let reference = run(&["--shards", "1"]).stdout;
    assert_eq!(run(&["--shards", "1"]).stdout, reference);
    assert_eq!(run(&["--shards", "8"]).stdout, reference);
    assert_eq!(run(&["--shards", "64", "--out", "-"]).stdout, reference);
    let out = run(&["--shards", "3", "--out", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(fs::read(&file).unwrap(), reference);
}

#[test]
fn estimate_modes() {
    let out = rwalk(&[
        "estimate", "--n", "3", "--radius", "1", "--trials", "100000", "--seed", "9", "--format", "jsonl",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"expected\":0.25"), "{text}");

    let out = rwalk(&["estimate", "--m", "1", "--n", "1", "--trials", "1000", "--seed", "9"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).trim_end().ends_with(",1000,excluded"));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(
        &config,
        "m = 1\nn = 3\ndist = \"uniform:0.5,1.5\"\ntrials = 20000\nseed = 11\nformat = \"jsonl\"\n",
    )
    .unwrap();
    let path = config.to_str().unwrap();

    let out = rwalk(&["theorem", "--config", path]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(
        text.contains("\"trials\":20000") && text.contains("\"m\":1") && text.contains("\"n\":3"),
        "{text}"
    );

    let out = rwalk(&["theorem", "--config", path, "--trials", "30000", "--format", "csv"]);
    let text = stdout(&out);
    assert!(text.starts_with("suite,"));
    assert!(text.contains(",30000,11/1/3/0,"), "{text}");

    fs::write(&config, "seed = 11\ntrails = 5\n").unwrap();
    let out = rwalk(&["theorem", "--config", path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trails"));
}

#[test]
fn failing_check_exits_one() {
    // a 0.01% interval is far narrower than the sampling error, so the check fails
    let out = rwalk(&[
        "rayleigh", "--n", "2", "--trials", "100000", "--seed", "3", "--level", "0.0001",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).lines().nth(1).unwrap().ends_with(",false"));
}

#[test]
fn unwritable_output_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("out.csv");
    let out = rwalk(&["oracle", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
