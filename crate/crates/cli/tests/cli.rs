use std::path::PathBuf;
use std::process::{Command, Output};

fn somnus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_somnus"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("somnus-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn kw31_run_is_valid_and_small() {
    let out = somnus(&[
        "run",
        "--algo",
        "kw31",
        "--family",
        "random",
        "--n",
        "200",
        "--dmax",
        "8",
        "--seed",
        "1,2,3,4,5",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let totals: Vec<Vec<&str>> = text
        .lines()
        .map(|l| l.split(',').collect::<Vec<_>>())
        .filter(|f| f.get(1) == Some(&"total"))
        .collect();
    assert_eq!(totals.len(), 5);
    for row in totals {
        assert!(row[8].parse::<u32>().unwrap() <= 9);
        assert_eq!(row[9], "true");
    }
}

#[test]
fn unknown_algorithm_is_a_config_error() {
    let out = somnus(&["run", "--algo", "quantum"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown algorithm"));
}

#[test]
fn identical_runs_give_identical_bytes() {
    let args = [
        "run", "--algo", "hstar", "--n", "150", "--dmax", "6", "--seed", "3,1",
    ];
    assert_eq!(somnus(&args).stdout, somnus(&args).stdout);
}

#[test]
fn flags_override_the_config_file() {
    let dir = scratch_dir("config");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("exp.conf");
    std::fs::write(
        &path,
        "# small run\nalgo = bni\nproblem = greedy\nn = 60\ndmax = 5\nseeds = 4\n",
    )
    .unwrap();
    let out = somnus(&[
        "run",
        "--config",
        path.to_str().unwrap(),
        "--algo",
        "algorithm-a",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("# config "));
    assert!(text.contains("algo=algorithm-a"));
    assert!(text.lines().any(|l| l.starts_with("4,algorithm-a,")));
}

#[test]
fn exports_per_seed_files() {
    let dir = scratch_dir("export");
    let out = somnus(&[
        "run",
        "--algo",
        "bni",
        "--family",
        "line-graph-of-random:3",
        "--n",
        "80",
        "--dmax",
        "8",
        "--seed",
        "2",
        "--trace",
        "--export",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    for file in [
        "metrics-2.csv",
        "decisions-2.csv",
        "decision-log-2.json",
        "trace-2.json",
    ] {
        assert!(dir.join(file).exists(), "missing {file}");
    }
    let log: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("decision-log-2.json")).unwrap())
            .unwrap();
    assert_eq!(log.as_array().unwrap().len(), 80);
}

#[test]
fn gen_writes_readable_graphs() {
    let dir = scratch_dir("gen");
    let out = somnus(&[
        "gen",
        "--family",
        "cycle",
        "--n",
        "12",
        "--dmax",
        "2",
        "--seed",
        "1,2",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.join("graph-2.txt")).unwrap();
    let g = somnus::graph::io::read_graph(&text).unwrap();
    assert_eq!((g.vertex_count(), g.edge_count()), (12, 12));
}

#[test]
fn dynamic_reports_every_batch() {
    let out = somnus(&[
        "dynamic",
        "--n",
        "120",
        "--dmax",
        "6",
        "--t",
        "3",
        "--batches",
        "10",
        "--problem",
        "mis",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("batch,|S|,alpha,beta,max_awake,clock_rounds,valid\n"));
    let rows = text.lines().filter(|l| l.ends_with(",true")).count();
    assert_eq!(rows, 11);
}

#[test]
fn verify_small_suites() {
    let out = somnus(&["verify", "--max-n", "5"]);
    assert!(out.status.success());
    assert!(stdout(&out).lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn report_needs_three_degrees() {
    let out = somnus(&["report", "--sweep", "4,8"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_names_its_config() {
    let out = somnus(&["report", "--n", "150", "--sweep", "3,4,6", "--seed", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("# tradeoff report, config "));
    for algo in ["[kw31]", "[batched32]", "[hstar]"] {
        assert!(text.contains(algo));
    }
}
