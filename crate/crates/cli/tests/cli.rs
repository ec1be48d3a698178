use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use kenclose_cli::report::{Report, RunManifest};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kenclose"))
}

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn report(o: &Output) -> Report {
    serde_json::from_str(stdout(o).trim()).expect("one JSON record")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kenclose-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

const FOUR: &str = "0 0\n1 0\n5 0\n0 3\n";

#[test]
fn perimeter_on_four_points() {
    let o = run(&["solve", "--variant", "perimeter", "-k", "2"], FOUR);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&o);
    assert_eq!(r.score, 2.0);
    assert_eq!(r.count, 2);
    assert_eq!(r.rect, [0.0, 0.0, 1.0, 0.0]);
}

#[test]
fn exit_codes() {
    let o = run(&["solve", "--variant", "area", "-k", "5"], FOUR);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["solve", "--variant", "area", "-k", "1"], "0 0 x\n");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
    let o = run(&["solve", "--variant", "area", "-k", "1", "--bogus"], FOUR);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["solve", "--variant", "subset-sum", "-k", "1"], "0 0 1\n");
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["solve", "--variant", "colored", "--counts", "3,0"], "0 0 0\n1 1 1\n2 2 0\n");
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn help_lists_flags() {
    let o = run(&["solve", "--help"], "");
    assert_eq!(o.status.code(), Some(0));
    let h = stdout(&o);
    for flag in ["--variant", "--eps", "--target", "--outliers", "--k-sensitive", "--counts", "--seed", "--q", "--input", "--manifest"] {
        assert!(h.contains(flag), "{flag}");
    }
}

fn generate(args: &[&str]) -> String {
    let o = run(&[&["gen"], args].concat(), "");
    assert_eq!(o.status.code(), Some(0));
    stdout(&o)
}

#[test]
fn verify_generated_instances() {
    let plain = generate(&["--kind", "uniform", "-n", "30", "--range", "40", "--seed", "7"]);
    for v in ["area", "perimeter", "3sided", "arbitrary"] {
        let o = run(&["verify", "--variant", v, "-k", "3"], &plain);
        assert_eq!(o.status.code(), Some(0), "{v}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = run(&["verify", "--variant", "area", "-k", "6", "--k-sensitive"], &plain);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["verify", "--variant", "area", "--outliers", "4"], &plain);
    assert_eq!(o.status.code(), Some(0));

    let weighted = generate(&["--kind", "clustered", "-n", "30", "--range", "40", "--weights", "6", "--seed", "2"]);
    let o = run(&["verify", "--variant", "weighted", "-k", "5"], &weighted);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["verify", "--variant", "subset-sum", "-k", "5", "--target", "7"], &weighted);
    assert_eq!(o.status.code(), Some(0));

    let colored = generate(&["--kind", "uniform", "-n", "30", "--range", "40", "--colors", "2", "--seed", "4"]);
    for obj in ["min-red", "max-red"] {
        let o = run(&["verify", "--variant", "red-blue", "-k", "6", "--objective", obj], &colored);
        assert_eq!(o.status.code(), Some(0));
    }
    let o = run(&["verify", "--variant", "colored", "--counts", "2,2"], &colored);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn reports_are_deterministic() {
    let plain = generate(&["--kind", "clustered", "-n", "60", "--seed", "11"]);
    assert_eq!(plain, generate(&["--kind", "clustered", "-n", "60", "--seed", "11"]));
    let strip = |mut r: Report| {
        r.elapsed_ms = 0.0;
        r
    };
    for args in [
        vec!["solve", "--variant", "area", "-k", "9"],
        vec!["approx", "-k", "9", "--eps", "0.5", "--seed", "3", "--b", "8"],
    ] {
        let a = strip(report(&run(&args, &plain)));
        let b = strip(report(&run(&args, &plain)));
        assert_eq!(a, b);
    }
}

#[test]
fn convolution_instances_round_trip() {
    for seed in 0..6u64 {
        for (reduction, variant) in [("perimeter", "perimeter"), ("area", "area"), ("weight", "weighted")] {
            let s = seed.to_string();
            let text = generate(&["--kind", "convolution", "-n", "4", "--seed", &s, "--reduction", reduction]);
            let header = |key: &str| -> String {
                text.lines()
                    .find_map(|l| l.strip_prefix(&format!("# {key}=")))
                    .expect("header present")
                    .to_string()
            };
            let k = header("k");
            let threshold: f64 = header("threshold").parse().unwrap();
            let decision: bool = header("decision").parse().unwrap();
            let o = run(&["solve", "--variant", variant, "-k", &k], &text);
            assert_eq!(o.status.code(), Some(0));
            assert_eq!(report(&o).score >= threshold, decision, "{reduction} seed {seed}");
        }
    }
}

#[test]
fn manifest_replays() {
    let input = tmp("in.txt");
    std::fs::write(&input, generate(&["--kind", "uniform", "-n", "40", "--seed", "5"])).unwrap();
    let manifest = tmp("m.json");
    let path = input.to_str().unwrap();
    let args = ["solve", "--variant", "colored", "--counts", "0,0", "--input", path];
    let o = run(&args, "");
    assert_eq!(o.status.code(), Some(2), "colored needs colored input");

    let args = ["solve", "--variant", "perimeter", "-k", "7", "--seed", "9", "--input", path, "--manifest", manifest.to_str().unwrap()];
    let first = report(&run(&args, ""));
    let m: RunManifest = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m.command, "solve");
    assert_eq!(m.parameters.k, Some(7));
    assert_eq!(m.seed, 9);
    assert_eq!(m.input_digest.len(), 64);
    let replay = report(&run(&args, ""));
    assert_eq!((replay.rect, replay.score, replay.count), (m.result.rect, m.result.score, m.result.count));
    assert_eq!(first.score, m.result.score);
}

#[test]
fn bench_reports_ratios() {
    let o = run(&["bench", "--variant", "perimeter", "--sizes", "40,80", "--reps", "1"], "");
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0]["ratio"].is_null());
    assert!(lines[1]["ratio"].as_f64().unwrap() > 0.0);
    assert_eq!(lines[1]["n"], 80);
}
