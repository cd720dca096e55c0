use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn ftenum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftenum"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = ftenum(args);
    assert!(
        out.status.success(),
        "ftenum {} failed:\n{}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

struct Fixtures {
    dir: TempDir,
}

impl Fixtures {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let write = |name: &str, text: &str| std::fs::write(dir.path().join(name), text).unwrap();
        write(
            "tri.json",
            r#"{"nodes": ["x", "a", "y"], "edges": [["x", "a"], ["a", "y"], ["x", "y"]]}"#,
        );
        write("diamond.txt", "x a\nx b\na y\nb y\n");
        write("star.txt", "x1 m\nx2 m\nm y\n");
        write("fan.txt", "x1 y\nx2 y\nx3 y\n");
        Fixtures { dir }
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).to_str().unwrap().to_string()
    }

    fn read_json(&self, name: &str) -> Value {
        serde_json::from_str(&std::fs::read_to_string(self.dir.path().join(name)).unwrap()).unwrap()
    }
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn enumerate_triangle_by_budget() {
    let f = Fixtures::new();
    let out = ok(&[
        "enumerate",
        "--net",
        &f.path("tri.json"),
        "--inputs",
        "x",
        "--sink",
        "y",
        "--dmax",
        "2",
        "--out",
        &f.path("c2.json"),
    ]);
    let report = f.read_json("c2.json");
    assert_eq!(report["result"]["count"], 2);
    assert_eq!(report["result"]["fts"].as_array().unwrap().len(), 2);
    assert_eq!(report["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(report["config"]["sink"], "y");
    assert!(report["config"].get("threads").is_none());
    let summary = stdout(&out);
    assert!(summary.starts_with("2 functional topologies"), "{summary}");
    assert!(summary.contains("delay 1: 1") && summary.contains("delay 2: 1"));

    ok(&[
        "enumerate",
        "--net",
        &f.path("tri.json"),
        "--inputs",
        "x",
        "--sink",
        "y",
        "--dmax",
        "1",
        "--out",
        &f.path("c1.json"),
    ]);
    let report = f.read_json("c1.json");
    assert_eq!(report["result"]["count"], 1);
    assert_eq!(
        report["result"]["fts"][0]["edges"],
        serde_json::json!([["x", "y"]])
    );
}

#[test]
fn unknown_labels_fail_with_their_name() {
    let f = Fixtures::new();
    let out = ftenum(&[
        "enumerate",
        "--net",
        &f.path("tri.json"),
        "--inputs",
        "x",
        "--sink",
        "nowhere",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nowhere"));

    let out = ftenum(&[
        "degeneracy",
        "--net",
        &f.path("tri.json"),
        "--inputs",
        "ghost",
        "--sink",
        "y",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("ghost"));

    let out = ftenum(&[
        "enumerate",
        "--net",
        &f.path("missing.json"),
        "--inputs",
        "x",
        "--sink",
        "y",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));
}

#[test]
fn enumerate_views() {
    let f = Fixtures::new();
    let csv = stdout(&ok(&[
        "enumerate",
        "--net",
        &f.path("tri.json"),
        "--inputs",
        "x",
        "--sink",
        "y",
        "--dmax",
        "2",
        "--format",
        "csv",
    ]));
    assert_eq!(
        csv,
        "index,root,delay,energy,edges\n0,y,2,2,a->y;x->a\n1,y,1,1,x->y\n"
    );

    let dot = stdout(&ok(&[
        "enumerate",
        "--net",
        &f.path("tri.json"),
        "--inputs",
        "x",
        "--sink",
        "y",
        "--dmax",
        "2",
        "--format",
        "dot",
    ]));
    assert_eq!(dot.matches("digraph").count(), 2);

    let dots = f.dir.path().join("dots");
    ok(&[
        "enumerate",
        "--net",
        &f.path("diamond.txt"),
        "--inputs",
        "x",
        "--sink",
        "y",
        "--out",
        &f.path("d.json"),
        "--dot-dir",
        dots.to_str().unwrap(),
    ]);
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dots)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    assert_eq!(files.len(), 2);
    let first = std::fs::read_to_string(&files[0]).unwrap();
    assert!(first.starts_with("digraph \"ft0\" {"));
    assert!(first.contains("\"y\" [shape=doublecircle];"));
}

#[test]
fn degeneracy_tables() {
    let f = Fixtures::new();
    let csv = stdout(&ok(&[
        "degeneracy",
        "--net",
        &f.path("tri.json"),
        "--inputs",
        "x",
        "--sink",
        "y",
        "--dmax",
        "2",
        "--format",
        "csv",
    ]));
    assert_eq!(csv, "delay,count,cumulative,bell\n1,1,1,1\n2,1,2,1\n");

    ok(&[
        "degeneracy",
        "--net",
        &f.path("diamond.txt"),
        "--inputs",
        "x",
        "--sink",
        "y",
        "--out",
        &f.path("deg.json"),
    ]);
    let r = f.read_json("deg.json");
    assert_eq!(r["result"]["per_delay"], serde_json::json!({"2": 2}));
    assert_eq!(r["result"]["total"], 2);

    ok(&[
        "degeneracy",
        "--net",
        &f.path("fan.txt"),
        "--inputs",
        "x1,x2,x3",
        "--sink",
        "y",
        "--out",
        &f.path("fan.json"),
    ]);
    assert_eq!(f.read_json("fan.json")["result"]["bell_bound"], 5);
}

#[test]
fn redundancy_families() {
    let f = Fixtures::new();
    ok(&[
        "redundancy",
        "--net",
        &f.path("diamond.txt"),
        "--inputs",
        "x",
        "--sink",
        "y",
        "--out",
        &f.path("r.json"),
    ]);
    let r = f.read_json("r.json");
    assert_eq!(r["result"]["average"], "1");
    assert_eq!(r["result"]["average_f64"], 1.0);
    assert_eq!(
        r["result"]["family"][0]["redundant_pairs"],
        serde_json::json!([[0, 1]])
    );
    assert_eq!(
        r["result"]["family"][0]["partner_counts"],
        serde_json::json!([1, 1])
    );

    ok(&[
        "redundancy",
        "--net",
        &f.path("star.txt"),
        "--inputs",
        "x1,x2",
        "--sink",
        "y",
        "--out",
        &f.path("s.json"),
    ]);
    assert_eq!(f.read_json("s.json")["result"]["average"], "0");

    // within two hops {x} has a redundant pair and {a} only the direct link
    std::fs::write(f.dir.path().join("family.txt"), "x\na\n").unwrap();
    ok(&[
        "redundancy",
        "--net",
        &f.path("diamond.txt"),
        "--sink",
        "y",
        "--family",
        &f.path("family.txt"),
        "--dmax",
        "2",
        "--out",
        &f.path("m.json"),
    ]);
    let m = f.read_json("m.json");
    assert_eq!(m["result"]["family"].as_array().unwrap().len(), 2);
    assert_eq!(m["result"]["average"], "1/2");

    let csv = stdout(&ok(&[
        "redundancy",
        "--net",
        &f.path("diamond.txt"),
        "--sink",
        "y",
        "--k",
        "1",
        "--format",
        "csv",
    ]));
    // sets {a}, {b}, {x}; only {x} has two topologies
    assert_eq!(csv, "set,i,j,r\n2,0,1,1\n");

    let out = ftenum(&["redundancy", "--net", &f.path("diamond.txt"), "--sink", "y"]);
    assert!(!out.status.success());
}

fn simulate_diamond(f: &Fixtures, out: &str, extra: &[&str]) -> Output {
    let mut args = vec![
        "simulate",
        "--net",
        "",
        "--inputs",
        "x",
        "--sink",
        "y",
        "--node-fail",
        "0.3",
        "--rounds",
        "100000",
        "--seed",
        "42",
        "--out",
        out,
    ];
    let net = f.path("diamond.txt");
    args[2] = &net;
    args.extend_from_slice(extra);
    ok(&args)
}

#[test]
fn simulate_diamond_matches_exact() {
    let f = Fixtures::new();
    let a = f.path("a.json");
    simulate_diamond(&f, &a, &[]);
    let r = f.read_json("a.json");
    assert_eq!(r["seed"], 42);
    let fallback = r["result"]["strategies"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["label"] == "fallback")
        .unwrap();
    let rate = fallback["success_rate"].as_f64().unwrap();
    let sigma = (0.91f64 * 0.09 / 100_000.0).sqrt();
    assert!((rate - 0.91).abs() <= 3.0 * sigma, "rate {rate}");
    assert!((fallback["exact"].as_f64().unwrap() - 0.91).abs() < 1e-12);
    for d in r["result"]["dominance"].as_array().unwrap() {
        assert_eq!(d["violations"], 0);
    }
    assert!(r["result"]["assumptions"]
        .as_array()
        .is_some_and(|a| !a.is_empty()));

    let b = f.path("b.json");
    simulate_diamond(&f, &b, &[]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn simulate_rejects_bad_parameters() {
    let f = Fixtures::new();
    let base = [
        "simulate",
        "--net",
        &f.path("diamond.txt"),
        "--inputs",
        "x",
        "--sink",
        "y",
    ];
    let with = |extra: &[&str]| {
        let mut args = base.to_vec();
        args.extend_from_slice(extra);
        ftenum(&args)
    };
    assert!(!with(&["--rounds", "0"]).status.success());
    assert!(!with(&["--node-fail", "1.5"]).status.success());
    assert!(!with(&["--format", "dot"]).status.success());
}

#[test]
fn simulate_csv_and_constraints() {
    let f = Fixtures::new();
    let csv = stdout(&ok(&[
        "simulate",
        "--net",
        &f.path("tri.json"),
        "--inputs",
        "x",
        "--sink",
        "y",
        "--dmax",
        "2",
        "--rounds",
        "2000",
        "--strategy",
        "fallback",
        "--strategy",
        "static",
        "--max-delay",
        "1",
        "--format",
        "csv",
    ]));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "strategy,rounds,successes,rate,ci,exact");
    assert!(lines[1].starts_with("fallback[delay<=1],2000,"));
    assert!(lines[2].starts_with("static[delay<=1],2000,"));
}

#[test]
fn verify_passes_and_catches_corruption() {
    let f = Fixtures::new();
    let out = ok(&[
        "verify",
        "--net",
        &f.path("tri.json"),
        "--inputs",
        "x",
        "--sink",
        "y",
        "--dmax",
        "2",
    ]);
    let text = stdout(&out);
    assert_eq!(text.matches("PASS").count(), 4, "{text}");

    // drop the first entry of a valid catalog
    ok(&[
        "enumerate",
        "--net",
        &f.path("tri.json"),
        "--inputs",
        "x",
        "--sink",
        "y",
        "--dmax",
        "2",
        "--out",
        &f.path("good.json"),
    ]);
    let mut cat = f.read_json("good.json");
    let fts = cat["result"]["fts"].as_array_mut().unwrap();
    fts.remove(0);
    cat["result"]["count"] = 1.into();
    std::fs::write(f.dir.path().join("bad.json"), cat.to_string()).unwrap();
    let out = ftenum(&[
        "verify",
        "--net",
        &f.path("tri.json"),
        "--inputs",
        "x",
        "--sink",
        "y",
        "--dmax",
        "2",
        "--catalog",
        &f.path("bad.json"),
    ]);
    assert!(!out.status.success());
    let text = stdout(&out);
    assert!(text.contains("FAIL enumeration-vs-oracle"), "{text}");
    assert!(
        text.contains("counterexample: missing {a->y, x->a}"),
        "{text}"
    );
}

#[test]
fn verify_random_eight_node_instance() {
    let f = Fixtures::new();
    let edges = [
        (0, 1),
        (1, 2),
        (2, 3),
        (3, 4),
        (4, 5),
        (5, 6),
        (6, 7),
        (0, 4),
        (1, 5),
        (2, 6),
        (3, 7),
        (0, 7),
    ];
    let text: String = edges.iter().map(|(a, b)| format!("v{a} v{b}\n")).collect();
    std::fs::write(f.dir.path().join("eight.txt"), text).unwrap();
    let out = ok(&[
        "verify",
        "--net",
        &f.path("eight.txt"),
        "--inputs",
        "v0,v3",
        "--sink",
        "v6",
        "--out",
        &f.path("v.json"),
    ]);
    assert!(!stdout(&out).contains("FAIL"));
    let r = f.read_json("v.json");
    assert_eq!(r["command"], "verify");
    assert!(r["result"]["counterexample"].is_null());
}

#[test]
fn oracle_cap_is_reported_not_failed() {
    let f = Fixtures::new();
    let out = ok(&[
        "verify",
        "--net",
        &f.path("diamond.txt"),
        "--inputs",
        "x",
        "--sink",
        "y",
        "--max-nodes",
        "3",
    ]);
    assert!(stdout(&out).contains("SKIP enumeration-vs-oracle"));
}

#[test]
fn bell_table() {
    let csv = stdout(&ok(&["bell", "8", "--format", "csv"]));
    assert_eq!(
        csv,
        "n,bell\n0,1\n1,1\n2,2\n3,5\n4,15\n5,52\n6,203\n7,877\n8,4140\n"
    );
    let json: Value = serde_json::from_slice(&ok(&["bell", "30"]).stdout).unwrap();
    assert_eq!(json["result"][30]["bell"], "846749014511809332450147");
}

#[test]
fn timing_is_opt_in() {
    let f = Fixtures::new();
    let run = |extra: &[&str], out: &str| {
        let mut args = vec![
            "enumerate",
            "--net",
            "",
            "--inputs",
            "x",
            "--sink",
            "y",
            "--out",
            out,
        ];
        let net = f.path("tri.json");
        args[2] = &net;
        args.extend_from_slice(extra);
        ok(&args);
    };
    run(&[], &f.path("plain.json"));
    run(&["--record-timing"], &f.path("timed.json"));
    assert!(f.read_json("plain.json").get("duration_ms").is_none());
    assert!(f.read_json("timed.json")["duration_ms"].is_u64());
}
