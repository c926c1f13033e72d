use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use dihedral::reduction::{build_canonical_chain, build_static_chain, pad_and_scale, ThreeSumInstance};
use dihedral::{Chain, Vec3};
use dihedral_cli::{run_from_args, Outcome};
use serde_json::Value;

fn run(args: &[&str]) -> Outcome {
    run_from_args(std::iter::once("dihedral").chain(args.iter().copied()))
}

fn json(o: &Outcome) -> Value {
    serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("{e}: {:?}", o))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn chain_file(dir: &Path, name: &str, pts: &[[f64; 3]]) -> PathBuf {
    let c = Chain::new(pts.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect()).unwrap();
    write(dir, name, &c.to_json())
}

fn zigzag(dir: &Path) -> PathBuf {
    chain_file(dir, "zigzag.json", &[[0.0, 0.0, 0.0], [1.0, 1.0, 0.0], [2.0, 0.0, 0.0], [3.0, 1.0, 0.0]])
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let ok = run(&["validate", s(&zigzag(d.path()))]);
    assert_eq!(ok.code, 0);
    assert_eq!(json(&ok)["simple"], true);
    assert_eq!(json(&ok)["version"], 1);

    let cross = chain_file(d.path(), "x.json", &[[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, -1.0, 0.0]]);
    let bad = run(&["validate", s(&cross)]);
    assert_eq!(bad.code, 3);
    assert_eq!(json(&bad)["violation"], serde_json::json!([0, 2]));

    let trunc = write(d.path(), "t.json", r#"{"vertices": [[0,0,0],[1,"#);
    let e = run(&["validate", s(&trunc)]);
    assert_eq!(e.code, 2);
    assert!(e.stderr.contains("error"));
    assert_eq!(run(&["validate", "/nonexistent/chain.json"]).code, 2);
}

#[test]
fn query_verdicts() {
    let d = tempfile::tempdir().unwrap();
    let z = zigzag(d.path());
    let o = run(&["query", s(&z), "--edge", "1", "--angle", "3.141592653589793"]);
    assert_eq!(o.code, 0);
    assert_eq!(json(&o)["feasible"], true);
    assert_eq!(json(&o)["pairTests"], 1);
    assert_eq!(run(&["query", s(&z), "--edge", "9", "--angle", "1"]).code, 2);

    let inst = ThreeSumInstance::new(vec![-1], vec![0], vec![1]).unwrap();
    let built = build_static_chain(&pad_and_scale(&inst, None).unwrap()).unwrap();
    let micro = write(d.path(), "micro.json", &built.chain.to_json());
    let edge = built.feature_map[0].1 .0.to_string();
    let o = run(&["query", s(&micro), "--edge", &edge, "--angle", "6.283185307179586"]);
    assert_eq!(o.code, 3);
    let v = json(&o);
    assert_eq!(v["feasible"], false);
    assert!(v["witness"]["movingSegment"].is_u64());
}

#[test]
fn dynamic_query_round_trip() {
    let d = tempfile::tempdir().unwrap();
    let z = zigzag(d.path());
    let original = Chain::from_file(serde_json::from_str(&fs::read_to_string(&z).unwrap()).unwrap()).unwrap();
    let o = run(&["query", s(&z), "--edge", "1", "--angle", "0.7", "--dynamic"]);
    assert_eq!(o.code, 0);
    assert_eq!(json(&o)["applied"], true);
    let moved = fs::read_to_string(&z).unwrap();
    assert_ne!(moved, original.to_json());
    let o = run(&["query", s(&z), "--edge", "1", "--angle", "-0.7", "--dynamic"]);
    assert_eq!(o.code, 0);
    let back = Chain::from_file(serde_json::from_str(&fs::read_to_string(&z).unwrap()).unwrap()).unwrap();
    for (p, q) in back.vertices().iter().zip(original.vertices()) {
        assert!(p.max_abs_diff(*q) < 1e-12);
    }

    // Infeasible dynamic query leaves the file alone.
    let inst = ThreeSumInstance::new(vec![-1], vec![0], vec![1]).unwrap();
    let built = build_static_chain(&pad_and_scale(&inst, None).unwrap()).unwrap();
    let micro = write(d.path(), "micro.json", &built.chain.to_json());
    let before = fs::read_to_string(&micro).unwrap();
    let edge = built.feature_map[0].1 .0.to_string();
    let o = run(&["query", s(&micro), "--edge", &edge, "--angle", "6.283185307179586", "--dynamic"]);
    assert_eq!(o.code, 3);
    assert_eq!(json(&o)["applied"], false);
    assert_eq!(fs::read_to_string(&micro).unwrap(), before);
}

#[test]
fn simulate_behaviour() {
    let d = tempfile::tempdir().unwrap();
    let line = chain_file(d.path(), "line.json", &[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [3.0, 0.0, 0.0], [4.0, 0.0, 0.0]]);
    let o = run(&["simulate", s(&line), "--steps", "50", "--seed", "3"]);
    assert_eq!(o.code, 0);
    assert_eq!(json(&o)["acceptanceRatio"], 1.0);

    let a = run(&["simulate", s(&zigzag(d.path())), "--steps", "40", "--seed", "9"]);
    let b = run(&["simulate", s(&zigzag(d.path())), "--steps", "40", "--seed", "9"]);
    assert_eq!(a.stdout, b.stdout);

    // A tight square spiral rejects some moves.
    let mut pts = Vec::new();
    for k in 0..12 {
        let r = 1.0 + 0.05 * k as f64;
        let t = k as f64 * std::f64::consts::FRAC_PI_2;
        pts.push([r * t.cos(), r * t.sin(), 0.02 * k as f64]);
    }
    let dense = chain_file(d.path(), "dense.json", &pts);
    let out = d.path().join("final.json");
    let o = run(&["simulate", s(&dense), "--steps", "200", "--seed", "1", "--out", s(&out)]);
    assert_eq!(o.code, 0);
    let v = json(&o);
    assert!(v["acceptanceRatio"].as_f64().unwrap() < 1.0);
    assert_eq!(v["verdicts"].as_array().unwrap().len(), 200);
    let fin: dihedral::ChainFile = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(Chain::from_file(fin).unwrap().is_simple());
}

#[test]
fn seed_from_environment() {
    let d = tempfile::tempdir().unwrap();
    let z = zigzag(d.path());
    let exe = env!("CARGO_BIN_EXE_dihedral");
    let run_env = |seed: &str| {
        Command::new(exe)
            .args(["simulate", s(&z), "--steps", "20"])
            .env("DIHEDRAL_SEED", seed)
            .output()
            .unwrap()
    };
    let a = run_env("77");
    assert!(a.status.success());
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 77);
    assert_eq!(run_env("77").stdout, a.stdout);
    assert_eq!(run_env("x").status.code(), Some(2));
}

#[test]
fn reduce_modes() {
    let d = tempfile::tempdir().unwrap();
    let yes = write(d.path(), "yes.json", r#"{"A":[-1],"B":[0],"C":[1]}"#);
    for mode in ["static", "dynamic"] {
        let o = run(&["reduce", s(&yes), "--mode", mode]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        let v = json(&o);
        assert_eq!(v["answer"]["triple"], serde_json::json!([-1, 0, 1]));
        assert_eq!(v["mode"], mode);
    }
    let dynamic = json(&run(&["reduce", s(&yes), "--mode", "dynamic"]));
    assert_eq!(dynamic["counters"]["encodingRotations"], 9);
    assert_eq!(dynamic["phases"][1]["name"], "encode");

    let no = write(d.path(), "no.json", r#"{"A":[1],"B":[4],"C":[7]}"#);
    assert!(json(&run(&["reduce", s(&no)]))["answer"]["triple"].is_null());

    let single = write(d.path(), "single.json", r#"{"S":[-5,2,3]}"#);
    assert!(!json(&run(&["reduce", s(&single)]))["answer"]["triple"].is_null());

    let big = write(d.path(), "big.json", r#"{"A":[200000],"B":[0],"C":[1]}"#);
    let o = run(&["reduce", s(&big)]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("200000"));
}

#[test]
fn bench_counters() {
    let o = run(&["bench", "--structure", "tree", "--n", "1024", "--k", "300"]);
    assert_eq!(o.code, 0);
    let v = json(&o);
    assert!(v["records"][0]["nodeTouchesPerRotation"]["max"].as_u64().unwrap() <= 22);

    let o = run(&["bench", "--structure", "brute", "--n", "16,17", "--k", "3"]);
    let v = json(&o);
    assert_eq!(v["records"][0]["pairTestsPerQuery"]["max"], 8 * 7);
    assert_eq!(v["records"][1]["pairTestsPerQuery"]["max"], 8 * 8);
    assert_eq!(v["records"][1]["expectedPairTests"], 64);
    assert_eq!(run(&["bench", "--structure", "brute", "--n", "1"]).code, 2);
}

#[test]
fn render_views() {
    let d = tempfile::tempdir().unwrap();
    let svg = d.path().join("z.svg");
    let o = run(&["render", s(&zigzag(d.path())), "--svg", s(&svg)]);
    assert_eq!(o.code, 0);
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
    assert_eq!(text.matches("<polyline").count(), 2);
    assert!(!text.contains("class=\"overlap\""));

    let needle = write(d.path(), "needle.json", &build_canonical_chain(2).unwrap().chain.to_json());
    let svg2 = d.path().join("n.svg");
    assert_eq!(run(&["render", s(&needle), "--svg", s(&svg2)]).code, 0);
    let text2 = fs::read_to_string(&svg2).unwrap();
    assert!(text2.contains("class=\"overlap\""));
    // Deterministic.
    run(&["render", s(&needle), "--svg", s(&svg)]);
    assert_eq!(fs::read_to_string(&svg).unwrap(), text2);
}

#[test]
fn help_and_bad_flags() {
    assert_eq!(run(&["--help"]).code, 0);
    assert_eq!(run(&["frobnicate"]).code, 2);
}
