use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use morse_topo::kr_graph::samples;
use morse_topo::symplectic::{evaluate, GeneratorWord, SpMatrix};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morse-topo")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SPHERE: &str = "\
HMESH orientable
v n 1
v s -1
v a 1/10
v b 2/10
v c 3/10
v d 4/10
t n a b
t n b c
t n c d
t n d a
t s b a
t s c b
t s d c
t s a d
";

#[test]
fn reeb_on_a_sphere() {
    let dir = TempDir::new().unwrap();
    let mesh = write(&dir, "sphere.hmesh", SPHERE);
    let o = run(&["reeb", s(&mesh)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("digraph kr {"));
    assert_eq!(out.lines().last().unwrap(), r#"#KTYPE {"target":"Line","q":[],"c0":1,"c1":0,"c2":1,"eps":{}}"#);
}

#[test]
fn reeb_on_the_sample_torus_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let mesh = write(&dir, "torus.hmesh", &samples::torus().to_text());
    let a = run(&["reeb", s(&mesh)]);
    let b = run(&["reeb", s(&mesh)]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).ends_with("#KTYPE {\"target\":\"Line\",\"q\":[0,0],\"c0\":1,\"c1\":2,\"c2\":1,\"eps\":{}}\n"));
}

#[test]
fn classify_verdicts() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.ktype", r#"{"target":"Line","q":[0,0],"c0":1,"c1":2,"c2":1,"eps":{}}"#);
    let b = write(&dir, "b.ktype", r#"{"target":"Line","q":[0,0],"c0":2,"c1":3,"c2":1,"eps":{}}"#);
    assert_eq!(stdout(&run(&["classify", s(&a), s(&a)])), "{\"equivalent\":true,\"reason\":\"ok\"}\n");
    assert_eq!(stdout(&run(&["classify", s(&a), s(&b)])), "{\"equivalent\":false,\"reason\":\"c0\"}\n");

    let c = write(&dir, "c.ktype", r#"{"target":"Circle","q":[1,0],"c0":0,"c1":2,"c2":2,"eps":{}}"#);
    let d = write(&dir, "d.ktype", r#"{"target":"Circle","q":[-1,0],"c0":2,"c1":2,"c2":0,"eps":{}}"#);
    assert_eq!(stdout(&run(&["classify", s(&c), s(&d)])), "{\"equivalent\":false,\"reason\":\"q\"}\n");
    assert_eq!(stdout(&run(&["classify", "--up-to-flip", s(&c), s(&d)])), "{\"equivalent\":true,\"reason\":\"flip\"}\n");
}

#[test]
fn canonical_graph_carries_its_type() {
    let dir = TempDir::new().unwrap();
    let k = r#"{"target":"Line","q":[0,0],"c0":0,"c1":2,"c2":1,"eps":{"V1":-1}}"#;
    let path = write(&dir, "k.ktype", k);
    let o = run(&["canonical", "--surface", "orientable:1", s(&path)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).ends_with(&format!("#KTYPE {k}\n")));
    assert!(stdout(&o).contains("label=\"V1\""));

    let bad = write(&dir, "bad.ktype", r#"{"target":"Line","q":[0,0],"c0":0,"c1":0,"c2":1,"eps":{"V1":-1}}"#);
    let o = run(&["canonical", "--surface", "orientable:1", s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
}

#[test]
fn sp_decompose_round_trips() {
    let dir = TempDir::new().unwrap();
    let word = GeneratorWord::parse("Ta1^2 Mu1,2^-1 Tb2^3 Nu1,2 Eta2,3^-2 Nu3,2").unwrap();
    let h = evaluate(&word, 3).unwrap();
    let path = write(&dir, "h.mat", &h.to_string());
    let o = run(&["sp-decompose", "--g", "3", s(&path)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let back = GeneratorWord::parse(stdout(&o).trim()).unwrap();
    assert_eq!(evaluate(&back, 3).unwrap(), h);

    let o = run(&["sp-decompose", "--g", "2", s(&path)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn general_decomposition_accepts_any_symplectic_matrix() {
    let dir = TempDir::new().unwrap();
    let h = SpMatrix::from_i64_rows(1, &[&[2, 1], &[1, 1]]).unwrap();
    let path = write(&dir, "h.mat", &h.to_string());
    assert_eq!(run(&["sp-decompose", "--g", "1", s(&path)]).status.code(), Some(1));
    let o = run(&["sp-decompose", "--g", "1", "--general", s(&path)]);
    assert!(o.status.success());
    assert_eq!(evaluate(&GeneratorWord::parse(stdout(&o).trim()).unwrap(), 1).unwrap(), h);
}

#[test]
fn admissibility_and_factoring() {
    assert_eq!(stdout(&run(&["admissible", "--q", "0,1", "--gamma", "0,1"])), "{\"admissible\":false,\"degree\":1}\n");
    assert_eq!(stdout(&run(&["admissible", "--q", "0,1", "--gamma", "1,0"])), "{\"admissible\":true,\"degree\":0}\n");
    assert_eq!(stdout(&run(&["admissible", "--q", "-2,3,1,1", "--gamma", "0,0,0,0"])), "{\"admissible\":true,\"degree\":0}\n");

    let dir = TempDir::new().unwrap();
    let path = write(&dir, "t.mat", "SP 1\n1 1\n0 1\n");
    let o = run(&["factor", "--q", "0,1", "--matrix", s(&path)]);
    assert_eq!(stdout(&o), "{\"basis_change\":\"\",\"residual\":\"Torelli\",\"word\":\"Ta1\"}\n");
    let o = run(&["factor", "--q", "1,0", "--matrix", s(&path)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn generator_listing() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "k.ktype", r#"{"target":"Circle","q":[0,1],"c0":0,"c1":0,"c2":0,"eps":{}}"#);
    let o = run(&["generators", "--surface", "orientable:1", s(&path)]);
    let list: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let flags: Vec<(String, String)> = list
        .as_array()
        .unwrap()
        .iter()
        .map(|g| (g["generator"].as_str().unwrap().to_string(), g["admissible"].as_str().unwrap().to_string()))
        .collect();
    assert_eq!(flags, [("O".into(), "Yes".into()), ("t(alpha_1)".into(), "Yes".into()), ("t(beta_1)".into(), "No".into())]);

    let o = run(&["generators", "--surface", "nonorientable:3", s(&path)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn error_paths_have_distinct_prefixes() {
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("unknown subcommand:"));

    let o = run(&["reeb"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("usage error:"));

    let o = run(&["reeb", "/definitely/not/here.hmesh"]);
    assert_eq!(o.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert_eq!(err["error"], "unreadable file");
    assert!(o.stdout.is_empty());

    let dir = TempDir::new().unwrap();
    let junk = write(&dir, "junk.hmesh", "HMESH orientable\nv a 1\nq nonsense\n");
    let o = run(&["reeb", s(&junk)]);
    assert_eq!(o.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert_eq!(err["error"], "malformed input");
    assert!(err["message"].as_str().unwrap().starts_with("malformed input:"));

    // a flat equator edge is not a Morse function: domain error, no partial DOT
    let flat = write(&dir, "flat.hmesh", &SPHERE.replace("v b 2/10", "v b 1/10"));
    let o = run(&["reeb", s(&flat)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    let err: serde_json::Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert_eq!(err["error"], "domain error");
}
