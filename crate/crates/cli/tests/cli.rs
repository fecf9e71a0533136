use std::process::{Command, Output};

fn tripet(args: &[&str]) -> Output {
  Command::new(env!("CARGO_BIN_EXE_tripet")).args(args).output().expect("spawn tripet")
}

fn data(name: &str) -> String {
  format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn json(o: &Output) -> serde_json::Value {
  serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn certify_base_case_i0_exits_zero() {
  let o = tripet(&["certify", "base-case", "I0", &data("domains.txt")]);
  assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
  assert_eq!(json(&o)["filling"], true);
}

#[test]
fn certify_base_case_on_verbatim_table_fails() {
  let o = tripet(&["certify", "base-case", "I0", "--data", &data("domains_as_printed.txt")]);
  assert_ne!(o.status.code(), Some(0));
}

#[test]
fn renorm_8_13() {
  let o = tripet(&["renorm", "8/13"]);
  assert_eq!(o.status.code(), Some(0));
  let v = json(&o);
  assert_eq!(v["verdict"], true);
  assert_eq!(v["target"], "5/8");
}

#[test]
fn dimension_prints_decimal() {
  let o = tripet(&["dimension"]);
  assert_eq!(o.status.code(), Some(0));
  let text = String::from_utf8(o.stdout).unwrap();
  assert!(text.starts_with("1.83157092390731"), "{text}");
}

#[test]
fn partition_13_17_writes_svg_and_json() {
  let dir = tempfile::tempdir().unwrap();
  let svg = dir.path().join("p.svg");
  let o = tripet(&["partition", "--param", "13/17", "--format", "svg", "--out", svg.to_str().unwrap()]);
  assert_eq!(o.status.code(), Some(0));
  let body = std::fs::read_to_string(&svg).unwrap();
  let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("p.json")).unwrap()).unwrap();
  let n = v["cells"].as_array().unwrap().len();
  assert_eq!(n, 10);
  assert_eq!(v["images"].as_array().unwrap().len(), n);
  assert_eq!(body.matches("<polygon").count(), 2 * n);
}

#[test]
fn partition_json_is_deterministic() {
  let a = tripet(&["partition", "--param", "phi"]);
  let b = tripet(&["partition", "--param", "phi"]);
  assert_eq!(a.status.code(), Some(0));
  assert_eq!(a.stdout, b.stdout);
  assert_eq!(json(&a)["cells"].as_array().unwrap().len(), 11);
}

#[test]
fn bad_parameter_is_an_error() {
  assert_eq!(tripet(&["partition", "--param", "0"]).status.code(), Some(2));
  assert_eq!(tripet(&["partition", "--param", "x/y"]).status.code(), Some(2));
  assert_eq!(tripet(&["certify", "base-case", "I0", "/nonexistent/table"]).status.code(), Some(2));
}

#[test]
fn symmetry_with_zeroed_row_exits_one() {
  let text = std::fs::read_to_string(data("return_a.txt")).unwrap();
  let mut lines: Vec<String> = text.lines().map(String::from).collect();
  let c = lines.iter().position(|l| l.starts_with("c ")).unwrap();
  lines[c] = "c 0 0 0 0".into();
  let dir = tempfile::tempdir().unwrap();
  let p = dir.path().join("t.txt");
  std::fs::write(&p, lines.join("\n")).unwrap();
  let o = tripet(&["certify", "symmetry", "rotationAB", "--data", p.to_str().unwrap()]);
  assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn tiles_and_limitset_emit_json() {
  let o = tripet(&["tiles", "--param", "3/5", "--max-period", "6"]);
  assert_eq!(o.status.code(), Some(0));
  assert!(!json(&o)["tiles"].as_array().unwrap().is_empty());
  let o = tripet(&["limitset", "--depth", "2"]);
  assert_eq!(o.status.code(), Some(0));
  assert_eq!(json(&o)["count"], 27);
}
