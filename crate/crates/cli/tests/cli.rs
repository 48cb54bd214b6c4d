use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

const K3: &str = "p graph 3 3\ne 1 2\ne 2 3\ne 1 3\n";
const K4: &str = "p graph 4 6\ne 1 2\ne 1 3\ne 1 4\ne 2 3\ne 2 4\ne 3 4\n";

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/gadget12.gadget")
}

struct Run {
    code: i32,
    json: Value,
    stdout: String,
}

fn run(args: &[&Path]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_heightone")).args(args).output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let json = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    Run { code: out.status.code().unwrap(), json, stdout }
}

fn p(s: &str) -> &Path {
    Path::new(s)
}

struct Dir(tempfile::TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let path = self.0.path().join(name);
        fs::write(&path, text).unwrap();
        path
    }

    /// Run, save the envelope, and check that `verify` accepts it.
    fn run_and_verify(&self, name: &str, args: &[&Path], inputs: &[&Path]) -> Value {
        let r = run(args);
        assert_eq!(r.code, 0, "{args:?}");
        let env = self.file(name, &r.stdout);
        let mut vargs: Vec<&Path> = vec![p("verify"), &env];
        vargs.extend(inputs);
        let v = run(&vargs);
        assert_eq!(v.code, 0);
        assert_eq!(v.json["answer"], "yes", "{}: {}", name, v.stdout);
        r.json
    }
}

#[test]
fn trivial_on_sigma_k3_is_yes_and_verifies() {
    let d = Dir::new();
    let k3 = d.file("k3.graph", K3);
    let sigma = run(&[p("sigma"), &k3]);
    assert_eq!(sigma.json["answer"], "value");
    let cond = d.file("s3.json", &sigma.json["witness"].to_string());
    let out = d.run_and_verify("t.json", &[p("trivial"), &cond], &[&cond]);
    assert_eq!(out["answer"], "yes");
    assert_eq!(out["command"], "trivial");
    assert_eq!(out["inputs"][0]["role"], "condition");
}

#[test]
fn satisfies_k3_template_against_sigma_k4_is_no() {
    let d = Dir::new();
    let (k3, k4) = (d.file("k3.graph", K3), d.file("k4.graph", K4));
    let cond = d.file("s4.json", &run(&[p("sigma"), &k4]).json["witness"].to_string());
    let out = d.run_and_verify("sat.json", &[p("satisfies"), &k3, &cond], &[&k3, &cond]);
    assert_eq!(out["answer"], "no");
    assert!(out["witness"]["digest"].as_str().unwrap().len() == 64);
}

#[test]
fn sat_envelopes_verify() {
    let d = Dir::new();
    let (k3, k4) = (d.file("k3.graph", K3), d.file("k4.graph", K4));
    let cond = d.file("s3.json", &run(&[p("sigma"), &k3]).json["witness"].to_string());
    let gadget = fixture();
    let yes = |o: Value| assert_eq!(o["answer"], "yes");
    yes(d.run_and_verify("sat.json", &[p("satisfies"), &k3, &cond], &[&k3, &cond]));
    yes(d.run_and_verify("hom.json", &[p("hom"), &k3, &k4], &[&k3, &k4]));
    yes(d.run_and_verify("c3.json", &[p("color3"), &k3], &[&k3]));
    yes(d.run_and_verify("crit.json", &[p("critical"), &k4], &[&k4]));
    yes(d.run_and_verify("gv.json", &[p("gadget-verify"), &gadget], &[&gadget]));
    yes(d.run_and_verify("qc.json", &[p("qnu-check"), &k3, &k3, p("2")], &[&k3, &k3]));
    let out = d.run_and_verify("css.json", &[p("css"), &k4, &k4], &[&k4, &k4]);
    assert_eq!(out["answer"], "no");
}

#[test]
fn exhausted_and_value_envelopes_verify() {
    let d = Dir::new();
    let (k3, k4) = (d.file("k3.graph", K3), d.file("k4.graph", K4));
    let nae = d.file("nae.struct", "p struct 2 1\nr NAE 3 6\nt 1 1 2\nt 1 2 1\nt 1 2 2\nt 2 1 1\nt 2 1 2\nt 2 2 1\n");
    let no = |o: Value| assert_eq!(o["answer"], "no");
    no(d.run_and_verify("hom.json", &[p("hom"), &k4, &k3], &[&k4, &k3]));
    no(d.run_and_verify("c3.json", &[p("color3"), &k4], &[&k4]));
    no(d.run_and_verify("qc.json", &[p("qnu-check"), &k4, &k3, p("7")], &[&k4, &k3]));
    no(d.run_and_verify("crit.json", &[p("critical"), &k3], &[&k3]));
    let minion = d.run_and_verify("mp.json", &[p("minion-p"), &nae], &[&nae]);
    assert_eq!(minion["answer"], "yes");
    assert_eq!(minion["witness"]["fgraph"]["vertices"].as_array().unwrap().len(), 6);
    let value = |o: Value| assert_eq!(o["answer"], "value");
    value(d.run_and_verify("perm.json", &[p("sigma-perm"), p("1"), p("3")], &[]));
    value(d.run_and_verify("growth.json", &[p("growth"), p("4"), p("5")], &[]));
    value(d.run_and_verify("qnu.json", &[p("qnu"), p("4")], &[]));
    value(d.run_and_verify("glue.json", &[p("glue"), &k4, p("1,2"), &k4, p("1,2"), &fixture()], &[&k4, &k4, &fixture()]));
    value(d.run_and_verify("chain.json", &[p("chain-tensor"), p("2"), p("4")], &[]));
}

#[test]
fn tampered_envelopes_fail_verification() {
    let d = Dir::new();
    let (k3, k4) = (d.file("k3.graph", K3), d.file("k4.graph", K4));
    let mut env = run(&[p("hom"), &k3, &k4]).json;
    env["witness"]["map"] = serde_json::json!([0, 0, 1]);
    let bad = d.file("bad.json", &env.to_string());
    let v = run(&[p("verify"), &bad, &k3, &k4]);
    assert_eq!(v.code, 0);
    assert_eq!(v.json["answer"], "no");
    // Swapped inputs change the digests.
    let good = d.file("good.json", &run(&[p("hom"), &k3, &k4]).stdout);
    assert_eq!(run(&[p("verify"), &good, &k4, &k3]).json["answer"], "no");
}

#[test]
fn output_is_deterministic() {
    let d = Dir::new();
    let k4 = d.file("k4.graph", K4);
    let a = run(&[p("critical"), &k4]).stdout;
    let b = run(&[p("critical"), &k4]).stdout;
    assert_eq!(a, b);
}

#[test]
fn chain_output_directory() {
    let d = Dir::new();
    let out = d.0.path().join("chain");
    let r = run(&[p("chain-glue"), p("2"), &fixture(), p("4"), p("--out"), &out]);
    assert_eq!(r.code, 0);
    let w2 = fs::read_to_string(out.join("step-2.graph")).unwrap();
    assert!(w2.starts_with("p graph 16 "));
    let cert: Value = serde_json::from_str(&fs::read_to_string(out.join("step-2.json")).unwrap()).unwrap();
    assert_eq!(cert["coloring"]["kind"], "exhausted");
}

#[test]
fn exit_codes() {
    let d = Dir::new();
    let bad = d.file("bad.graph", "p graph 2 1\ne 1 3\n");
    let r = run(&[p("color3"), &bad]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.is_empty());
    assert_eq!(run(&[p("no-such-command")]).code, 2);
    assert_eq!(run(&[p("qnu"), p("1")]).code, 2);
    let k3 = d.file("k3.graph", K3);
    let k4 = d.file("k4.graph", K4);
    assert_eq!(run(&[p("qnu-check"), &k4, &k3, p("30")]).code, 3);
    let cond = d.file("s4.json", &run(&[p("sigma"), &k4]).json["witness"].to_string());
    assert_eq!(run(&[p("--max-vars"), p("100"), p("satisfies"), &k3, &cond]).code, 3);
    assert_eq!(run(&[p("fgraph"), &k3]).code, 3);
}
