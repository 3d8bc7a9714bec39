use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stablerange::cli::Config;
use stablerange::families::SolutionDoc;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stablerange"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const KZ2_BLOWUP: &str = r#"{"equation":"kz2d","family":"blowup","params":{"beta":"t","rho":"0"}}"#;
const KZ3_BLOWUP: &str = r#"{
  "equation": "kz3d", "family": "blowup",
  "params": {"gamma0": "1", "gamma2": "1/(2 - t)", "beta": "sin(t)", "sigma": ["t", "1"], "kappa": "0", "omega": "eta^2"},
  "constants": {"epsilon": -1, "alpha0": 0.3},
  "seed": 11
}"#;

#[test]
fn grid_example() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", r#"{"equation":"kz2d","family":"polynomial","params":{"alpha":"1"}}"#);
    let out = dir.path().join("f.csv");
    let o = run(&["sample", "--config", s(&cfg), "--grid", "t=0:0:1,x=0:2:3,y=0:2:3", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,x,y,u");
    assert_eq!(lines.len(), 10);
    assert!(lines.contains(&"0.0,1.0,2.0,3.0"));
}

#[test]
fn guarded_points_are_nan() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", KZ2_BLOWUP);
    let o = run(&["sample", "--config", s(&cfg), "--grid", "t=1:1:1,x=1:1:1,y=-2:0:3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1], "1.0,1.0,-1.0,nan");
    assert!(!rows[0].ends_with("nan") && !rows[2].ends_with("nan"));
}

#[test]
fn kz3_csv_has_z_column() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", KZ3_BLOWUP);
    let o = run(&["sample", "--config", s(&cfg), "--grid", "t=0:1:2,x=-1:1:2,y=2:3:2,z=0:1:3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("t,x,y,z,u\n"));
    assert_eq!(text.lines().count(), 1 + 24);
    assert!(text.lines().nth(2).unwrap().starts_with("0.0,-1.0,2.0,0.5,"));
}

#[test]
fn outputs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", KZ3_BLOWUP);
    let mut csv = Vec::new();
    let mut json = Vec::new();
    let mut reports = Vec::new();
    for i in 0..2 {
        let f = dir.path().join(format!("f{i}.csv"));
        let b = dir.path().join(format!("b{i}.json"));
        let r = dir.path().join(format!("r{i}.json"));
        assert_eq!(code(&["sample", "--config", s(&cfg), "--grid", "t=0:1:3,x=-1:1:4,y=-2:2:5,z=-1:1:3", "--out", s(&f)]), 0);
        assert_eq!(code(&["build", "--config", s(&cfg), "--out", s(&b)]), 0);
        assert_eq!(code(&["verify", "--config", s(&cfg), "--samples", "50", "--report", s(&r)]), 0);
        csv.push(std::fs::read(&f).unwrap());
        json.push(std::fs::read(&b).unwrap());
        reports.push(std::fs::read(&r).unwrap());
    }
    assert_eq!(csv[0], csv[1]);
    assert_eq!(json[0], json[1]);
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", KZ3_BLOWUP);
    let args = ["sample", "--config", s(&cfg), "--grid", "t=0:1:3,x=-1:1:4,y=-2:2:5,z=-1:1:3"];
    let one = bin().args(args).env("STABLERANGE_THREADS", "1").output().unwrap();
    let four = bin().args(args).env("STABLERANGE_THREADS", "4").output().unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let bad = bin().args(args).env("STABLERANGE_THREADS", "lots").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn verify_example_passes() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", KZ2_BLOWUP);
    let r = dir.path().join("r.json");
    let o = run(&["verify", "--config", s(&cfg), "--samples", "1000", "--tol", "1e-8", "--seed", "3", "--report", s(&r)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&r).unwrap()).unwrap();
    assert_eq!(rep["pass"], true);
    assert_eq!(rep["samples"], 1000);
    assert_eq!(rep["seed"], 3);
    assert_eq!(rep["family"], "kz2d-blowup");
    assert!(rep["max_rel_residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn surface_command() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", KZ2_BLOWUP);
    let o = run(&["surface", "--config", s(&cfg), "--t", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), "line y = -2.0");
    let poly = write(&dir, "p.json", r#"{"equation":"kz2d","family":"polynomial"}"#);
    let o = run(&["surface", "--config", s(&poly), "--t", "0"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), "none");
}

#[test]
fn families_lists_nine() {
    let o = run(&["families"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 9);
    assert!(text.contains("kz3d-harmonic") && text.contains("w1_re"));
}

#[test]
fn exit_code_verification_failure() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", KZ3_BLOWUP);
    assert_eq!(code(&["verify", "--config", s(&cfg), "--samples", "20", "--tol", "1e-30"]), 1);
}

#[test]
fn exit_code_config_errors() {
    let dir = TempDir::new().unwrap();
    for (i, text) in [
        r#"{"equation":"kz2d","family":"blowup","params":{"rho":"0"},"colour":1}"#,
        r#"{"equation":"kz2d","family":"blowup"}"#,
        r#"{"equation":"kz2d","family":"blowup","params":{"rho":"0","zeta":"1"}}"#,
        r#"{"equation":"kz2d","family":"blowup","params":{"rho":"sin(("}}"#,
        r#"{"equation":"kz4d","family":"blowup"}"#,
        r#"{"equation":"kz2d","family":"harmonic"}"#,
        r#"{"equation":"kz2d","family":"polynomial","k":2}"#,
        r#"{"equation":"kz2d","family":"elliptic","mode":"formula","constants":{"iota":1}}"#,
        r#"{"equation":"kz3d","family":"blowup","params":{"kappa":"0","omega":"0"},"constants":{"epsilon":2}}"#,
        r#"{"equation":"kz3d","family":"blowup","params":{"kappa":"0","omega":"t*eta"}}"#,
        r#"{"equation":"kz3d","family":"blowup","mode":"formula","params":{"kappa":"0","omega":"0","gamma2":"1"}}"#,
        "not json",
    ]
    .iter()
    .enumerate()
    {
        let cfg = write(&dir, &format!("c{i}.json"), text);
        assert_eq!(code(&["build", "--config", s(&cfg)]), 2, "{text}");
    }
    let cfg = write(&dir, "ok.json", KZ2_BLOWUP);
    assert_eq!(code(&["sample", "--config", s(&cfg), "--grid", "t=0:1:2,x=0:1:2"]), 2);
    assert_eq!(code(&["sample", "--config", s(&cfg), "--grid", "t=0:1:2,x=0:1:2,y=0:1:2,z=0:1:2"]), 2);
    assert_eq!(code(&["sample", "--config", s(&cfg), "--grid", "t=0:1:10,x=0:1:10,y=0:1:10", "--max-points", "999"]), 2);
    assert_eq!(code(&["verify", "--config", s(&cfg), "--box", "y=1:0"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["build"]), 2);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn exit_code_construction_errors() {
    let dir = TempDir::new().unwrap();
    let k1 = write(
        &dir,
        "k1.json",
        r#"{"equation":"shortwave","family":"blowup","k":1,"params":{"rho":"0","theta":"0","vartheta":"0"}}"#,
    );
    let o = run(&["build", "--config", s(&k1)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("(k-2)(1-2k)"));
    for text in [
        r#"{"equation":"kz3d","family":"elliptic","constants":{"iota":1,"a":1,"b":1}}"#,
        r#"{"equation":"kz3d","family":"blowup","params":{"kappa":"0","omega":"0","gamma2":"1","alpha":"t"}}"#,
        r#"{"equation":"shortwave","family":"elliptic","k":1,"constants":{"iota":1}}"#,
    ] {
        let cfg = write(&dir, "c.json", text);
        assert_eq!(code(&["build", "--config", s(&cfg)]), 3, "{text}");
    }
}

#[test]
fn exit_code_io_errors() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&["build", "--config", s(&missing)]), 4);
    let cfg = write(&dir, "c.json", KZ2_BLOWUP);
    let bad_out = dir.path().join("no/such/dir/out.json");
    assert_eq!(code(&["build", "--config", s(&cfg), "--out", s(&bad_out)]), 4);
    assert_eq!(code(&["verify", "--config", s(&cfg), "--samples", "5", "--report", s(&bad_out)]), 4);
}

#[test]
fn build_reload_reproduces_evaluation() {
    let dir = TempDir::new().unwrap();
    let configs = [
        KZ3_BLOWUP,
        KZ2_BLOWUP,
        r#"{"equation":"shortwave","family":"blowup","k":0.5,"params":{"alpha":"t^2","beta":"cos(t)","gamma":"1+t","sigma":"t","rho":"exp(-t)","theta":"1","vartheta":"t"}}"#,
        r#"{"equation":"shortwave","family":"polynomial","k":3,"params":{"alpha":"t","beta":"1","gamma":"t^2","sigma":"2","rho":"0","tau":"sin(t)"}}"#,
        r#"{"equation":"kz3d","family":"harmonic","params":{"sigma":["t","0","1"],"rho":"mu","kappa":"0","omega":["0","t"]},"constants":{"w1_re":0.5,"w1_im":-1}}"#,
        r#"{"equation":"kz3d","family":"elliptic","constants":{"iota":0.7,"a":0.6,"b":0.8}}"#,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for text in configs {
        let cfg = write(&dir, "c.json", text);
        let out = dir.path().join("s.json");
        assert_eq!(code(&["build", "--config", s(&cfg), "--out", s(&out)]), 0, "{text}");
        let doc: SolutionDoc = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        let reloaded = doc.to_solution().unwrap();
        let orig = Config::from_json(text).unwrap().build().unwrap();
        let mut checked = 0;
        while checked < 100 {
            let p = [
                rng.random_range(0.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            ];
            let Ok(a) = orig.eval(p, 1e-2) else { continue };
            let b = reloaded.eval(p, 1e-2).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300), "{text}: {a} vs {b}");
            checked += 1;
        }
    }
}
