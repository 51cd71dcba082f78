use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_arithdeg"));
    c.env_remove("ARITHDEG_WORKERS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

const VANDERMONDE: [&str; 10] = [
    "--form", "x0 + x1 + x2", "--form", "x0 + 2*x1 + 4*x2", "--form", "x0 + 3*x1 + 9*x2", "--form", "x0 + 4*x1 + 16*x2",
    "--form", "x0 + 5*x1 + 25*x2",
];

#[test]
fn chow_top_power() {
    let o = run(&["chow", "--config", "cyclic", "--n", "2", "--q", "6", "--power", "D,n"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "12\n");
    let o = run(&["chow", "--config", "marked", "--n", "2", "--ell", "10", "--power", "A,2"]);
    // A = 31H - 10(E1+E2+E3): 961 - 300.
    assert_eq!(stdout(&o), "661\n");
}

#[test]
fn chow_nef_rows() {
    let o = run(&["chow", "--config", "cyclic", "--n", "2", "--q", "6", "--nef", "D-2*Ht1", "--nef", "E1"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("certified-nef"));
    assert!(s.contains("line in E1: -1"));
}

#[test]
fn beta_cyclic_example() {
    let o = run(&["beta", "--cyclic", "2", "6", "--numeric-N", "100"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("10/9") && s.contains("1.106"), "{s}");
}

#[test]
fn heights_breakdown() {
    let o = run(&["--csv", "heights", "--form", "x0", "--point", "2,3", "--s", "inf"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.starts_with("# {"));
    assert!(s.contains("x0,inf,true,3/2,"));
    assert!(s.contains("x0,2,false,2,"));
}

#[test]
fn verify_default_and_single_cell() {
    let o = run(&["verify"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["--csv", "verify", "--n", "2", "--q", "6"]);
    let s = stdout(&o);
    let mut lines = s.lines();
    assert!(lines.next().unwrap().starts_with("# "));
    assert_eq!(lines.next().unwrap(), "table,n,param,beta_exact,bound,target,verdict,detail");
    assert!(s.lines().any(|l| l == "beta,2,q=6,10/9,4,0,PASS,"), "{s}");
}

#[test]
fn verify_mutation_fails() {
    let o = run(&["verify", "--inject-fault", "f-poly"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("first failing row"));
    let o = run(&["verify", "--n", "3", "--inject-fault", "top"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn usage_and_resource_codes() {
    assert_eq!(code(&run(&["chow", "--config", "cyclic", "--n", "2"])), 2);
    assert_eq!(code(&run(&["beta"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("big.jsonl");
    let o = run(&["search", "cor12", "--n", "3", "--bound", "1000", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(!out.exists(), "no partial file after failure");
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# cyclic plane\nq = 6\npower = D,n\nn = 3\n").unwrap();
    // The command line wins over the file for `n`.
    let o = run(&["chow", "--config", "cyclic", "--n", "2", "--config-file", cfg.to_str().unwrap()]);
    assert_eq!(stdout(&o), "12\n");
}

#[test]
fn search_file_roundtrip_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("sol.jsonl");
    let rep = dir.path().join("report.txt");
    let mut args = vec!["search", "thm11"];
    args.extend(VANDERMONDE);
    args.extend(["--g", "x0", "--bound", "10", "--s", "2", "--out", sol.to_str().unwrap(), "--output", rep.to_str().unwrap()]);
    let o = run(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&sol).unwrap();
    let header: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(header["kind"], "header");
    assert_eq!(header["config"]["command"]["search"]["thm11"]["bx"]["bound"], 10);
    for file in [&sol, &rep] {
        let o = run(&["replay", file.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", stdout(&o));
        assert!(stdout(&o).contains("byte-for-byte"));
    }
    let o = run(&["search", "check", sol.to_str().unwrap()]);
    assert_eq!(code(&o), 0);

    // A tampered witness is caught on load.
    let tampered = dir.path().join("bad.jsonl");
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut rec: serde_json::Value = serde_json::from_str(&lines[2]).unwrap();
    rec["witnesses"]["7"] = serde_json::json!([1, 1, 1, 1, 1, 1]);
    lines[2] = rec.to_string();
    std::fs::write(&tampered, lines.join("\n") + "\n").unwrap();
    assert_eq!(code(&run(&["search", "check", tampered.to_str().unwrap()])), 1);
}

#[test]
fn cor12_desk_search() {
    let o = run(&["--json", "search", "cor12", "--n", "2", "--bound", "50", "--degeneracy", "2", "--growth", "5,50"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["count"], 3);
    assert_eq!(v["result"]["degeneracy"]["degrees"][0]["kernel_dim"], 0);
    assert_eq!(v["result"]["degeneracy"]["growth"][1]["count"], 3);
    assert_eq!(v["header"]["tool"], "arithdeg");
}

#[test]
fn checkpointed_search_matches() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("cp.json");
    let base = ["search", "cor12", "--n", "2", "--bound", "40"];
    let plain = stdout(&run(&base));
    let mut with_cp = base.to_vec();
    with_cp.extend(["--checkpoint", cp.to_str().unwrap()]);
    assert_eq!(stdout(&run(&with_cp)), plain);
    assert!(cp.exists());
    assert_eq!(stdout(&run(&with_cp)), plain);
}

fn audit_bytes(dir: &Path, name: &str, workers: &str) -> Vec<u8> {
    let path = dir.join(name);
    let o = bin()
        .args(["--csv", "audit", "subspace", "--form", "x0", "--form", "x1", "--form", "x2", "--form", "x0+x1+x2"])
        .args(["--samples", "200", "--seed", "4", "--output", path.to_str().unwrap()])
        .env("ARITHDEG_WORKERS", workers)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read(path).unwrap()
}

#[test]
fn seeded_outputs_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = audit_bytes(dir.path(), "a.csv", "2");
    let b = audit_bytes(dir.path(), "b.csv", "2");
    assert_eq!(a, b);
    let o = run(&["replay", dir.path().join("a.csv").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn levin_audit_reports_both_forms() {
    let o = run(&["audit", "levin", "--form", "x0", "--form", "x1", "--form", "x2", "--form", "x0+x1+x2", "--samples", "30"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("of the counting form"));
}
