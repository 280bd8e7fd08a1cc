use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn mdcsr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdcsr"))
        .args(args)
        .output()
        .expect("spawn mdcsr")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_symbols(path: &Path, symbols: impl IntoIterator<Item = u16>) {
    let bytes: Vec<u8> = symbols.into_iter().flat_map(u16::to_le_bytes).collect();
    std::fs::write(path, bytes).unwrap();
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Config for (4,3,0,0) with B2 = 15, B3 = 30, plus encoded shares in `out/`.
fn encoded_reference() -> TempDir {
    let dir = TempDir::new().unwrap();
    let root = dir.path();
    std::fs::write(
        root.join("cfg.json"),
        r#"{"n":4,"d":3,"l1":0,"l2":0,"p":257,"files":{"2":15,"3":30},"seed":5}"#,
    )
    .unwrap();
    write_symbols(&root.join("m2.bin"), (0..15).map(|x| x * 11 % 257));
    write_symbols(&root.join("m3.bin"), (0..30).map(|x| 256 - x));
    let o = mdcsr(&[
        "encode",
        "--config",
        s(&root.join("cfg.json")),
        "--message",
        &format!("2={}", s(&root.join("m2.bin"))),
        "--message",
        &format!("3={}", s(&root.join("m3.bin"))),
        "--out",
        s(&root.join("out")),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    dir
}

#[test]
fn encode_writes_one_share_per_node() {
    let dir = encoded_reference();
    for i in 1..=4 {
        let bytes = std::fs::read(dir.path().join(format!("out/node_{i}.mdcs"))).unwrap();
        let hlen = u32::from_le_bytes(bytes[5..9].try_into().unwrap()) as usize;
        assert_eq!(&bytes[..5], b"MDCS\x01");
        assert_eq!(bytes.len() - 9 - hlen, 2 * 24);
    }
}

#[test]
fn encode_is_deterministic() {
    let a = encoded_reference();
    let b = encoded_reference();
    for i in 1..=4 {
        let f = format!("out/node_{i}.mdcs");
        assert_eq!(std::fs::read(a.path().join(&f)).unwrap(), std::fs::read(b.path().join(&f)).unwrap());
    }
}

#[test]
fn encode_without_messages_gives_zero_payloads() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"n":3,"d":2,"l1":0,"l2":0}"#).unwrap();
    let out = dir.path().join("out");
    assert_eq!(code(&mdcsr(&["encode", "--config", s(&cfg), "--out", s(&out)])), 0);
    let bytes = std::fs::read(out.join("node_1.mdcs")).unwrap();
    let hlen = u32::from_le_bytes(bytes[5..9].try_into().unwrap()) as usize;
    assert!(bytes[9 + hlen..].iter().all(|&b| b == 0));
}

#[test]
fn encode_rejects_wrong_message_length() {
    let dir = encoded_reference();
    let root = dir.path();
    write_symbols(&root.join("short.bin"), 0..14);
    let o = mdcsr(&[
        "encode",
        "--config",
        s(&root.join("cfg.json")),
        "--message",
        &format!("2={}", s(&root.join("short.bin"))),
        "--message",
        &format!("3={}", s(&root.join("m3.bin"))),
        "--out",
        s(&root.join("out2")),
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn encode_rejects_symbols_outside_field() {
    let dir = encoded_reference();
    let root = dir.path();
    write_symbols(&root.join("big.bin"), (0..15).map(|x| if x == 3 { 257 } else { x }));
    let o = mdcsr(&[
        "encode",
        "--config",
        s(&root.join("cfg.json")),
        "--message",
        &format!("2={}", s(&root.join("big.bin"))),
        "--message",
        &format!("3={}", s(&root.join("m3.bin"))),
        "--out",
        s(&root.join("out2")),
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn repair_restores_deleted_share() {
    let dir = encoded_reference();
    let out = dir.path().join("out");
    let original = std::fs::read(out.join("node_1.mdcs")).unwrap();
    std::fs::remove_file(out.join("node_1.mdcs")).unwrap();
    let o = mdcsr(&["repair", "--dir", s(&out), "--target", "1", "--helpers", "2,3,4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read(out.join("node_1.mdcs")).unwrap(), original);

    // target still present: rewriting is idempotent
    let o = mdcsr(&["repair", "--dir", s(&out), "--target", "1", "--helpers", "2,3,4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read(out.join("node_1.mdcs")).unwrap(), original);
}

#[test]
fn repair_needs_d_helpers() {
    let dir = encoded_reference();
    let out = dir.path().join("out");
    let o = mdcsr(&["repair", "--dir", s(&out), "--target", "1", "--helpers", "2,3"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn recover_round_trips_every_subset() {
    let dir = encoded_reference();
    let root = dir.path();
    let m2 = std::fs::read(root.join("m2.bin")).unwrap();
    for nodes in ["1,2", "1,3", "1,4", "2,3", "2,4", "3,4"] {
        let got = root.join("got.bin");
        let o = mdcsr(&[
            "recover", "--dir", s(&root.join("out")), "--level", "2", "--nodes", nodes, "--out", s(&got),
        ]);
        assert_eq!(code(&o), 0);
        assert_eq!(std::fs::read(&got).unwrap(), m2, "nodes {nodes}");
    }
    let m3 = std::fs::read(root.join("m3.bin")).unwrap();
    let o = mdcsr(&["recover", "--dir", s(&root.join("out")), "--level", "3", "--nodes", "2,3,4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(o.stdout, m3);
}

#[test]
fn recover_validation_errors() {
    let dir = encoded_reference();
    let out = dir.path().join("out");
    assert_eq!(code(&mdcsr(&["recover", "--dir", s(&out), "--level", "2", "--nodes", "1,2,3"])), 2);
    assert_eq!(code(&mdcsr(&["recover", "--dir", s(&out), "--level", "4", "--nodes", "1,2,3,4"])), 2);
}

fn audit_config() -> TempDir {
    let dir = TempDir::new().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"n":5,"d":4,"l1":1,"l2":1,"p":257,"files":{"3":2,"4":3},"seed":0}"#,
    )
    .unwrap();
    dir
}

#[test]
fn audit_exhaustive_is_secure() {
    let dir = audit_config();
    let o = mdcsr(&["audit", "--config", s(&dir.path().join("cfg.json")), "--exhaustive"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let entries: Vec<serde_json::Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .filter(|v: &serde_json::Value| v.get("e1").is_some())
        .collect();
    assert_eq!(entries.len(), 20);
    assert!(entries.iter().all(|e| e["leakage_rank"] == 0));
}

#[test]
fn audit_over_threshold_leaks() {
    let dir = audit_config();
    let cfg = dir.path().join("cfg.json");
    assert_eq!(code(&mdcsr(&["audit", "--config", s(&cfg), "--sizes", "2,1"])), 3);
    assert_eq!(code(&mdcsr(&["audit", "--config", s(&cfg), "--sizes", "0,0"])), 0);
    assert_eq!(code(&mdcsr(&["audit", "--config", s(&cfg), "--e1", "1", "--e2", "2"])), 0);
    assert_eq!(code(&mdcsr(&["audit", "--config", s(&cfg), "--e1", "1", "--e2", "1"])), 2);
}

#[test]
fn bounds_match_reference_values() {
    let o = mdcsr(&["bounds", "--n", "4", "--d", "3", "--l1", "0", "--l2", "0", "--rates", "0,1/3,2/3"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["beta_floor"], "8/45");
    assert_eq!(v["b4"], "alpha + 3*beta >= 16/15");
    assert_eq!(v["type2_2"], "alpha + 9*beta >= 32/15");
    assert_eq!(v["mbr"], serde_json::json!(["8/15", "8/45"]));
}

#[test]
fn bounds_omits_general_bound_out_of_regime() {
    let o = mdcsr(&["bounds", "--n", "5", "--d", "4", "--l1", "2", "--l2", "1", "--rates", "1"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!(v.get("b4").is_none());
    assert_eq!(v["b4_omitted"], "split out of regime");
}

#[test]
fn region_row_at_mbr_beta() {
    let o = mdcsr(&[
        "region", "--n", "4", "--d", "3", "--l1", "0", "--l2", "0", "--rates", "0,1/3,2/3", "--grid", "0,8/45,1",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let row = text.lines().find(|l| l.starts_with("8/45,")).expect("row");
    assert!(row.ends_with(",8/15"), "{row}");
}

#[test]
fn verify_lemmas_exit_codes() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"n":4,"d":3,"l1":0,"l2":0,"files":{"1":3,"2":5,"3":6}}"#).unwrap();
    let o = mdcsr(&["verify-lemmas", "--config", s(&cfg)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for line in stdout(&o).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["satisfied"], true);
    }
    let o = mdcsr(&["verify-lemmas", "--config", s(&cfg), "--suite", "symmetry", "--corrupt-node", "2"]);
    assert_eq!(code(&o), 3);
    assert_eq!(code(&mdcsr(&["verify-lemmas", "--config", s(&cfg), "--suite", "nope"])), 2);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&mdcsr(&[])), 2);
    assert_eq!(code(&mdcsr(&["frobnicate"])), 2);
    assert_eq!(code(&mdcsr(&["--help"])), 0);
}
