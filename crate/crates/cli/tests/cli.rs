use std::path::Path;
use std::process::{Command, Output};

fn apvas(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apvas"))
        .args(args)
        .current_dir(dir)
        .env_remove("APVAS_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

/// Two keys and a verified two-chain claim in `dir/all`.
fn build_claim(dir: &Path) {
    for (seed, name) in [("1", "a.key"), ("2", "b.key")] {
        assert_eq!(code(&apvas(dir, &["keygen", "--seed", seed, "--out", name])), 0);
    }
    let steps: [&[&str]; 4] = [
        &["sign", "--key", "a.key", "--msg", "hello", "--out", "c1"],
        &["sign", "--key", "b.key", "--msg", "next", "--claim", "c1", "--chain", "0", "--out", "c2"],
        &["sign", "--key", "b.key", "--msg-hex", "00ff", "--out", "c3"],
        &["aggregate", "--claim", "c2", "--claim", "c3", "--out", "all"],
    ];
    for s in steps {
        let o = apvas(dir, s);
        assert_eq!(code(&o), 0, "{s:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn sign_aggregate_verify() {
    let dir = tempfile::tempdir().unwrap();
    build_claim(dir.path());
    let o = apvas(dir.path(), &["verify", "--claim", "all"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "true\n"));
    assert_eq!(std::fs::read(dir.path().join("all")).unwrap().len(), 64 + 2 + (2 + 2 * 68 + 5 + 4) + (2 + 68 + 2));
}

#[test]
fn tampered_claim_prints_false() {
    let dir = tempfile::tempdir().unwrap();
    build_claim(dir.path());
    let mut bytes = std::fs::read(dir.path().join("all")).unwrap();
    // First byte of the first message: sigma, chain count, entry count, pk, length.
    bytes[64 + 2 + 2 + 64 + 4] ^= 0x20;
    std::fs::write(dir.path().join("bad"), bytes).unwrap();
    let o = apvas(dir.path(), &["verify", "--claim", "bad"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (1, "false\n"));
}

#[test]
fn refuses_to_extend_an_invalid_claim() {
    let dir = tempfile::tempdir().unwrap();
    build_claim(dir.path());
    let mut bytes = std::fs::read(dir.path().join("c1")).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 1;
    std::fs::write(dir.path().join("bad"), bytes).unwrap();
    let o = apvas(dir.path(), &["sign", "--key", "b.key", "--msg", "x", "--claim", "bad", "--chain", "0", "--out", "o"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn duplicate_aggregation_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    build_claim(dir.path());
    let o = apvas(dir.path(), &["aggregate", "--claim", "c1", "--claim", "c2", "--out", "dup"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn exit_codes_for_usage_and_io() {
    let dir = tempfile::tempdir().unwrap();
    let o = apvas(dir.path(), &["verify", "--bogus"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(code(&apvas(dir.path(), &[])), 2);
    assert_eq!(code(&apvas(dir.path(), &["verify", "--claim", "missing"])), 3);
    std::fs::write(dir.path().join("junk"), b"\x00\x01").unwrap();
    assert_eq!(code(&apvas(dir.path(), &["verify", "--claim", "junk"])), 3);
    assert_eq!(code(&apvas(dir.path(), &["inspect", "--msg", "junk"])), 3);
    assert_eq!(code(&apvas(dir.path(), &["golden", "--out", "g"])), 2);
    assert!(!dir.path().join("g").exists());
    assert_eq!(code(&apvas(dir.path(), &["--help"])), 0);
}

#[test]
fn keygen_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let a = stdout(&apvas(dir.path(), &["keygen", "--seed", "5"]));
    let b = stdout(&apvas(dir.path(), &["keygen", "--seed", "5"]));
    assert_eq!(a, b);
    assert!(a.starts_with("secret_key = \""));
    let env = Command::new(env!("CARGO_BIN_EXE_apvas"))
        .args(["keygen"])
        .env("APVAS_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(env.stdout).unwrap(), a);
}

#[test]
fn inspect_lists_offsets() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.hex"), "00 000e 0100 0000fdea 0100 0000fde9 18c00002\n").unwrap();
    let o = apvas(dir.path(), &["inspect", "--msg", "m.hex", "--hex"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("suite plain (19 bytes)"));
    assert!(text.contains("    9    6  secure_path[1]"));
    assert!(text.contains("   15    4  nlri                         192.0.2.0/24"));

    std::fs::write(dir.path().join("m.bin"), hex::decode("00000801000000fde918c00002").unwrap()).unwrap();
    let o = apvas(dir.path(), &["inspect", "--msg", "m.bin", "--format", "toml"]);
    let doc: toml::Table = toml::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["total_len"].as_integer(), Some(13));
    assert_eq!(doc["field"].as_array().unwrap().len(), 4);
}

#[test]
fn simulate_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("line.toml"),
        "routers = [1, 2, 3]\nlinks = [[1, 2], [2, 3]]\n[[advertisements]]\norigin_as = 1\npath_count = 3\nnlri_seed = 0\n",
    )
    .unwrap();
    let o = apvas(dir.path(), &["simulate", "--config", "line.toml", "--suite", "all", "--out", "out"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/results.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "suite,as_number,path_count,avg_len,routing_table_bytes,route_attr_bytes,sig_block_bytes");
    assert_eq!(lines.len(), 1 + 9);
    assert!(lines.contains(&"apvas,3,3,2.0,690,793,184"));
    for f in ["summary-apvas.toml", "report.toml", "report.txt"] {
        assert!(dir.path().join("out").join(f).exists(), "{f}");
    }

    let o = apvas(dir.path(), &["simulate", "--config", "line.toml", "--suite", "bogus", "--out", "x"]);
    assert_eq!(code(&o), 2);
    std::fs::write(dir.path().join("split.toml"), "routers = [1, 2]\n").unwrap();
    let o = apvas(dir.path(), &["simulate", "--config", "split.toml", "--out", "x"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("disconnected"));
}

#[test]
fn report_prints_reductions() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("line.toml"),
        "routers = [1, 2, 3, 4]\nlinks = [[1, 2], [2, 3], [3, 4]]\n[[advertisements]]\norigin_as = 1\npath_count = 2\nnlri_seed = 0\n",
    )
    .unwrap();
    let o = apvas(dir.path(), &["report", "--config", "line.toml"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("L =  3.9: apvas   145.0 B, conventional   461.2 B, reduction 68.6%"));
    assert!(text.contains("L =   20: apvas   467.0 B, conventional  2361.0 B, reduction 80.2%"));
}
