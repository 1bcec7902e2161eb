//! The JSON files under `fixtures/` must match the Rust builders.
//! Regenerate with `COMPERS_BLESS=1 cargo test -p compers-core --test golden_files`.

use std::path::PathBuf;

use compers_core::fixtures;
use compers_core::io;

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

#[test]
fn fixture_files_match_builders() {
    let bless = std::env::var_os("COMPERS_BLESS").is_some();
    let mut stale = Vec::new();
    for (name, value) in fixtures::all() {
        let path = dir().join(format!("{name}.json"));
        let text = io::pretty(&value) + "\n";
        if bless {
            std::fs::write(&path, &text).unwrap();
            continue;
        }
        match std::fs::read_to_string(&path) {
            Ok(found) if found == text => {}
            _ => stale.push(name),
        }
    }
    assert!(stale.is_empty(), "stale fixture files: {stale:?}");
}

#[test]
fn fixture_files_load_back() {
    for (name, value) in fixtures::all() {
        let path = dir().join(format!("{name}.json"));
        let text = std::fs::read_to_string(&path).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed, value, "{name}");
        if parsed.get("dims").is_some() && name != "diamond_tampered" {
            let m = io::read_module(&path, None).unwrap();
            assert_eq!(io::module_to_json(&m), value, "{name}");
        }
    }
}
