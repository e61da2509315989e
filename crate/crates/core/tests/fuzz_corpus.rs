//! Replays the checked-in fuzz corpus through the parsers with the same
//! properties the fuzz targets assert.

use std::path::PathBuf;

use tfim_gp::output::{csv_bytes, parse_csv};
use tfim_gp::sweep::{parse_angle, parse_angle_list, parse_config};

fn corpus(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            let text = String::from_utf8_lossy(&std::fs::read(&p).unwrap()).into_owned();
            (p, text)
        })
        .collect();
    files.sort();
    assert!(!files.is_empty(), "no seeds in {}", dir.display());
    files
}

#[test]
fn config_seeds() {
    let results: Vec<bool> = corpus("parse_config").iter().map(|(_, t)| parse_config(t).is_ok()).collect();
    assert!(results.contains(&true) && results.contains(&false));
}

#[test]
fn csv_seeds_round_trip() {
    for (path, text) in corpus("parse_csv") {
        let records = parse_csv(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let written = csv_bytes(&records).unwrap();
        assert_eq!(written, text.as_bytes(), "{}", path.display());
    }
}

#[test]
fn angle_seeds() {
    for (path, text) in corpus("parse_angle") {
        if let Ok(x) = parse_angle(&text) {
            assert!(x.is_finite(), "{}", path.display());
        }
        if let Ok(xs) = parse_angle_list(&text) {
            assert!(xs.iter().all(|x| x.is_finite()));
        }
    }
}
