//! Every seed checked in for the fuzz targets parses and round-trips.

use std::path::PathBuf;

use pgonal::actions::{check, SurfaceKernelMap};
use pgonal::cli::Config;
use pgonal::groups::GroupSpec;
use pgonal::nec::NecSignature;

fn seeds(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut files: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert!(!files.is_empty(), "{}", dir.display());
    files.iter().map(|f| std::fs::read_to_string(f).unwrap()).collect()
}

#[test]
fn signature_seeds() {
    for s in seeds("signature") {
        let sig: NecSignature = s.parse().unwrap();
        assert_eq!(sig.to_string().parse::<NecSignature>().unwrap(), sig);
        assert!(sig.is_valid(), "{s}");
    }
}

#[test]
fn group_spec_seeds() {
    for s in seeds("group_spec") {
        let g: GroupSpec = s.parse().unwrap();
        assert_eq!(g.to_string().parse::<GroupSpec>().unwrap(), g);
    }
}

#[test]
fn map_json_seeds() {
    for s in seeds("map_json") {
        let m = SurfaceKernelMap::from_json(&s).unwrap();
        assert_eq!(SurfaceKernelMap::from_json(&m.to_json()).unwrap(), m);
        let rep = check(&m).unwrap();
        assert!(rep.valid && rep.pseudo_real, "{s}");
    }
}

#[test]
fn config_seeds() {
    for s in seeds("config") {
        s.parse::<Config>().unwrap();
    }
}
