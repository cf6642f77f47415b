use ehrhart_core::corpus::{builtin_corpus, cone_json, load_corpus, polytope_json};
use std::path::Path;

fn shipped_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

#[test]
fn shipped_corpus_matches_builtin_constructors() {
    let dir = shipped_dir();
    let built = builtin_corpus();
    for p in &built.polytopes {
        let path = dir.join("polytopes").join(format!("{}.json", p.name()));
        let on_disk = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(on_disk.trim_end(), polytope_json(p), "{} is stale", p.name());
    }
    for c in &built.cones {
        let path = dir.join("cones").join(format!("{}.json", c.name));
        let on_disk = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(on_disk.trim_end(), cone_json(&c.cone), "{} is stale", c.name);
    }
    let loaded = load_corpus(&dir).unwrap();
    assert_eq!(loaded.polytopes.len(), built.polytopes.len());
    assert_eq!(loaded.cones.len(), built.cones.len());
}

#[test]
fn every_shipped_polytope_has_a_consistent_ehrhart_function() {
    let corpus = load_corpus(&shipped_dir()).unwrap();
    for p in &corpus.polytopes {
        let e = ehrhart_core::enumerate::ehrhart(p).unwrap();
        for n in 0..e.counts.len() as i64 {
            let direct = ehrhart_core::enumerate::count_dilate(p, n, ehrhart_core::polytope::Region::Closed).unwrap();
            assert_eq!(e.evaluate(n), ehrhart_core::ratpoly::rat(direct as i64), "{} at {n}", p.name());
        }
        assert!(e.hstar.coeffs.iter().all(|c| *c >= ehrhart_core::ratpoly::rat(0)), "{}", p.name());
    }
}
