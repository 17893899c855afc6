//! Test support for the workspace: proptest generators for models and
//! sessions, brute-force reference oracles, and a DOT reader backed by an
//! independent Graphviz grammar.

pub mod dot;
pub mod gen;
pub mod oracle;

use std::path::PathBuf;

/// The repository's `fixtures/` directory.
pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture(name: &str) -> String {
    let path = fixtures_dir().join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()))
}
