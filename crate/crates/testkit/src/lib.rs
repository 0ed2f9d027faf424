//! Input generators and slow, obviously-correct reference implementations
//! for the texo test suites. Nothing here calls into `texo-core`.

pub mod gen;
pub mod oracle;

use std::path::PathBuf;

/// `data/` at the workspace root.
pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn read_data(name: &str) -> String {
    let path = data_dir().join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
