//! Fixtures shared by the benchmarks.

use std::path::PathBuf;

use ibsignal_core::ChipTable;

/// The bundled approximate 330-chip table.
pub fn chips() -> ChipTable {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/wcs_chips_approx.tsv");
    ChipTable::load(path).expect("bundled chip table")
}
