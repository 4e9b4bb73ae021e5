//! World Color Survey stimulus and naming data.

mod chips;
mod naming;
pub mod synth;
mod trial;

pub use chips::{Chip, ChipTable, GridCode, GRID_COLS, GRID_ROWS, WCS_CHIP_COUNT};
pub use naming::{
    load_all_languages, load_language_naming, naming_from_records, parse_term_records,
    NamingSystem, TermRecord, NO_RESPONSE,
};
pub use trial::{sample_trial, ReferenceTrial};
