//! Models shipped with the binary.

pub const MAXWELL: &str = include_str!("../models/maxwell.vtc");
pub const CHIRAL: &str = include_str!("../models/chiral.vtc");

/// Source of a built-in model by name, with or without the `.vtc` suffix.
pub fn builtin(name: &str) -> Option<&'static str> {
    match name.trim_end_matches(".vtc") {
        "maxwell" => Some(MAXWELL),
        "chiral" => Some(CHIRAL),
        _ => None,
    }
}

pub const NAMES: [&str; 2] = ["maxwell", "chiral"];
