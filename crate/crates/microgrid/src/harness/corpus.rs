//! The shipped scenario files.

use super::scenario::Scenario;
use crate::error::{Error, Result};

pub const SCENARIOS: [(&str, &str); 5] = [
    ("A", include_str!("../../scenarios/A.toml")),
    ("B", include_str!("../../scenarios/B.toml")),
    ("C", include_str!("../../scenarios/C.toml")),
    ("C_secondary", include_str!("../../scenarios/C_secondary.toml")),
    ("D", include_str!("../../scenarios/D.toml")),
];

/// Looks up a shipped scenario by name (case-insensitive).
pub fn builtin(name: &str) -> Result<Scenario> {
    let (_, text) = SCENARIOS
        .iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::Scenario(format!("no built-in scenario {name:?}")))?;
    Scenario::from_toml(text)
}

/// A file path, or the name of a built-in scenario.
pub fn load(arg: &str) -> Result<Scenario> {
    let path = std::path::Path::new(arg);
    if path.is_file() {
        Scenario::from_toml(&std::fs::read_to_string(path)?)
    } else {
        builtin(arg)
    }
}
