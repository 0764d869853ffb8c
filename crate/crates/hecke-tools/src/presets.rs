//! Configurations shipped inside the binary.

use crate::config::RunConfig;
use crate::error::CliError;

pub const PRESETS: &[(&str, &str)] = &[
    ("affine-a1", include_str!("../presets/affine-a1.json")),
    ("affine-a1-ext", include_str!("../presets/affine-a1-ext.json")),
    ("finite-a2", include_str!("../presets/finite-a2.json")),
    ("finite-b2", include_str!("../presets/finite-b2.json")),
    ("a2-levi", include_str!("../presets/a2-levi.json")),
    ("s4s3", include_str!("../presets/s4s3.json")),
    ("gl2f2-cover", include_str!("../presets/gl2f2-cover.json")),
    ("gl2f3-cover", include_str!("../presets/gl2f3-cover.json")),
    ("gl2f3-generic-cover", include_str!("../presets/gl2f3-generic-cover.json")),
    ("pauli-cocycle", include_str!("../presets/pauli-cocycle.json")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn text(name: &str) -> Result<&'static str, CliError> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| CliError::config(format!("unknown preset {name:?}; available: {}", names().collect::<Vec<_>>().join(", "))))
}

pub fn load(name: &str) -> Result<RunConfig, CliError> {
    RunConfig::parse(text(name)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses() {
        for name in names() {
            load(name).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(load("nope").is_err());
    }
}
