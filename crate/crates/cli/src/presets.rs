//! Bundled scenarios reproducing the parameter studies of figures 1 to 18.

use crate::error::{CliError, Result};
use crate::scenario::Scenario;

/// Highest figure number.
pub const FIGURES: u32 = 18;

const PRESETS: [&str; FIGURES as usize] = [
    include_str!("../presets/figure01.toml"),
    include_str!("../presets/figure02.toml"),
    include_str!("../presets/figure03.toml"),
    include_str!("../presets/figure04.toml"),
    include_str!("../presets/figure05.toml"),
    include_str!("../presets/figure06.toml"),
    include_str!("../presets/figure07.toml"),
    include_str!("../presets/figure08.toml"),
    include_str!("../presets/figure09.toml"),
    include_str!("../presets/figure10.toml"),
    include_str!("../presets/figure11.toml"),
    include_str!("../presets/figure12.toml"),
    include_str!("../presets/figure13.toml"),
    include_str!("../presets/figure14.toml"),
    include_str!("../presets/figure15.toml"),
    include_str!("../presets/figure16.toml"),
    include_str!("../presets/figure17.toml"),
    include_str!("../presets/figure18.toml"),
];

/// TOML text of the preset for `figure`.
pub fn preset_text(figure: u32) -> Result<&'static str> {
    if (1..=FIGURES).contains(&figure) {
        Ok(PRESETS[figure as usize - 1])
    } else {
        Err(CliError::Scenario(format!("no preset for figure {figure} (expected 1..={FIGURES})")))
    }
}

/// Parsed preset for `figure`.
pub fn preset(figure: u32) -> Result<Scenario> {
    Scenario::from_toml(preset_text(figure)?)
}
