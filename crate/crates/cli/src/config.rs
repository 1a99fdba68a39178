//! Optional key=value configuration file for detector and object-rule
//! overrides. Unknown keys are errors.
//!
//! ```text
//! # detector overrides
//! dialog.window = 7
//! dialog.confl_break = 3
//! dialog.tie_priority = SYNC,REV,ALT
//! objects.rules = non_discuss:OTH, artifact:INI_SOL, default:OTH
//! ```

use std::path::Path;

use dialog_lens_core::analysis::ObjectRules;
use dialog_lens_core::dialogs::{DialogRules, DialogType};
use serde::Serialize;

#[derive(Debug, Clone, Default, Serialize)]
pub struct Overrides {
    pub dialog_rules: DialogRules,
    pub object_rules: ObjectRules,
}

pub fn load_overrides(path: &Path) -> Result<Overrides, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
    parse_overrides(&text).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn parse_overrides(text: &str) -> Result<Overrides, String> {
    let mut window = None;
    let mut confl_break = None;
    let mut tie_priority = None;
    let mut object_rules = None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {lineno}: expected `key = value`"))?;
        let value = value.trim();
        match key.trim() {
            "dialog.window" => {
                window = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| format!("line {lineno}: dialog.window must be an integer"))?,
                );
            }
            "dialog.confl_break" => {
                confl_break = Some(value.parse::<usize>().map_err(|_| {
                    format!("line {lineno}: dialog.confl_break must be an integer")
                })?);
            }
            "dialog.tie_priority" => {
                let types: Vec<DialogType> = value
                    .split(',')
                    .map(|t| match t.trim().to_ascii_uppercase().as_str() {
                        "REV" => Ok(DialogType::Rev),
                        "ALT" => Ok(DialogType::Alt),
                        "SYNC" => Ok(DialogType::Sync),
                        other => Err(format!("line {lineno}: unknown dialog type `{other}`")),
                    })
                    .collect::<Result<_, _>>()?;
                let arr: [DialogType; 3] = types
                    .try_into()
                    .map_err(|_| format!("line {lineno}: tie_priority needs exactly 3 types"))?;
                tie_priority = Some(arr);
            }
            "objects.rules" => {
                object_rules =
                    Some(ObjectRules::parse(value).map_err(|e| format!("line {lineno}: {e}"))?);
            }
            other => return Err(format!("line {lineno}: unknown key `{other}`")),
        }
    }

    let defaults = DialogRules::default();
    let dialog_rules = DialogRules::new(
        window.unwrap_or(defaults.window),
        confl_break.unwrap_or(defaults.confl_break),
        tie_priority.unwrap_or(defaults.tie_priority),
    )
    .map_err(|e| e.to_string())?;

    Ok(Overrides {
        dialog_rules,
        object_rules: object_rules.unwrap_or_default(),
    })
}
