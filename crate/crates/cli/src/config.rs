//! Settings: built-in defaults, overridden by an optional TOML file,
//! overridden by command-line flags.

use std::path::Path;

use ncmckay_core::scheme::{Bounds, DEFAULT_MAX_UNKNOWNS};
use serde::Deserialize;

use crate::CliError;

pub const MAX_UNKNOWNS_VAR: &str = "NCMCKAY_MAX_UNKNOWNS";

/// Every field optional; the file mirrors the flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n: Option<usize>,
    pub max_n: Option<usize>,
    pub deg_xy: Option<u32>,
    pub deg_t: Option<u32>,
    pub deg: Option<u32>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub max_unknowns: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

/// Resolved settings shared by all commands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Settings {
    pub n: usize,
    pub max_n: usize,
    pub bounds: Bounds,
    pub deg: u32,
    pub samples: usize,
    pub seed: u64,
}

/// Flag values as parsed; `None` means "not given".
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub deg_xy: Option<u32>,
    pub deg_t: Option<u32>,
    pub deg: Option<u32>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

pub fn resolve(file: &FileConfig, flags: &Overrides, env_max_unknowns: Option<&str>) -> Result<Settings, CliError> {
    let n = flags.n.or(file.n).unwrap_or(2);
    let max_n = file.max_n.unwrap_or(4);
    if n > max_n {
        return Err(CliError::Usage(format!("n = {n} exceeds the configured maximum {max_n}")));
    }
    let xy = flags.deg_xy.or(file.deg_xy).unwrap_or(6);
    let t = flags.deg_t.or(file.deg_t).unwrap_or(3);
    let deg = flags.deg.or(file.deg).unwrap_or(4);
    let max_unknowns = match env_max_unknowns {
        Some(s) => s.trim().parse().map_err(|_| CliError::Usage(format!("{MAX_UNKNOWNS_VAR} must be a positive integer, got {s:?}")))?,
        None => file.max_unknowns.unwrap_or(DEFAULT_MAX_UNKNOWNS),
    };
    if max_unknowns == 0 {
        return Err(CliError::Usage(format!("{MAX_UNKNOWNS_VAR} must be positive")));
    }
    Ok(Settings {
        n,
        max_n,
        bounds: Bounds::new(xy, t).with_max_unknowns(max_unknowns),
        deg,
        samples: flags.samples.or(file.samples).unwrap_or(50),
        seed: flags.seed.or(file.seed).unwrap_or(0),
    })
}
