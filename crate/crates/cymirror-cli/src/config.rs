//! Run configuration: a JSON file merged with command-line overrides.

use crate::args::{ExampleChoice, Format, GlobalArgs, Source};
use crate::error::CliError;
use cymirror::rational::{parse_rational, Rational};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Default number of q-coefficients for one-variable pipelines.
pub const DEFAULT_ORDER: usize = 8;
/// Default appendix bounds `(d₁, d₂)`.
pub const DEFAULT_APPENDIX_BOUNDS: [u32; 2] = [5, 20];

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub example: Option<ExampleChoice>,
    pub order: Option<usize>,
    pub appendix_bounds: Option<[u32; 2]>,
    pub scan_bound: Option<u32>,
    pub polytope: Option<PathBuf>,
    pub fan: Option<PathBuf>,
    pub partition: Option<Vec<Vec<usize>>>,
    pub classical: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub example: Option<ExampleChoice>,
    pub order: usize,
    pub appendix_bounds: [u32; 2],
    pub scan_bound: Option<u32>,
    pub polytope: Option<PathBuf>,
    pub fan: Option<PathBuf>,
    pub partition: Option<Vec<Vec<usize>>>,
    pub classical: Option<Rational>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }
}

/// Parses `0,1;2,3` into `[[0,1],[2,3]]`.
pub fn parse_partition(text: &str) -> Result<Vec<Vec<usize>>, CliError> {
    text.split(';')
        .map(|part| {
            part.split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|_| CliError::Config(format!("bad partition entry {x:?}"))))
                .collect()
        })
        .collect()
}

impl RunConfig {
    /// Merges flags over the file over the defaults and validates.
    pub fn resolve(global: &GlobalArgs, source: Option<&Source>) -> Result<Self, CliError> {
        let file = match &global.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let partition = match source.and_then(|s| s.partition.as_deref()) {
            Some(t) => Some(parse_partition(t)?),
            None => file.partition,
        };
        let classical = match source.and_then(|s| s.classical.clone()).or(file.classical) {
            Some(t) => Some(parse_rational(&t).ok_or_else(|| CliError::Config(format!("bad classical value {t:?}")))?),
            None => None,
        };
        let cfg = RunConfig {
            example: source.and_then(|s| s.example).or(file.example),
            order: global.order.or(file.order).unwrap_or(DEFAULT_ORDER),
            appendix_bounds: file.appendix_bounds.unwrap_or(DEFAULT_APPENDIX_BOUNDS),
            scan_bound: file.scan_bound,
            polytope: file.polytope,
            fan: source.and_then(|s| s.fan.clone()).or(file.fan),
            partition,
            classical,
            out: global.out.clone().or(file.out),
            format: global.format.or(file.format).unwrap_or(Format::Json),
        };
        if cfg.order < 1 {
            return Err(CliError::Config("order must be at least 1".into()));
        }
        if cfg.appendix_bounds.contains(&0) {
            return Err(CliError::Config("appendix bounds must be at least 1".into()));
        }
        if cfg.example == Some(ExampleChoice::Custom) && (cfg.fan.is_none() || cfg.partition.is_none()) {
            return Err(CliError::Config("custom runs need --fan and --partition".into()));
        }
        Ok(cfg)
    }
}
