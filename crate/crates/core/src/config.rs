//! JSON run configuration. Command-line flags override file values.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::met_bank::{HuijgensVariant, MetBank};
use crate::model::{MuscleParams, DEFAULT_FATIGUE_RATE};
use crate::validation::{default_grid, FmvcGrid};

pub const DEFAULT_MVC: f64 = 100.0;
pub const DEFAULT_SAMPLE_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Text,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "text" => Ok(OutputFormat::Text),
            other => Err(Error::invalid(
                "format",
                format!("`{other}` (expected csv or text)"),
            )),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Text => "text",
        })
    }
}

/// Grid as an explicit list or as `start:stop:step`. In JSON it may also be
/// written in the command-line string form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, try_from = "GridRepr")]
pub enum GridSpec {
    Values(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GridRepr {
    Values(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
    Text(String),
}

impl TryFrom<GridRepr> for GridSpec {
    type Error = Error;

    fn try_from(repr: GridRepr) -> Result<Self> {
        match repr {
            GridRepr::Values(v) => Ok(GridSpec::Values(v)),
            GridRepr::Range { start, stop, step } => Ok(GridSpec::Range { start, stop, step }),
            GridRepr::Text(s) => s.parse(),
        }
    }
}

impl GridSpec {
    pub fn to_grid(&self) -> Result<FmvcGrid> {
        match self {
            GridSpec::Values(v) => FmvcGrid::new(v.clone()),
            GridSpec::Range { start, stop, step } => FmvcGrid::from_range(*start, *stop, *step),
        }
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    /// `0.2:0.95:0.05` or `0.3,0.5,0.7`.
    fn from_str(s: &str) -> Result<Self> {
        let number = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid("grid", format!("`{x}` is not a number")))
        };
        if s.contains(':') {
            let parts: Vec<f64> = s.split(':').map(number).collect::<Result<_>>()?;
            match parts[..] {
                [start, stop, step] => Ok(GridSpec::Range { start, stop, step }),
                _ => Err(Error::invalid("grid", "range must be start:stop:step")),
            }
        } else {
            Ok(GridSpec::Values(
                s.split(',').map(number).collect::<Result<_>>()?,
            ))
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mvc: Option<f64>,
    pub k: Option<f64>,
    pub grid: Option<GridSpec>,
    pub sample_step: Option<f64>,
    pub huijgens_as_printed: Option<bool>,
    pub huijgens_variant: Option<HuijgensVariant>,
    pub output_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

/// Validated settings ready for computation.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedConfig {
    pub params: MuscleParams,
    pub grid: FmvcGrid,
    pub sample_step: f64,
    pub huijgens_variant: HuijgensVariant,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
}

impl ResolvedConfig {
    pub fn bank(&self) -> MetBank {
        MetBank::new(self.huijgens_variant)
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            row: e.line(),
            reason: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Fields set in `overrides` replace those in `self`.
    pub fn merge(self, overrides: RunConfig) -> RunConfig {
        RunConfig {
            mvc: overrides.mvc.or(self.mvc),
            k: overrides.k.or(self.k),
            grid: overrides.grid.or(self.grid),
            sample_step: overrides.sample_step.or(self.sample_step),
            huijgens_as_printed: overrides.huijgens_as_printed.or(self.huijgens_as_printed),
            huijgens_variant: overrides.huijgens_variant.or(self.huijgens_variant),
            output_dir: overrides.output_dir.or(self.output_dir),
            format: overrides.format.or(self.format),
        }
    }

    /// Fills defaults and checks every value. `default_output_dir` is used
    /// when neither the file nor the flags name one.
    pub fn resolve(&self, default_output_dir: Option<PathBuf>) -> Result<ResolvedConfig> {
        let params = MuscleParams::new(
            self.mvc.unwrap_or(DEFAULT_MVC),
            self.k.unwrap_or(DEFAULT_FATIGUE_RATE),
        )?;
        let grid = match &self.grid {
            Some(spec) => spec.to_grid()?,
            None => default_grid(),
        };
        let sample_step = self.sample_step.unwrap_or(DEFAULT_SAMPLE_STEP);
        if !(sample_step.is_finite() && sample_step > 0.0) {
            return Err(Error::invalid(
                "sample_step",
                format!("must be > 0, got {sample_step}"),
            ));
        }
        let huijgens_variant = match (self.huijgens_variant, self.huijgens_as_printed) {
            (Some(v), _) => v,
            (None, Some(true)) => HuijgensVariant::AsPrinted,
            _ => HuijgensVariant::default(),
        };
        Ok(ResolvedConfig {
            params,
            grid,
            sample_step,
            huijgens_variant,
            output_dir: self
                .output_dir
                .clone()
                .or(default_output_dir)
                .unwrap_or_else(|| PathBuf::from(".")),
            format: self.format.unwrap_or_default(),
        })
    }
}
