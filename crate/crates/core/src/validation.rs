//! Static validation: the dynamic model's MET curve against every static
//! model on a shared grid of load fractions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::met_bank::{static_met, Group, HuijgensVariant, MetBank, StaticMetModel};
use crate::model::{met, MuscleParams, NormalizedLoad};
use crate::stats::{icc_oneway, pearson_r};

/// Strictly increasing load fractions in `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FmvcGrid {
    values: Vec<f64>,
}

impl FmvcGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("grid", "grid is empty"));
        }
        if let Some(bad) = values.iter().find(|&&f| !(f > 0.0 && f < 1.0)) {
            return Err(Error::invalid(
                "grid",
                format!("value {bad} outside (0, 1)"),
            ));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("grid", "values must be strictly increasing"));
        }
        Ok(Self { values })
    }

    /// `start, start + step, …` up to and including `stop`. Points are
    /// rounded to 12 decimals so that e.g. `0.2 + 3·0.05` prints as `0.35`.
    pub fn from_range(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::invalid(
                "grid",
                format!("step must be > 0, got {step}"),
            ));
        }
        if !(start.is_finite() && stop.is_finite() && stop >= start) {
            return Err(Error::invalid(
                "grid",
                format!("need start <= stop, got {start}..{stop}"),
            ));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        let values = (0..count)
            .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
            .collect();
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// 0.20, 0.25, …, 0.95.
pub fn default_grid() -> FmvcGrid {
    FmvcGrid::from_range(0.20, 0.95, 0.05).expect("default grid is valid")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub model_id: &'static str,
    pub group: Group,
    pub r: Option<f64>,
    pub icc: Option<f64>,
    pub paper_r: f64,
    pub paper_icc: f64,
    pub points_used: usize,
    /// Grid points outside the model's domain.
    pub dropped: Vec<f64>,
    pub error: Option<String>,
}

impl ComparisonRow {
    pub fn delta_r(&self) -> Option<f64> {
        self.r.map(|r| r - self.paper_r)
    }

    pub fn delta_icc(&self) -> Option<f64> {
        self.icc.map(|icc| icc - self.paper_icc)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub grid: FmvcGrid,
    pub params: MuscleParams,
    pub huijgens_variant: HuijgensVariant,
    pub rows: Vec<ComparisonRow>,
}

impl ValidationReport {
    pub fn row(&self, id: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.model_id == id)
    }
}

fn compare_model(grid: &FmvcGrid, params: &MuscleParams, model: &StaticMetModel) -> ComparisonRow {
    let mut dynamic = Vec::with_capacity(grid.len());
    let mut reference = Vec::with_capacity(grid.len());
    let mut dropped = Vec::new();
    let mut error = None;
    for &f in grid.values() {
        if !model.contains(f) {
            dropped.push(f);
            continue;
        }
        let load = NormalizedLoad::new(f).expect("grid values lie in (0, 1)");
        match static_met(model, load) {
            Ok(value) => {
                dynamic.push(met(params, load));
                reference.push(value);
            }
            Err(e) => {
                error = Some(e.to_string());
                break;
            }
        }
    }

    let (r, icc) = match error {
        Some(_) => (None, None),
        None => match (
            pearson_r(&dynamic, &reference),
            icc_oneway(&dynamic, &reference),
        ) {
            (Ok(r), Ok(icc)) => (Some(r), Some(icc)),
            (Err(e), _) | (_, Err(e)) => {
                error = Some(e.to_string());
                (None, None)
            }
        },
    };

    ComparisonRow {
        model_id: model.id,
        group: model.group,
        r,
        icc,
        paper_r: model.reported_r,
        paper_icc: model.reported_icc,
        points_used: dynamic.len(),
        dropped,
        error,
    }
}

/// Pearson r and ICC between the dynamic MET curve and each registered
/// model. Rows follow the bank's order; per-model failures are recorded in
/// the row rather than aborting the run.
pub fn run_static_validation(
    grid: &FmvcGrid,
    params: &MuscleParams,
    bank: &MetBank,
) -> ValidationReport {
    #[cfg(feature = "parallel")]
    let rows = {
        use rayon::prelude::*;
        bank.models()
            .par_iter()
            .map(|m| compare_model(grid, params, m))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows = bank
        .models()
        .iter()
        .map(|m| compare_model(grid, params, m))
        .collect();

    ValidationReport {
        grid: grid.clone(),
        params: *params,
        huijgens_variant: bank.huijgens_variant(),
        rows,
    }
}
