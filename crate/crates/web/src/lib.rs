//! wasm-bindgen surface for the static demo page in `www/`.
//!
//! Each export returns a JSON string; the page plots it on a canvas.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use dynfatigue::io::parse_load_profile_str;
use dynfatigue::met_bank::{HuijgensVariant, MetBank};
use dynfatigue::model::capacity_at;
use dynfatigue::reference::{compare_capacity_curves, liu_closed_form, liu_simulate, LiuParams};
use dynfatigue::validation::FmvcGrid;
use dynfatigue::{
    default_grid, met, run_static_validation, static_met, trajectory, Error, LoadProfile,
    MuscleParams, NormalizedLoad,
};

#[derive(Debug, Serialize)]
pub struct TrajectoryView {
    pub t: Vec<f64>,
    pub f_load: Vec<f64>,
    pub f_cem: Vec<f64>,
    pub u: Vec<f64>,
    pub overloads: usize,
    pub exhaustion_t: Option<f64>,
}

/// Capacity and fatigue index for a `duration_min,load_N` profile.
pub fn trajectory_view(
    profile_csv: &str,
    mvc: f64,
    k: f64,
    step: f64,
) -> Result<TrajectoryView, Error> {
    let profile = parse_load_profile_str(profile_csv)?;
    let params = MuscleParams::new(mvc, k)?;
    let traj = trajectory(&profile, &params, step)?;
    Ok(TrajectoryView {
        t: traj.samples.iter().map(|s| s.t).collect(),
        f_load: traj.samples.iter().map(|s| s.f_load).collect(),
        f_cem: traj.samples.iter().map(|s| s.f_cem).collect(),
        u: traj.samples.iter().map(|s| s.u).collect(),
        overloads: traj.overloads.len(),
        exhaustion_t: traj.first_exhaustion().map(|s| s.t),
    })
}

#[derive(Debug, Serialize)]
pub struct MetCurve {
    pub id: &'static str,
    pub group: String,
    /// `None` outside the model's domain.
    pub values: Vec<Option<f64>>,
    pub r: Option<f64>,
    pub icc: Option<f64>,
    pub paper_r: f64,
    pub paper_icc: f64,
}

#[derive(Debug, Serialize)]
pub struct MetCurvesView {
    pub f_mvc: Vec<f64>,
    pub dynamic: Vec<f64>,
    pub models: Vec<MetCurve>,
}

/// Dynamic and static MET curves for plotting, with r and ICC computed on
/// the default validation grid.
pub fn met_curves_view(k: f64, huijgens: &str, group: &str) -> Result<MetCurvesView, Error> {
    let params = MuscleParams::new(1.0, k)?;
    let bank = MetBank::new(huijgens.parse::<HuijgensVariant>()?);
    let group = if group.is_empty() || group == "all" {
        None
    } else {
        Some(group)
    };
    let selected = bank.list_by_name(group)?;
    let plot_grid = FmvcGrid::from_range(0.16, 0.99, 0.01)?;
    let report = run_static_validation(&default_grid(), &params, &bank);

    let loads: Vec<NormalizedLoad> = plot_grid
        .values()
        .iter()
        .map(|&f| NormalizedLoad::new(f))
        .collect::<Result<_, _>>()?;
    let models = selected
        .into_iter()
        .map(|m| {
            let row = report.row(m.id).expect("report covers every model");
            MetCurve {
                id: m.id,
                group: m.group.to_string(),
                values: loads.iter().map(|&f| static_met(m, f).ok()).collect(),
                r: row.r,
                icc: row.icc,
                paper_r: row.paper_r,
                paper_icc: row.paper_icc,
            }
        })
        .collect();
    Ok(MetCurvesView {
        f_mvc: plot_grid.values().to_vec(),
        dynamic: loads.iter().map(|&f| met(&params, f)).collect(),
        models,
    })
}

#[derive(Debug, Serialize)]
pub struct LiuView {
    pub t: Vec<f64>,
    pub liu: Vec<f64>,
    pub dynamic: Vec<f64>,
    pub max_abs_diff: f64,
    pub r: Option<f64>,
}

/// Motor-unit capacity `(m_a + m_uc)/m0` against the dynamic model at full
/// effort, over `horizon` seconds.
pub fn liu_view(
    beta: f64,
    gamma: f64,
    f_rate: f64,
    horizon: f64,
    points: usize,
) -> Result<LiuView, Error> {
    let params = LiuParams::from_ratios(1.0, f_rate, beta, gamma)?;
    if !(horizon.is_finite() && horizon > 0.0) || points < 2 {
        return Err(Error::Domain(
            "need horizon > 0 and at least 2 points".into(),
        ));
    }
    let times: Vec<f64> = (0..points)
        .map(|i| horizon * i as f64 / (points - 1) as f64)
        .collect();
    let liu: Vec<(f64, f64)> = match liu_closed_form(&params, 0.0) {
        Ok(_) => times
            .iter()
            .map(|&t| liu_closed_form(&params, t).map(|(a, uc)| (t, a + uc)))
            .collect::<Result<_, _>>()?,
        Err(Error::DegenerateClosedForm { .. }) => {
            let path = liu_simulate(&params, horizon, 1e-4 * horizon)?;
            times
                .iter()
                .map(|&t| {
                    let i = ((t / horizon) * (path.len() - 1) as f64).round() as usize;
                    (t, path[i].1.capacity_fraction(1.0))
                })
                .collect()
        }
        Err(e) => return Err(e),
    };
    let muscle = MuscleParams::new(1.0, 60.0 * f_rate)?;
    let profile = LoadProfile::constant(horizon / 60.0, 1.0)?;
    let dynamic: Vec<(f64, f64)> = times
        .iter()
        .map(|&t| capacity_at(&profile, &muscle, t / 60.0).map(|c| (t, c)))
        .collect::<Result<_, _>>()?;
    let cmp = compare_capacity_curves(&liu, &dynamic)?;
    Ok(LiuView {
        t: times,
        liu: liu.into_iter().map(|p| p.1).collect(),
        dynamic: dynamic.into_iter().map(|p| p.1).collect(),
        max_abs_diff: cmp.max_abs_diff,
        r: cmp.pearson_r,
    })
}

fn to_js<T: Serialize>(value: Result<T, Error>) -> Result<String, JsValue> {
    let value = value.map_err(|e| JsValue::from_str(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen]
pub fn fatigue_trajectory(
    profile_csv: &str,
    mvc: f64,
    k: f64,
    step: f64,
) -> Result<String, JsValue> {
    to_js(trajectory_view(profile_csv, mvc, k, step))
}

#[wasm_bindgen]
pub fn met_curves(k: f64, huijgens: &str, group: &str) -> Result<String, JsValue> {
    to_js(met_curves_view(k, huijgens, group))
}

#[wasm_bindgen]
pub fn liu_comparison(beta: f64, gamma: f64, f_rate: f64, horizon: f64) -> Result<String, JsValue> {
    to_js(liu_view(beta, gamma, f_rate, horizon, 601))
}
