//! Comparison models: a three-compartment motor-unit model (`liu_*`) and a
//! capacity-reservoir model (`freund_takala_*`).
//!
//! The motor-unit model works in seconds (its rates are per second); the
//! reservoir model uses whatever time unit its rates are given in.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::LoadProfile;
use crate::numerics::{rk4_integrate, FnSystem};
use crate::stats::pearson_r;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiuParams {
    pub m0: f64,
    /// Fatigue factor F, s⁻¹.
    pub f_rate: f64,
    /// Recovery factor R, s⁻¹.
    pub r_rate: f64,
    /// Brain effort B, s⁻¹.
    pub b_rate: f64,
}

impl LiuParams {
    pub fn new(m0: f64, f_rate: f64, r_rate: f64, b_rate: f64) -> Result<Self> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(m0) {
            return Err(Error::invalid("m0", format!("must be > 0, got {m0}")));
        }
        if !positive(f_rate) {
            return Err(Error::invalid(
                "f_rate",
                format!("must be > 0, got {f_rate}"),
            ));
        }
        if !(r_rate.is_finite() && r_rate >= 0.0) {
            return Err(Error::invalid(
                "r_rate",
                format!("must be >= 0, got {r_rate}"),
            ));
        }
        if !(b_rate.is_finite() && b_rate >= 0.0) {
            return Err(Error::invalid(
                "b_rate",
                format!("must be >= 0, got {b_rate}"),
            ));
        }
        Ok(Self {
            m0,
            f_rate,
            r_rate,
            b_rate,
        })
    }

    /// Parameters from the dimensionless ratios `beta = B/F`, `gamma = R/F`.
    pub fn from_ratios(m0: f64, f_rate: f64, beta: f64, gamma: f64) -> Result<Self> {
        Self::new(m0, f_rate, gamma * f_rate, beta * f_rate)
    }

    pub fn beta(&self) -> f64 {
        self.b_rate / self.f_rate
    }

    pub fn gamma(&self) -> f64 {
        self.r_rate / self.f_rate
    }

    fn closed_form_denominator(&self) -> f64 {
        self.beta() - 1.0 - self.gamma()
    }
}

/// Activated, fatigued and resting motor-unit counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiuState {
    pub m_a: f64,
    pub m_f: f64,
    pub m_uc: f64,
}

impl LiuState {
    pub fn total(&self) -> f64 {
        self.m_a + self.m_f + self.m_uc
    }

    /// Units still able to produce force, `(m_a + m_uc) / m0`.
    pub fn capacity_fraction(&self, m0: f64) -> f64 {
        (self.m_a + self.m_uc) / m0
    }
}

/// Analytic `(m_a/m0, m_uc/m0)` starting from all units at rest.
pub fn liu_closed_form(params: &LiuParams, t: f64) -> Result<(f64, f64)> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid("t", format!("must be >= 0, got {t}")));
    }
    let denom = params.closed_form_denominator();
    if denom.abs() <= 1e-12 * (1.0 + params.beta()) {
        return Err(Error::DegenerateClosedForm {
            beta: params.beta(),
        });
    }
    let beta = params.beta();
    let gamma = params.gamma();
    let ft = params.f_rate * t;
    let slow = (-(1.0 + gamma) * ft).exp();
    let fast = (-beta * ft).exp();
    let active = gamma / (1.0 + gamma) + beta / ((1.0 + gamma) * denom) * slow
        - (beta - gamma) / denom * fast;
    Ok((active, fast))
}

/// RK4 solution of the compartment model for `(m_a, m_f)`, with the resting
/// pool recovered from conservation.
pub fn liu_simulate(params: &LiuParams, t1: f64, h: f64) -> Result<Vec<(f64, LiuState)>> {
    let p = *params;
    let system = FnSystem::new(2, move |_t, y: &[f64]| {
        let (m_a, m_f) = (y[0], y[1]);
        let m_uc = p.m0 - m_a - m_f;
        vec![
            p.b_rate * m_uc - p.f_rate * m_a + p.r_rate * m_f,
            p.f_rate * m_a - p.r_rate * m_f,
        ]
    });
    let path = rk4_integrate(&system, &[0.0, 0.0], 0.0, t1, h)?;
    Ok(path
        .into_iter()
        .map(|(t, y)| {
            (
                t,
                LiuState {
                    m_a: y[0],
                    m_f: y[1],
                    m_uc: params.m0 - y[0] - y[1],
                },
            )
        })
        .collect())
}

/// `exp(-F t)`, the no-recovery, infinite-effort limit of `(m_a + m_uc)/m0`.
pub fn liu_limit_capacity(f_rate: f64, t: f64) -> f64 {
    (-f_rate * t).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreundTakalaParams {
    /// Upper force limit `S^l`.
    pub s_limit: f64,
    pub beta_decay: f64,
    pub beta_recovery: f64,
}

impl FreundTakalaParams {
    pub fn new(s_limit: f64, beta_decay: f64, beta_recovery: f64) -> Result<Self> {
        if !(s_limit.is_finite() && s_limit > 0.0) {
            return Err(Error::invalid(
                "s_limit",
                format!("must be > 0, got {s_limit}"),
            ));
        }
        for (name, v) in [("beta_decay", beta_decay), ("beta_recovery", beta_recovery)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, format!("must be >= 0, got {v}")));
            }
        }
        Ok(Self {
            s_limit,
            beta_decay,
            beta_recovery,
        })
    }

    /// Single-rate form, both terms sharing one constant.
    pub fn single_rate(s_limit: f64, beta: f64) -> Result<Self> {
        Self::new(s_limit, beta, beta)
    }
}

/// Exerted force history `S(t)` driving the reservoir.
pub trait ForceHistory {
    fn force_at(&self, t: f64) -> f64;

    /// Discontinuities strictly inside `(t0, t1)`.
    fn breakpoints(&self, _t0: f64, _t1: f64) -> Vec<f64> {
        Vec::new()
    }
}

impl ForceHistory for f64 {
    fn force_at(&self, _t: f64) -> f64 {
        *self
    }
}

impl ForceHistory for LoadProfile {
    /// Zero after the profile ends.
    fn force_at(&self, t: f64) -> f64 {
        self.load_at(t).unwrap_or(0.0)
    }

    fn breakpoints(&self, t0: f64, t1: f64) -> Vec<f64> {
        self.boundaries()
            .into_iter()
            .filter(|&b| b > t0 && b < t1)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreundTakalaRun {
    pub samples: Vec<(f64, f64)>,
    /// Set when some sample left `[0, s_limit]`.
    pub out_of_range: bool,
}

/// RK4 solution of `dS⁰/dt = beta_recovery·(S^l - S⁰) - beta_decay·S(t)`.
/// Integration restarts at every force breakpoint.
pub fn freund_takala_simulate<S: ForceHistory + ?Sized>(
    params: &FreundTakalaParams,
    load: &S,
    s0_init: f64,
    t1: f64,
    h: f64,
) -> Result<FreundTakalaRun> {
    if !(s0_init.is_finite() && (0.0..=params.s_limit).contains(&s0_init)) {
        return Err(Error::invalid(
            "s0_init",
            format!("must lie in [0, {}], got {s0_init}", params.s_limit),
        ));
    }
    let mut knots = vec![0.0];
    knots.extend(load.breakpoints(0.0, t1));
    knots.push(t1);

    let p = *params;
    let mut samples = vec![(0.0, s0_init)];
    let mut state = s0_init;
    for window in knots.windows(2) {
        // force is constant on each window; sample it at the left end
        let force = load.force_at(window[0]);
        let system = FnSystem::new(1, move |_t, y: &[f64]| {
            vec![p.beta_recovery * (p.s_limit - y[0]) - p.beta_decay * force]
        });
        let path = rk4_integrate(&system, &[state], window[0], window[1], h)?;
        state = path.last().map(|(_, y)| y[0]).unwrap_or(state);
        samples.extend(path.into_iter().skip(1).map(|(t, y)| (t, y[0])));
    }
    let out_of_range = samples
        .iter()
        .any(|&(_, s)| !(0.0..=params.s_limit).contains(&s));
    Ok(FreundTakalaRun {
        samples,
        out_of_range,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveComparison {
    pub max_abs_diff: f64,
    /// `None` when either curve is constant.
    pub pearson_r: Option<f64>,
}

/// Compares two curves sampled on the same time grid.
pub fn compare_capacity_curves(a: &[(f64, f64)], b: &[(f64, f64)]) -> Result<CurveComparison> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!(
            "{} vs {} samples",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::GridMismatch("curves are empty".into()));
    }
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        if (x.0 - y.0).abs() > 1e-9 * x.0.abs().max(1.0) {
            return Err(Error::GridMismatch(format!(
                "sample {i}: t = {} vs {}",
                x.0, y.0
            )));
        }
    }
    let max_abs_diff = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x.1 - y.1).abs())
        .fold(0.0, f64::max);
    let va: Vec<f64> = a.iter().map(|p| p.1).collect();
    let vb: Vec<f64> = b.iter().map(|p| p.1).collect();
    Ok(CurveComparison {
        max_abs_diff,
        pearson_r: pearson_r(&va, &vb).ok(),
    })
}
