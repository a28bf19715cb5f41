//! Dynamic fatigue model.
//!
//! Remaining capacity decays as `dF_cem/dt = -k * (F_cem / MVC) * F_load`, which
//! integrates to `F_cem(t) = MVC * exp(-k * F(t))` with
//! `F(t) = ∫ F_load(u) / MVC du`. The fatigue index accumulates at
//! `dU/dt = (MVC / F_cem) * (F_load / F_cem)`, giving
//! `U(t) = (exp(2kF(t)) - 1) / 2k`.
//!
//! Times are minutes, forces newtons, `k` is per minute.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{rk4_integrate, FnSystem};

/// Largest exponent argument accepted before reporting saturation.
pub const EXP_ARGUMENT_CAP: f64 = 700.0;

/// Default fatigue rate, per minute.
pub const DEFAULT_FATIGUE_RATE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuscleParams {
    mvc: f64,
    k: f64,
}

impl MuscleParams {
    pub fn new(mvc: f64, k: f64) -> Result<Self> {
        if !(mvc.is_finite() && mvc > 0.0) {
            return Err(Error::invalid(
                "mvc",
                format!("must be finite and > 0, got {mvc}"),
            ));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::invalid(
                "k",
                format!("must be finite and > 0, got {k}"),
            ));
        }
        Ok(Self { mvc, k })
    }

    /// Muscle with the default rate of 1 min⁻¹.
    pub fn with_mvc(mvc: f64) -> Result<Self> {
        Self::new(mvc, DEFAULT_FATIGUE_RATE)
    }

    pub fn mvc(&self) -> f64 {
        self.mvc
    }

    pub fn k(&self) -> f64 {
        self.k
    }
}

/// Load as a fraction of MVC, in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct NormalizedLoad(f64);

impl NormalizedLoad {
    pub fn new(f_mvc: f64) -> Result<Self> {
        if f_mvc.is_finite() && f_mvc > 0.0 && f_mvc <= 1.0 {
            Ok(Self(f_mvc))
        } else {
            Err(Error::Domain(format!(
                "f_mvc must lie in (0, 1], got {f_mvc}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub duration: f64,
    pub load: f64,
}

impl Segment {
    pub fn new(duration: f64, load: f64) -> Self {
        Self { duration, load }
    }
}

/// Piecewise-constant external load. Segment `i` covers the half-open
/// interval `[start_i, start_i + duration_i)`; the final instant of the
/// profile takes the last segment's load.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadProfile {
    segments: Vec<Segment>,
    starts: Vec<f64>,
    // ∫ load dt up to each segment start, N·min
    areas: Vec<f64>,
    total: f64,
}

impl LoadProfile {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::invalid("profile", "load profile has no segments"));
        }
        let mut starts = Vec::with_capacity(segments.len());
        let mut areas = Vec::with_capacity(segments.len());
        let mut t = 0.0;
        let mut area = 0.0;
        for (i, seg) in segments.iter().enumerate() {
            if !(seg.duration.is_finite() && seg.duration > 0.0) {
                return Err(Error::invalid(
                    "duration",
                    format!(
                        "segment {i}: duration must be positive, got {}",
                        seg.duration
                    ),
                ));
            }
            if !(seg.load.is_finite() && seg.load >= 0.0) {
                return Err(Error::invalid(
                    "load",
                    format!(
                        "segment {i}: load must be finite and >= 0, got {}",
                        seg.load
                    ),
                ));
            }
            starts.push(t);
            areas.push(area);
            t += seg.duration;
            area += seg.duration * seg.load;
        }
        Ok(Self {
            segments,
            starts,
            areas,
            total: t,
        })
    }

    /// Single segment holding `load` for `duration` minutes.
    pub fn constant(duration: f64, load: f64) -> Result<Self> {
        Self::new(vec![Segment::new(duration, load)])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.total
    }

    /// Segment start times followed by the profile end.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut b = self.starts.clone();
        b.push(self.total);
        b
    }

    /// Same profile with every load multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.segments
                .iter()
                .map(|s| Segment::new(s.duration, s.load * factor))
                .collect(),
        )
    }

    fn check_time(&self, t: f64) -> Result<f64> {
        let slack = 1e-12 * self.total.max(1.0);
        if !t.is_finite() || t < 0.0 || t > self.total + slack {
            return Err(Error::OutOfRange { t, end: self.total });
        }
        Ok(t.min(self.total))
    }

    fn segment_index(&self, t: f64) -> usize {
        // last segment whose start is <= t
        self.starts.partition_point(|&s| s <= t).saturating_sub(1)
    }

    pub fn load_at(&self, t: f64) -> Result<f64> {
        let t = self.check_time(t)?;
        Ok(self.segments[self.segment_index(t)].load)
    }

    /// `∫_0^t F_load(u) du` in N·min, exact for the piecewise-constant profile.
    pub fn load_area(&self, t: f64) -> Result<f64> {
        let t = self.check_time(t)?;
        let i = self.segment_index(t);
        Ok(self.areas[i] + (t - self.starts[i]) * self.segments[i].load)
    }
}

/// `F(t) = ∫_0^t F_load(u) / MVC du`.
pub fn cumulative_normalized_load(
    profile: &LoadProfile,
    params: &MuscleParams,
    t: f64,
) -> Result<f64> {
    Ok(profile.load_area(t)? / params.mvc)
}

fn check_exponent(argument: f64) -> Result<()> {
    if argument > EXP_ARGUMENT_CAP {
        return Err(Error::Saturation {
            argument,
            cap: EXP_ARGUMENT_CAP,
        });
    }
    Ok(())
}

fn capacity_from_load(params: &MuscleParams, cumulative: f64) -> Result<f64> {
    let argument = params.k * cumulative;
    check_exponent(argument)?;
    Ok(params.mvc * (-argument).exp())
}

fn fatigue_index_from_load(params: &MuscleParams, cumulative: f64) -> Result<f64> {
    let argument = 2.0 * params.k * cumulative;
    check_exponent(argument)?;
    // F(0) = 0, so the subtracted term is exp(0) / 2k
    Ok(argument.exp_m1() / (2.0 * params.k))
}

/// Remaining capacity `F_cem(t)` in newtons.
pub fn capacity_at(profile: &LoadProfile, params: &MuscleParams, t: f64) -> Result<f64> {
    capacity_from_load(params, cumulative_normalized_load(profile, params, t)?)
}

/// Fatigue index `U(t)` in minutes.
pub fn fatigue_index_at(profile: &LoadProfile, params: &MuscleParams, t: f64) -> Result<f64> {
    fatigue_index_from_load(params, cumulative_normalized_load(profile, params, t)?)
}

/// Instantaneous growth rate of the fatigue index, `(MVC/F_cem)·(F_load/F_cem)`.
pub fn fatigue_index_rate(params: &MuscleParams, f_cem: f64, f_load: f64) -> Result<f64> {
    if !(f_cem.is_finite() && f_cem > 0.0) {
        return Err(Error::Domain(format!("f_cem must be > 0, got {f_cem}")));
    }
    if !(f_load.is_finite() && f_load >= 0.0) {
        return Err(Error::Domain(format!("f_load must be >= 0, got {f_load}")));
    }
    Ok((params.mvc / f_cem) * (f_load / f_cem))
}

/// Capacity decay rate `dF_cem/dt = -k·(F_cem/MVC)·F_load`.
pub fn capacity_rate(params: &MuscleParams, f_cem: f64, f_load: f64) -> f64 {
    -params.k * (f_cem / params.mvc) * f_load
}

/// Maximum endurance time for a static load, `-ln(f) / (k·f)` minutes.
pub fn met(params: &MuscleParams, f: NormalizedLoad) -> f64 {
    let f = f.value();
    // ln(1) is exactly 0; avoid returning -0.0
    (-f.ln() / (params.k * f)).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub f_load: f64,
    pub f_cem: f64,
    pub u: f64,
}

/// Sample where the demanded load exceeds the remaining capacity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverloadWarning {
    pub t: f64,
    pub f_load: f64,
    pub f_cem: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FatigueTrajectory {
    pub mvc: f64,
    pub samples: Vec<TrajectorySample>,
    pub overloads: Vec<OverloadWarning>,
}

impl FatigueTrajectory {
    /// First sample at which capacity has fallen to the load, if any.
    pub fn first_exhaustion(&self) -> Option<&TrajectorySample> {
        self.samples
            .iter()
            .find(|s| s.f_load > 0.0 && s.f_cem <= s.f_load)
    }
}

/// Merge a uniform grid with the profile's segment boundaries.
fn sample_times(profile: &LoadProfile, step: f64) -> Vec<f64> {
    let total = profile.total_duration();
    let tol = 1e-9 * step;
    let boundaries = profile.boundaries();
    let n = (total / step + 1e-9).floor() as usize;
    let grid = (0..=n).map(|i| i as f64 * step).filter(|&t| t <= total);

    let mut out = Vec::with_capacity(n + boundaries.len() + 1);
    let mut b = boundaries.iter().copied().peekable();
    for g in grid {
        while let Some(&next) = b.peek() {
            if next < g - tol {
                out.push(next);
                b.next();
            } else {
                break;
            }
        }
        match b.peek() {
            Some(&next) if (next - g).abs() <= tol => {
                out.push(next);
                b.next();
            }
            _ => out.push(g),
        }
    }
    out.extend(b);
    out
}

/// Samples the closed-form capacity and fatigue index on a uniform grid of
/// `sample_step` minutes, with every segment boundary included.
pub fn trajectory(
    profile: &LoadProfile,
    params: &MuscleParams,
    sample_step: f64,
) -> Result<FatigueTrajectory> {
    if !(sample_step.is_finite() && sample_step > 0.0) {
        return Err(Error::invalid(
            "sample_step",
            format!("must be finite and > 0, got {sample_step}"),
        ));
    }
    let mut samples = Vec::new();
    let mut overloads = Vec::new();
    for t in sample_times(profile, sample_step) {
        let cumulative = cumulative_normalized_load(profile, params, t)?;
        let f_load = profile.load_at(t)?;
        let f_cem = capacity_from_load(params, cumulative)?;
        let u = fatigue_index_from_load(params, cumulative)?;
        if f_load > f_cem {
            overloads.push(OverloadWarning { t, f_load, f_cem });
        }
        samples.push(TrajectorySample {
            t,
            f_load,
            f_cem,
            u,
        });
    }
    Ok(FatigueTrajectory {
        mvc: params.mvc,
        samples,
        overloads,
    })
}

/// Numerically integrates the capacity ODE with fixed-step RK4, restarting
/// at each segment boundary so no step straddles a load discontinuity.
/// Returns `(t, F_cem)` pairs; every boundary appears exactly once.
pub fn integrate_capacity(
    profile: &LoadProfile,
    params: &MuscleParams,
    h: f64,
) -> Result<Vec<(f64, f64)>> {
    let mut out = vec![(0.0, params.mvc)];
    let mut state = params.mvc;
    let boundaries = profile.boundaries();
    for (seg, window) in profile.segments().iter().zip(boundaries.windows(2)) {
        let load = seg.load;
        let system = FnSystem::new(1, move |_t, y: &[f64]| {
            vec![capacity_rate(params, y[0], load)]
        });
        let path = rk4_integrate(&system, &[state], window[0], window[1], h)?;
        state = path.last().map(|(_, y)| y[0]).unwrap_or(state);
        out.extend(path.into_iter().skip(1).map(|(t, y)| (t, y[0])));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn muscle(mvc: f64) -> MuscleParams {
        MuscleParams::with_mvc(mvc).unwrap()
    }

    #[test]
    fn params_reject_non_positive_values() {
        assert!(MuscleParams::new(0.0, 1.0).is_err());
        assert!(MuscleParams::new(100.0, -1.0).is_err());
        assert!(MuscleParams::new(f64::NAN, 1.0).is_err());
        assert!(MuscleParams::new(100.0, f64::INFINITY).is_err());
        assert_eq!(muscle(100.0).k(), 1.0);
    }

    #[test]
    fn profile_validation() {
        assert!(LoadProfile::new(vec![]).is_err());
        assert!(LoadProfile::constant(0.0, 10.0).is_err());
        assert!(LoadProfile::constant(1.0, -1.0).is_err());
        assert!(LoadProfile::constant(1.0, f64::NAN).is_err());
        let p = LoadProfile::new(vec![Segment::new(2.0, 1.0), Segment::new(3.0, 0.0)]).unwrap();
        assert_eq!(p.total_duration(), 5.0);
        assert_eq!(p.boundaries(), vec![0.0, 2.0, 5.0]);
    }

    #[test]
    fn segments_are_half_open() {
        let p = LoadProfile::new(vec![Segment::new(1.0, 100.0), Segment::new(1.0, 50.0)]).unwrap();
        assert_eq!(p.load_at(0.0).unwrap(), 100.0);
        assert_eq!(p.load_at(0.999).unwrap(), 100.0);
        assert_eq!(p.load_at(1.0).unwrap(), 50.0);
        assert_eq!(p.load_at(2.0).unwrap(), 50.0);
    }

    #[test]
    fn cumulative_load_examples() {
        let params = muscle(100.0);
        let zero = LoadProfile::constant(10.0, 0.0).unwrap();
        assert_eq!(
            cumulative_normalized_load(&zero, &params, 5.0).unwrap(),
            0.0
        );

        let half = LoadProfile::constant(10.0, 50.0).unwrap();
        assert_relative_eq!(
            cumulative_normalized_load(&half, &params, 1.0).unwrap(),
            0.5
        );

        let two =
            LoadProfile::new(vec![Segment::new(1.0, 100.0), Segment::new(1.0, 50.0)]).unwrap();
        assert_relative_eq!(cumulative_normalized_load(&two, &params, 2.0).unwrap(), 1.5);
    }

    #[test]
    fn cumulative_load_out_of_range() {
        let params = muscle(100.0);
        let p = LoadProfile::constant(10.0, 50.0).unwrap();
        assert!(matches!(
            cumulative_normalized_load(&p, &params, -0.1),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            cumulative_normalized_load(&p, &params, 10.5),
            Err(Error::OutOfRange { .. })
        ));
        assert!(capacity_at(&p, &params, 10.0).is_ok());
    }

    #[test]
    fn capacity_examples() {
        let params = muscle(100.0);
        let half = LoadProfile::constant(10.0, 50.0).unwrap();
        assert_eq!(capacity_at(&half, &params, 0.0).unwrap(), 100.0);
        // 100·e^(-0.5)
        assert_relative_eq!(
            capacity_at(&half, &params, 1.0).unwrap(),
            60.653_065_971_263_345,
            max_relative = 1e-12
        );
        let full = LoadProfile::constant(10.0, 100.0).unwrap();
        assert_relative_eq!(
            capacity_at(&full, &params, std::f64::consts::LN_2).unwrap(),
            50.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn fatigue_index_examples() {
        let params = muscle(100.0);
        let half = LoadProfile::constant(10.0, 50.0).unwrap();
        assert_eq!(fatigue_index_at(&half, &params, 0.0).unwrap(), 0.0);
        // (e - 1) / 2
        assert_relative_eq!(
            fatigue_index_at(&half, &params, 1.0).unwrap(),
            0.859_140_914_229_522_5,
            max_relative = 1e-12
        );
        let zero = LoadProfile::constant(10.0, 0.0).unwrap();
        assert_eq!(fatigue_index_at(&zero, &params, 7.0).unwrap(), 0.0);
    }

    #[test]
    fn fatigue_index_saturates_instead_of_overflowing() {
        let params = muscle(1.0);
        let p = LoadProfile::constant(1000.0, 1.0).unwrap();
        assert!(matches!(
            fatigue_index_at(&p, &params, 400.0),
            Err(Error::Saturation { .. })
        ));
        assert!(matches!(
            capacity_at(&p, &params, 800.0),
            Err(Error::Saturation { .. })
        ));
        assert!(capacity_at(&p, &params, 400.0).unwrap() > 0.0);
    }

    #[test]
    fn fatigue_index_rate_examples() {
        let params = muscle(100.0);
        assert_eq!(fatigue_index_rate(&params, 100.0, 0.0).unwrap(), 0.0);
        assert_relative_eq!(fatigue_index_rate(&params, 100.0, 50.0).unwrap(), 0.5);
        assert_relative_eq!(fatigue_index_rate(&params, 50.0, 50.0).unwrap(), 2.0);
        assert!(matches!(
            fatigue_index_rate(&params, 0.0, 50.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn met_examples() {
        let params = muscle(100.0);
        let met_at = |f| met(&params, NormalizedLoad::new(f).unwrap());
        assert_eq!(met_at(1.0), 0.0);
        assert!(met_at(1.0).is_sign_positive());
        assert_relative_eq!(met_at(0.5), 1.386_294_361_119_890_6, max_relative = 1e-12);
        assert_relative_eq!(met_at(0.3), 4.013_242_681_086_454, max_relative = 1e-12);
    }

    #[test]
    fn normalized_load_domain() {
        for bad in [0.0, -0.2, 1.01, f64::NAN] {
            assert!(matches!(NormalizedLoad::new(bad), Err(Error::Domain(_))));
        }
        assert!(NormalizedLoad::new(1.0).is_ok());
    }

    #[test]
    fn sample_times_include_boundaries_once() {
        let p = LoadProfile::new(vec![
            Segment::new(0.25, 1.0),
            Segment::new(0.3, 2.0),
            Segment::new(0.45, 0.0),
        ])
        .unwrap();
        let times = sample_times(&p, 0.1);
        for b in p.boundaries() {
            assert_eq!(
                times.iter().filter(|&&t| (t - b).abs() < 1e-12).count(),
                1,
                "boundary {b}"
            );
        }
        assert!(times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(times[0], 0.0);
        assert_eq!(*times.last().unwrap(), p.total_duration());
    }

    #[test]
    fn trajectory_rejects_bad_step() {
        let p = LoadProfile::constant(1.0, 1.0).unwrap();
        assert!(trajectory(&p, &muscle(10.0), 0.0).is_err());
        assert!(trajectory(&p, &muscle(10.0), f64::NAN).is_err());
    }

    #[test]
    fn trajectory_zero_load_is_flat() {
        let params = muscle(80.0);
        let p = LoadProfile::constant(3.0, 0.0).unwrap();
        let traj = trajectory(&p, &params, 0.1).unwrap();
        assert!(traj.samples.iter().all(|s| s.f_cem == 80.0 && s.u == 0.0));
        assert!(traj.overloads.is_empty());
        assert!(traj.first_exhaustion().is_none());
    }

    #[test]
    fn trajectory_crossing_matches_met() {
        let params = muscle(100.0);
        let p = LoadProfile::constant(10.0, 30.0).unwrap();
        let step = 1e-3;
        let traj = trajectory(&p, &params, step).unwrap();
        let crossing = traj.first_exhaustion().unwrap().t;
        let expected = met(&params, NormalizedLoad::new(0.3).unwrap());
        assert!(
            crossing >= expected && crossing - expected <= step,
            "{crossing} vs {expected}"
        );
        assert!(!traj.overloads.is_empty());
        assert!(traj.overloads.iter().all(|w| w.t > expected));
    }

    #[test]
    fn trajectory_scale_invariance() {
        let base = LoadProfile::constant(1.0, 100.0).unwrap();
        let doubled = base.scaled(2.0).unwrap();
        let a = trajectory(&base, &muscle(100.0), 0.05).unwrap();
        let b = trajectory(&doubled, &muscle(200.0), 0.05).unwrap();
        assert_eq!(a.samples.len(), b.samples.len());
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert_relative_eq!(x.f_cem / 100.0, y.f_cem / 200.0, max_relative = 1e-14);
            assert_relative_eq!(x.u, y.u, max_relative = 1e-14);
        }
    }

    #[test]
    fn integrated_capacity_hits_every_boundary() {
        let params = muscle(100.0);
        let p = LoadProfile::new(vec![Segment::new(0.5, 40.0), Segment::new(0.75, 90.0)]).unwrap();
        let path = integrate_capacity(&p, &params, 1e-2).unwrap();
        for b in p.boundaries() {
            let (_, y) = path
                .iter()
                .find(|(t, _)| *t == b)
                .expect("boundary sampled");
            assert_relative_eq!(
                *y,
                capacity_at(&p, &params, b).unwrap(),
                max_relative = 1e-8
            );
        }
    }
}
