//! Acceptance suite. Prints one PASS/FAIL line per criterion, then fails if
//! any criterion failed. Run with `--nocapture` to see the lines on success.

use std::process::Command;

use dynfatigue::met_bank::{Group, MetBank};
use dynfatigue::model::{capacity_rate, integrate_capacity};
use dynfatigue::numerics::central_difference;
use dynfatigue::reference::{
    freund_takala_simulate, liu_closed_form, liu_limit_capacity, liu_simulate, FreundTakalaParams,
    LiuParams,
};
use dynfatigue::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const SEED: u64 = 0x5EED_FA71;

/// MET = -ln f / (k f) at k = 1, computed independently in extended precision.
const MET_ORACLE: [(f64, f64); 3] = [(0.5, 1.386_294_361_1), (0.3, 4.013_242_681_4), (1.0, 0.0)];

const CATALOG_ORDER: [&str; 24] = [
    "rohmert-general",
    "monod-scherrer",
    "huijgens",
    "sato-general",
    "manenica-general",
    "sjogaard-general",
    "rose-general",
    "sato-shoulder",
    "rohmert-shoulder",
    "mathiassen-ahsberg-shoulder",
    "garg-shoulder",
    "hagberg-elbow",
    "manenica-elbow",
    "sato-elbow",
    "rohmert-elbow",
    "rose2000-elbow",
    "rose1992-elbow",
    "manenica-hand",
    "manenica-body-pull",
    "manenica-body-torque",
    "manenica-back-muscles",
    "rohmert-posture3",
    "rohmert-posture4",
    "rohmert-posture5",
];

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn random_case(rng: &mut ChaCha8Rng) -> (MuscleParams, LoadProfile) {
    let mvc = rng.gen_range(20.0..800.0);
    let params = MuscleParams::new(mvc, rng.gen_range(0.3..2.0)).unwrap();
    let n = rng.gen_range(1..=10);
    let segments = (0..n)
        .map(|_| Segment::new(rng.gen_range(0.1..3.0), rng.gen_range(0.0..=1.0) * mvc))
        .collect();
    (params, LoadProfile::new(segments).unwrap())
}

fn closed_form_matches_ode() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let (params, profile) = random_case(&mut rng);
        let path = integrate_capacity(&profile, &params, 1e-3).map_err(|e| e.to_string())?;
        for b in profile.boundaries() {
            let (_, y) = path
                .iter()
                .find(|(t, _)| *t == b)
                .ok_or_else(|| format!("boundary {b} not sampled"))?;
            let exact = capacity_at(&profile, &params, b).map_err(|e| e.to_string())?;
            worst = worst.max(rel_err(*y, exact));
        }
    }
    let detail = format!("50 profiles, worst boundary relative error {worst:.2e}");
    if worst < 1e-6 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn derivatives_match_rates() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (params, profile) = random_case(&mut rng);
        let segs = profile.segments();
        let idx = rng.gen_range(0..segs.len());
        let start: f64 = segs[..idx].iter().map(|s| s.duration).sum();
        let t = start + rng.gen_range(0.05..0.95) * segs[idx].duration;
        let h = 1e-4 * segs[idx].duration;
        let f_load = segs[idx].load;
        let f_cem = capacity_at(&profile, &params, t).unwrap();

        let fd = central_difference(|x| capacity_at(&profile, &params, x), t, h).unwrap();
        let rate = capacity_rate(&params, f_cem, f_load);
        let fd_u = central_difference(|x| fatigue_index_at(&profile, &params, x), t, h).unwrap();
        let rate_u = fatigue_index_rate(&params, f_cem, f_load).unwrap();
        for (approx, exact) in [(fd, rate), (fd_u, rate_u)] {
            // zero-load segments have exactly zero rate
            let err = if exact == 0.0 {
                approx.abs()
            } else {
                rel_err(approx, exact)
            };
            worst = worst.max(err);
        }
    }
    let detail = format!("100 interior points, worst relative error {worst:.2e}");
    if worst < 1e-4 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn met_spot_values_and_crossing() -> Outcome {
    let params = MuscleParams::with_mvc(100.0).unwrap();
    let mut notes = Vec::new();
    let mut ok = true;
    for (f, expected) in MET_ORACLE {
        let v = met(&params, NormalizedLoad::new(f).unwrap());
        ok &= (v - expected).abs() <= 1e-6;
        notes.push(format!("met({f})={v:.6}"));
    }
    let step = 1e-3;
    for f in [0.2, 0.3, 0.5, 0.8] {
        let expected = met(&params, NormalizedLoad::new(f).unwrap());
        let profile = LoadProfile::constant(expected * 1.5 + 1.0, f * 100.0).unwrap();
        let traj = trajectory(&profile, &params, step).unwrap();
        match traj.first_exhaustion() {
            Some(s) if (s.t - expected).abs() <= step => {}
            other => {
                ok = false;
                notes.push(format!(
                    "crossing at f={f}: {:?} vs {expected:.6}",
                    other.map(|s| s.t)
                ));
            }
        }
    }
    notes.push("crossings within one step for f in {0.2,0.3,0.5,0.8}".into());
    if ok {
        Ok(notes.join(", "))
    } else {
        Err(notes.join(", "))
    }
}

fn report() -> ValidationReport {
    let params = MuscleParams::with_mvc(100.0).unwrap();
    run_static_validation(&default_grid(), &params, &MetBank::default())
}

fn delta_summary(
    report: &ValidationReport,
    pick: fn(&validation::ComparisonRow) -> Option<f64>,
) -> String {
    let worst = report
        .rows
        .iter()
        .filter_map(|r| pick(r).map(|d| (r.model_id, d.abs())))
        .fold(("", 0.0f64), |acc, x| if x.1 > acc.1 { x } else { acc });
    format!("largest |delta| {:.3} ({})", worst.1, worst.0)
}

fn table_r_thresholds() -> Outcome {
    let report = report();
    let mut failures = Vec::new();
    for row in &report.rows {
        let r = row.r.unwrap_or(f64::NAN);
        if row.model_id != "monod-scherrer" && !(r >= 0.97) {
            failures.push(format!("{} r={r:.4}", row.model_id));
        }
    }
    let monod = report.row("monod-scherrer").unwrap().r.unwrap_or(f64::NAN);
    if !(0.80..=0.92).contains(&monod) {
        failures.push(format!("monod r={monod:.4} outside [0.80, 0.92]"));
    }
    let lowest_general = report
        .rows
        .iter()
        .filter(|r| r.group == Group::General)
        .min_by(|a, b| a.r.unwrap_or(f64::NAN).total_cmp(&b.r.unwrap_or(f64::NAN)))
        .unwrap();
    if lowest_general.model_id != "monod-scherrer" {
        failures.push(format!("lowest general r is {}", lowest_general.model_id));
    }
    let detail = format!(
        "monod r={monod:.4}, {}",
        delta_summary(&report, |r| r.delta_r())
    );
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", failures.join(", ")))
    }
}

fn table_icc_pattern() -> Outcome {
    let report = report();
    let icc = |id: &str| report.row(id).and_then(|r| r.icc).unwrap_or(f64::NAN);
    let mut failures = Vec::new();

    let negative: Vec<&str> = report
        .rows
        .iter()
        .filter(|r| r.icc.is_some_and(|v| v < 0.0))
        .map(|r| r.model_id)
        .collect();
    if negative != ["rohmert-posture5"] {
        failures.push(format!(
            "models with ICC < 0: {negative:?} (rohmert-posture5 ICC={:.4})",
            icc("rohmert-posture5")
        ));
    }
    let elbow_hand: Vec<_> = report
        .rows
        .iter()
        .filter(|r| matches!(r.group, Group::Elbow | Group::Hand))
        .collect();
    let high = elbow_hand
        .iter()
        .filter(|r| r.icc.is_some_and(|v| v > 0.90))
        .count();
    if elbow_hand.len() != 7 || high < 5 {
        failures.push(format!(
            "{high}/{} elbow+hand models above 0.90",
            elbow_hand.len()
        ));
    }
    for id in ["sjogaard-general", "hagberg-elbow"] {
        if !(icc(id) > 0.90) {
            failures.push(format!("{id} ICC={:.4}", icc(id)));
        }
    }
    let detail = format!(
        "{high}/7 elbow+hand above 0.90, sjogaard {:.4}, hagberg {:.4}, {}",
        icc("sjogaard-general"),
        icc("hagberg-elbow"),
        delta_summary(&report, |r| r.delta_icc())
    );
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", failures.join(", ")))
    }
}

fn liu_reduces_to_dynamic() -> Outcome {
    let errors: Vec<f64> = [10.0, 1e2, 1e3, 1e4]
        .iter()
        .map(|&beta| {
            let p = LiuParams::from_ratios(1.0, 1.0, beta, 0.0).unwrap();
            (0..=3000)
                .map(|i| {
                    let t = i as f64 * 1e-3;
                    let (a, uc) = liu_closed_form(&p, t).unwrap();
                    (a + uc - liu_limit_capacity(1.0, t)).abs()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    let detail = format!(
        "max error for beta 1e1..1e4: {}",
        errors
            .iter()
            .map(|e| format!("{e:.2e}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    if errors[2] < 1e-2 && monotone {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn liu_conservation_and_closed_form() -> Outcome {
    let m0 = 100.0;
    let mut worst_total = 0.0f64;
    let mut worst_rel = 0.0f64;
    for (f_rate, beta, gamma) in [(1.0, 10.0, 0.0), (0.5, 6.0, 0.1), (2.0, 4.0, 0.5)] {
        let p = LiuParams::from_ratios(m0, f_rate, beta, gamma).unwrap();
        let path = liu_simulate(&p, 2.0, 1e-3).unwrap();
        for (t, s) in &path {
            worst_total = worst_total.max((s.total() - m0).abs());
            let (a, uc) = liu_closed_form(&p, *t).unwrap();
            // resting units decay like e^(-beta f t); stop before they underflow
            if *t > 0.0 && uc > 1e-4 {
                let expected = [a * m0, m0 * (1.0 - a - uc), uc * m0];
                let got = [s.m_a, s.m_f, s.m_uc];
                for (g, e) in got.iter().zip(expected) {
                    worst_rel = worst_rel.max(rel_err(*g, e));
                }
            }
        }
    }
    let detail =
        format!("worst |total - m0| {worst_total:.2e}, worst relative error {worst_rel:.2e}");
    if worst_total < 1e-9 && worst_rel < 1e-6 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn freund_takala_analytic() -> Outcome {
    let p = FreundTakalaParams::new(1.0, 1.0, 1.0).unwrap();
    let run = freund_takala_simulate(&p, &0.4, 1.0, 2.0, 1e-3).unwrap();
    let mut worst = 0.0f64;
    for t in [0.5, 1.0, 2.0] {
        let (_, s) = run
            .samples
            .iter()
            .find(|(ts, _)| (ts - t).abs() < 1e-9)
            .ok_or_else(|| format!("t={t} not sampled"))?;
        worst = worst.max((s - (0.6 + 0.4 * (-t).exp())).abs());
    }
    let detail = format!("worst error at t in {{0.5,1,2}}: {worst:.2e}");
    if worst < 1e-6 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cli_end_to_end() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_dynfatigue");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.path().join(run);
        let status = Command::new(bin)
            .args(["validate-static", "--out"])
            .arg(&out_dir)
            .env_remove("DYNFATIGUE_OUT_DIR")
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("validate-static exited with {status}"));
        }
        outputs.push(std::fs::read(out_dir.join("validation.csv")).map_err(|e| e.to_string())?);
    }
    if outputs[0] != outputs[1] {
        return Err("validate-static outputs differ".into());
    }
    let csv = String::from_utf8(outputs.remove(0)).unwrap();
    let ids: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    if ids != CATALOG_ORDER {
        return Err(format!("unexpected row order: {ids:?}"));
    }

    let profile = concat!(env!("CARGO_MANIFEST_DIR"), "/data/constant_30pct.csv");
    let out = Command::new(bin)
        .args(["simulate", "--profile", profile, "--step", "0.001"])
        .output()
        .map_err(|e| e.to_string())?;
    let text = String::from_utf8(out.stdout).unwrap();
    let crossing = text
        .lines()
        .skip(1)
        .map(|l| {
            l.split(',')
                .map(|c| c.parse::<f64>().unwrap())
                .collect::<Vec<_>>()
        })
        .find(|v| v[2] <= v[1])
        .map(|v| v[0])
        .ok_or("no crossing in simulate output")?;
    let expected = MET_ORACLE[1].1;
    let detail = format!("byte-identical 24-row reports, simulate crossing at {crossing:.3} min");
    if (crossing - expected).abs() <= 1e-3 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        (
            "closed form matches RK4 at segment boundaries",
            closed_form_matches_ode,
        ),
        (
            "finite differences match capacity and fatigue rates",
            derivatives_match_rates,
        ),
        (
            "MET spot values and simulated crossing times",
            met_spot_values_and_crossing,
        ),
        (
            "Pearson r thresholds on the default grid",
            table_r_thresholds,
        ),
        ("ICC pattern on the default grid", table_icc_pattern),
        (
            "motor-unit model reduces to the dynamic model",
            liu_reduces_to_dynamic,
        ),
        (
            "motor-unit conservation and closed form",
            liu_conservation_and_closed_form,
        ),
        ("reservoir model analytic solution", freund_takala_analytic),
        (
            "CLI determinism and bundled example crossing",
            cli_end_to_end,
        ),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        match check() {
            Ok(detail) => println!("[PASS] criterion {n}: {name} ({detail})"),
            Err(detail) => {
                println!("[FAIL] criterion {n}: {name} ({detail})");
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
