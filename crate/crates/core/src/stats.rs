//! Agreement statistics between two series sampled at the same points.

use crate::error::{Error, Result};

fn check_pair(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::UndefinedStatistic(format!(
            "series lengths differ ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::UndefinedStatistic(format!(
            "need at least 2 paired values, got {}",
            a.len()
        )));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Pearson product-moment correlation, clamped to `[-1, 1]`.
pub fn pearson_r(a: &[f64], b: &[f64]) -> Result<f64> {
    check_pair(a, b)?;
    let (ma, mb) = (mean(a), mean(b));
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::UndefinedStatistic("a series is constant".into()));
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// One-way intraclass correlation for two raters (`p = 2`).
///
/// Each index `i` is a target rated once by each series. With row means
/// `m_i` and grand mean `m`:
///
/// ```text
/// MS_between = 2 Σ (m_i - m)² / (n - 1)
/// MS_within  = Σ [(a_i - m_i)² + (b_i - m_i)²] / n
/// ICC        = (MS_between - MS_within) / (MS_between + MS_within)
/// ```
pub fn icc_oneway(a: &[f64], b: &[f64]) -> Result<f64> {
    check_pair(a, b)?;
    let n = a.len() as f64;
    let rows: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
    let grand = mean(&rows);
    let ms_between = 2.0 * rows.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (n - 1.0);
    let ms_within = a
        .iter()
        .zip(b)
        .zip(&rows)
        .map(|((x, y), m)| (x - m).powi(2) + (y - m).powi(2))
        .sum::<f64>()
        / n;
    let total = ms_between + ms_within;
    if total == 0.0 {
        return Err(Error::UndefinedStatistic("all values identical".into()));
    }
    Ok((ms_between - ms_within) / total)
}
