//! Fixed-step integration and finite differences.

use crate::error::{Error, Result};

/// Autonomous or time-dependent system `dy/dt = f(t, y)`.
pub trait OdeSystem {
    fn dimension(&self) -> usize;
    fn derivative(&self, t: f64, y: &[f64]) -> Vec<f64>;
}

/// [`OdeSystem`] backed by a closure.
pub struct FnSystem<F> {
    dimension: usize,
    field: F,
}

impl<F> FnSystem<F>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    pub fn new(dimension: usize, field: F) -> Self {
        Self { dimension, field }
    }
}

impl<F> OdeSystem for FnSystem<F>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn derivative(&self, t: f64, y: &[f64]) -> Vec<f64> {
        (self.field)(t, y)
    }
}

fn eval<S: OdeSystem + ?Sized>(system: &S, t: f64, y: &[f64]) -> Result<Vec<f64>> {
    let dy = system.derivative(t, y);
    if dy.len() != system.dimension() {
        return Err(Error::Integration {
            t,
            reason: format!(
                "vector field returned {} components, expected {}",
                dy.len(),
                system.dimension()
            ),
        });
    }
    if let Some(bad) = dy.iter().find(|v| !v.is_finite()) {
        return Err(Error::Integration {
            t,
            reason: format!("non-finite derivative {bad}"),
        });
    }
    Ok(dy)
}

fn axpy(y: &[f64], a: f64, dy: &[f64]) -> Vec<f64> {
    y.iter().zip(dy).map(|(y, d)| y + a * d).collect()
}

fn rk4_step<S: OdeSystem + ?Sized>(system: &S, t: f64, y: &[f64], h: f64) -> Result<Vec<f64>> {
    let k1 = eval(system, t, y)?;
    let k2 = eval(system, t + 0.5 * h, &axpy(y, 0.5 * h, &k1))?;
    let k3 = eval(system, t + 0.5 * h, &axpy(y, 0.5 * h, &k2))?;
    let k4 = eval(system, t + h, &axpy(y, h, &k3))?;
    Ok(y.iter()
        .enumerate()
        .map(|(i, y)| y + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// Classical RK4 from `t0` to `t1` with step `h`.
///
/// The returned path starts with `(t0, y0)` and has one entry per step. Step
/// times are computed as `t0 + i·h`; the final step is shortened so the last
/// entry lands exactly on `t1`.
pub fn rk4_integrate<S: OdeSystem + ?Sized>(
    system: &S,
    y0: &[f64],
    t0: f64,
    t1: f64,
    h: f64,
) -> Result<Vec<(f64, Vec<f64>)>> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::invalid(
            "h",
            format!("step must be finite and > 0, got {h}"),
        ));
    }
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(Error::invalid(
            "t1",
            format!("need t1 > t0, got [{t0}, {t1}]"),
        ));
    }
    if y0.len() != system.dimension() {
        return Err(Error::invalid(
            "y0",
            format!(
                "length {} does not match dimension {}",
                y0.len(),
                system.dimension()
            ),
        ));
    }

    let span = t1 - t0;
    let tol = 1e-9 * h;
    let mut full_steps = (span / h).floor() as usize;
    if span - (full_steps + 1) as f64 * h > -tol {
        full_steps += 1;
    }

    let mut path = Vec::with_capacity(full_steps + 2);
    let mut y = y0.to_vec();
    let mut t = t0;
    path.push((t, y.clone()));
    for i in 1..=full_steps {
        let next = if i == full_steps && (t1 - (t0 + i as f64 * h)).abs() <= tol {
            t1
        } else {
            t0 + i as f64 * h
        };
        y = rk4_step(system, t, &y, next - t)?;
        t = next;
        path.push((t, y.clone()));
    }
    if t1 - t > tol {
        y = rk4_step(system, t, &y, t1 - t)?;
        path.push((t1, y));
    }
    Ok(path)
}

/// `(f(t + h) - f(t - h)) / 2h`.
pub fn central_difference<F>(f: F, t: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::invalid(
            "h",
            format!("must be finite and > 0, got {h}"),
        ));
    }
    Ok((f(t + h)? - f(t - h)?) / (2.0 * h))
}
