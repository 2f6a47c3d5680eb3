//! Adaptive Simpson quadrature over one dimension, nestable by closure.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Target absolute error of one integral.
    pub abs_tol: f64,
    /// Maximum bisection depth below the initial panels.
    pub max_depth: u32,
    /// Equal panels the interval is cut into before adapting; keeps narrow
    /// features from slipping between the first five sample points.
    pub initial_panels: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-10,
            max_depth: 40,
            initial_panels: 16,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(domain(format!("abs_tol must be finite and > 0, got {}", self.abs_tol)));
        }
        if self.initial_panels == 0 {
            return Err(domain("initial_panels must be >= 1"));
        }
        Ok(())
    }
}

/// Integral of `f` over `[a, b]`.
pub fn integrate<F>(f: &mut F, a: f64, b: f64, cfg: &QuadratureConfig) -> f64
where
    F: FnMut(f64) -> f64,
{
    let panels = cfg.initial_panels.max(1);
    let width = (b - a) / panels as f64;
    let tol = cfg.abs_tol / panels as f64;
    (0..panels)
        .map(|k| {
            let lo = a + width * k as f64;
            let hi = if k + 1 == panels { b } else { lo + width };
            let mid = 0.5 * (lo + hi);
            let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
            let whole = simpson(lo, hi, flo, fmid, fhi);
            refine(f, lo, hi, flo, fmid, fhi, whole, tol, cfg.max_depth)
        })
        .sum()
}

#[inline]
fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F>(f: &mut F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64
where
    F: FnMut(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
