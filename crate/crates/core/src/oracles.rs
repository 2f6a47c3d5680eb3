//! Reference values for the simulator.
//!
//! Two independent routes: the closed forms (`m / (m + n)`, `1 / (n + 1)`),
//! and deterministic quadrature over the relative step directions of
//! constant-length walks. The quadrature fixes the first direction of each
//! walk at 0 (rotational invariance) and integrates the remaining directions;
//! the innermost direction is integrated exactly with the triangle formula,
//! since `Pr(|w + l·e^{iφ}| < r)` over uniform `φ` is the event probability of
//! the triangle `(r, |w|, l)`.

use std::f64::consts::TAU;

use crate::error::{domain, usage, Error, Result};
use crate::geometry::{resultant_below, triangle_event_probability, Length, TriangleSides};
use crate::quadrature::{integrate, QuadratureConfig};

/// `Pr(D_m > D_n) = m / (m + n)`, claimed only for `m + n > 2`.
pub fn exact_farther_probability(m: u32, n: u32) -> Result<f64> {
    let s = m as u64 + n as u64;
    if s <= 2 {
        return Err(Error::Hypothesis(format!("m + n must exceed 2, got {m} + {n}")));
    }
    Ok(m as f64 / s as f64)
}

/// `Pr(n ⊙ 1 < 1) = 1 / (n + 1)` for unit steps, claimed only for `n > 1`.
pub fn exact_return_probability(n: u32) -> Result<f64> {
    if n <= 1 {
        return Err(Error::Hypothesis(format!("n must exceed 1, got {n}")));
    }
    Ok(1.0 / (n as f64 + 1.0))
}

/// `Σ c·p_i` for `p_i = Pr(D_i > D_{s-i}) = i / s`, with the numerator summed
/// in integers so identities such as `p_i + p_{s-i} = 1` and
/// `p_i + p_j - p_{i+j} = 0` come out exact.
pub fn exact_dominance_combination(s: u32, terms: &[(i64, u32)]) -> Result<f64> {
    if s <= 2 {
        return Err(Error::Hypothesis(format!("s must exceed 2, got {s}")));
    }
    if let Some(&(_, i)) = terms.iter().find(|&&(_, i)| i > s) {
        return Err(usage(format!("index {i} exceeds s = {s}")));
    }
    let numerator: i64 = terms.iter().map(|&(c, i)| c * i as i64).sum();
    Ok(numerator as f64 / s as f64)
}

/// `Pr(A > B⊕C) + Pr(B > A⊕C) + Pr(C > A⊕B)` for any positive `A`, `B`, `C`.
pub fn exact_lemma_total() -> f64 {
    1.0
}

/// `Pr(a > b ⊕ c)` for constant sides: the interior angle opposite `a` over
/// π, or 0/1 when the sides do not form a triangle.
pub fn exact_triangle_term(sides: &TriangleSides) -> Result<f64> {
    triangle_event_probability(sides)
}

/// `Pr(l₁ ⊕ … ⊕ l_n < radius)` for fixed step lengths, `n ∈ {2, 3, 4}`.
///
/// `n = 2` is the closed-form triangle probability; `n = 3` and `n = 4` are
/// one- and two-dimensional adaptive integrals.
pub fn quadrature_return_probability(
    n: usize,
    lengths: &[Length],
    radius: Length,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(2..=4).contains(&n) {
        return Err(usage(format!("quadrature supports 2 to 4 steps, got {n}")));
    }
    if lengths.len() != n {
        return Err(usage(format!("expected {n} lengths, got {}", lengths.len())));
    }
    if lengths.iter().any(|l| l.value() <= 0.0) {
        return Err(domain("step lengths must be > 0"));
    }
    if radius.value() <= 0.0 {
        return Err(domain("radius must be > 0"));
    }
    cfg.validate()?;
    let lengths: Vec<f64> = lengths.iter().map(|l| l.value()).collect();
    Ok(walk_below(radius.value(), &lengths, cfg))
}

/// `Pr(D_m > D_n)` for walks of constant step `length`, by quadrature over
/// at most three relative directions.
pub fn quadrature_farther_probability(m: u32, n: u32, length: Length, cfg: &QuadratureConfig) -> Result<f64> {
    if length.value() <= 0.0 {
        return Err(domain("step length must be > 0"));
    }
    cfg.validate()?;
    match (m, n) {
        (0, 0) => return Err(usage("comparison needs at least one step in total")),
        (0, _) => return Ok(0.0),
        (_, 0) => return Ok(1.0),
        _ => {}
    }
    if (m - 1) + (n - 1) > 3 {
        return Err(usage(format!(
            "({m}, {n}) needs {} relative directions; at most 3 are supported",
            (m - 1) + (n - 1)
        )));
    }
    let l = length.value();
    // The shorter walk goes through `walk_below`, whose last step is exact;
    // the longer one is integrated over all its relative directions. A
    // one-step walk is a constant distance, so the other walk alone remains.
    // Ties between the walks have probability zero once m + n > 2.
    Ok(match (m, n) {
        (1, _) => walk_below(l, &vec![l; n as usize], cfg),
        (_, 1) => 1.0 - walk_below(l, &vec![l; m as usize], cfg),
        _ if n <= m => {
            let shorter = vec![l; n as usize];
            outer_average(m as usize, l, cfg, &mut |d_m| walk_below(d_m, &shorter, cfg))
        }
        _ => {
            let shorter = vec![l; m as usize];
            1.0 - outer_average(n as usize, l, cfg, &mut |d_n| walk_below(d_n, &shorter, cfg))
        }
    })
}

/// Average of `g(|walk|)` over the relative directions of a walk of `steps`
/// steps of length `l`, first direction fixed at 0.
fn outer_average<G>(steps: usize, l: f64, cfg: &QuadratureConfig, g: &mut G) -> f64
where
    G: FnMut(f64) -> f64,
{
    fn recurse<G: FnMut(f64) -> f64>(x: f64, y: f64, left: usize, l: f64, cfg: &QuadratureConfig, g: &mut G) -> f64 {
        if left == 0 {
            return g(x.hypot(y));
        }
        average_over_circle(cfg, &mut |t| {
            let (s, c) = t.sin_cos();
            recurse(x + l * c, y + l * s, left - 1, l, cfg, g)
        })
    }
    recurse(l, 0.0, steps.saturating_sub(1), l, cfg, g)
}

/// `Pr(|walk| < r)` for the given step lengths (first direction 0).
fn walk_below(r: f64, lengths: &[f64], cfg: &QuadratureConfig) -> f64 {
    fn recurse(r: f64, x: f64, y: f64, rest: &[f64], cfg: &QuadratureConfig) -> f64 {
        match rest {
            [] => {
                if x.hypot(y) < r {
                    1.0
                } else {
                    0.0
                }
            }
            [last] => resultant_below(r, x.hypot(y), *last),
            [next, tail @ ..] => average_over_circle(cfg, &mut |t| {
                let (s, c) = t.sin_cos();
                recurse(r, x + next * c, y + next * s, tail, cfg)
            }),
        }
    }
    match lengths {
        [] => {
            if r > 0.0 {
                1.0
            } else {
                0.0
            }
        }
        [first, rest @ ..] => recurse(r, *first, 0.0, rest, cfg),
    }
}

/// Mean of `f` over a uniform direction on `[0, 2π)`.
fn average_over_circle<F: FnMut(f64) -> f64>(cfg: &QuadratureConfig, f: &mut F) -> f64 {
    integrate(f, 0.0, TAU, cfg) / TAU
}
