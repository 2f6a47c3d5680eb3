//! Deterministic geometry of planar steps.
//!
//! `a ⊕ b` at a fixed relative angle is the law of cosines; a full walk is the
//! norm of the Cartesian sum of its steps. The triangle routines answer the
//! constant-length question "how likely is `a` to exceed `b ⊕ c` when the
//! relative direction of the `b` and `c` steps is uniform", which is the
//! interior angle opposite `a` divided by π.

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, usage, Result};

/// A non-negative, finite length.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Length(f64);

impl Length {
    pub const ZERO: Length = Length(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(domain(format!("length must be finite and >= 0, got {value}")));
        }
        Ok(Length(value))
    }

    /// A length usable as a step: finite and strictly positive.
    pub fn step(value: f64) -> Result<Self> {
        if !value.is_finite() || value <= 0.0 {
            return Err(domain(format!("step length must be finite and > 0, got {value}")));
        }
        Ok(Length(value))
    }

    pub(crate) const fn from_raw(value: f64) -> Self {
        Length(value)
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A direction in radians, normalized into `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    pub fn new(radians: f64) -> Result<Self> {
        if !radians.is_finite() {
            return Err(domain(format!("angle must be finite, got {radians}")));
        }
        Ok(Angle(normalize(radians)))
    }

    pub(crate) const fn from_raw(radians: f64) -> Self {
        Angle(radians)
    }

    #[inline]
    pub fn radians(self) -> f64 {
        self.0
    }
}

#[inline]
fn normalize(radians: f64) -> f64 {
    let r = radians.rem_euclid(TAU);
    // rem_euclid rounds tiny negative inputs up to exactly TAU
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Three strictly positive side lengths. Any triple is accepted, including
/// ones that violate the triangle inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleSides {
    pub a: Length,
    pub b: Length,
    pub c: Length,
}

impl TriangleSides {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        Ok(TriangleSides {
            a: Length::step(a)?,
            b: Length::step(b)?,
            c: Length::step(c)?,
        })
    }

    /// True when every side is strictly shorter than the sum of the other two,
    /// decided exactly in floating point.
    pub fn is_proper(&self) -> bool {
        let (a, b, c) = (self.a.0, self.b.0, self.c.0);
        !at_least_sum(a, b, c) && !at_least_sum(b, a, c) && !at_least_sum(c, a, b)
    }
}

/// Exact test of `x >= y + z` for positive finite floats.
fn at_least_sum(x: f64, y: f64, z: f64) -> bool {
    let s = y + z;
    // TwoSum: err is the exact rounding error of s
    let yv = s - z;
    let zv = s - yv;
    let err = (y - yv) + (z - zv);
    x > s || (x == s && err <= 0.0)
}

/// Distance spanned by a step of length `a` followed by a step of length `b`
/// turned by `theta` relative to it.
pub fn combine_pair(a: Length, b: Length, theta: Angle) -> Result<Length> {
    let (a, b) = (a.0, b.0);
    if a <= 0.0 || b <= 0.0 {
        return Err(domain(format!("combine_pair needs positive lengths, got {a} and {b}")));
    }
    let radicand = a * a + b * b + 2.0 * a * b * theta.0.cos();
    let d = radicand.max(0.0).sqrt();
    Ok(Length(d.clamp((a - b).abs(), a + b)))
}

/// End-to-origin distance of a walk with the given step lengths and absolute
/// step directions.
pub fn walk_distance(lengths: &[Length], angles: &[Angle]) -> Result<Length> {
    if lengths.len() != angles.len() {
        return Err(usage(format!(
            "walk_distance got {} lengths and {} angles",
            lengths.len(),
            angles.len()
        )));
    }
    if let Some(bad) = lengths.iter().find(|l| l.0 <= 0.0) {
        return Err(domain(format!("step length must be > 0, got {}", bad.0)));
    }
    Ok(Length(cartesian_norm(
        lengths.iter().zip(angles).map(|(l, t)| (l.0, t.0)),
    )))
}

/// Norm of the vector sum of `(length, direction)` steps. A lone step returns
/// its own length exactly.
#[inline]
pub(crate) fn cartesian_norm(steps: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    let mut steps = steps.into_iter();
    let Some((l0, t0)) = steps.next() else {
        return 0.0;
    };
    let Some((l1, t1)) = steps.next() else {
        return l0;
    };
    let (s0, c0) = t0.sin_cos();
    let (s1, c1) = t1.sin_cos();
    let mut x = l0 * c0 + l1 * c1;
    let mut y = l0 * s0 + l1 * s1;
    for (l, t) in steps {
        let (s, c) = t.sin_cos();
        x += l * c;
        y += l * s;
    }
    (x * x + y * y).sqrt()
}

/// Interior angle opposite `opposite` in the proper triangle with the other
/// two sides `p` and `q`.
///
/// Kahan's needle-safe form of the law of cosines; stays accurate to a few
/// ulps when the triangle is close to degenerate, where `acos` of the cosine
/// rule loses about half the digits.
fn kahan_angle(opposite: f64, p: f64, q: f64) -> f64 {
    let (p, q) = if p >= q { (p, q) } else { (q, p) };
    let k = opposite;
    let mu = if q >= k { k - (p - q) } else { q - (p - k) };
    let num = ((p - q) + k) * mu;
    let den = (p + (q + k)) * ((p - k) + q);
    2.0 * (num / den).max(0.0).sqrt().atan()
}

/// `Pr(a > b ⊕ c)` for constant sides with a uniformly random relative angle
/// between the `b` and `c` steps.
///
/// Boundary ties (`a == b + c`) fall in the probability-one branch.
pub fn triangle_event_probability(sides: &TriangleSides) -> Result<f64> {
    let (a, b, c) = (sides.a.0, sides.b.0, sides.c.0);
    if a <= 0.0 || b <= 0.0 || c <= 0.0 {
        return Err(domain("triangle sides must be positive"));
    }
    if at_least_sum(a, b, c) {
        return Ok(1.0);
    }
    if at_least_sum(b, a, c) || at_least_sum(c, a, b) {
        return Ok(0.0);
    }
    Ok((kahan_angle(a, b, c) / PI).clamp(0.0, 1.0))
}

/// Interior angles opposite `a`, `b` and `c`.
pub fn interior_angles(sides: &TriangleSides) -> Result<(Angle, Angle, Angle)> {
    if !sides.is_proper() {
        return Err(domain(format!(
            "({}, {}, {}) is not a proper triangle",
            sides.a, sides.b, sides.c
        )));
    }
    let (a, b, c) = (sides.a.0, sides.b.0, sides.c.0);
    Ok((
        Angle(kahan_angle(a, b, c)),
        Angle(kahan_angle(b, a, c)),
        Angle(kahan_angle(c, a, b)),
    ))
}

/// `Pr(|w + l·e^{iφ}| < r)` for uniform `φ`, allowing `w == 0`.
///
/// Used by the quadrature oracles, where the partial walk `w` can vanish.
pub(crate) fn resultant_below(r: f64, w: f64, l: f64) -> f64 {
    if w == 0.0 {
        return if l < r { 1.0 } else { 0.0 };
    }
    if r <= 0.0 {
        return 0.0;
    }
    let sides = TriangleSides {
        a: Length(r),
        b: Length(w),
        c: Length(l),
    };
    triangle_event_probability(&sides).unwrap_or(0.0)
}
