//! Step-length laws and the per-draw sampling primitives.
//!
//! Every draw consumes exactly one 64-bit word from the stream, including
//! draws from [`StepDistribution::Constant`]. Walks built from different laws
//! with the same seed therefore see the same directions, which is what makes
//! quantile-coupled comparisons (e.g. unit steps vs. steps of length 7.3)
//! line up trial by trial.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, usage, Error, Result};
use crate::geometry::{Angle, Length};
use crate::rng::RandomStream;
use crate::stats::normal_quantile;

/// A strictly positive step-length law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StepDistribution {
    Constant(f64),
    UniformInterval {
        lo: f64,
        hi: f64,
    },
    Exponential {
        rate: f64,
    },
    LogNormal {
        mu: f64,
        sigma: f64,
    },
    /// `v1` with probability `p`, otherwise `v2`.
    TwoPoint {
        v1: f64,
        v2: f64,
        p: f64,
    },
}

impl StepDistribution {
    pub fn constant(c: f64) -> Result<Self> {
        StepDistribution::Constant(c).validated()
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        StepDistribution::UniformInterval { lo, hi }.validated()
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        StepDistribution::Exponential { rate }.validated()
    }

    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        StepDistribution::LogNormal { mu, sigma }.validated()
    }

    pub fn two_point(v1: f64, v2: f64, p: f64) -> Result<Self> {
        StepDistribution::TwoPoint { v1, v2, p }.validated()
    }

    pub fn unit() -> Self {
        StepDistribution::Constant(1.0)
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let finite_positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(domain(format!("{name} must be finite and > 0, got {v}")))
            }
        };
        match *self {
            StepDistribution::Constant(c) => finite_positive("constant", c),
            StepDistribution::UniformInterval { lo, hi } => {
                finite_positive("uniform lo", lo)?;
                finite_positive("uniform hi", hi)?;
                if lo < hi {
                    Ok(())
                } else {
                    Err(domain(format!("uniform needs lo < hi, got {lo} and {hi}")))
                }
            }
            StepDistribution::Exponential { rate } => finite_positive("rate", rate),
            StepDistribution::LogNormal { mu, sigma } => {
                if !mu.is_finite() {
                    return Err(domain(format!("lognormal mu must be finite, got {mu}")));
                }
                finite_positive("sigma", sigma)
            }
            StepDistribution::TwoPoint { v1, v2, p } => {
                finite_positive("v1", v1)?;
                finite_positive("v2", v2)?;
                if p > 0.0 && p < 1.0 {
                    Ok(())
                } else {
                    Err(domain(format!("two-point mass must lie in (0, 1), got {p}")))
                }
            }
        }
    }

    /// Inverse CDF: the smallest `x` with `F(x) >= u`.
    pub fn quantile(&self, u: f64) -> Result<Length> {
        if !(u > 0.0 && u < 1.0) {
            return Err(domain(format!("quantile level must lie in (0, 1), got {u}")));
        }
        self.validate()?;
        Ok(Length::from_raw(self.quantile_unchecked(u)))
    }

    /// Continuous laws are clamped into `[f64::MIN_POSITIVE, f64::MAX]` so
    /// extreme parameters cannot produce a zero or infinite step.
    #[inline]
    pub(crate) fn quantile_unchecked(&self, u: f64) -> f64 {
        let x = match *self {
            StepDistribution::Constant(c) => return c,
            StepDistribution::TwoPoint { v1, v2, p } => {
                let (low, high, p_low) = if v1 <= v2 { (v1, v2, p) } else { (v2, v1, 1.0 - p) };
                return if u <= p_low { low } else { high };
            }
            StepDistribution::UniformInterval { lo, hi } => lo + (hi - lo) * u,
            StepDistribution::Exponential { rate } => -(-u).ln_1p() / rate,
            StepDistribution::LogNormal { mu, sigma } => (mu + sigma * normal_quantile(u)).exp(),
        };
        x.clamp(f64::MIN_POSITIVE, f64::MAX)
    }

    pub fn mean(&self) -> f64 {
        match *self {
            StepDistribution::Constant(c) => c,
            StepDistribution::UniformInterval { lo, hi } => 0.5 * (lo + hi),
            StepDistribution::Exponential { rate } => 1.0 / rate,
            StepDistribution::LogNormal { mu, sigma } => (mu + 0.5 * sigma * sigma).exp(),
            StepDistribution::TwoPoint { v1, v2, p } => p * v1 + (1.0 - p) * v2,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            StepDistribution::Constant(_) => 0.0,
            StepDistribution::UniformInterval { lo, hi } => (hi - lo).powi(2) / 12.0,
            StepDistribution::Exponential { rate } => 1.0 / (rate * rate),
            StepDistribution::LogNormal { mu, sigma } => {
                let s2 = sigma * sigma;
                (s2.exp() - 1.0) * (2.0 * mu + s2).exp()
            }
            StepDistribution::TwoPoint { v1, v2, p } => p * (1.0 - p) * (v1 - v2).powi(2),
        }
    }
}

/// One draw from `dist`.
#[inline]
pub fn sample_length(dist: &StepDistribution, stream: &mut RandomStream) -> Length {
    Length::from_raw(dist.quantile_unchecked(stream.next_open01()))
}

/// Uniform direction on `[0, 2π)` from the top 53 bits of one draw.
#[inline]
pub fn sample_angle(stream: &mut RandomStream) -> Angle {
    Angle::from_raw(TAU * stream.next_f64())
}

/// Canonical text form: `constant:1.0`, `uniform:0.5,1.5`, `exp:1.0`,
/// `lognormal:0.0,0.5`, `twopoint:1.0,3.0,0.25`.
impl fmt::Display for StepDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepDistribution::Constant(c) => write!(f, "constant:{c:?}"),
            StepDistribution::UniformInterval { lo, hi } => write!(f, "uniform:{lo:?},{hi:?}"),
            StepDistribution::Exponential { rate } => write!(f, "exp:{rate:?}"),
            StepDistribution::LogNormal { mu, sigma } => write!(f, "lognormal:{mu:?},{sigma:?}"),
            StepDistribution::TwoPoint { v1, v2, p } => write!(f, "twopoint:{v1:?},{v2:?},{p:?}"),
        }
    }
}

impl FromStr for StepDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, params) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| usage(format!("distribution {s:?} is missing ':'")))?;
        let values = params
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| usage(format!("bad number {p:?} in distribution {s:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let arity = |n: usize| {
            if values.len() == n {
                Ok(())
            } else {
                Err(usage(format!("{kind} takes {n} parameter(s), got {}", values.len())))
            }
        };
        match kind.trim().to_ascii_lowercase().as_str() {
            "constant" => {
                arity(1)?;
                Self::constant(values[0])
            }
            "uniform" => {
                arity(2)?;
                Self::uniform(values[0], values[1])
            }
            "exp" | "exponential" => {
                arity(1)?;
                Self::exponential(values[0])
            }
            "lognormal" => {
                arity(2)?;
                Self::lognormal(values[0], values[1])
            }
            "twopoint" => {
                arity(3)?;
                Self::two_point(values[0], values[1], values[2])
            }
            other => Err(usage(format!("unknown distribution kind {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamSeed;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use statrs::distribution::{ContinuousCDF, LogNormal};
    use std::f64::consts::{LN_2, PI};

    fn stream(root: u64) -> RandomStream {
        StreamSeed::new(root).stream()
    }

    /// |sample mean - mean| within 5 standard errors.
    fn assert_mean_within_5_sigma(samples: impl Iterator<Item = f64>, mean: f64, var: f64) {
        let (mut n, mut sum) = (0usize, 0.0);
        for x in samples {
            n += 1;
            sum += x;
        }
        let se = (var / n as f64).sqrt();
        let got = sum / n as f64;
        assert!((got - mean).abs() <= 5.0 * se, "mean {got} vs {mean} (se {se})");
    }

    #[test]
    fn quantile_examples() {
        let u = StepDistribution::uniform(0.5, 1.5).unwrap();
        assert_eq!(u.quantile(0.5).unwrap().value(), 1.0);
        let e = StepDistribution::exponential(1.0).unwrap();
        assert_abs_diff_eq!(e.quantile(0.5).unwrap().value(), LN_2, epsilon = 1e-15);
        let t = StepDistribution::two_point(1.0, 3.0, 0.25).unwrap();
        assert_eq!(t.quantile(0.1).unwrap().value(), 1.0);
        assert_eq!(t.quantile(0.25).unwrap().value(), 1.0);
        assert_eq!(t.quantile(0.26).unwrap().value(), 3.0);
    }

    #[test]
    fn quantile_rejects_closed_endpoints() {
        let e = StepDistribution::exponential(1.0).unwrap();
        for u in [0.0, 1.0, -0.1, 2.0, f64::NAN] {
            assert!(matches!(e.quantile(u), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn lognormal_quantile_matches_statrs() {
        let d = StepDistribution::lognormal(0.3, 0.7).unwrap();
        let reference = LogNormal::new(0.3, 0.7).unwrap();
        for i in 1..200 {
            let u = i as f64 / 200.0;
            let want = reference.inverse_cdf(u);
            assert!((d.quantile(u).unwrap().value() - want).abs() <= 1e-9 * want.max(1.0));
        }
    }

    #[test]
    fn invalid_parameters() {
        assert!(StepDistribution::constant(0.0).is_err());
        assert!(StepDistribution::uniform(1.0, 1.0).is_err());
        assert!(StepDistribution::uniform(0.0, 1.0).is_err());
        assert!(StepDistribution::exponential(-1.0).is_err());
        assert!(StepDistribution::lognormal(f64::NAN, 1.0).is_err());
        assert!(StepDistribution::lognormal(0.0, 0.0).is_err());
        assert!(StepDistribution::two_point(1.0, 2.0, 1.0).is_err());
        assert!(StepDistribution::two_point(1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn text_form_round_trips() {
        for s in [
            "constant:1.0",
            "uniform:0.5,1.5",
            "exp:1.0",
            "lognormal:0.0,0.5",
            "twopoint:1.0,3.0,0.25",
        ] {
            let d: StepDistribution = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        assert_eq!(
            "constant:1".parse::<StepDistribution>().unwrap(),
            StepDistribution::unit()
        );
        assert_eq!(
            " exp: 2 ".parse::<StepDistribution>().unwrap(),
            StepDistribution::exponential(2.0).unwrap()
        );
    }

    #[test]
    fn text_form_errors() {
        for s in [
            "constant",
            "gamma:1,2",
            "uniform:1",
            "exp:x",
            "uniform:2,1",
            "twopoint:1,2",
        ] {
            assert!(s.parse::<StepDistribution>().is_err(), "{s}");
        }
    }

    #[test]
    fn constant_is_exact() {
        let mut s = stream(1);
        let d = StepDistribution::unit();
        assert!((0..1000).all(|_| sample_length(&d, &mut s).value() == 1.0));
    }

    #[test]
    fn every_draw_consumes_one_word() {
        let laws = [
            StepDistribution::unit(),
            StepDistribution::uniform(0.5, 1.5).unwrap(),
            StepDistribution::exponential(1.0).unwrap(),
            StepDistribution::lognormal(0.0, 0.5).unwrap(),
            StepDistribution::two_point(1.0, 3.0, 0.25).unwrap(),
        ];
        for d in laws {
            let mut a = stream(5);
            let mut b = stream(5);
            sample_length(&d, &mut a);
            b.next_u64();
            assert_eq!(a, b, "{d}");
        }
    }

    #[test]
    fn sample_means() {
        let n = 1_000_000;
        for (seed, d) in [
            (11, StepDistribution::uniform(0.5, 1.5).unwrap()),
            (12, StepDistribution::exponential(2.0).unwrap()),
            (13, StepDistribution::lognormal(0.0, 0.5).unwrap()),
            (14, StepDistribution::two_point(1.0, 3.0, 0.25).unwrap()),
        ] {
            let mut s = stream(seed);
            assert_mean_within_5_sigma(
                (0..n).map(|_| sample_length(&d, &mut s).value()),
                d.mean(),
                d.variance(),
            );
        }
    }

    #[test]
    fn samples_strictly_positive_and_finite() {
        let laws = [
            StepDistribution::uniform(0.5, 1.5).unwrap(),
            StepDistribution::exponential(1.0).unwrap(),
            StepDistribution::exponential(1e300).unwrap(),
            StepDistribution::lognormal(0.0, 0.5).unwrap(),
            StepDistribution::lognormal(-700.0, 5.0).unwrap(),
            StepDistribution::two_point(1.0, 3.0, 0.25).unwrap(),
        ];
        for (i, d) in laws.iter().enumerate() {
            let mut s = stream(100 + i as u64);
            for _ in 0..1_000_000 {
                let x = sample_length(d, &mut s).value();
                assert!(x > 0.0 && x.is_finite(), "{d}: {x}");
            }
        }
    }

    #[test]
    fn angle_moments_and_range() {
        let n = 1_000_000;
        let mut s = stream(21);
        let draws: Vec<f64> = (0..n).map(|_| sample_angle(&mut s).radians()).collect();
        assert!(draws.iter().all(|&t| (0.0..TAU).contains(&t)));
        assert_mean_within_5_sigma(draws.iter().copied(), PI, TAU * TAU / 12.0);
        let lower = draws.iter().filter(|&&t| t < PI).count() as f64 / n as f64;
        assert!((lower - 0.5).abs() <= 5.0 * (0.25 / n as f64).sqrt());
    }

    #[test]
    fn largest_angle_stays_below_tau() {
        assert!(TAU * ((u64::MAX >> 11) as f64 / (1u64 << 53) as f64) < TAU);
    }

    fn any_distribution() -> impl Strategy<Value = StepDistribution> {
        prop_oneof![
            (1e-3..1e3f64).prop_map(StepDistribution::Constant),
            (1e-3..10.0f64, 1e-3..10.0f64).prop_map(|(lo, w)| StepDistribution::UniformInterval { lo, hi: lo + w }),
            (1e-3..1e3f64).prop_map(|rate| StepDistribution::Exponential { rate }),
            (-5.0..5.0f64, 1e-2..3.0f64).prop_map(|(mu, sigma)| StepDistribution::LogNormal { mu, sigma }),
            (1e-3..10.0f64, 1e-3..10.0f64, 0.01..0.99f64).prop_map(|(v1, v2, p)| StepDistribution::TwoPoint {
                v1,
                v2,
                p
            }),
        ]
    }

    proptest! {
        #[test]
        fn quantile_is_monotone_and_positive(d in any_distribution(), a in 1e-12..1.0f64, b in 1e-12..1.0f64) {
            prop_assume!(a < 1.0 && b < 1.0);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let ql = d.quantile(lo).unwrap().value();
            let qh = d.quantile(hi).unwrap().value();
            prop_assert!(ql > 0.0 && ql.is_finite());
            prop_assert!(ql <= qh, "{} -> {}, {} -> {}", lo, ql, hi, qh);
        }

        #[test]
        fn text_form_parses_back(d in any_distribution()) {
            prop_assert_eq!(d.to_string().parse::<StepDistribution>().unwrap(), d);
        }
    }
}
