//! Monte Carlo estimation of walk-distance events.
//!
//! Every trial owns a stream derived from the experiment seed and its global
//! trial index (`seed.path ++ [t]`); inside a trial, each walker or source
//! gets its own child stream. Trials are split into contiguous shard blocks
//! (the last block absorbs the remainder) and shard counts are summed, so the
//! result is the same for every shard count and every scheduling order.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::{sample_angle, sample_length, StepDistribution};
use crate::error::{domain, usage, Error, Result};
use crate::geometry::{cartesian_norm, Length};
use crate::rng::{RandomStream, SeedKey, StreamSeed};
use crate::stats::wilson_interval;

pub const DEFAULT_LEVEL: f64 = 0.999;
pub const DEFAULT_TRIALS: u64 = 1_000_000;

/// Final distance of `steps` independent steps drawn from `dist`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkSpec {
    pub steps: u32,
    pub dist: StepDistribution,
}

impl WalkSpec {
    pub fn new(steps: u32, dist: StepDistribution) -> Self {
        WalkSpec { steps, dist }
    }
}

/// A positive random length: a raw draw, or the distance of a walk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DistanceSource {
    Walk(WalkSpec),
    Draw(StepDistribution),
}

/// `walk:<steps>:<dist>` for walks, the bare distribution text for draws.
impl fmt::Display for DistanceSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceSource::Walk(w) => write!(f, "walk:{}:{}", w.steps, w.dist),
            DistanceSource::Draw(d) => d.fmt(f),
        }
    }
}

impl FromStr for DistanceSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.strip_prefix("walk:") {
            Some(rest) => {
                let (steps, dist) = rest
                    .split_once(':')
                    .ok_or_else(|| usage(format!("walk source {s:?} needs walk:<steps>:<dist>")))?;
                let steps = steps
                    .trim()
                    .parse()
                    .map_err(|_| usage(format!("bad step count in {s:?}")))?;
                Ok(DistanceSource::Walk(WalkSpec::new(steps, dist.parse()?)))
            }
            None => Ok(DistanceSource::Draw(s.parse()?)),
        }
    }
}

/// Two independent walkers with `m` and `n` steps of the same law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSpec {
    pub m: u32,
    pub n: u32,
    pub dist: StepDistribution,
}

impl ComparisonSpec {
    pub fn new(m: u32, n: u32, dist: StepDistribution) -> Result<Self> {
        if m == 0 && n == 0 {
            return Err(usage("comparison needs at least one step in total"));
        }
        Ok(ComparisonSpec { m, n, dist })
    }

    /// Whether `Pr(D_m > D_n) = m / (m + n)` is claimed for this pair.
    pub fn theorem_applies(&self) -> bool {
        self.m as u64 + self.n as u64 > 2
    }
}

/// Trial budget and partitioning for one estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: StreamSeed,
    pub shards: usize,
    pub level: f64,
}

impl SimConfig {
    pub fn new(trials: u64, seed: StreamSeed) -> Self {
        SimConfig {
            trials,
            seed,
            shards: 1,
            level: DEFAULT_LEVEL,
        }
    }

    pub fn with_shards(mut self, shards: usize) -> Self {
        self.shards = shards;
        self
    }

    pub fn with_level(mut self, level: f64) -> Self {
        self.level = level;
        self
    }

    pub fn with_seed(&self, seed: StreamSeed) -> Self {
        SimConfig { seed, ..self.clone() }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(usage("trials must be >= 1"));
        }
        if self.shards == 0 {
            return Err(usage("shards must be >= 1"));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(domain(format!("level must lie in (0, 1), got {}", self.level)));
        }
        Ok(())
    }
}

/// Success proportion of a strict event with its Wilson interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProportionEstimate {
    pub successes: u64,
    /// Trials where the two compared quantities were exactly equal.
    pub ties: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub level: f64,
    pub seed: StreamSeed,
}

impl ProportionEstimate {
    pub fn from_counts(successes: u64, ties: u64, trials: u64, level: f64, seed: StreamSeed) -> Result<Self> {
        if successes + ties > trials {
            return Err(domain(format!(
                "{successes} successes and {ties} ties exceed {trials} trials"
            )));
        }
        let (ci_low, ci_high) = wilson_interval(successes, trials, level)?;
        Ok(ProportionEstimate {
            successes,
            ties,
            trials,
            p_hat: successes as f64 / trials as f64,
            ci_low,
            ci_high,
            level,
            seed,
        })
    }

    pub fn contains(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Success,
    Tie,
    Failure,
}

#[inline]
fn strictly_greater(lhs: f64, rhs: f64) -> Outcome {
    match lhs.partial_cmp(&rhs) {
        Some(Ordering::Greater) => Outcome::Success,
        Some(Ordering::Equal) => Outcome::Tie,
        _ => Outcome::Failure,
    }
}

#[inline]
fn strictly_less(lhs: f64, rhs: f64) -> Outcome {
    strictly_greater(rhs, lhs)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    successes: u64,
    ties: u64,
}

impl Tally {
    fn merge(self, other: Tally) -> Tally {
        Tally {
            successes: self.successes + other.successes,
            ties: self.ties + other.ties,
        }
    }
}

/// Half-open trial range `[start, end)` of shard `k`.
pub fn shard_range(trials: u64, shards: usize, k: usize) -> (u64, u64) {
    let shards = shards as u64;
    let k = k as u64;
    let block = trials / shards;
    let start = k * block;
    let end = if k + 1 == shards { trials } else { start + block };
    (start, end)
}

fn run_trials<F>(cfg: &SimConfig, trial: F) -> Result<ProportionEstimate>
where
    F: Fn(SeedKey) -> Outcome + Sync,
{
    cfg.validate()?;
    let base = cfg.seed.key();
    let tally = (0..cfg.shards)
        .into_par_iter()
        .map(|k| {
            let (start, end) = shard_range(cfg.trials, cfg.shards, k);
            let mut tally = Tally::default();
            for t in start..end {
                match trial(base.child(t)) {
                    Outcome::Success => tally.successes += 1,
                    Outcome::Tie => tally.ties += 1,
                    Outcome::Failure => {}
                }
            }
            tally
        })
        .reduce(Tally::default, Tally::merge);
    ProportionEstimate::from_counts(tally.successes, tally.ties, cfg.trials, cfg.level, cfg.seed.clone())
}

/// Draws `steps` (length, direction) pairs from `stream`, interleaved, and
/// returns the distance from the origin.
pub fn simulate_walk_distance(spec: &WalkSpec, stream: &mut RandomStream) -> Length {
    let dist = spec.dist;
    let steps = (0..spec.steps).map(|_| {
        let l = sample_length(&dist, stream).value();
        let t = sample_angle(stream).radians();
        (l, t)
    });
    Length::from_raw(cartesian_norm(steps))
}

pub fn sample_source(src: &DistanceSource, stream: &mut RandomStream) -> Length {
    match src {
        DistanceSource::Walk(w) => simulate_walk_distance(w, stream),
        DistanceSource::Draw(d) => sample_length(d, stream),
    }
}

/// Estimates `Pr(D_m > D_n)` for independent walks; ties count as failures.
///
/// The walker with fewer steps draws from trial child key 0 and the other
/// from key 1 (the first walker takes key 0 when `m == n`). Estimating the
/// swapped pair with the same seed therefore replays the same walks, and for
/// `m != n` the two success counts plus ties add up to the trial count.
pub fn estimate_farther_probability(spec: &ComparisonSpec, cfg: &SimConfig) -> Result<ProportionEstimate> {
    spec.dist.validate()?;
    let first = WalkSpec::new(spec.m, spec.dist);
    let second = WalkSpec::new(spec.n, spec.dist);
    let (first_key, second_key) = if spec.m <= spec.n { (0, 1) } else { (1, 0) };
    run_trials(cfg, |trial| {
        let d_first = simulate_walk_distance(&first, &mut trial.child(first_key).stream());
        let d_second = simulate_walk_distance(&second, &mut trial.child(second_key).stream());
        strictly_greater(d_first.value(), d_second.value())
    })
}

/// Estimates `Pr(distance < radius)`; exact hits on the radius are ties.
pub fn estimate_return_probability(spec: &WalkSpec, radius: Length, cfg: &SimConfig) -> Result<ProportionEstimate> {
    spec.dist.validate()?;
    if radius.value() <= 0.0 {
        return Err(domain("radius must be > 0"));
    }
    let r = radius.value();
    run_trials(cfg, |trial| {
        let d = simulate_walk_distance(spec, &mut trial.child(0).stream());
        strictly_less(d.value(), r)
    })
}

/// Estimates `Pr(lhs > s₁ ⊕ s₂ ⊕ …)`: each entry of `rest` is drawn as a step
/// length and given its own uniform direction.
///
/// `lhs` uses trial child key 0; `rest[i]` uses key `i + 1` for both its
/// length and its direction.
pub fn estimate_dominance_probability(
    lhs: &DistanceSource,
    rest: &[DistanceSource],
    cfg: &SimConfig,
) -> Result<ProportionEstimate> {
    if rest.is_empty() {
        return Err(usage("dominance needs at least one source on the right-hand side"));
    }
    for src in std::iter::once(lhs).chain(rest) {
        match src {
            DistanceSource::Walk(w) => w.dist.validate()?,
            DistanceSource::Draw(d) => d.validate()?,
        }
    }
    run_trials(cfg, |trial| {
        let left = sample_source(lhs, &mut trial.child(0).stream());
        let steps = rest.iter().enumerate().map(|(i, src)| {
            let mut stream = trial.child(i as u64 + 1).stream();
            let l = sample_source(src, &mut stream).value();
            (l, sample_angle(&mut stream).radians())
        });
        strictly_greater(left.value(), cartesian_norm(steps))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{triangle_event_probability, TriangleSides};
    use std::f64::consts::SQRT_2;

    fn unit() -> StepDistribution {
        StepDistribution::unit()
    }

    fn cfg(trials: u64, root: u64) -> SimConfig {
        SimConfig::new(trials, StreamSeed::new(root)).with_shards(8)
    }

    #[test]
    fn shard_ranges_cover_trials() {
        for (trials, shards) in [(10, 3), (5, 8), (1_000_000, 64), (1, 1), (7, 7)] {
            let mut next = 0;
            for k in 0..shards {
                let (s, e) = shard_range(trials, shards, k);
                assert_eq!(s, next);
                assert!(e >= s);
                next = e;
            }
            assert_eq!(next, trials);
        }
    }

    #[test]
    fn walk_examples() {
        let mut s = StreamSeed::new(1).stream();
        let any = StepDistribution::exponential(1.0).unwrap();
        assert_eq!(simulate_walk_distance(&WalkSpec::new(0, any), &mut s).value(), 0.0);
        for _ in 0..1000 {
            assert_eq!(simulate_walk_distance(&WalkSpec::new(1, unit()), &mut s).value(), 1.0);
        }
    }

    #[test]
    fn source_examples() {
        let mut s = StreamSeed::new(2).stream();
        let two = DistanceSource::Draw(StepDistribution::constant(2.0).unwrap());
        let one_step = DistanceSource::Walk(WalkSpec::new(1, unit()));
        let none = DistanceSource::Walk(WalkSpec::new(0, unit()));
        for _ in 0..100 {
            assert_eq!(sample_source(&two, &mut s).value(), 2.0);
            assert_eq!(sample_source(&one_step, &mut s).value(), 1.0);
            assert_eq!(sample_source(&none, &mut s).value(), 0.0);
        }
    }

    #[test]
    fn source_text_form() {
        let w: DistanceSource = "walk:2:constant:1".parse().unwrap();
        assert_eq!(w, DistanceSource::Walk(WalkSpec::new(2, unit())));
        assert_eq!(w.to_string(), "walk:2:constant:1.0");
        let d: DistanceSource = "exp:1".parse().unwrap();
        assert_eq!(d.to_string(), "exp:1.0");
        assert!("walk:x:constant:1".parse::<DistanceSource>().is_err());
        assert!("walk:2".parse::<DistanceSource>().is_err());
    }

    #[test]
    fn comparison_needs_a_step() {
        assert!(ComparisonSpec::new(0, 0, unit()).is_err());
        assert!(!ComparisonSpec::new(1, 1, unit()).unwrap().theorem_applies());
        assert!(ComparisonSpec::new(1, 2, unit()).unwrap().theorem_applies());
    }

    #[test]
    fn bad_configs_are_rejected() {
        let spec = ComparisonSpec::new(1, 2, unit()).unwrap();
        assert!(estimate_farther_probability(&spec, &cfg(0, 1)).is_err());
        assert!(estimate_farther_probability(&spec, &cfg(10, 1).with_shards(0)).is_err());
        assert!(estimate_farther_probability(&spec, &cfg(10, 1).with_level(1.0)).is_err());
        let walk = WalkSpec::new(2, unit());
        assert!(estimate_return_probability(&walk, Length::ZERO, &cfg(10, 1)).is_err());
        let src = DistanceSource::Draw(unit());
        assert!(estimate_dominance_probability(&src, &[], &cfg(10, 1)).is_err());
    }

    #[test]
    fn one_step_beats_zero_steps() {
        let spec = ComparisonSpec::new(1, 0, unit()).unwrap();
        let est = estimate_farther_probability(&spec, &cfg(10_000, 3)).unwrap();
        assert_eq!(est.p_hat, 1.0);
        assert_eq!(est.successes, 10_000);
        assert_eq!(est.ci_high, 1.0);
    }

    #[test]
    fn single_unit_step_never_returns_inside_unit_disc() {
        let est = estimate_return_probability(&WalkSpec::new(1, unit()), Length::step(1.0).unwrap(), &cfg(10_000, 4))
            .unwrap();
        assert_eq!(est.p_hat, 0.0);
        assert_eq!(est.ties, 10_000);
    }

    #[test]
    fn two_unit_steps_return_with_probability_one_third() {
        let est = estimate_return_probability(
            &WalkSpec::new(2, unit()),
            Length::step(1.0).unwrap(),
            &cfg(1_000_000, 5),
        )
        .unwrap();
        assert!(est.contains(1.0 / 3.0), "{est:?}");
    }

    #[test]
    fn farther_probability_examples() {
        let est =
            estimate_farther_probability(&ComparisonSpec::new(1, 2, unit()).unwrap(), &cfg(1_000_000, 6)).unwrap();
        assert!(est.contains(1.0 / 3.0), "{est:?}");
        let uniform = StepDistribution::uniform(0.5, 1.5).unwrap();
        let est =
            estimate_farther_probability(&ComparisonSpec::new(2, 2, uniform).unwrap(), &cfg(1_000_000, 7)).unwrap();
        assert!(est.contains(0.5), "{est:?}");
    }

    #[test]
    fn dominance_examples() {
        let c = |v: f64| DistanceSource::Draw(StepDistribution::constant(v).unwrap());
        let rest = [c(1.0), c(1.0)];
        let est = estimate_dominance_probability(&c(2.0), &rest, &cfg(100_000, 8)).unwrap();
        assert!(est.contains(1.0), "{est:?}");
        for (lhs, seed) in [(1.0, 9), (SQRT_2, 10)] {
            let want = triangle_event_probability(&TriangleSides::new(lhs, 1.0, 1.0).unwrap()).unwrap();
            let est = estimate_dominance_probability(&c(lhs), &rest, &cfg(1_000_000, seed)).unwrap();
            assert!(est.contains(want), "{lhs}: {est:?} vs {want}");
        }
    }

    #[test]
    fn estimates_do_not_depend_on_shard_count() {
        let spec = ComparisonSpec::new(2, 3, StepDistribution::exponential(1.0).unwrap()).unwrap();
        let reference = estimate_farther_probability(&spec, &cfg(20_001, 11).with_shards(1)).unwrap();
        for shards in [2, 8, 64] {
            let est = estimate_farther_probability(&spec, &cfg(20_001, 11).with_shards(shards)).unwrap();
            assert_eq!(est, reference);
        }
    }

    #[test]
    fn swapped_comparison_partitions_trials() {
        let dist = StepDistribution::uniform(0.5, 1.5).unwrap();
        let c = cfg(100_000, 12);
        let mn = estimate_farther_probability(&ComparisonSpec::new(1, 3, dist).unwrap(), &c).unwrap();
        let nm = estimate_farther_probability(&ComparisonSpec::new(3, 1, dist).unwrap(), &c).unwrap();
        assert_eq!(mn.ties, nm.ties);
        assert_eq!(mn.successes + nm.successes + mn.ties, c.trials);
        assert_eq!(mn.ties, 0);
    }

    #[test]
    fn larger_radius_never_loses_successes() {
        let walk = WalkSpec::new(3, StepDistribution::lognormal(0.0, 0.5).unwrap());
        let mut last = 0;
        for r in [0.25, 0.5, 1.0, 1.5, 2.0, 4.0] {
            let est = estimate_return_probability(&walk, Length::step(r).unwrap(), &cfg(20_000, 13)).unwrap();
            assert!(est.successes >= last);
            last = est.successes;
        }
    }

    #[test]
    fn comparison_is_scale_invariant_under_coupling() {
        let c = cfg(100_000, 14);
        for (m, n) in [(1, 2), (2, 3), (3, 3)] {
            let unit_est = estimate_farther_probability(&ComparisonSpec::new(m, n, unit()).unwrap(), &c).unwrap();
            let scaled = StepDistribution::constant(7.3).unwrap();
            let scaled_est = estimate_farther_probability(&ComparisonSpec::new(m, n, scaled).unwrap(), &c).unwrap();
            assert_eq!(unit_est.successes, scaled_est.successes, "({m}, {n})");
        }
    }
}
