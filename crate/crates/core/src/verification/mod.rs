//! Statistical verification suites.
//!
//! Each suite turns one identity into a list of [`CheckResult`]s. A
//! statistical check passes when its expected value lies inside the
//! confidence interval of the estimate; checks that combine several
//! independent estimates (sums, differences) add their interval endpoints,
//! which keeps coverage at `1 - k·(1 - level)` for `k` estimates. Expected
//! values always come from [`crate::oracles`].
//!
//! Child seeds are keyed by check content (step counts, term index), so
//! adding a check to a suite does not move the random streams of the others.

mod report;

pub use report::{parse_report, render_report, render_reports, ReportFormat, ReportRow, CSV_COLUMNS};

use serde::{Deserialize, Serialize};

use crate::distribution::StepDistribution;
use crate::error::{usage, Result};
use crate::geometry::{Length, TriangleSides};
use crate::montecarlo::{
    estimate_dominance_probability, estimate_farther_probability, estimate_return_probability, ComparisonSpec,
    DistanceSource, ProportionEstimate, SimConfig, WalkSpec,
};
use crate::oracles;
use crate::quadrature::QuadratureConfig;
use crate::rng::StreamSeed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
    /// Outside the range where a closed form is claimed; reported, never asserted.
    Excluded,
}

/// A confidence interval built from one or more independent estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalEstimate {
    pub point: f64,
    pub low: f64,
    pub high: f64,
    /// Effective coverage after combining `estimates` intervals.
    pub level: f64,
    /// Trials behind each constituent estimate.
    pub trials: u64,
    pub ties: u64,
    pub estimates: u32,
    pub seed: StreamSeed,
}

impl IntervalEstimate {
    pub fn single(est: &ProportionEstimate) -> Self {
        IntervalEstimate {
            point: est.p_hat,
            low: est.ci_low,
            high: est.ci_high,
            level: est.level,
            trials: est.trials,
            ties: est.ties,
            estimates: 1,
            seed: est.seed.clone(),
        }
    }

    /// Interval for `Σ c·p` over `(c, estimate)` terms by endpoint arithmetic.
    /// `seed` labels the combined check.
    pub fn combine(terms: &[(i64, &ProportionEstimate)], seed: StreamSeed) -> Self {
        let mut out = IntervalEstimate {
            point: 0.0,
            low: 0.0,
            high: 0.0,
            level: 1.0,
            trials: terms.first().map_or(0, |(_, e)| e.trials),
            ties: 0,
            estimates: terms.len() as u32,
            seed,
        };
        for &(c, est) in terms {
            let c = c as f64;
            out.point += c * est.p_hat;
            if c >= 0.0 {
                out.low += c * est.ci_low;
                out.high += c * est.ci_high;
            } else {
                out.low += c * est.ci_high;
                out.high += c * est.ci_low;
            }
            out.level -= 1.0 - est.level;
            out.ties += est.ties;
        }
        out.level = out.level.max(0.0);
        out
    }

    pub fn contains(&self, value: f64) -> bool {
        self.low <= value && value <= self.high
    }

    pub fn alpha(&self) -> f64 {
        1.0 - self.level
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Evidence {
    Statistical(IntervalEstimate),
    Exact { value: f64, tol: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub m: Option<u32>,
    pub n: Option<u32>,
    pub dist: String,
    pub expected: Option<f64>,
    pub evidence: Evidence,
    pub verdict: Verdict,
    pub detail: String,
}

impl CheckResult {
    pub fn statistical(name: impl Into<String>, expected: f64, est: IntervalEstimate) -> Self {
        let verdict = if est.contains(expected) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        let detail = format!(
            "expected {expected} {} [{}, {}]",
            if verdict == Verdict::Pass { "in" } else { "outside" },
            est.low,
            est.high
        );
        CheckResult {
            name: name.into(),
            m: None,
            n: None,
            dist: String::new(),
            expected: Some(expected),
            evidence: Evidence::Statistical(est),
            verdict,
            detail,
        }
    }

    pub fn exact(name: impl Into<String>, expected: f64, value: f64, tol: f64) -> Self {
        let diff = (value - expected).abs();
        let verdict = if diff <= tol { Verdict::Pass } else { Verdict::Fail };
        CheckResult {
            name: name.into(),
            m: None,
            n: None,
            dist: String::new(),
            expected: Some(expected),
            evidence: Evidence::Exact { value, tol },
            verdict,
            detail: format!("|{value} - {expected}| = {diff:e} vs tol {tol:e}"),
        }
    }

    /// An estimate with no claimed value.
    pub fn excluded(name: impl Into<String>, est: IntervalEstimate, reason: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            m: None,
            n: None,
            dist: String::new(),
            expected: None,
            evidence: Evidence::Statistical(est),
            verdict: Verdict::Excluded,
            detail: reason.into(),
        }
    }

    fn with_walks(mut self, m: Option<u32>, n: Option<u32>) -> Self {
        self.m = m;
        self.n = n;
        self
    }

    fn with_dist(mut self, dist: impl Into<String>) -> Self {
        self.dist = dist.into();
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn interval(&self) -> Option<&IntervalEstimate> {
        match &self.evidence {
            Evidence::Statistical(est) => Some(est),
            Evidence::Exact { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: StreamSeed,
    pub checks: Vec<CheckResult>,
    pub passed: usize,
    pub failed: usize,
    pub excluded: usize,
    /// Union bound on the false-failure probability of the statistical checks.
    pub alpha_budget: f64,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, seed: StreamSeed) -> Self {
        SuiteReport {
            suite: suite.into(),
            seed,
            checks: Vec::new(),
            passed: 0,
            failed: 0,
            excluded: 0,
            alpha_budget: 0.0,
        }
    }

    pub fn push(&mut self, check: CheckResult) {
        match check.verdict {
            Verdict::Pass => self.passed += 1,
            Verdict::Fail => self.failed += 1,
            Verdict::Excluded => self.excluded += 1,
        }
        if check.verdict != Verdict::Excluded {
            if let Some(est) = check.interval() {
                self.alpha_budget += est.alpha();
            }
        }
        self.checks.push(check);
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// `Pr(n ⊙ 1 < 1)` against `1 / (n + 1)` for each `n`.
pub fn run_rayleigh_suite(n_values: &[u32], cfg: &SimConfig) -> Result<SuiteReport> {
    if let Some(n) = n_values.iter().find(|&&n| n <= 1) {
        return Err(usage(format!("rayleigh suite needs n > 1, got {n}")));
    }
    let unit = StepDistribution::unit();
    let radius = Length::step(1.0)?;
    let mut report = SuiteReport::new("rayleigh", cfg.seed.clone());
    for &n in n_values {
        let expected = oracles::exact_return_probability(n)?;
        let est = estimate_return_probability(
            &WalkSpec::new(n, unit),
            radius,
            &cfg.with_seed(cfg.seed.child(n as u64)),
        )?;
        report.push(
            CheckResult::statistical(format!("return n={n}"), expected, IntervalEstimate::single(&est))
                .with_walks(None, Some(n))
                .with_dist(unit.to_string()),
        );
    }
    Ok(report)
}

/// `Pr(D_m > D_n)` against `m / (m + n)` for every pair and law.
pub fn run_theorem_suite(pairs: &[(u32, u32)], dists: &[StepDistribution], cfg: &SimConfig) -> Result<SuiteReport> {
    if let Some((m, n)) = pairs.iter().find(|&&(m, n)| m as u64 + n as u64 <= 2) {
        return Err(usage(format!("theorem suite needs m + n > 2, got ({m}, {n})")));
    }
    let mut report = SuiteReport::new("theorem", cfg.seed.clone());
    for &(m, n) in pairs {
        let expected = oracles::exact_farther_probability(m, n)?;
        for (d, dist) in dists.iter().enumerate() {
            let seed = cfg.seed.child(m as u64).child(n as u64).child(d as u64);
            let est = estimate_farther_probability(&ComparisonSpec::new(m, n, *dist)?, &cfg.with_seed(seed))?;
            report.push(
                CheckResult::statistical(format!("farther m={m} n={n}"), expected, IntervalEstimate::single(&est))
                    .with_walks(Some(m), Some(n))
                    .with_dist(dist.to_string()),
            );
        }
    }
    Ok(report)
}

const LEMMA_TERMS: [&str; 3] = ["A>B+C", "B>A+C", "C>A+B"];

fn constant_value(src: &DistanceSource) -> Option<f64> {
    match src {
        DistanceSource::Draw(StepDistribution::Constant(c)) => Some(*c),
        _ => None,
    }
}

/// `Pr(A > B⊕C) + Pr(B > A⊕C) + Pr(C > A⊕B) = 1` for each triple. When all
/// three sources are constants, each term is also checked against its
/// triangle-angle value.
pub fn run_lemma_suite(triples: &[[DistanceSource; 3]], cfg: &SimConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("lemma", cfg.seed.clone());
    for (t, [a, b, c]) in triples.iter().enumerate() {
        let triple_seed = cfg.seed.child(t as u64);
        let label = format!("{a} ; {b} ; {c}");
        let arrangements = [(a, [b, c]), (b, [a, c]), (c, [a, b])];
        let mut terms = Vec::with_capacity(3);
        for (k, (lhs, rest)) in arrangements.iter().enumerate() {
            let est = estimate_dominance_probability(
                lhs,
                &[*rest[0], *rest[1]],
                &cfg.with_seed(triple_seed.child(k as u64)),
            )?;
            terms.push(est);
        }
        let constants: Option<Vec<f64>> = [a, b, c].iter().map(|s| constant_value(s)).collect();
        if let Some(v) = constants {
            let sides = [(v[0], v[1], v[2]), (v[1], v[0], v[2]), (v[2], v[0], v[1])];
            for (k, &(x, y, z)) in sides.iter().enumerate() {
                let expected = oracles::exact_triangle_term(&TriangleSides::new(x, y, z)?)?;
                report.push(
                    CheckResult::statistical(
                        format!("lemma[{t}] term {}", LEMMA_TERMS[k]),
                        expected,
                        IntervalEstimate::single(&terms[k]),
                    )
                    .with_dist(label.clone()),
                );
            }
        }
        let sum = IntervalEstimate::combine(&[(1, &terms[0]), (1, &terms[1]), (1, &terms[2])], triple_seed);
        report.push(
            CheckResult::statistical(format!("lemma[{t}] sum"), oracles::exact_lemma_total(), sum).with_dist(label),
        );
    }
    Ok(report)
}

/// Identities among `p_i = Pr(D_i > D_{s-i})`, `i = 0..=s`:
/// complements `p_i + p_{s-i} = 1`, additivity `p_i + p_j = p_{i+j}` for
/// `i, j >= 1`, and linearity `p_i = i / s`.
pub fn run_additivity_suite(s: u32, dist: &StepDistribution, cfg: &SimConfig) -> Result<SuiteReport> {
    if s <= 2 {
        return Err(usage(format!("additivity suite needs s > 2, got {s}")));
    }
    let dist_text = dist.to_string();
    let estimates = (0..=s)
        .map(|i| {
            let spec = ComparisonSpec::new(i, s - i, *dist)?;
            estimate_farther_probability(&spec, &cfg.with_seed(cfg.seed.child(i as u64)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = SuiteReport::new("additivity", cfg.seed.clone());

    for i in 0..=s / 2 {
        let j = s - i;
        let expected = oracles::exact_dominance_combination(s, &[(1, i), (1, j)])?;
        let est = IntervalEstimate::combine(
            &[(1, &estimates[i as usize]), (1, &estimates[j as usize])],
            cfg.seed.clone(),
        );
        report.push(
            CheckResult::statistical(format!("complement p{i}+p{j}=1"), expected, est)
                .with_walks(Some(i), Some(j))
                .with_dist(dist_text.clone()),
        );
    }
    for i in 1..=s {
        for j in i..=s - i {
            let k = i + j;
            let expected = oracles::exact_dominance_combination(s, &[(1, i), (1, j), (-1, k)])?;
            let est = IntervalEstimate::combine(
                &[
                    (1, &estimates[i as usize]),
                    (1, &estimates[j as usize]),
                    (-1, &estimates[k as usize]),
                ],
                cfg.seed.clone(),
            );
            report.push(
                CheckResult::statistical(format!("additivity p{i}+p{j}-p{k}=0"), expected, est)
                    .with_dist(dist_text.clone()),
            );
        }
    }
    for (i, est) in estimates.iter().enumerate() {
        let i = i as u32;
        let expected = oracles::exact_dominance_combination(s, &[(1, i)])?;
        report.push(
            CheckResult::statistical(
                format!("linearity p{i}={i}/{s}"),
                expected,
                IntervalEstimate::single(est),
            )
            .with_walks(Some(i), Some(s - i))
            .with_dist(dist_text.clone()),
        );
    }
    Ok(report)
}

/// Quadrature against closed forms: `Pr(D_m > D_n)` for each pair (tolerance
/// 1e-9 when no integral is needed, 1e-6 otherwise) and unit-step return
/// probabilities for `n ∈ {2, 3, 4}` (1e-9 for `n = 2`, 1e-6 otherwise).
pub fn run_oracle_suite(pairs: &[(u32, u32)], cfg: &QuadratureConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("oracle", StreamSeed::default());
    let unit = Length::step(1.0)?;
    for &(m, n) in pairs {
        let expected = oracles::exact_farther_probability(m, n)?;
        let value = oracles::quadrature_farther_probability(m, n, unit, cfg)?;
        let dims = m.min(n).saturating_sub(1) + m.max(n).saturating_sub(2);
        let tol = if dims == 0 { 1e-9 } else { 1e-6 };
        report.push(
            CheckResult::exact(format!("quadrature farther m={m} n={n}"), expected, value, tol)
                .with_walks(Some(m), Some(n))
                .with_dist(StepDistribution::unit().to_string()),
        );
    }
    for n in 2..=4u32 {
        let expected = oracles::exact_return_probability(n)?;
        let value = oracles::quadrature_return_probability(n as usize, &vec![unit; n as usize], unit, cfg)?;
        let tol = if n == 2 { 1e-9 } else { 1e-6 };
        report.push(
            CheckResult::exact(format!("quadrature return n={n}"), expected, value, tol)
                .with_walks(None, Some(n))
                .with_dist(StepDistribution::unit().to_string()),
        );
    }
    Ok(report)
}

/// One farther-probability estimate, checked against `m / (m + n)` when the
/// closed form is claimed and reported as an exclusion otherwise.
pub fn run_farther_estimate(spec: &ComparisonSpec, cfg: &SimConfig) -> Result<SuiteReport> {
    let est = estimate_farther_probability(spec, cfg)?;
    let interval = IntervalEstimate::single(&est);
    let name = format!("farther m={} n={}", spec.m, spec.n);
    let check = if spec.theorem_applies() {
        CheckResult::statistical(name, oracles::exact_farther_probability(spec.m, spec.n)?, interval)
    } else {
        CheckResult::excluded(name, interval, "m + n <= 2: no closed form is claimed")
    };
    let mut report = SuiteReport::new("estimate", cfg.seed.clone());
    report.push(
        check
            .with_walks(Some(spec.m), Some(spec.n))
            .with_dist(spec.dist.to_string()),
    );
    Ok(report)
}

/// One return-probability estimate, checked against `1 / (n + 1)` for unit
/// steps and radius 1 with `n > 1`, and reported as an exclusion otherwise.
pub fn run_return_estimate(spec: &WalkSpec, radius: Length, cfg: &SimConfig) -> Result<SuiteReport> {
    let est = estimate_return_probability(spec, radius, cfg)?;
    let interval = IntervalEstimate::single(&est);
    let name = format!("return n={} radius={}", spec.steps, radius);
    let claimed = spec.dist == StepDistribution::unit() && radius.value() == 1.0 && spec.steps > 1;
    let check = if claimed {
        CheckResult::statistical(name, oracles::exact_return_probability(spec.steps)?, interval)
    } else {
        CheckResult::excluded(name, interval, "closed form covers unit steps, radius 1, n > 1 only")
    };
    let mut report = SuiteReport::new("estimate", cfg.seed.clone());
    report.push(
        check
            .with_walks(None, Some(spec.steps))
            .with_dist(spec.dist.to_string()),
    );
    Ok(report)
}
