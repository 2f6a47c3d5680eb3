//! Planar random flights: the distance algebra of uniformly oriented steps,
//! reproducible Monte Carlo estimators for walk-distance events, quadrature
//! and closed-form reference values, and statistical verification suites.
//!
//! The headline identities checked here are
//!
//! * `Pr(n ⊙ 1 < 1) = 1 / (n + 1)` for `n > 1` unit steps, and
//! * `Pr(D_m > D_n) = m / (m + n)` for independent walks of `m` and `n`
//!   steps with any positive step-length law, whenever `m + n > 2`,
//!
//! together with the triangle identity
//! `Pr(A > B⊕C) + Pr(B > A⊕C) + Pr(C > A⊕B) = 1` they rest on.

pub mod distribution;
pub mod error;
pub mod geometry;
pub mod montecarlo;
pub mod oracles;
pub mod quadrature;
pub mod rng;
pub mod stats;
pub mod verification;

pub use distribution::{sample_angle, sample_length, StepDistribution};
pub use error::{Error, Result};
pub use geometry::{
    combine_pair, interior_angles, triangle_event_probability, walk_distance, Angle, Length, TriangleSides,
};
pub use montecarlo::{
    estimate_dominance_probability, estimate_farther_probability, estimate_return_probability, sample_source,
    simulate_walk_distance, ComparisonSpec, DistanceSource, ProportionEstimate, SimConfig, WalkSpec,
};
pub use oracles::{
    exact_farther_probability, exact_return_probability, quadrature_farther_probability, quadrature_return_probability,
};
pub use quadrature::QuadratureConfig;
pub use rng::{derive_stream, RandomStream, StreamSeed};
pub use stats::wilson_interval;
