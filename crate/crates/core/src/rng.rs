//! Deterministic, splittable random streams.
//!
//! A [`StreamSeed`] is a root key plus a path of 64-bit child keys. The path
//! is folded into a single word with the SplitMix64 finalizer:
//!
//! ```text
//! fold([])       = 0
//! fold(p ++ [k]) = mix64(fold(p) ^ mix64(k ^ PATH_SALT))
//! state          = mix64(root ^ fold(path))
//! ```
//!
//! and the stream emits `mix64(state + i·GAMMA)` for `i = 1, 2, …` (the
//! SplitMix64 sequence). Output is a pure function of `(root, path)`, so
//! shards that derive their own child streams reproduce the sequential run.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{usage, Error};

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const PATH_SALT: u64 = 0x6a09_e667_f3bc_c909;

/// SplitMix64 / Stafford "variant 13" avalanche finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn fold_key(acc: u64, key: u64) -> u64 {
    mix64(acc ^ mix64(key ^ PATH_SALT))
}

/// Root key and child path identifying one random stream.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct StreamSeed {
    pub root: u64,
    pub path: Vec<u64>,
}

impl StreamSeed {
    pub fn new(root: u64) -> Self {
        StreamSeed { root, path: Vec::new() }
    }

    pub fn child(&self, key: u64) -> Self {
        let mut path = self.path.clone();
        path.push(key);
        StreamSeed { root: self.root, path }
    }

    pub(crate) fn key(&self) -> SeedKey {
        SeedKey {
            root: self.root,
            folded: self.path.iter().fold(0, |acc, &k| fold_key(acc, k)),
        }
    }

    pub fn stream(&self) -> RandomStream {
        self.key().stream()
    }
}

/// Text form `root` or `root/k1/k2/...`.
impl fmt::Display for StreamSeed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root)?;
        for k in &self.path {
            write!(f, "/{k}")?;
        }
        Ok(())
    }
}

impl FromStr for StreamSeed {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut parts = s.trim().split('/');
        let parse = |p: &str| {
            p.parse::<u64>()
                .map_err(|_| usage(format!("invalid seed component {p:?} in {s:?}")))
        };
        let root = parse(parts.next().unwrap_or_default())?;
        let path = parts.map(parse).collect::<Result<Vec<_>, _>>()?;
        Ok(StreamSeed { root, path })
    }
}

/// Folded form of a [`StreamSeed`]; cheap to copy and extend in hot loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct SeedKey {
    root: u64,
    folded: u64,
}

impl SeedKey {
    #[inline]
    pub(crate) fn child(self, key: u64) -> SeedKey {
        SeedKey {
            root: self.root,
            folded: fold_key(self.folded, key),
        }
    }

    #[inline]
    pub(crate) fn stream(self) -> RandomStream {
        RandomStream {
            state: mix64(self.root ^ self.folded),
        }
    }
}

/// Single-owner generator; advancing is the only mutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomStream {
    state: u64,
}

impl RandomStream {
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in the open interval `(0, 1)`: midpoints of the 2⁵³ grid cells.
    #[inline]
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

/// Stream for `seed.path ++ [key]`.
pub fn derive_stream(seed: &StreamSeed, key: u64) -> RandomStream {
    seed.key().child(key).stream()
}
