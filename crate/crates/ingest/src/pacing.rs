use std::time::Duration;

use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64;
use serde::{Deserialize, Serialize};

use crate::{IngestError, Result};

/// Uniform random delay between requests, in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PacingRepr")]
pub struct PacingPolicy {
    min_delay: f64,
    max_delay: f64,
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PacingRepr {
    #[serde(default = "default_min")]
    min_delay: f64,
    #[serde(default = "default_max")]
    max_delay: f64,
    #[serde(default)]
    seed: u64,
}

fn default_min() -> f64 {
    30.0
}

fn default_max() -> f64 {
    60.0
}

impl TryFrom<PacingRepr> for PacingPolicy {
    type Error = IngestError;

    fn try_from(r: PacingRepr) -> Result<Self> {
        Self::new(r.min_delay, r.max_delay, r.seed)
    }
}

impl PacingPolicy {
    pub fn new(min_delay: f64, max_delay: f64, seed: u64) -> Result<Self> {
        if !(min_delay.is_finite() && max_delay.is_finite() && 0.0 <= min_delay && min_delay <= max_delay) {
            return Err(IngestError::InvalidPacing {
                min: min_delay,
                max: max_delay,
            });
        }
        Ok(Self {
            min_delay,
            max_delay,
            seed,
        })
    }

    pub fn with_seed(seed: u64) -> Self {
        Self::new(default_min(), default_max(), seed).expect("defaults are valid")
    }

    pub fn min_delay(&self) -> f64 {
        self.min_delay
    }

    pub fn max_delay(&self) -> f64 {
        self.max_delay
    }
}

impl Default for PacingPolicy {
    fn default() -> Self {
        Self::with_seed(0)
    }
}

/// `n` delays drawn uniformly from `[min_delay, max_delay]`.
pub fn paced_schedule(n: usize, policy: &PacingPolicy) -> Vec<Duration> {
    let mut rng = Pcg64::seed_from_u64(policy.seed);
    (0..n)
        .map(|_| Duration::from_secs_f64(rng.random_range(policy.min_delay..=policy.max_delay)))
        .collect()
}
