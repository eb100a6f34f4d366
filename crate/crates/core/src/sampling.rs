//! Seeded draws of valid three-reservoir configurations for randomized
//! property checks.
//!
//! The generator is ChaCha8 seeded from a `u64`, so a seed reproduces the
//! same sequence of configurations on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::model::Model;
use crate::reservoir::{ReservoirSpec, Role};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Ranges of the random draws. Widths and peaks are log-uniform, N is
/// uniform over the odd values, and the inverse temperatures are built as
/// `β_w ≤ β_h ≤ β_c` from uniform increments.
#[derive(Clone, Copy, Debug)]
pub struct SamplerRanges {
    pub n: (u32, u32),
    pub peak: (f64, f64),
    pub center: (f64, f64),
    pub width: (f64, f64),
    pub beta_work: (f64, f64),
    pub beta_step: (f64, f64),
}

impl Default for SamplerRanges {
    fn default() -> Self {
        Self {
            n: (3, 41),
            peak: (0.1, 3.0),
            center: (1.0, 12.0),
            width: (0.05, 2.0),
            beta_work: (1e-3, 1.0),
            beta_step: (0.0, 1.5),
        }
    }
}

/// `count` values uniform in `[lo, hi)` from the ChaCha8 stream of `seed`.
pub fn uniform_draws(seed: u64, count: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut rng = seeded(seed);
    (0..count).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect()
}

fn log_uniform<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    (rng.random_range(lo.ln()..=hi.ln())).exp()
}

pub fn random_model<R: Rng>(rng: &mut R, ranges: &SamplerRanges) -> Result<Model> {
    let half = rng.random_range(ranges.n.0 / 2..=ranges.n.1 / 2);
    let n = 2 * half + 1;
    let beta_work = log_uniform(rng, ranges.beta_work);
    let beta_hot = beta_work + rng.random_range(ranges.beta_step.0..=ranges.beta_step.1);
    let beta_cold = beta_hot + rng.random_range(ranges.beta_step.0..=ranges.beta_step.1);
    let betas = [beta_cold, beta_hot, beta_work];
    let mut draw = |role: Role, beta: f64| {
        let peak = log_uniform(rng, ranges.peak);
        let center = rng.random_range(ranges.center.0..=ranges.center.1);
        let width = log_uniform(rng, ranges.width);
        ReservoirSpec::peaked(role, peak, center, width, beta)
    };
    Ok(Model {
        n,
        omega: 1.0,
        reservoirs: vec![
            draw(Role::Cold, betas[0])?,
            draw(Role::Hot, betas[1])?,
            draw(Role::Work, betas[2])?,
        ],
    })
}
