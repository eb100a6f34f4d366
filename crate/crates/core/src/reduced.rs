//! Analytic reference models at exact resonance: the three lowest levels
//! `1/2, 3/2, 5/2` driven by one reservoir per transition, the two-state
//! model obtained by merging the excited pair when the work reservoir is
//! infinitely hot, the laser-driven variant, and the two-reservoir model of
//! the lowest transition.
//!
//! Effective rates use the Clebsch-Gordan factor `N/2(N/2+1) − a(a±1)` of
//! the sector matrix elements.

use nalgebra::DMatrix;

use crate::error::{domain, Result};
use crate::liouvillian::{RateBlock, RateMatrix};
use crate::reservoir::{bose, Role};

/// Bare transition rates of the three driven transitions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveRates {
    /// `1/2 ↔ 3/2` through `J_x`
    pub cold: f64,
    /// `1/2 ↔ 5/2` through `J_x²/N`
    pub hot: f64,
    /// `3/2 ↔ 5/2` through `J_x`
    pub work: f64,
}

/// `Γ̄_ν` times the squared sector matrix element of each transition.
pub fn effective_rates(n: u32, peak_cold: f64, peak_hot: f64, peak_work: f64) -> Result<EffectiveRates> {
    if n < 5 || n.is_multiple_of(2) {
        return domain(format!("reduced model needs odd N ≥ 5, got {n}"));
    }
    for p in [peak_cold, peak_hot, peak_work] {
        if !(p >= 0.0 && p.is_finite()) {
            return domain(format!("peak rate {p} must be finite and non-negative"));
        }
    }
    let nf = f64::from(n);
    let x = nf * (nf + 2.0) / 4.0;
    let low = x - 0.75;
    let high = x - 3.75;
    Ok(EffectiveRates {
        cold: peak_cold / 4.0 * low,
        hot: peak_hot * low * high / (16.0 * nf * nf),
        work: peak_work / 4.0 * high,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedParams {
    pub omega: f64,
    pub rates: EffectiveRates,
    /// `n(β_c, 2Ω)`
    pub n_cold: f64,
    /// `n(β_h, 6Ω)`
    pub n_hot: f64,
    /// `n(β_w, 4Ω)`
    pub n_work: f64,
    /// Replaces the thermal work block by a symmetric drive of this rate.
    pub laser: Option<f64>,
}

impl ReducedParams {
    /// Resonant reduced model of `n` spins with the given peak rates and
    /// inverse temperatures, ordered cold, hot, work.
    pub fn resonant(n: u32, omega: f64, peaks: [f64; 3], betas: [f64; 3]) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return domain(format!("Ω = {omega} must be positive"));
        }
        let rates = effective_rates(n, peaks[0], peaks[1], peaks[2])?;
        Ok(Self {
            omega,
            rates,
            n_cold: bose(betas[0], 2.0 * omega)?,
            n_hot: bose(betas[1], 6.0 * omega)?,
            n_work: bose(betas[2], 4.0 * omega)?,
            laser: None,
        })
    }

    pub fn with_laser(mut self, rate: f64) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return domain(format!("laser rate {rate} must be finite and non-negative"));
        }
        self.laser = Some(rate);
        Ok(self)
    }

    fn check(&self) -> Result<()> {
        let r = self.rates;
        let all = [r.cold, r.hot, r.work, self.n_cold, self.n_hot, self.n_work];
        if all.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
            return domain("reduced-model rates and occupations must be finite and non-negative");
        }
        Ok(())
    }
}

/// Inverse temperature that gives occupation `n` at frequency `gap`.
fn beta_of(n: f64, gap: f64) -> f64 {
    (1.0 / n).ln_1p() / gap
}

fn thermal_pair(dim: usize, lower: usize, upper: usize, rate: f64, n: f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    m[(upper, lower)] = rate * n;
    m[(lower, upper)] = rate * (1.0 + n);
    m
}

/// Symmetric work block of the resonant laser on `3/2 ↔ 5/2`.
pub fn laser_block(rate: f64) -> Result<RateBlock> {
    if !(rate >= 0.0 && rate.is_finite()) {
        return domain(format!("laser rate {rate} must be finite and non-negative"));
    }
    let mut rates = DMatrix::zeros(3, 3);
    rates[(1, 2)] = rate;
    rates[(2, 1)] = rate;
    Ok(RateBlock {
        role: Role::Work,
        beta: 0.0,
        rates,
    })
}

/// Three-level generator on energies `Ω/4, 9Ω/4, 25Ω/4`.
pub fn reduced_rate_matrix(p: &ReducedParams) -> Result<RateMatrix> {
    p.check()?;
    let w = p.omega;
    let r = p.rates;
    let work = match p.laser {
        Some(rate) => laser_block(rate)?,
        None => RateBlock {
            role: Role::Work,
            beta: beta_of(p.n_work, 4.0 * w),
            rates: thermal_pair(3, 1, 2, r.work, p.n_work),
        },
    };
    let blocks = vec![
        RateBlock {
            role: Role::Cold,
            beta: beta_of(p.n_cold, 2.0 * w),
            rates: thermal_pair(3, 0, 1, r.cold, p.n_cold),
        },
        RateBlock {
            role: Role::Hot,
            beta: beta_of(p.n_hot, 6.0 * w),
            rates: thermal_pair(3, 0, 2, r.hot, p.n_hot),
        },
        work,
    ];
    RateMatrix::from_blocks(vec![0.25 * w, 2.25 * w, 6.25 * w], blocks)
}

/// Two-state model with the excited pair merged, valid for `n_w → ∞`.
///
/// The merged level sits `2Ω` above the ground state, so only the cold
/// reservoir's counting statistics are meaningful; the hot block's
/// frequency bookkeeping is not.
pub fn coarse_grained_rate_matrix(p: &ReducedParams) -> Result<RateMatrix> {
    p.check()?;
    let r = p.rates;
    let block = |role, rate: f64, n: f64, gap: f64| {
        let mut m = DMatrix::zeros(2, 2);
        m[(1, 0)] = rate * n;
        m[(0, 1)] = 0.5 * rate * (1.0 + n);
        RateBlock {
            role,
            beta: beta_of(n, gap * p.omega),
            rates: m,
        }
    };
    RateMatrix::from_blocks(
        vec![0.25 * p.omega, 2.25 * p.omega],
        vec![
            block(Role::Cold, r.cold, p.n_cold, 2.0),
            block(Role::Hot, r.hot, p.n_hot, 6.0),
        ],
    )
}

/// Cold current of the reduced model in the infinitely hot work limit.
pub fn analytic_current(p: &ReducedParams) -> f64 {
    let (gc, gh) = (p.rates.cold, p.rates.hot);
    let (nc, nh) = (p.n_cold, p.n_hot);
    2.0 * p.omega * gc * gh * (nc - nh) / (gc * (1.0 + 3.0 * nc) + gh * (1.0 + 3.0 * nh))
}

/// Cold-current noise of the reduced model in the infinitely hot work limit.
pub fn analytic_noise(p: &ReducedParams) -> f64 {
    let (gc, gh) = (p.rates.cold, p.rates.hot);
    let (nc, nh) = (p.n_cold, p.n_hot);
    let c = gc * (1.0 + 3.0 * nc);
    let h = gh * (1.0 + 3.0 * nh);
    let a = (c * c + h * h) * (nc + nh + 2.0 * nc * nh);
    let b = nc * (1.0 + nc)
        + nh * (1.0 + nh)
        + 12.0 * nc * nh
        + 15.0 * nc * nh * (nc + nh)
        + 18.0 * nc * nc * nh * nh;
    4.0 * p.omega.powi(2) * gc * gh * (a + 2.0 * gc * gh * b) / (c + h).powi(3)
}

/// Cold current when only the lowest transition is driven, by a cold and a
/// work reservoir.
pub fn two_level_current(gamma_cold: f64, gamma_work: f64, n_cold: f64, n_work: f64, omega: f64) -> f64 {
    -2.0 * omega * gamma_cold * gamma_work * (n_work - n_cold)
        / (gamma_cold * (1.0 + 2.0 * n_cold) + gamma_work * (1.0 + 2.0 * n_work))
}
