//! Entropy production, cooling performance and its bounds, and the
//! uncertainty-relation figures of merit.

use crate::error::{domain, Error, Result};
use crate::fcs::FcsResult;
use crate::liouvillian::RateMatrix;
use crate::reservoir::Role;

/// Relative first-law tolerance used by [`entropy_production`].
pub const FIRST_LAW_TOLERANCE: f64 = 1e-10;
/// Absolute floor under the first-law tolerance, for configurations where
/// every current is rounding noise.
const FIRST_LAW_FLOOR: f64 = 1e-14;

/// `σ_i = −Σ β_ν Ī_ν` after checking `|Σ Ī_ν| ≤ 1e-10·max|Ī_ν|`.
///
/// A zero-temperature reservoir (`β = ∞`) with zero current contributes
/// nothing.
pub fn entropy_production(currents: &[f64], betas: &[f64]) -> Result<f64> {
    if currents.len() != betas.len() {
        return domain(format!(
            "{} currents but {} inverse temperatures",
            currents.len(),
            betas.len()
        ));
    }
    let sum: f64 = currents.iter().sum();
    let largest = currents.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let tolerance = (FIRST_LAW_TOLERANCE * largest).max(FIRST_LAW_FLOOR);
    if !(sum.abs() <= tolerance) {
        return Err(Error::FirstLaw { sum, tolerance });
    }
    Ok(currents
        .iter()
        .zip(betas)
        .filter(|(&c, _)| c != 0.0)
        .map(|(&c, &b)| -b * c)
        .sum())
}

/// Currents of the three terminals with their inverse temperatures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Terminals {
    /// Indexed in [`Role::ALL`] order.
    pub currents: [f64; 3],
    pub betas: [f64; 3],
}

impl Terminals {
    pub fn current(&self, role: Role) -> f64 {
        self.currents[role as usize]
    }

    pub fn beta(&self, role: Role) -> f64 {
        self.betas[role as usize]
    }

    /// Collects currents and temperatures for all three roles.
    pub fn from_solution(r: &RateMatrix, fcs: &FcsResult) -> Result<Self> {
        let mut currents = [0.0; 3];
        let mut betas = [0.0; 3];
        for role in Role::ALL {
            let block = r
                .block(role)
                .ok_or_else(|| Error::Domain(format!("no {role} reservoir in the rate matrix")))?;
            betas[role as usize] = block.beta;
            currents[role as usize] = fcs
                .current(role)
                .ok_or_else(|| Error::Domain(format!("no {role} current in the solution")))?;
        }
        Ok(Self { currents, betas })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermoReport {
    pub entropy_production: f64,
    /// `κ = Ī_c/Ī_w`
    pub cop: f64,
    /// `κ_Ca = β_h/(β_c − β_h)`; infinite when `β_c = β_h`.
    pub carnot: f64,
    /// `κ̄ = κ_Ca / (1 + 2Ī_c/(S̄_c(β_c − β_h)))`
    pub tur_bound: f64,
    /// `S̄_c σ_i / Ī_c²`
    pub tur_ratio: f64,
    /// `Ī_c > 0` and `Ī_w > 0`
    pub refrigerating: bool,
    /// `β_c ≥ β_h ≥ β_w`
    pub ordered: bool,
    /// `β_c ≠ β_h`
    pub carnot_defined: bool,
}

impl ThermoReport {
    /// Whether `κ ≤ κ̄ ≤ κ_Ca` is guaranteed.
    pub fn bounds_valid(&self) -> bool {
        self.refrigerating && self.ordered
    }
}

/// Performance report of a refrigerator; `cold_noise` is `S̄_c`.
pub fn cop_report(t: &Terminals, cold_noise: f64) -> Result<ThermoReport> {
    let sigma = entropy_production(&t.currents, &t.betas)?;
    let (ic, iw) = (t.current(Role::Cold), t.current(Role::Work));
    let (bc, bh, bw) = (t.beta(Role::Cold), t.beta(Role::Hot), t.beta(Role::Work));
    let gap = bc - bh;
    let carnot_defined = gap != 0.0;
    let carnot = if carnot_defined { bh / gap } else { f64::INFINITY };
    // κ_Ca/(1 + 2Ī/(S̄Δβ)) = β_h/(Δβ + 2Ī/S̄), finite at Δβ = 0
    let tur_bound = bh / (gap + 2.0 * ic / cold_noise);
    Ok(ThermoReport {
        entropy_production: sigma,
        cop: ic / iw,
        carnot,
        tur_bound,
        tur_ratio: tur_ratio(cold_noise, sigma, ic),
        refrigerating: ic > 0.0 && iw > 0.0,
        ordered: bc >= bh && bh >= bw,
        carnot_defined,
    })
}

/// [`cop_report`] for a solved three-reservoir model counting the cold
/// current.
pub fn thermo_report(r: &RateMatrix, fcs: &FcsResult) -> Result<ThermoReport> {
    if fcs.counted != Role::Cold {
        return domain(format!(
            "noise of the {} reservoir given, cold noise required",
            fcs.counted
        ));
    }
    cop_report(&Terminals::from_solution(r, fcs)?, fcs.noise)
}

/// `S̄σ_i/Ī²`; infinite when `Ī = 0`.
pub fn tur_ratio(noise: f64, entropy_production: f64, current: f64) -> f64 {
    if current == 0.0 {
        return f64::INFINITY;
    }
    noise * entropy_production / (current * current)
}

/// Relative width `sqrt(S̄δt)/(Īδt)` of the energy transferred in `δt`.
pub fn noise_to_signal(noise: f64, current: f64, dt: f64) -> Result<f64> {
    if !(noise > 0.0 && current > 0.0 && dt > 0.0) {
        return domain(format!(
            "noise {noise:e}, current {current:e} and interval {dt:e} must be positive"
        ));
    }
    Ok((noise * dt).sqrt() / (current * dt))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_temperatures_produce_no_entropy() {
        let s = entropy_production(&[0.3, -0.1, -0.2], &[1.5, 1.5, 1.5]).unwrap();
        assert!(s.abs() < 1e-15);
    }

    #[test]
    fn two_reservoir_entropy() {
        let (bc, bw, q) = (2.0, 1.0, -0.25);
        let s = entropy_production(&[q, -q], &[bc, bw]).unwrap();
        assert!((s - (bc - bw) * q.abs()).abs() < 1e-15);
    }

    #[test]
    fn first_law_violation_reported() {
        let err = entropy_production(&[1.0, -0.5], &[1.0, 2.0]).unwrap_err();
        assert!(matches!(err, Error::FirstLaw { .. }));
        assert!(entropy_production(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn zero_temperature_without_current() {
        let s = entropy_production(&[0.0, 0.0], &[f64::INFINITY, 1.0]).unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn carnot_value_and_ordering() {
        let t = Terminals {
            currents: [0.1, -0.5, 0.4],
            betas: [2.0, 1.0, 1e-3],
        };
        let r = cop_report(&t, 0.3).unwrap();
        assert_eq!(r.carnot, 1.0);
        assert!((r.cop - 0.25).abs() < 1e-15);
        assert!(r.bounds_valid());
        assert!(r.tur_bound < r.carnot);
        let expected = 1.0 / (1.0 + 2.0 * 0.1 / 0.3);
        assert!((r.tur_bound - expected).abs() < 1e-15);
    }

    #[test]
    fn degenerate_carnot_flagged() {
        let t = Terminals {
            currents: [0.0, 0.0, 0.0],
            betas: [1.0, 1.0, 0.5],
        };
        let r = cop_report(&t, 0.1).unwrap();
        assert!(!r.carnot_defined);
        assert!(r.carnot.is_infinite());
        assert!(!r.refrigerating);
        assert!(r.tur_ratio.is_infinite());
    }

    #[test]
    fn noise_to_signal_scaling() {
        let a = noise_to_signal(0.3, 0.12, 1.0).unwrap();
        let b = noise_to_signal(0.3, 0.12, 4.0).unwrap();
        assert!((a / b - 2.0).abs() < 1e-14);
        assert!(noise_to_signal(0.3, 0.0, 1.0).is_err());
        assert!(noise_to_signal(0.3, 0.1, -1.0).is_err());
    }
}
