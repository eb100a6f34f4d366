//! Transient populations under a rate matrix: propagation, relaxation
//! towards a Gibbs state measured by relative entropy, and the
//! zero-temperature decay cascade.

use nalgebra::DVector;

use crate::error::{domain, Error, Result};
use crate::liouvillian::{build_rate_matrix, RateMatrix};
use crate::reservoir::{ReservoirSpec, Role, SpectralDensity};
use crate::spin::{CouplingOperator, HalfInt, SpinSector};

/// Tolerance on negative entries and on the normalization of population
/// vectors.
const PROBABILITY_SLACK: f64 = 1e-10;

fn check_probability(p: &DVector<f64>, what: &str) -> Result<()> {
    if p.iter().any(|&x| !(x >= -PROBABILITY_SLACK && x.is_finite())) {
        return domain(format!("{what} has negative or non-finite entries"));
    }
    let sum = p.sum();
    if (sum - 1.0).abs() > PROBABILITY_SLACK {
        return domain(format!("{what} sums to {sum}, not 1"));
    }
    Ok(())
}

/// `e^{Rt}ρ₀` by scaling and squaring.
pub fn propagate(r: &RateMatrix, rho0: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
    if rho0.len() != r.dim() {
        return domain(format!(
            "initial state has {} entries, generator has {} levels",
            rho0.len(),
            r.dim()
        ));
    }
    check_probability(rho0, "initial state")?;
    if !(t >= 0.0 && t.is_finite()) {
        return domain(format!("propagation time {t} must be finite and non-negative"));
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let rho = (r.total() * t).exp() * rho0;
    let sum = rho.sum();
    let min = rho.iter().copied().fold(f64::INFINITY, f64::min);
    if !sum.is_finite() || (sum - 1.0).abs() > 1e-9 || min < -1e-9 {
        return Err(Error::Numerical(format!(
            "propagation to t = {t:e} lost normalization (sum {sum:e}, min {min:e})"
        )));
    }
    Ok(rho)
}

/// `S(p‖q) = Σ p_a ln(p_a/q_a)` with `0·ln 0 = 0`.
pub fn relative_entropy(p: &DVector<f64>, q: &DVector<f64>) -> Result<f64> {
    if p.len() != q.len() {
        return domain("distributions have different lengths");
    }
    let mut s = 0.0;
    for (&pa, &qa) in p.iter().zip(q.iter()) {
        if pa <= 0.0 {
            continue;
        }
        if !(qa > 0.0) {
            return domain(format!("p = {pa:e} where q = {qa:e}: support mismatch"));
        }
        s += pa * (pa / qa).ln();
    }
    Ok(s)
}

/// Gibbs distribution kept in log form, so levels far above `1/β` stay
/// usable as a reference for relative entropy.
#[derive(Clone, Debug)]
pub struct GibbsState {
    pub beta: f64,
    log_weights: Vec<f64>,
}

impl GibbsState {
    pub fn new(energies: &[f64], beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return domain(format!("Gibbs state needs finite β > 0, got {beta}"));
        }
        let ground = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let shifted: Vec<f64> = energies.iter().map(|e| -beta * (e - ground)).collect();
        let log_z = shifted.iter().map(|x| x.exp()).sum::<f64>().ln();
        Ok(Self {
            beta,
            log_weights: shifted.iter().map(|x| x - log_z).collect(),
        })
    }

    pub fn probabilities(&self) -> DVector<f64> {
        DVector::from_iterator(self.log_weights.len(), self.log_weights.iter().map(|x| x.exp()))
    }

    /// `S(p‖ρ_β)`; entries of `p` at or below zero contribute nothing.
    pub fn relative_entropy(&self, p: &DVector<f64>) -> f64 {
        p.iter()
            .zip(&self.log_weights)
            .filter(|(&pa, _)| pa > 0.0)
            .map(|(&pa, &lq)| pa * (pa.ln() - lq))
            .sum()
    }
}

/// Bracketing and bisection controls for [`crossing_time`].
#[derive(Clone, Copy, Debug)]
pub struct CrossingOptions {
    pub t_max: f64,
    /// Relative width of the final bracket.
    pub rel_tol: f64,
}

impl Default for CrossingOptions {
    fn default() -> Self {
        Self {
            t_max: 1e6,
            rel_tol: 1e-6,
        }
    }
}

/// Earliest time at which `S(ρ(t)‖ρ_β)` falls to `threshold`.
///
/// Times double from a thousandth of the fastest exit time until the
/// threshold is met, and the last bracket is bisected.
pub fn crossing_time(
    r: &RateMatrix,
    rho0: &DVector<f64>,
    target: &GibbsState,
    threshold: f64,
    opts: &CrossingOptions,
) -> Result<f64> {
    if !(threshold > 0.0) {
        return domain(format!("threshold {threshold} must be positive"));
    }
    let entropy = |t: f64| -> Result<f64> { Ok(target.relative_entropy(&propagate(r, rho0, t)?)) };
    if entropy(0.0)? <= threshold {
        return Ok(0.0);
    }
    let fastest = r.total().diagonal().amax();
    if fastest == 0.0 {
        return Err(Error::Timeout {
            threshold,
            t_max: opts.t_max,
            final_entropy: entropy(0.0)?,
        });
    }
    let mut lo = 0.0;
    let mut hi = 1e-3 / fastest;
    loop {
        let s = entropy(hi)?;
        if s <= threshold {
            break;
        }
        if hi >= opts.t_max {
            return Err(Error::Timeout {
                threshold,
                t_max: opts.t_max,
                final_entropy: s,
            });
        }
        lo = hi;
        hi = (2.0 * hi).min(opts.t_max);
    }
    while hi - lo > opts.rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if entropy(mid)? <= threshold {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Clone, Debug)]
pub struct TrajectoryResult {
    pub times: Vec<f64>,
    pub populations: Vec<DVector<f64>>,
    pub relative_entropy: Vec<f64>,
    /// Threshold crossing, if reached before the time limit.
    pub crossing: Option<f64>,
}

/// Populations and relative entropy to `target` on the given time grid.
pub fn trajectory(
    r: &RateMatrix,
    rho0: &DVector<f64>,
    target: &GibbsState,
    times: &[f64],
    threshold: f64,
    opts: &CrossingOptions,
) -> Result<TrajectoryResult> {
    let populations = times
        .iter()
        .map(|&t| propagate(r, rho0, t))
        .collect::<Result<Vec<_>>>()?;
    let relative_entropy = populations.iter().map(|p| target.relative_entropy(p)).collect();
    let crossing = match crossing_time(r, rho0, target, threshold, opts) {
        Ok(t) => Some(t),
        Err(Error::Timeout { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(TrajectoryResult {
        times: times.to_vec(),
        populations,
        relative_entropy,
        crossing,
    })
}

/// Relaxation of the sector from one Gibbs state to another under a single
/// Ohmic reservoir coupled through `J_x`.
#[derive(Clone, Debug)]
pub struct Thermalization {
    pub rates: RateMatrix,
    pub initial: DVector<f64>,
    pub target: GibbsState,
}

impl Thermalization {
    pub fn new(n: u32, omega: f64, cutoff: f64, beta_initial: f64, beta_final: f64) -> Result<Self> {
        let sector = SpinSector::new(n, omega)?;
        let bath = ReservoirSpec::new(
            Role::Cold,
            CouplingOperator::Jx,
            SpectralDensity::ohmic(cutoff)?,
            beta_final,
        )?;
        let rates = build_rate_matrix(&sector, &[bath])?;
        let initial = GibbsState::new(sector.energies(), beta_initial)?.probabilities();
        let target = GibbsState::new(sector.energies(), beta_final)?;
        Ok(Self {
            rates,
            initial,
            target,
        })
    }

    /// First time with `S(ρ(t)‖ρ_{β_f}) ≤ threshold`.
    pub fn time(&self, threshold: f64, opts: &CrossingOptions) -> Result<f64> {
        crossing_time(&self.rates, &self.initial, &self.target, threshold, opts)
    }

    pub fn trajectory(&self, times: &[f64], threshold: f64, opts: &CrossingOptions) -> Result<TrajectoryResult> {
        trajectory(&self.rates, &self.initial, &self.target, times, threshold, opts)
    }
}

/// [`Thermalization::time`] with `t_max = 10⁶/Ω`.
pub fn thermalization_time(
    n: u32,
    omega: f64,
    cutoff: f64,
    beta_initial: f64,
    beta_final: f64,
    threshold: f64,
) -> Result<f64> {
    let opts = CrossingOptions {
        t_max: 1e6 / omega,
        ..Default::default()
    };
    Thermalization::new(n, omega, cutoff, beta_initial, beta_final)?.time(threshold, &opts)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return domain(format!("log-log fit needs two or more paired points, got {} and {}", x.len(), y.len()));
    }
    if x.iter().chain(y).any(|&v| !(v > 0.0 && v.is_finite())) {
        return domain("log-log fit needs positive finite data");
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return domain("log-log fit needs distinct abscissae");
    }
    Ok(sxy / sxx)
}

/// One downward jump `a → a − 1` of the zero-temperature cascade.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaitingStep {
    pub from: HalfInt,
    /// `(2a − 1)Ω`
    pub frequency: f64,
    pub rate: f64,
}

impl WaitingStep {
    /// `R e^{−Rτ}`
    pub fn density(&self, tau: f64) -> f64 {
        if tau < 0.0 {
            0.0
        } else {
            self.rate * (-self.rate * tau).exp()
        }
    }

    pub fn mean(&self) -> f64 {
        1.0 / self.rate
    }
}

/// Jumps from `a0` down to `1/2` with rates `Γ((2a−1)Ω)[N/2(N/2+1) − a(a−1)]/4`.
pub fn waiting_steps<G: Fn(f64) -> f64>(n: u32, omega: f64, gamma: G, a0: HalfInt) -> Result<Vec<WaitingStep>> {
    if n.is_multiple_of(2) || n < 3 {
        return domain(format!("N = {n} must be odd and at least 3"));
    }
    let t0 = a0.twice();
    if t0 < 3 || t0 > i64::from(n) {
        return domain(format!("starting level {a0} outside 3/2..={n}/2"));
    }
    let nn = i64::from(n);
    (1..=(t0 - 1) / 2)
        .rev()
        .map(|k| {
            let t = 2 * k + 1;
            let from = HalfInt::from_twice(t)?;
            // N/2(N/2+1) − a(a−1) in quarters
            let factor = (nn * (nn + 2) - t * (t - 2)) as f64 / 4.0;
            let frequency = f64::from((t - 1) as i32) * omega;
            let g = gamma(frequency);
            if !(g > 0.0 && g.is_finite()) {
                return domain(format!("Γ({frequency}) = {g} must be positive"));
            }
            Ok(WaitingStep {
                from,
                frequency,
                rate: g * factor / 4.0,
            })
        })
        .collect()
}

/// Mean time to reach the ground state from `a0` at zero temperature.
pub fn waiting_time_mean<G: Fn(f64) -> f64>(n: u32, omega: f64, gamma: G, a0: HalfInt) -> Result<f64> {
    Ok(waiting_steps(n, omega, gamma, a0)?.iter().map(WaitingStep::mean).sum())
}
