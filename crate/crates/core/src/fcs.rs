//! Stationary state and long-time counting statistics of a Pauli generator.
//!
//! Both linear systems are solved in their rectangular augmented form
//!
//! ```text
//! [ R ] ρ̄ = [0]        [ R ] σ̃ = [ Ī ρ̄ − W₁ρ̄ ]
//! [1ᵀ]      [1]        [1ᵀ]      [     0     ]
//! ```
//!
//! by SVD least squares. The rows of `R` are first scaled by the inverse
//! exit rate of each level; the systems are consistent, so the scaling
//! leaves the solution unchanged but keeps slowly decaying levels from
//! being swamped by fast ones.
//!
//! With `W₁ = −iR'(0)` and `W₂ = −R''(0)` the auxiliary vector is
//! `σ̄ = iσ̃`, and the noise reads `S̄ = 1ᵀW₂ρ̄ + 2·1ᵀW₁σ̃`. Everything here
//! is real; the complex dressed generator appears only in
//! [`cgf_dominant_eigenvalue`], which serves as an independent check.

use nalgebra::{Complex, DMatrix, DVector, SVD};

use crate::error::{Error, Result};
use crate::liouvillian::{counting_moment_matrices, RateMatrix};
use crate::reservoir::Role;

/// Singular values of the equilibrated generator, normalized by the largest,
/// below this count towards the nullspace.
pub const NULLSPACE_THRESHOLD: f64 = 1e-8;
/// Allowed `‖Rρ̄‖∞ / ‖R‖∞`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
/// Populations below `−NEGATIVITY_TOLERANCE` are treated as a failed solve.
pub const NEGATIVITY_TOLERANCE: f64 = 1e-10;
const REFINEMENT_STEPS: usize = 2;

#[derive(Clone, Debug)]
pub struct SteadyState {
    pub populations: DVector<f64>,
    /// `‖Rρ̄‖∞ / ‖R‖∞`
    pub residual: f64,
    pub nullity: usize,
    /// Two smallest normalized singular values of the equilibrated `R`.
    pub smallest_singular_values: Vec<f64>,
}

/// Factorized augmented system shared by the stationary and auxiliary
/// solves.
struct Augmented {
    svd: SVD<f64, nalgebra::Dyn, nalgebra::Dyn>,
    row_scale: DVector<f64>,
}

impl Augmented {
    fn new(r: &RateMatrix) -> Result<(Self, usize, Vec<f64>)> {
        let dim = r.dim();
        let total = r.total();
        let row_scale = DVector::from_fn(dim, |a, _| {
            let exit = -total[(a, a)];
            if exit > 0.0 {
                1.0 / exit
            } else {
                let inflow = total.row(a).amax();
                if inflow > 0.0 {
                    1.0 / inflow
                } else {
                    1.0
                }
            }
        });
        let scaled = DMatrix::from_fn(dim, dim, |a, b| row_scale[a] * total[(a, b)]);

        let singular = scaled.clone().singular_values();
        let largest = singular.max();
        let mut normalized: Vec<f64> = singular
            .iter()
            .map(|s| if largest > 0.0 { s / largest } else { 0.0 })
            .collect();
        normalized.sort_by(f64::total_cmp);
        let nullity = normalized
            .iter()
            .filter(|&&s| s < NULLSPACE_THRESHOLD)
            .count();
        let smallest = normalized.iter().take(2).copied().collect::<Vec<_>>();

        let mut augmented = DMatrix::zeros(dim + 1, dim);
        augmented.view_mut((0, 0), (dim, dim)).copy_from(&scaled);
        augmented.row_mut(dim).fill(1.0);
        let svd = SVD::new(augmented, true, true);
        Ok((Self { svd, row_scale }, nullity, smallest))
    }

    fn solve_once(&self, rhs_rows: &DVector<f64>, trace: f64) -> Result<DVector<f64>> {
        let dim = rhs_rows.len();
        let mut rhs = DVector::zeros(dim + 1);
        for a in 0..dim {
            rhs[a] = self.row_scale[a] * rhs_rows[a];
        }
        rhs[dim] = trace;
        self.svd
            .solve(&rhs, 0.0)
            .map_err(|e| Error::Numerical(format!("augmented least squares: {e}")))
    }

    /// Least-squares solve followed by iterative refinement against the
    /// unscaled generator.
    fn solve(&self, r: &RateMatrix, rhs_rows: &DVector<f64>, trace: f64) -> Result<DVector<f64>> {
        let mut x = self.solve_once(rhs_rows, trace)?;
        for _ in 0..REFINEMENT_STEPS {
            let defect = rhs_rows - r.total() * &x;
            let correction = self.solve_once(&defect, trace - x.sum())?;
            x += correction;
        }
        Ok(x)
    }
}

fn residual_norm(r: &RateMatrix, x: &DVector<f64>, rhs: &DVector<f64>) -> f64 {
    let scale = r.total().abs().row_sum().max().max(f64::MIN_POSITIVE);
    (r.total() * x - rhs).amax() / scale
}

/// Full counting statistics for one generator.
#[derive(Clone, Debug)]
pub struct FcsResult {
    pub populations: DVector<f64>,
    /// Stationary energy current out of each reservoir into the system.
    pub currents: Vec<(Role, f64)>,
    pub counted: Role,
    /// Long-time noise of the counted reservoir's energy current.
    pub noise: f64,
    /// Real auxiliary vector `σ̃ = −iσ̄`.
    pub auxiliary: DVector<f64>,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub steady_residual: f64,
    pub auxiliary_residual: f64,
    pub nullity: usize,
    pub smallest_singular_values: Vec<f64>,
}

impl FcsResult {
    pub fn current(&self, role: Role) -> Option<f64> {
        self.currents
            .iter()
            .find(|(r, _)| *r == role)
            .map(|&(_, c)| c)
    }

    pub fn counted_current(&self) -> f64 {
        self.current(self.counted).unwrap_or(0.0)
    }
}

/// Stationary solver holding the factorized augmented system.
pub struct Fcs<'a> {
    rates: &'a RateMatrix,
    system: Augmented,
    steady: SteadyState,
}

impl<'a> Fcs<'a> {
    pub fn new(rates: &'a RateMatrix) -> Result<Self> {
        let (system, nullity, smallest) = Augmented::new(rates)?;
        if nullity != 1 {
            return Err(Error::Degenerate {
                nullity,
                singular_values: smallest,
            });
        }
        let dim = rates.dim();
        let zeros = DVector::zeros(dim);
        let populations = system.solve(rates, &zeros, 1.0)?;
        let residual = residual_norm(rates, &populations, &zeros);
        if !(residual <= RESIDUAL_TOLERANCE) {
            return Err(Error::Numerical(format!(
                "steady-state residual {residual:e} above {RESIDUAL_TOLERANCE:e}"
            )));
        }
        if let Some(min) = populations.iter().copied().reduce(f64::min) {
            if min < -NEGATIVITY_TOLERANCE {
                return Err(Error::Numerical(format!(
                    "steady-state population {min:e} is negative"
                )));
            }
        }
        Ok(Self {
            rates,
            system,
            steady: SteadyState {
                populations,
                residual,
                nullity,
                smallest_singular_values: smallest,
            },
        })
    }

    pub fn steady_state(&self) -> &SteadyState {
        &self.steady
    }

    pub fn populations(&self) -> &DVector<f64> {
        &self.steady.populations
    }

    /// `Ī = 1ᵀW₁ρ̄`
    pub fn current(&self, role: Role) -> Result<f64> {
        let c = counting_moment_matrices(self.rates, role)?;
        Ok((&c.first * self.populations()).sum())
    }

    pub fn currents(&self) -> Result<Vec<(Role, f64)>> {
        self.rates
            .roles()
            .map(|role| Ok((role, self.current(role)?)))
            .collect()
    }

    /// Noise and auxiliary vector of reservoir `role`.
    pub fn noise(&self, role: Role) -> Result<(f64, DVector<f64>, f64)> {
        let c = counting_moment_matrices(self.rates, role)?;
        let rho = self.populations();
        let w1_rho = &c.first * rho;
        let current = w1_rho.sum();
        let rhs = rho * current - &w1_rho;
        let aux = self.system.solve(self.rates, &rhs, 0.0)?;
        let aux_residual = residual_norm(self.rates, &aux, &rhs);
        let noise = (&c.second * rho).sum() + 2.0 * (&c.first * &aux).sum();
        Ok((noise, aux, aux_residual))
    }

    pub fn result(&self, counted: Role) -> Result<FcsResult> {
        let currents = self.currents()?;
        let (noise, auxiliary, auxiliary_residual) = self.noise(counted)?;
        Ok(FcsResult {
            populations: self.populations().clone(),
            currents,
            counted,
            noise,
            auxiliary,
            diagnostics: Diagnostics {
                steady_residual: self.steady.residual,
                auxiliary_residual,
                nullity: self.steady.nullity,
                smallest_singular_values: self.steady.smallest_singular_values.clone(),
            },
        })
    }
}

/// Stationary populations of `r`.
pub fn steady_state(r: &RateMatrix) -> Result<SteadyState> {
    Ok(Fcs::new(r)?.steady)
}

/// Stationary energy current from reservoir `role` into the system.
pub fn energy_current(r: &RateMatrix, role: Role) -> Result<f64> {
    Fcs::new(r)?.current(role)
}

/// Long-time noise of the energy current from reservoir `role`.
pub fn energy_noise(r: &RateMatrix, role: Role) -> Result<f64> {
    Ok(Fcs::new(r)?.noise(role)?.0)
}

/// Stationary populations, all currents, and the noise of `counted`.
pub fn solve(r: &RateMatrix, counted: Role) -> Result<FcsResult> {
    Fcs::new(r)?.result(counted)
}

/// Eigenvalue of the dressed generator `R(χ)` (reservoir `role` counted)
/// on the branch through `λ(0) = 0`.
///
/// The branch is located from the complex Schur form and refined by inverse
/// iteration. The refined value is read off as `1ᵀ[R(χ) − R(0)]v / 1ᵀv`,
/// which avoids cancellation against the large diagonal.
pub fn cgf_dominant_eigenvalue(r: &RateMatrix, role: Role, chi: f64) -> Result<Complex<f64>> {
    let block = r
        .block(role)
        .ok_or_else(|| Error::Domain(format!("no {role} reservoir in the rate matrix")))?;
    let dim = r.dim();
    let dressing = DMatrix::from_fn(dim, dim, |a, b| {
        let phase = chi * r.frequency(a, b);
        // e^{iφ} − 1 = 2i sin(φ/2) e^{iφ/2}
        let half = 0.5 * phase;
        Complex::new(0.0, 2.0 * half.sin()) * Complex::from_polar(1.0, half) * block.rates[(a, b)]
    });
    let generator = r.total().map(|x| Complex::new(x, 0.0)) + &dressing;
    let scale = r.total().abs().row_sum().max().max(f64::MIN_POSITIVE);

    let eigenvalues = generator
        .clone()
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::Oracle("Schur form did not triangularize".into()))?;
    let mut sorted: Vec<Complex<f64>> = eigenvalues.iter().copied().collect();
    sorted.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let mut lambda = sorted[0];
    if let Some(second) = sorted.get(1) {
        if (second - lambda).norm() <= 1e-10 * scale {
            return Err(Error::Oracle(format!(
                "eigenvalues {lambda} and {second} within tracking tolerance"
            )));
        }
    }

    let mut v = DVector::from_element(dim, Complex::new(1.0, 0.0));
    for _ in 0..4 {
        let mut shift = lambda;
        let mut next = None;
        for _ in 0..3 {
            let shifted = &generator - DMatrix::from_diagonal_element(dim, dim, shift);
            next = shifted.lu().solve(&v);
            if next.is_some() {
                break;
            }
            shift += Complex::new(1e-13 * scale, 0.0);
        }
        let w = next.ok_or_else(|| Error::Oracle("inverse iteration failed".into()))?;
        let norm = w.sum();
        if norm.norm() == 0.0 {
            return Err(Error::Oracle("eigenvector has zero trace".into()));
        }
        v = w / norm;
        lambda = (&dressing * &v).sum();
    }
    Ok(lambda)
}

/// Current and noise of reservoir `role` from central differences of the
/// dressed-generator eigenvalue with step `h`.
pub fn cgf_cumulants(r: &RateMatrix, role: Role, h: f64) -> Result<(f64, f64)> {
    let plus = cgf_dominant_eigenvalue(r, role, h)?;
    let minus = cgf_dominant_eigenvalue(r, role, -h)?;
    let zero = cgf_dominant_eigenvalue(r, role, 0.0)?;
    // λ(χ) = iχĪ − χ²S̄/2 + …
    let current = ((plus - minus) / Complex::new(0.0, 2.0 * h)).re;
    let noise = -((plus - zero * 2.0 + minus) / (h * h)).re;
    Ok((current, noise))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouvillian::{build_rate_matrix, RateBlock};
    use crate::reservoir::ReservoirSpec;
    use crate::spin::SpinSector;

    fn two_state(up: f64, down: f64) -> RateMatrix {
        let rates = DMatrix::from_row_slice(2, 2, &[0.0, down, up, 0.0]);
        let beta = (down / up).ln() / 2.0;
        RateMatrix::from_blocks(
            vec![0.0, 2.0],
            vec![RateBlock {
                role: Role::Cold,
                beta,
                rates,
            }],
        )
        .unwrap()
    }

    fn fig2(n: u32) -> RateMatrix {
        let sector = SpinSector::new(n, 1.0).unwrap();
        let specs = [
            ReservoirSpec::peaked(Role::Cold, 1.0, 2.0, 0.1, 2.0).unwrap(),
            ReservoirSpec::peaked(Role::Hot, 1.0, 6.0, 0.1, 1.0).unwrap(),
            ReservoirSpec::peaked(Role::Work, 1.0, 4.0, 1e-3, 1e-3).unwrap(),
        ];
        build_rate_matrix(&sector, &specs).unwrap()
    }

    #[test]
    fn two_state_balance() {
        let (u, d) = (0.3, 1.7);
        let s = steady_state(&two_state(u, d)).unwrap();
        assert!((s.populations[0] - d / (u + d)).abs() < 1e-15);
        assert!((s.populations[1] - u / (u + d)).abs() < 1e-15);
        assert_eq!(s.nullity, 1);
    }

    #[test]
    fn single_reservoir_relaxes_to_gibbs() {
        let sector = SpinSector::new(13, 1.0).unwrap();
        let beta = 0.7;
        let spec = ReservoirSpec::peaked(Role::Cold, 1.0, 3.0, 2.0, beta).unwrap();
        let r = build_rate_matrix(&sector, &[spec]).unwrap();
        let s = steady_state(&r).unwrap();
        let z: f64 = sector.energies().iter().map(|e| (-beta * e).exp()).sum();
        for (p, e) in s.populations.iter().zip(sector.energies()) {
            let g = (-beta * e).exp() / z;
            assert!((p - g).abs() < 1e-12 * g.max(1e-3), "{p} vs {g}");
        }
    }

    #[test]
    fn fig2_populations_concentrate_low() {
        let s = steady_state(&fig2(31)).unwrap();
        let low: f64 = s.populations.iter().take(3).sum();
        let high: f64 = s.populations.iter().skip(3).sum();
        assert!(high < low);
        assert!((s.populations.sum() - 1.0).abs() < 1e-12);
        assert!(s.populations.iter().all(|&p| p >= -1e-12));
    }

    #[test]
    fn isolated_level_is_degenerate() {
        let rates = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let r = RateMatrix::from_blocks(
            vec![0.0, 1.0, 3.0],
            vec![RateBlock {
                role: Role::Cold,
                beta: 0.0,
                rates,
            }],
        )
        .unwrap();
        match steady_state(&r) {
            Err(Error::Degenerate { nullity, .. }) => assert_eq!(nullity, 2),
            other => panic!("expected degeneracy, got {other:?}"),
        }
    }

    #[test]
    fn equilibrium_has_no_current_but_noise() {
        let sector = SpinSector::new(7, 1.0).unwrap();
        let beta = 1.3;
        let specs = [
            ReservoirSpec::peaked(Role::Cold, 1.0, 2.0, 0.5, beta).unwrap(),
            ReservoirSpec::peaked(Role::Hot, 0.5, 6.0, 0.5, beta).unwrap(),
            ReservoirSpec::peaked(Role::Work, 2.0, 4.0, 0.5, beta).unwrap(),
        ];
        let r = build_rate_matrix(&sector, &specs).unwrap();
        let f = solve(&r, Role::Cold).unwrap();
        for (_, c) in &f.currents {
            assert!(c.abs() < 1e-12);
        }
        assert!(f.noise > 1e-3);
    }

    #[test]
    fn zero_temperature_ground_state_is_silent() {
        let sector = SpinSector::new(9, 1.0).unwrap();
        let spec = ReservoirSpec::peaked(Role::Cold, 1.0, 2.0, 0.5, f64::INFINITY).unwrap();
        let r = build_rate_matrix(&sector, &[spec]).unwrap();
        let f = solve(&r, Role::Cold).unwrap();
        assert!((f.populations[0] - 1.0).abs() < 1e-14);
        assert!(f.counted_current().abs() < 1e-14);
        assert!(f.noise.abs() < 1e-14);
    }

    #[test]
    fn first_law_and_auxiliary_trace() {
        for n in [5, 11, 31, 51] {
            let f = solve(&fig2(n), Role::Cold).unwrap();
            let sum: f64 = f.currents.iter().map(|(_, c)| c).sum();
            let max = f.currents.iter().map(|(_, c)| c.abs()).fold(0.0, f64::max);
            assert!(sum.abs() <= 1e-10 * max, "N={n}: {sum:e}");
            assert!(f.auxiliary.sum().abs() < 1e-12);
            assert!(f.noise >= 0.0);
        }
    }

    #[test]
    fn oracle_at_zero_field() {
        let lambda = cgf_dominant_eigenvalue(&fig2(11), Role::Cold, 0.0).unwrap();
        assert!(lambda.norm() < 1e-14);
    }

    #[test]
    fn two_state_noise_single_reservoir_vanishes() {
        // net energy exchanged with a lone reservoir is bounded
        let f = solve(&two_state(0.4, 1.1), Role::Cold).unwrap();
        assert!(f.noise.abs() < 1e-14);
    }

    #[test]
    fn two_reservoir_two_state_against_oracle() {
        let (u1, d1, u2, d2) = (0.1, 1.2, 0.7, 0.9);
        let block = |role, u, d| RateBlock {
            role,
            beta: 0.0,
            rates: DMatrix::from_row_slice(2, 2, &[0.0, d, u, 0.0]),
        };
        let r = RateMatrix::from_blocks(
            vec![0.0, 2.0],
            vec![block(Role::Cold, u1, d1), block(Role::Work, u2, d2)],
        )
        .unwrap();
        let f = solve(&r, Role::Cold).unwrap();
        let expected = 2.0 * (u1 * d2 - d1 * u2) / (u1 + u2 + d1 + d2);
        assert!((f.counted_current() - expected).abs() < 1e-14);
        let (i, s) = cgf_cumulants(&r, Role::Cold, 1e-4).unwrap();
        assert!(((i - expected) / expected).abs() < 1e-6);
        assert!(((s - f.noise) / f.noise).abs() < 1e-6);
    }
}
