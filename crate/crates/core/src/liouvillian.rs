//! Pauli rate matrices assembled from sector matrix elements and reservoir
//! kernels, and the real counting-moment matrices of one reservoir.
//!
//! Populations are column vectors; `R[(a, b)]` is the rate from level `b`
//! to level `a`, so each column of the total generator sums to zero.

use nalgebra::DMatrix;

use crate::error::{domain, Error, Result};
use crate::reservoir::{ReservoirSpec, Role};
use crate::spin::SpinSector;

/// Off-diagonal rates contributed by one reservoir.
#[derive(Clone, Debug)]
pub struct RateBlock {
    pub role: Role,
    /// Inverse temperature of the reservoir (`0` for an infinite-temperature
    /// drive such as a resonant laser).
    pub beta: f64,
    /// `rates[(a, b)]`: transition `b → a`; zero diagonal.
    pub rates: DMatrix<f64>,
}

/// Total generator with its per-reservoir decomposition.
#[derive(Clone, Debug)]
pub struct RateMatrix {
    energies: Vec<f64>,
    blocks: Vec<RateBlock>,
    total: DMatrix<f64>,
}

impl RateMatrix {
    /// Assembles the generator from off-diagonal blocks over the given level
    /// energies. Diagonals of the blocks are ignored; the total diagonal is
    /// set so that every column sums to zero.
    pub fn from_blocks(energies: Vec<f64>, mut blocks: Vec<RateBlock>) -> Result<Self> {
        let dim = energies.len();
        if dim == 0 {
            return domain("rate matrix needs at least one level");
        }
        let mut total = DMatrix::zeros(dim, dim);
        for block in blocks.iter_mut() {
            if block.rates.shape() != (dim, dim) {
                return domain(format!(
                    "{} block has shape {:?}, expected {dim}×{dim}",
                    block.role,
                    block.rates.shape()
                ));
            }
            block.rates.fill_diagonal(0.0);
            if block.rates.iter().any(|&r| !(r >= 0.0 && r.is_finite())) {
                return Err(Error::Numerical(format!(
                    "{} block has negative or non-finite rates",
                    block.role
                )));
            }
            total += &block.rates;
        }
        for (i, a) in blocks.iter().enumerate() {
            if blocks[..i].iter().any(|b| b.role == a.role) {
                return domain(format!("reservoir role {} appears twice", a.role));
            }
        }
        for b in 0..dim {
            let outflow: f64 = total.column(b).sum();
            total[(b, b)] = -outflow;
        }
        Ok(Self {
            energies,
            blocks,
            total,
        })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// `ω_ab = E_a − E_b`: energy gained by the system in the jump `b → a`.
    pub fn frequency(&self, a: usize, b: usize) -> f64 {
        self.energies[a] - self.energies[b]
    }

    pub fn total(&self) -> &DMatrix<f64> {
        &self.total
    }

    pub fn blocks(&self) -> &[RateBlock] {
        &self.blocks
    }

    pub fn block(&self, role: Role) -> Option<&RateBlock> {
        self.blocks.iter().find(|b| b.role == role)
    }

    pub fn roles(&self) -> impl Iterator<Item = Role> + '_ {
        self.blocks.iter().map(|b| b.role)
    }

    /// Generator with the given reservoir's block removed.
    pub fn without(&self, role: Role) -> Result<Self> {
        let blocks = self
            .blocks
            .iter()
            .filter(|b| b.role != role)
            .cloned()
            .collect();
        Self::from_blocks(self.energies.clone(), blocks)
    }

    /// Largest `|Σ_a R_ab|` relative to the column's absolute sum.
    pub fn column_sum_defect(&self) -> f64 {
        self.total
            .column_iter()
            .map(|c| {
                let scale: f64 = c.iter().map(|x| x.abs()).sum();
                if scale == 0.0 {
                    0.0
                } else {
                    c.sum().abs() / scale
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Builds `R^ν_ab = γ_ν(E_b − E_a)·|⟨v_a⁺|A_ν|v_b⁺⟩|²` for every reservoir.
///
/// Diagonal coupling elements are zero-frequency and never enter.
pub fn build_rate_matrix(sector: &SpinSector, reservoirs: &[ReservoirSpec]) -> Result<RateMatrix> {
    let dim = sector.dim();
    let energies = sector.energies().to_vec();
    let min_gap = 2.0 * sector.omega() - 1e-12;
    let mut blocks = Vec::with_capacity(reservoirs.len());
    for spec in reservoirs {
        let op = sector.coupling(spec.coupling);
        let mut rates = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            for a in 0..dim {
                if a == b {
                    continue;
                }
                let element = op[(a, b)];
                if element == 0.0 {
                    continue;
                }
                let omega = energies[b] - energies[a];
                if omega.abs() < min_gap {
                    return Err(Error::Numerical(format!(
                        "transition frequency {omega:e} between levels {a} and {b} below 2Ω"
                    )));
                }
                rates[(a, b)] = spec.gamma_rate(omega)? * element * element;
            }
        }
        blocks.push(RateBlock {
            role: spec.role,
            beta: spec.beta,
            rates,
        });
    }
    RateMatrix::from_blocks(energies, blocks)
}

/// Real energy-moment matrices of one reservoir's jumps:
/// `first = −i R'(0)` and `second = −R''(0)`, with `R(χ)` dressing that
/// reservoir's rates by `exp(iχω_ab)`.
#[derive(Clone, Debug)]
pub struct CountingMatrices {
    pub role: Role,
    /// `ω_ab R^ν_ab`
    pub first: DMatrix<f64>,
    /// `ω_ab² R^ν_ab`
    pub second: DMatrix<f64>,
}

/// Counting matrices for reservoir `role`. Energy entering the system
/// counts positive.
pub fn counting_moment_matrices(r: &RateMatrix, role: Role) -> Result<CountingMatrices> {
    let block = r
        .block(role)
        .ok_or_else(|| Error::Domain(format!("no {role} reservoir in the rate matrix")))?;
    let dim = r.dim();
    let first = DMatrix::from_fn(dim, dim, |a, b| r.frequency(a, b) * block.rates[(a, b)]);
    let second = DMatrix::from_fn(dim, dim, |a, b| {
        r.frequency(a, b).powi(2) * block.rates[(a, b)]
    });
    Ok(CountingMatrices {
        role,
        first,
        second,
    })
}
