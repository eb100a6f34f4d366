//! A working medium of `N` spins together with its reservoirs.

use crate::error::{domain, Result};
use crate::fcs::{self, FcsResult};
use crate::liouvillian::{build_rate_matrix, RateMatrix};
use crate::reservoir::{ReservoirSpec, Role};
use crate::spin::SpinSector;
use crate::thermo::{self, ThermoReport};

#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub n: u32,
    pub omega: f64,
    pub reservoirs: Vec<ReservoirSpec>,
}

impl Model {
    /// Resonant refrigerator in units of `Ω = 1`: centers `2, 6, 4`, widths
    /// `0.1, 0.1, 10⁻³`, inverse temperatures `2, 1, 10⁻³`, unit peaks.
    pub fn standard(n: u32) -> Result<Self> {
        Ok(Self {
            n,
            omega: 1.0,
            reservoirs: vec![
                ReservoirSpec::peaked(Role::Cold, 1.0, 2.0, 0.1, 2.0)?,
                ReservoirSpec::peaked(Role::Hot, 1.0, 6.0, 0.1, 1.0)?,
                ReservoirSpec::peaked(Role::Work, 1.0, 4.0, 1e-3, 1e-3)?,
            ],
        })
    }

    pub fn reservoir(&self, role: Role) -> Option<&ReservoirSpec> {
        self.reservoirs.iter().find(|r| r.role == role)
    }

    pub fn reservoir_mut(&mut self, role: Role) -> Option<&mut ReservoirSpec> {
        self.reservoirs.iter_mut().find(|r| r.role == role)
    }

    pub fn without(mut self, role: Role) -> Self {
        self.reservoirs.retain(|r| r.role != role);
        self
    }

    pub fn sector(&self) -> Result<SpinSector> {
        SpinSector::new(self.n, self.omega)
    }

    pub fn rate_matrix(&self) -> Result<RateMatrix> {
        if self.reservoirs.is_empty() {
            return domain("model has no reservoirs");
        }
        build_rate_matrix(&self.sector()?, &self.reservoirs)
    }

    pub fn solve(&self, counted: Role) -> Result<FcsResult> {
        fcs::solve(&self.rate_matrix()?, counted)
    }

    /// Solution counting the cold reservoir, with its performance report.
    pub fn report(&self) -> Result<(FcsResult, ThermoReport)> {
        let r = self.rate_matrix()?;
        let f = fcs::solve(&r, Role::Cold)?;
        let t = thermo::thermo_report(&r, &f)?;
        Ok((f, t))
    }
}
