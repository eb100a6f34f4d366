//! Even-parity, maximum angular momentum sector of `H = Ω J_z²` for an odd
//! number of two-level systems.
//!
//! The sector is spanned by `|v_a⁺⟩ = (|j,a⟩ + |j,−a⟩)/√2` with
//! `a ∈ {1/2, 3/2, …, N/2}` and `j = N/2`. Internally level `a` is stored at
//! index `k = a − 1/2`.
//!
//! The coupling matrices are produced by projecting the full Dicke-basis
//! `J_x` (and its square) onto the sector; [`closed_form_jx`] and
//! [`closed_form_jx2`] give the ladder-coefficient expressions for the
//! off-diagonal elements and are used to cross-check the projection.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{domain, Result};

/// A half-integer, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i64);

impl HalfInt {
    /// `twice / 2`; `twice` must be odd.
    pub fn from_twice(twice: i64) -> Result<Self> {
        if twice % 2 == 0 {
            return domain(format!("{twice}/2 is not a half-integer"));
        }
        Ok(Self(twice))
    }

    /// The sector label stored at index `k`, i.e. `k + 1/2`.
    pub const fn from_index(k: usize) -> Self {
        Self(2 * k as i64 + 1)
    }

    pub const fn twice(self) -> i64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Sector index `a − 1/2` for positive labels.
    pub fn index(self) -> Option<usize> {
        (self.0 > 0).then(|| ((self.0 - 1) / 2) as usize)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2", self.0)
    }
}

/// Direction of a collective ladder operator `J_±`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Raise,
    Lower,
}

/// System operator through which a reservoir couples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CouplingOperator {
    /// `J_x`
    Jx,
    /// `J_x² / N`
    JxSquaredOverN,
}

fn check_odd(n: u32) -> Result<()> {
    if n.is_multiple_of(2) || n == 0 {
        return domain(format!("N = {n} must be an odd positive integer"));
    }
    Ok(())
}

/// Clebsch-Gordan factor `α_a^± = sqrt(j(j+1) − a(a±1))` with `j = N/2`.
///
/// Evaluated from integers so that the boundary values vanish exactly.
pub fn ladder_coefficient(n: u32, a: HalfInt, sign: Ladder) -> Result<f64> {
    check_odd(n)?;
    let n = i64::from(n);
    let t = a.twice();
    if t.abs() > n {
        return domain(format!("|a| = {} exceeds N/2 = {}", a, n as f64 / 2.0));
    }
    // 4·[j(j+1) − a(a±1)] = N(N+2) − t(t±2)
    let shifted = match sign {
        Ladder::Raise => t * (t + 2),
        Ladder::Lower => t * (t - 2),
    };
    let four_alpha_sq = n * (n + 2) - shifted;
    Ok((four_alpha_sq as f64 / 4.0).sqrt())
}

/// Full `(N+1)×(N+1)` matrix of `J_x` in the Dicke basis `|j,m⟩`, ordered
/// by increasing `m`.
pub fn dicke_jx(n: u32) -> Result<DMatrix<f64>> {
    check_odd(n)?;
    let size = n as usize + 1;
    let mut jx = DMatrix::zeros(size, size);
    for i in 0..size - 1 {
        let m = HalfInt(2 * i as i64 - i64::from(n));
        // ⟨m+1| J_x |m⟩ = α_m^+ / 2
        let element = 0.5 * ladder_coefficient(n, m, Ladder::Raise)?;
        jx[(i + 1, i)] = element;
        jx[(i, i + 1)] = element;
    }
    Ok(jx)
}

/// Columns are the even-parity vectors `|v_a⁺⟩` expressed in the Dicke basis.
fn even_parity_basis(n: u32) -> DMatrix<f64> {
    let size = n as usize + 1;
    let dim = size / 2;
    let mut basis = DMatrix::zeros(size, dim);
    let w = std::f64::consts::FRAC_1_SQRT_2;
    for k in 0..dim {
        // m = +a sits at index j + a = (N + 2k + 1)/2, m = −a at (N − 2k − 1)/2
        basis[((n as usize + 2 * k).div_ceil(2), k)] = w;
        basis[((n as usize - 2 * k - 1) / 2, k)] = w;
    }
    basis
}

/// Off-diagonal `⟨v_a⁺|J_x|v_b⁺⟩` from the ladder-coefficient formula.
/// Diagonal entries are left at zero.
pub fn closed_form_jx(n: u32) -> Result<DMatrix<f64>> {
    check_odd(n)?;
    let dim = (n as usize).div_ceil(2);
    let mut jx = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        let lb = HalfInt::from_index(b);
        if b + 1 < dim {
            jx[(b + 1, b)] = 0.5 * ladder_coefficient(n, lb, Ladder::Raise)?;
        }
        if b >= 1 {
            jx[(b - 1, b)] = 0.5 * ladder_coefficient(n, lb, Ladder::Lower)?;
        }
    }
    Ok(jx)
}

/// Off-diagonal `⟨v_a⁺|J_x²|v_b⁺⟩` from the ladder-coefficient formula,
/// including the fold `a = |b − 2|` that links `1/2` and `3/2`.
/// Diagonal entries are left at zero.
pub fn closed_form_jx2(n: u32) -> Result<DMatrix<f64>> {
    check_odd(n)?;
    let dim = (n as usize).div_ceil(2);
    let mut jx2 = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        let tb = HalfInt::from_index(b).twice();
        if b + 2 < dim {
            let up = ladder_coefficient(n, HalfInt(tb + 2), Ladder::Raise)?
                * ladder_coefficient(n, HalfInt(tb), Ladder::Raise)?;
            jx2[(b + 2, b)] += 0.25 * up;
        }
        // a = |b − 2|; for b = 1/2 the inner label b − 1 is −1/2
        let a = (((tb - 4).abs() - 1) / 2) as usize;
        if a < dim {
            let down = ladder_coefficient(n, HalfInt(tb - 2), Ladder::Lower)?
                * ladder_coefficient(n, HalfInt(tb), Ladder::Lower)?;
            jx2[(a, b)] += 0.25 * down;
        }
    }
    Ok(jx2)
}

/// The even-parity, maximum angular momentum sector for odd `N`.
#[derive(Clone, Debug)]
pub struct SpinSector {
    n: u32,
    omega: f64,
    energies: Vec<f64>,
    jx: DMatrix<f64>,
    jx2: DMatrix<f64>,
}

impl SpinSector {
    /// Builds the sector for `n ≥ 3` odd spins and energy scale `omega > 0`.
    pub fn new(n: u32, omega: f64) -> Result<Self> {
        check_odd(n)?;
        if n < 3 {
            return domain(format!("N = {n}: at least three spins are required"));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return domain(format!("Ω = {omega} must be positive and finite"));
        }
        let dim = (n as usize).div_ceil(2);
        let full = dicke_jx(n)?;
        let basis = even_parity_basis(n);
        let jx = basis.transpose() * &full * &basis;
        let jx2 = basis.transpose() * (&full * &full) * &basis;
        let energies = (0..dim)
            .map(|k| omega * HalfInt::from_index(k).value().powi(2))
            .collect();
        Ok(Self {
            n,
            omega,
            energies,
            jx,
            jx2,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// `E_a = Ω a²`, indexed by `a − 1/2`.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn labels(&self) -> impl Iterator<Item = HalfInt> {
        (0..self.dim()).map(HalfInt::from_index)
    }

    pub fn jx(&self) -> &DMatrix<f64> {
        &self.jx
    }

    pub fn jx2(&self) -> &DMatrix<f64> {
        &self.jx2
    }

    /// Matrix of the coupling operator within the sector.
    pub fn coupling(&self, op: CouplingOperator) -> DMatrix<f64> {
        match op {
            CouplingOperator::Jx => self.jx.clone(),
            CouplingOperator::JxSquaredOverN => &self.jx2 / f64::from(self.n),
        }
    }

    /// `⟨v_a⁺|A|v_b⁺⟩` for physical labels.
    pub fn element(&self, op: CouplingOperator, a: HalfInt, b: HalfInt) -> Option<f64> {
        let (i, j) = (a.index()?, b.index()?);
        if i >= self.dim() || j >= self.dim() {
            return None;
        }
        Some(match op {
            CouplingOperator::Jx => self.jx[(i, j)],
            CouplingOperator::JxSquaredOverN => self.jx2[(i, j)] / f64::from(self.n),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(twice: i64) -> HalfInt {
        HalfInt::from_twice(twice).unwrap()
    }

    #[test]
    fn ladder_values() {
        assert_eq!(ladder_coefficient(3, h(3), Ladder::Raise).unwrap(), 0.0);
        assert_eq!(ladder_coefficient(3, h(-3), Ladder::Lower).unwrap(), 0.0);
        let v = ladder_coefficient(3, h(1), Ladder::Raise).unwrap();
        assert!((v - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(ladder_coefficient(5, h(1), Ladder::Lower).unwrap(), 3.0);
    }

    #[test]
    fn ladder_rejects_out_of_range() {
        assert!(ladder_coefficient(3, h(5), Ladder::Raise).is_err());
        assert!(ladder_coefficient(4, h(1), Ladder::Raise).is_err());
        assert!(HalfInt::from_twice(4).is_err());
    }

    #[test]
    fn even_n_rejected() {
        assert!(SpinSector::new(4, 1.0).is_err());
        assert!(SpinSector::new(0, 1.0).is_err());
        assert!(SpinSector::new(1, 1.0).is_err());
        assert!(SpinSector::new(3, 0.0).is_err());
    }

    #[test]
    fn three_spin_sector() {
        let s = SpinSector::new(3, 1.0).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.energies(), &[0.25, 2.25]);
        assert!((s.jx()[(0, 1)] - 3f64.sqrt() / 2.0).abs() < 1e-15);
        // diagonal element retained: (N+1)/4
        assert!((s.jx()[(0, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn five_spin_jx2_elements() {
        let s = SpinSector::new(5, 1.0).unwrap();
        let jx2 = s.jx2();
        assert!((jx2[(0, 2)] - 0.25 * 8f64.sqrt() * 5f64.sqrt()).abs() < 1e-14);
        assert!((jx2[(0, 1)] - 0.25 * 3.0 * 8f64.sqrt()).abs() < 1e-14);
        let cf = closed_form_jx2(5).unwrap();
        assert!((cf[(0, 1)] - jx2[(0, 1)]).abs() < 1e-14);
        assert!((cf[(1, 0)] - jx2[(1, 0)]).abs() < 1e-14);
    }

    #[test]
    fn selection_rules() {
        for n in [7u32, 13, 21] {
            let s = SpinSector::new(n, 1.0).unwrap();
            let dim = s.dim();
            for a in 0..dim {
                for b in 0..dim {
                    if a == b {
                        continue;
                    }
                    let d = a.abs_diff(b);
                    assert_eq!(s.jx()[(a, b)] != 0.0, d == 1, "Jx ({a},{b})");
                    let fold = a.min(b) == 0 && a.max(b) == 1;
                    let nonzero = s.jx2()[(a, b)].abs() > 1e-12;
                    assert_eq!(nonzero, d == 2 || fold, "Jx2 ({a},{b})");
                }
            }
            assert!((s.jx() - s.jx().transpose()).amax() < 1e-15);
            assert!((s.jx2() - s.jx2().transpose()).amax() < 1e-12);
        }
    }

    #[test]
    fn energies_increase_with_nonzero_gaps() {
        let s = SpinSector::new(11, 0.7).unwrap();
        for w in s.energies().windows(2) {
            assert!(w[1] - w[0] >= 2.0 * 0.7 - 1e-12);
        }
    }

    #[test]
    fn superradiant_matrix_element_scaling() {
        // |⟨v_a|J_x|v_{a+1}⟩|² / N² → 1/16
        let s = SpinSector::new(1001, 1.0).unwrap();
        let ratio = s.jx()[(0, 1)].powi(2) / 1001f64.powi(2);
        assert!((ratio - 1.0 / 16.0).abs() < 1e-3);
        let ratio = s.jx()[(1, 2)].powi(2) / 1001f64.powi(2);
        assert!((ratio - 1.0 / 16.0).abs() < 1e-3);
    }

    #[test]
    fn element_lookup_uses_physical_labels() {
        let s = SpinSector::new(5, 1.0).unwrap();
        let e = s
            .element(CouplingOperator::JxSquaredOverN, h(1), h(5))
            .unwrap();
        assert!((e - s.jx2()[(0, 2)] / 5.0).abs() < 1e-15);
        assert!(s.element(CouplingOperator::Jx, h(-1), h(1)).is_none());
        assert!(s.element(CouplingOperator::Jx, h(7), h(1)).is_none());
    }
}
