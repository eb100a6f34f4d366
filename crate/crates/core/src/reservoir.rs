//! Thermal reservoirs: spectral densities, Bose occupations, thermal rate
//! kernels, and the reaction-coordinate reshaping of a peaked density.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate_half_line, QuadratureOptions};
use crate::spin::CouplingOperator;

/// Which terminal of the refrigerator a reservoir plays.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Cold,
    Hot,
    Work,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::Cold, Role::Hot, Role::Work];

    /// Cold and work reservoirs couple through `J_x`, the hot one through
    /// `J_x²/N`.
    pub fn default_coupling(self) -> CouplingOperator {
        match self {
            Role::Cold | Role::Work => CouplingOperator::Jx,
            Role::Hot => CouplingOperator::JxSquaredOverN,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Cold => "cold",
            Role::Hot => "hot",
            Role::Work => "work",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cold" | "c" => Ok(Role::Cold),
            "hot" | "h" => Ok(Role::Hot),
            "work" | "w" => Ok(Role::Work),
            other => domain(format!("unknown reservoir role '{other}'")),
        }
    }
}

/// Spectral density `Γ(ω)`, continued to negative `ω` as an odd function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectralDensity {
    /// `4Γ̄εδ²ω / ([(ω−ε)²+δ²][(ω+ε)²+δ²])`, peaked near `ω = ε` with
    /// height close to `Γ̄`.
    Peaked { peak: f64, center: f64, width: f64 },
    /// `ω·exp(−|ω|/ω_c)`.
    Ohmic { cutoff: f64 },
}

impl SpectralDensity {
    pub fn peaked(peak: f64, center: f64, width: f64) -> Result<Self> {
        // a zero peak detaches the reservoir
        if !(peak >= 0.0 && peak.is_finite()) {
            return domain(format!("spectral density peak height {peak} must be non-negative"));
        }
        for (name, v) in [("center", center), ("width", width)] {
            if !(v > 0.0 && v.is_finite()) {
                return domain(format!("spectral density {name} = {v} must be positive"));
            }
        }
        Ok(Self::Peaked {
            peak,
            center,
            width,
        })
    }

    pub fn ohmic(cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0) {
            return domain(format!("Ohmic cutoff {cutoff} must be positive"));
        }
        Ok(Self::Ohmic { cutoff })
    }

    pub fn eval(&self, omega: f64) -> f64 {
        match *self {
            Self::Peaked {
                peak,
                center,
                width,
            } => peaked_density(peak, center, width, omega),
            Self::Ohmic { cutoff } => omega * (-omega.abs() / cutoff).exp(),
        }
    }
}

/// The peaked density as a free function of its parameters.
pub fn peaked_density(peak: f64, center: f64, width: f64, omega: f64) -> f64 {
    let w2 = width * width;
    let lower = (omega - center).powi(2) + w2;
    let upper = (omega + center).powi(2) + w2;
    4.0 * peak * center * w2 * omega / (lower * upper)
}

/// `n(ω) = 1/(e^{βω} − 1)`.
///
/// Relative accuracy is at machine level for `|βω| ≤ 700`; beyond that the
/// occupation is `0` (positive `ω`) or `−1` (negative `ω`). `β = ∞` is
/// accepted as the zero-temperature limit.
pub fn bose(beta: f64, omega: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return domain(format!("inverse temperature β = {beta} must be positive"));
    }
    if omega == 0.0 || omega.is_nan() {
        return domain("Bose occupation undefined at ω = 0");
    }
    let x = beta * omega;
    Ok(if x > 700.0 {
        0.0
    } else if x < -700.0 {
        -1.0
    } else {
        1.0 / x.exp_m1()
    })
}

/// Thermal rate kernel `γ(ω) = Γ(ω)[1 + n(ω)]`.
///
/// Negative frequencies are evaluated as `Γ(|ω|)·n(|ω|)` so the result is
/// non-negative and satisfies `γ(−ω) = e^{−βω}γ(ω)` to rounding.
pub fn thermal_rate(density: &SpectralDensity, beta: f64, omega: f64) -> Result<f64> {
    let n = bose(beta, omega.abs())?;
    if omega > 0.0 {
        Ok(density.eval(omega) * (1.0 + n))
    } else {
        Ok(density.eval(-omega) * n)
    }
}

/// One reservoir attached to the working medium.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReservoirSpec {
    pub role: Role,
    pub coupling: CouplingOperator,
    pub density: SpectralDensity,
    /// Inverse temperature; `f64::INFINITY` for zero temperature.
    pub beta: f64,
}

impl ReservoirSpec {
    pub fn new(
        role: Role,
        coupling: CouplingOperator,
        density: SpectralDensity,
        beta: f64,
    ) -> Result<Self> {
        if !(beta > 0.0) {
            return domain(format!("{role} reservoir: β = {beta} must be positive"));
        }
        Ok(Self {
            role,
            coupling,
            density,
            beta,
        })
    }

    /// Reservoir with the peaked density and the role's default coupling.
    pub fn peaked(role: Role, peak: f64, center: f64, width: f64, beta: f64) -> Result<Self> {
        Self::new(
            role,
            role.default_coupling(),
            SpectralDensity::peaked(peak, center, width)?,
            beta,
        )
    }

    pub fn spectral_density(&self, omega: f64) -> f64 {
        self.density.eval(omega)
    }

    pub fn gamma_rate(&self, omega: f64) -> Result<f64> {
        thermal_rate(&self.density, self.beta, omega)
    }
}

/// Peaked density multiplied by the regulator `Δ²/(Δ²+ω²)`.
pub fn regularized_density(peak: f64, center: f64, width: f64, cutoff: f64, omega: f64) -> f64 {
    let c2 = cutoff * cutoff;
    peaked_density(peak, center, width, omega) * c2 / (c2 + omega * omega)
}

/// Reaction-coordinate parameters of the regularized peaked density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RcMapping {
    pub peak: f64,
    pub center: f64,
    pub width: f64,
    pub cutoff: f64,
    /// `Ω̃²`
    pub energy_sq: f64,
    /// `λ̃²`
    pub coupling_sq: f64,
}

impl RcMapping {
    /// `Ω̃`
    pub fn energy(&self) -> f64 {
        self.energy_sq.sqrt()
    }

    /// Lorentz–Drude density of the residual bath.
    pub fn residual_density(&self, omega: f64) -> f64 {
        let (e, d, c) = (self.center, self.width, self.cutoff);
        let scale = 2.0 * d / self.energy() * (e * e + (c + d).powi(2));
        scale * omega / (omega * omega + (c + 2.0 * d).powi(2))
    }

    pub fn regularized_density(&self, omega: f64) -> f64 {
        regularized_density(self.peak, self.center, self.width, self.cutoff, omega)
    }
}

/// Closed-form reaction-coordinate energy and coupling for the regularized
/// peaked density.
pub fn rc_map_closed_form(peak: f64, center: f64, width: f64, cutoff: f64) -> Result<RcMapping> {
    SpectralDensity::peaked(peak, center, width)?;
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return domain(format!("regularization cutoff Δ = {cutoff} must be positive"));
    }
    let energy_sq = center * center + width * width + 2.0 * cutoff * width;
    let first_moment = peak * std::f64::consts::PI * width * center * cutoff * cutoff
        / (center * center + (cutoff + width).powi(2));
    let coupling_sq = first_moment / (2.0 * std::f64::consts::PI * energy_sq.sqrt());
    Ok(RcMapping {
        peak,
        center,
        width,
        cutoff,
        energy_sq,
        coupling_sq,
    })
}

/// Moments of a spectral density computed by quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RcMoments {
    /// `∫₀^∞ ωΓ(ω) dω`
    pub first: f64,
    /// `∫₀^∞ ω³Γ(ω) dω`
    pub third: f64,
    pub energy_sq: f64,
    pub coupling_sq: f64,
}

/// Reaction-coordinate energy and coupling from the defining moment
/// integrals of an arbitrary density.
pub fn rc_map_numeric<F: Fn(f64) -> f64>(density: F, opts: &QuadratureOptions) -> Result<RcMoments> {
    let first = integrate_half_line(|w| w * density(w), opts)?.value;
    let third = integrate_half_line(|w| w * w * w * density(w), opts)?.value;
    if !(first > 0.0) {
        return Err(Error::Numerical(format!(
            "first moment {first:e} of the spectral density is not positive"
        )));
    }
    let energy_sq = third / first;
    Ok(RcMoments {
        first,
        third,
        energy_sq,
        coupling_sq: first / (2.0 * std::f64::consts::PI * energy_sq.sqrt()),
    })
}
