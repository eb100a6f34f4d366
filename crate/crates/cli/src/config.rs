//! Flat `key = value` configuration.
//!
//! Blank lines and text after `#` are ignored. Later assignments override
//! earlier ones, and `--set key=value` flags are applied after the file.
//! Energies are given in units of `omega` and inverse temperatures in units
//! of `1/omega`.

use std::str::FromStr;

use qar_core::{Model, ReservoirSpec, Role};

use crate::error::CliError;
use crate::grid::{Axis, GridKind};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathConfig {
    pub peak: f64,
    pub center: f64,
    pub width: f64,
    pub beta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicsConfig {
    pub cutoff: f64,
    pub beta_initial: f64,
    pub beta_final: f64,
    pub threshold: f64,
    pub t_max: f64,
    /// Also dump relative entropy on a log-spaced time grid.
    pub trajectory: bool,
    pub t_from: f64,
    pub t_to: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RcConfig {
    pub peak: f64,
    pub center: f64,
    pub width: f64,
    pub cutoffs: Vec<f64>,
    pub omega_from: f64,
    pub omega_to: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelConfig {
    pub n: u32,
    pub omega: f64,
    /// Cold, hot, work.
    pub baths: [BathConfig; 3],
    pub counted: Role,
    pub x: Option<Axis>,
    pub y: Option<Axis>,
    pub seed: u64,
    pub workers: Option<usize>,
    pub out: Option<String>,
    /// Laser rate of the reduced model; defaults to 10⁶ times its largest
    /// thermal rate.
    pub laser: Option<f64>,
    pub dynamics: DynamicsConfig,
    pub rc: RcConfig,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let bath = |peak, center, width, beta| BathConfig {
            peak,
            center,
            width,
            beta,
        };
        Self {
            n: 31,
            omega: 1.0,
            baths: [
                bath(1.0, 2.0, 0.1, 2.0),
                bath(1.0, 6.0, 0.1, 1.0),
                bath(1.0, 4.0, 1e-3, 1e-3),
            ],
            counted: Role::Cold,
            x: None,
            y: None,
            seed: 0,
            workers: None,
            out: None,
            laser: None,
            dynamics: DynamicsConfig {
                cutoff: 100.0,
                beta_initial: 1.0,
                beta_final: 4.0,
                threshold: 1e-6,
                t_max: 1e6,
                trajectory: false,
                t_from: 1e-4,
                t_to: 10.0,
                points: 50,
            },
            rc: RcConfig {
                peak: 1.0,
                center: 2.0,
                width: 0.1,
                cutoffs: vec![10.0],
                omega_from: 0.0,
                omega_to: 20.0,
                points: 201,
            },
        }
    }
}

/// Keys naming a scalar model parameter, usable as sweep axes.
pub const SWEEPABLE: &[&str] = &[
    "n",
    "omega",
    "cold.peak",
    "cold.center",
    "cold.width",
    "cold.beta",
    "hot.peak",
    "hot.center",
    "hot.width",
    "hot.beta",
    "work.peak",
    "work.center",
    "work.width",
    "work.beta",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: cannot parse '{value}'")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    value
        .split(',')
        .map(|v| parse(key, v.trim()))
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(CliError::Config(format!("{key}: expected true or false, got '{value}'"))),
    }
}

impl ModelConfig {
    /// Parses a configuration file on top of the defaults.
    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let mut config = Self::default();
        config.apply_text(text)?;
        Ok(config)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (number, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected key = value, got '{line}'", number + 1))
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| CliError::Config(format!("line {}: {e}", number + 1)))?;
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), CliError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--set expects key=value, got '{assignment}'")))?;
        self.set(key.trim(), value.trim())
    }

    fn bath_mut(&mut self, role: Role) -> &mut BathConfig {
        &mut self.baths[role as usize]
    }

    fn axis_mut(&mut self, name: &str) -> &mut Axis {
        let slot = if name == "x" { &mut self.x } else { &mut self.y };
        slot.get_or_insert_with(Axis::default)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        if let Some((axis, field)) = key
            .strip_prefix("sweep.")
            .and_then(|rest| rest.split_once('.'))
            .filter(|(axis, _)| *axis == "x" || *axis == "y")
        {
            let a = self.axis_mut(axis);
            match field {
                "param" => {
                    if !SWEEPABLE.contains(&value) {
                        return Err(CliError::Config(format!("{key}: '{value}' cannot be swept")));
                    }
                    a.param = value.to_string();
                }
                "grid" => a.kind = parse::<GridKind>(key, value)?,
                "from" => a.from = parse(key, value)?,
                "to" => a.to = parse(key, value)?,
                "count" => a.count = parse(key, value)?,
                "values" => a.values = parse_list(key, value)?,
                _ => return Err(CliError::Config(format!("unknown key '{key}'"))),
            }
            return Ok(());
        }
        if let Some((role, field)) = key.split_once('.') {
            if let Ok(role) = role.parse::<Role>() {
                let v: f64 = parse(key, value)?;
                let b = self.bath_mut(role);
                match field {
                    "peak" => b.peak = v,
                    "center" => b.center = v,
                    "width" => b.width = v,
                    "beta" => b.beta = v,
                    _ => return Err(CliError::Config(format!("unknown key '{key}'"))),
                }
                return Ok(());
            }
        }
        let d = &mut self.dynamics;
        let rc = &mut self.rc;
        match key {
            "n" => self.n = parse(key, value)?,
            "omega" => self.omega = parse(key, value)?,
            "counted" => {
                self.counted = value
                    .parse()
                    .map_err(|_| CliError::Config(format!("{key}: unknown reservoir '{value}'")))?
            }
            "seed" => self.seed = parse(key, value)?,
            "workers" => self.workers = Some(parse(key, value)?),
            "out" => self.out = Some(value.to_string()),
            "reduced.laser" => self.laser = Some(parse(key, value)?),
            "dyn.cutoff" => d.cutoff = parse(key, value)?,
            "dyn.beta_initial" => d.beta_initial = parse(key, value)?,
            "dyn.beta_final" => d.beta_final = parse(key, value)?,
            "dyn.threshold" => d.threshold = parse(key, value)?,
            "dyn.t_max" => d.t_max = parse(key, value)?,
            "dyn.trajectory" => d.trajectory = parse_bool(key, value)?,
            "dyn.t_from" => d.t_from = parse(key, value)?,
            "dyn.t_to" => d.t_to = parse(key, value)?,
            "dyn.points" => d.points = parse(key, value)?,
            "rc.peak" => rc.peak = parse(key, value)?,
            "rc.center" => rc.center = parse(key, value)?,
            "rc.width" => rc.width = parse(key, value)?,
            "rc.cutoff" => rc.cutoffs = parse_list(key, value)?,
            "rc.omega_from" => rc.omega_from = parse(key, value)?,
            "rc.omega_to" => rc.omega_to = parse(key, value)?,
            "rc.points" => rc.points = parse(key, value)?,
            _ => return Err(CliError::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Current value of a sweepable parameter.
    pub fn get(&self, key: &str) -> Option<f64> {
        match key {
            "n" => Some(f64::from(self.n)),
            "omega" => Some(self.omega),
            _ => {
                let (role, field) = key.split_once('.')?;
                let b = self.baths[role.parse::<Role>().ok()? as usize];
                match field {
                    "peak" => Some(b.peak),
                    "center" => Some(b.center),
                    "width" => Some(b.width),
                    "beta" => Some(b.beta),
                    _ => None,
                }
            }
        }
    }

    /// Sets a sweepable parameter from a grid value.
    pub fn set_value(&mut self, key: &str, value: f64) -> Result<(), CliError> {
        if key == "n" {
            if value.fract() != 0.0 || !(1.0..=f64::from(u32::MAX)).contains(&value) {
                return Err(CliError::Config(format!("n = {value} is not a positive integer")));
            }
            self.n = value as u32;
            return Ok(());
        }
        self.set(key, &format!("{value:e}"))
    }

    /// Checks the invariants shared by every command.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.n.is_multiple_of(2) {
            return Err(CliError::Config(format!("n = {} must be odd", self.n)));
        }
        if let Some(0) = self.workers {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        if self.y.is_some() && self.x.is_none() {
            return Err(CliError::Config("sweep.y given without sweep.x".into()));
        }
        for axis in [&self.x, &self.y].into_iter().flatten() {
            axis.points(self.seed)?;
        }
        if let (Some(x), Some(y)) = (&self.x, &self.y) {
            if x.param == y.param {
                return Err(CliError::Config(format!("both sweep axes set '{}'", x.param)));
            }
        }
        Ok(())
    }

    /// Three reservoirs in absolute units.
    pub fn model(&self) -> Result<Model, CliError> {
        let w = self.omega;
        let mut reservoirs = Vec::with_capacity(3);
        for role in Role::ALL {
            let b = self.baths[role as usize];
            let spec = ReservoirSpec::peaked(role, b.peak * w, b.center * w, b.width * w, b.beta / w)
                .map_err(|e| CliError::Config(e.to_string()))?;
            reservoirs.push(spec);
        }
        Ok(Model {
            n: self.n,
            omega: w,
            reservoirs,
        })
    }
}
