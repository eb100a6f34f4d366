//! Sweep axes.

use std::str::FromStr;

use qar_core::sampling::uniform_draws;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GridKind {
    #[default]
    Lin,
    Log,
    /// Every odd integer in `[from, to]`.
    Odd,
    List,
    /// `count` uniform draws in `[from, to)` from the configured seed.
    Random,
}

impl FromStr for GridKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "lin" => Ok(GridKind::Lin),
            "log" => Ok(GridKind::Log),
            "odd" => Ok(GridKind::Odd),
            "list" => Ok(GridKind::List),
            "random" => Ok(GridKind::Random),
            _ => Err(CliError::Config(format!("unknown grid '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub param: String,
    pub kind: GridKind,
    pub from: f64,
    pub to: f64,
    pub count: usize,
    pub values: Vec<f64>,
}

impl Default for Axis {
    fn default() -> Self {
        Self {
            param: String::new(),
            kind: GridKind::Lin,
            from: 0.0,
            to: 1.0,
            count: 2,
            values: Vec::new(),
        }
    }
}

impl Axis {
    /// Grid values in order; at least two of them.
    pub fn points(&self, seed: u64) -> Result<Vec<f64>, CliError> {
        let v = self.raw_points(seed)?;
        if v.len() < 2 {
            return Err(CliError::Config(format!("sweep '{}': a grid needs at least two points", self.param)));
        }
        Ok(v)
    }

    fn raw_points(&self, seed: u64) -> Result<Vec<f64>, CliError> {
        let bad = |msg: String| Err(CliError::Config(format!("sweep '{}': {msg}", self.param)));
        if self.param.is_empty() {
            return bad("missing .param".into());
        }
        let (a, b, k) = (self.from, self.to, self.count);
        if !(a.is_finite() && b.is_finite()) {
            return bad(format!("bounds {a} and {b} must be finite"));
        }
        match self.kind {
            GridKind::List => {
                if self.values.is_empty() {
                    return bad("list grid needs .values".into());
                }
                Ok(self.values.clone())
            }
            GridKind::Odd => {
                let lo = a.ceil() as i64;
                let hi = b.floor() as i64;
                let v: Vec<f64> = (lo..=hi).filter(|i| i.rem_euclid(2) == 1 && *i > 0).map(|i| i as f64).collect();
                if v.is_empty() {
                    return bad(format!("no odd integers in [{a}, {b}]"));
                }
                Ok(v)
            }
            GridKind::Lin => Ok(spaced(a, b, k)),
            GridKind::Log => {
                if !(a > 0.0 && b > 0.0) {
                    return bad("log grid needs positive bounds".into());
                }
                Ok(spaced(a.ln(), b.ln(), k).into_iter().map(f64::exp).collect())
            }
            GridKind::Random => Ok(uniform_draws(seed, k, a, b)),
        }
    }
}

fn spaced(a: f64, b: f64, k: usize) -> Vec<f64> {
    (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axis(kind: GridKind, from: f64, to: f64, count: usize) -> Axis {
        Axis {
            param: "n".into(),
            kind,
            from,
            to,
            count,
            values: vec![],
        }
    }

    #[test]
    fn grids() {
        assert_eq!(axis(GridKind::Lin, 0.0, 1.0, 3).points(0).unwrap(), vec![0.0, 0.5, 1.0]);
        let log = axis(GridKind::Log, 1e-3, 1e-1, 3).points(0).unwrap();
        assert!((log[1] - 1e-2).abs() < 1e-15);
        assert_eq!(axis(GridKind::Odd, 2.0, 9.0, 0).points(0).unwrap(), vec![3.0, 5.0, 7.0, 9.0]);
        let r = axis(GridKind::Random, 1.0, 2.0, 5);
        assert_eq!(r.points(4).unwrap(), r.points(4).unwrap());
        assert!(r.points(4).unwrap().iter().all(|v| (1.0..2.0).contains(v)));
        assert!(axis(GridKind::Log, 0.0, 1.0, 3).points(0).is_err());
        assert!(axis(GridKind::List, 0.0, 1.0, 3).points(0).is_err());
        assert!(axis(GridKind::Odd, 2.0, 4.0, 0).points(0).is_err());
        assert!(axis(GridKind::Lin, 0.0, 1.0, 1).points(0).is_err());
    }
}
