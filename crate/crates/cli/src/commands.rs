//! The five subcommands. Each returns a [`Table`]; sweeps are evaluated on a
//! worker pool and assembled in row-major grid order.

use qar_core::dynamics::{log_log_slope, CrossingOptions, Thermalization};
use qar_core::fcs::Fcs;
use qar_core::quadrature::QuadratureOptions;
use qar_core::reduced::{analytic_current, analytic_noise, reduced_rate_matrix, ReducedParams};
use qar_core::reservoir::{peaked_density, rc_map_closed_form, rc_map_numeric};
use qar_core::thermo::thermo_report;
use qar_core::{RateMatrix, Role};
use rayon::prelude::*;

use crate::config::ModelConfig;
use crate::error::CliError;
use crate::output::{num, opt, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Steady,
    Sweep,
    Dynamics,
    Rcmap,
    Reduced,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Evaluate `steady` and `sweep` points on the three-level model.
    pub reduced: bool,
}

pub const STEADY_COLUMNS: &[&str] = &[
    "status",
    "model",
    "n",
    "counted",
    "p_1_2",
    "p_3_2",
    "p_5_2",
    "p_rest",
    "current_cold",
    "current_hot",
    "current_work",
    "noise",
    "entropy_production",
    "cop",
    "carnot",
    "tur_bound",
    "cop_over_tur_bound",
    "tur_ratio",
    "refrigerating",
    "bounds_valid",
    "steady_residual",
    "analytic_current",
    "analytic_noise",
];

pub const REDUCED_COLUMNS: &[&str] = &[
    "status",
    "n",
    "rate_cold",
    "rate_hot",
    "rate_work",
    "current",
    "noise",
    "analytic_current",
    "analytic_noise",
    "current_rel_dev",
    "noise_rel_dev",
    "laser_rate",
    "laser_current",
    "laser_noise",
    "laser_current_rel_dev",
    "laser_noise_rel_dev",
];

pub const DYNAMICS_COLUMNS: &[&str] = &["status", "n", "t_th", "slope"];

pub const TRAJECTORY_COLUMNS: &[&str] = &["status", "n", "time", "relative_entropy", "t_th"];

pub const RCMAP_COLUMNS: &[&str] = &[
    "cutoff",
    "omega",
    "density",
    "regularized_density",
    "residual_density",
    "rc_energy_closed",
    "rc_energy_quadrature",
    "rc_coupling_closed",
    "rc_coupling_quadrature",
    "rc_energy_rel_dev",
    "rc_coupling_rel_dev",
];

type Rows = Vec<Vec<String>>;

pub fn run(command: Command, config: &ModelConfig, opts: RunOptions) -> Result<Table, CliError> {
    config.validate()?;
    match command {
        Command::Steady => {
            let mut t = Table::new(STEADY_COLUMNS);
            t.rows = steady_rows(config, opts.reduced)?;
            Ok(t)
        }
        Command::Sweep => {
            if config.x.is_none() {
                return Err(CliError::Config("sweep needs sweep.x.param".into()));
            }
            evaluate(config, STEADY_COLUMNS, |c| steady_rows(c, opts.reduced))
        }
        Command::Reduced => evaluate(config, REDUCED_COLUMNS, reduced_rows),
        Command::Dynamics if config.dynamics.trajectory => evaluate(config, TRAJECTORY_COLUMNS, trajectory_rows),
        Command::Dynamics => {
            let mut t = evaluate(config, DYNAMICS_COLUMNS, dynamics_rows)?;
            fill_slope(config, &mut t);
            Ok(t)
        }
        Command::Rcmap => rcmap(config),
    }
}

/// Runs `f` on every grid point, or once on the base point when no sweep is
/// configured. A failing grid point becomes a row carrying the error in its
/// status column.
fn evaluate<F>(config: &ModelConfig, columns: &[&str], f: F) -> Result<Table, CliError>
where
    F: Fn(&ModelConfig) -> Result<Rows, CliError> + Sync,
{
    let Some(x) = &config.x else {
        let mut t = Table::new(columns);
        t.rows = f(config)?;
        return Ok(t);
    };
    let mut axes = vec![(x.param.clone(), x.points(config.seed)?)];
    if let Some(y) = &config.y {
        axes.push((y.param.clone(), y.points(config.seed.wrapping_add(1))?));
    }
    let mut header: Vec<String> = axes.iter().map(|(p, _)| format!("x.{p}")).collect();
    if axes.len() == 2 {
        header[1] = format!("y.{}", axes[1].0);
    }
    header.extend(columns.iter().map(|c| c.to_string()));

    let mut points: Vec<Vec<f64>> = axes[0].1.iter().map(|&v| vec![v]).collect();
    if let Some((_, ys)) = axes.get(1) {
        points = points
            .into_iter()
            .flat_map(|p| ys.iter().map(move |&y| vec![p[0], y]))
            .collect();
    }

    let point = |values: &Vec<f64>| -> Rows {
        let prefix: Vec<String> = values.iter().map(|&v| num(v)).collect();
        let result = (|| {
            let mut c = config.clone();
            for ((param, _), &v) in axes.iter().zip(values) {
                c.set_value(param, v)?;
            }
            if c.n.is_multiple_of(2) {
                return Err(CliError::Config(format!("n = {} must be odd", c.n)));
            }
            f(&c)
        })();
        match result {
            Ok(rows) => rows
                .into_iter()
                .map(|r| prefix.iter().cloned().chain(r).collect())
                .collect(),
            Err(e) => {
                let mut row = prefix;
                row.push(e.to_string());
                row.resize(row.len() + columns.len() - 1, String::new());
                vec![row]
            }
        }
    };
    let run_all = || -> Vec<Rows> { points.par_iter().map(point).collect() };
    let rows = match config.workers {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CliError::Config(format!("worker pool: {e}")))?
            .install(run_all),
        None => run_all(),
    };
    Ok(Table {
        header,
        rows: rows.into_iter().flatten().collect(),
    })
}

/// Reduced-model parameters of a configuration.
pub fn reduced_params(c: &ModelConfig) -> Result<ReducedParams, CliError> {
    let w = c.omega;
    let [cold, hot, work] = c.baths;
    Ok(ReducedParams::resonant(
        c.n,
        w,
        [cold.peak * w, hot.peak * w, work.peak * w],
        [cold.beta / w, hot.beta / w, work.beta / w],
    )?)
}

fn rel_dev(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn steady_rows(c: &ModelConfig, reduced: bool) -> Result<Rows, CliError> {
    let r: RateMatrix = if reduced {
        reduced_rate_matrix(&reduced_params(c)?)?
    } else {
        c.model()?.rate_matrix()?
    };
    let fcs = Fcs::new(&r)?;
    let cold = fcs.result(Role::Cold)?;
    let noise = if c.counted == Role::Cold {
        cold.noise
    } else {
        fcs.noise(c.counted)?.0
    };
    let t = thermo_report(&r, &cold)?;
    let p = &cold.populations;
    let level = |k: usize| opt(p.get(k).copied());
    let rest: f64 = p.iter().skip(3).sum();
    let analytic = reduced_params(c).ok();
    let row = vec![
        "ok".to_string(),
        if reduced { "reduced" } else { "full" }.to_string(),
        c.n.to_string(),
        c.counted.as_str().to_string(),
        level(0),
        level(1),
        level(2),
        num(rest),
        opt(cold.current(Role::Cold)),
        opt(cold.current(Role::Hot)),
        opt(cold.current(Role::Work)),
        num(noise),
        num(t.entropy_production),
        num(t.cop),
        num(t.carnot),
        num(t.tur_bound),
        num(t.cop / t.tur_bound),
        num(t.tur_ratio),
        t.refrigerating.to_string(),
        t.bounds_valid().to_string(),
        num(cold.diagnostics.steady_residual),
        opt(analytic.as_ref().map(analytic_current)),
        opt(analytic.as_ref().map(analytic_noise)),
    ];
    Ok(vec![row])
}

fn cold_cumulants(p: &ReducedParams) -> Result<(f64, f64), CliError> {
    let r = reduced_rate_matrix(p)?;
    let f = Fcs::new(&r)?.result(Role::Cold)?;
    Ok((f.counted_current(), f.noise))
}

fn reduced_rows(c: &ModelConfig) -> Result<Rows, CliError> {
    let p = reduced_params(c)?;
    let rates = p.rates;
    let laser_rate = match c.laser {
        Some(l) => l * c.omega,
        None => 1e6 * rates.cold.max(rates.hot).max(rates.work),
    };
    let (i, s) = cold_cumulants(&p)?;
    let (li, ls) = cold_cumulants(&p.with_laser(laser_rate)?)?;
    let (ia, sa) = (analytic_current(&p), analytic_noise(&p));
    Ok(vec![vec![
        "ok".to_string(),
        c.n.to_string(),
        num(rates.cold),
        num(rates.hot),
        num(rates.work),
        num(i),
        num(s),
        num(ia),
        num(sa),
        num(rel_dev(i, ia)),
        num(rel_dev(s, sa)),
        num(laser_rate),
        num(li),
        num(ls),
        num(rel_dev(li, ia)),
        num(rel_dev(ls, sa)),
    ]])
}

fn thermalization(c: &ModelConfig) -> Result<(Thermalization, CrossingOptions), CliError> {
    let d = &c.dynamics;
    let w = c.omega;
    let t = Thermalization::new(c.n, w, d.cutoff * w, d.beta_initial / w, d.beta_final / w)?;
    let opts = CrossingOptions {
        t_max: d.t_max / w,
        ..Default::default()
    };
    Ok((t, opts))
}

fn dynamics_rows(c: &ModelConfig) -> Result<Rows, CliError> {
    let (t, opts) = thermalization(c)?;
    let time = t.time(c.dynamics.threshold, &opts)?;
    Ok(vec![vec!["ok".into(), c.n.to_string(), num(time), String::new()]])
}

fn trajectory_rows(c: &ModelConfig) -> Result<Rows, CliError> {
    let d = &c.dynamics;
    if !(d.t_from > 0.0 && d.t_to > d.t_from && d.points >= 2) {
        return Err(CliError::Config(
            "trajectory needs 0 < dyn.t_from < dyn.t_to and dyn.points ≥ 2".into(),
        ));
    }
    let (a, b) = ((d.t_from / c.omega).ln(), (d.t_to / c.omega).ln());
    let times: Vec<f64> = (0..d.points)
        .map(|i| (a + (b - a) * i as f64 / (d.points - 1) as f64).exp())
        .collect();
    let (t, opts) = thermalization(c)?;
    let traj = t.trajectory(&times, d.threshold, &opts)?;
    Ok(traj
        .times
        .iter()
        .zip(&traj.relative_entropy)
        .map(|(&time, &s)| vec!["ok".into(), c.n.to_string(), num(time), num(s), opt(traj.crossing)])
        .collect())
}

/// Fills the slope column with the log-log fit of `t_th` against `N` over
/// the successful rows of a one-dimensional `n` sweep.
fn fill_slope(c: &ModelConfig, t: &mut Table) {
    let one_dim_n = c.x.as_ref().is_some_and(|x| x.param == "n") && c.y.is_none();
    let (Some(status), Some(n), Some(time), Some(slope)) =
        (t.column("status"), t.column("n"), t.column("t_th"), t.column("slope"))
    else {
        return;
    };
    if !one_dim_n {
        return;
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = t
        .rows
        .iter()
        .filter(|r| r[status] == "ok")
        .filter_map(|r| Some((r[n].parse::<f64>().ok()?, r[time].parse::<f64>().ok()?)))
        .unzip();
    if let Ok(s) = log_log_slope(&xs, &ys) {
        for r in &mut t.rows {
            r[slope] = num(s);
        }
    }
}

fn rcmap(c: &ModelConfig) -> Result<Table, CliError> {
    let rc = &c.rc;
    if rc.points < 2 || rc.omega_to <= rc.omega_from || rc.omega_from.is_nan() || rc.cutoffs.is_empty() {
        return Err(CliError::Config(
            "rcmap needs rc.points ≥ 2, rc.omega_from < rc.omega_to and at least one rc.cutoff".into(),
        ));
    }
    let mut t = Table::new(RCMAP_COLUMNS);
    for &cutoff in &rc.cutoffs {
        let closed = rc_map_closed_form(rc.peak, rc.center, rc.width, cutoff)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let q_opts = QuadratureOptions {
            breakpoints: vec![rc.center, cutoff],
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_intervals: 20_000,
            ..Default::default()
        };
        let q = rc_map_numeric(|w| closed.regularized_density(w), &q_opts)?;
        let energy = (closed.energy(), q.energy_sq.sqrt());
        let coupling = (closed.coupling_sq.sqrt(), q.coupling_sq.sqrt());
        for i in 0..rc.points {
            let w = rc.omega_from + (rc.omega_to - rc.omega_from) * i as f64 / (rc.points - 1) as f64;
            t.rows.push(vec![
                num(cutoff),
                num(w),
                num(peaked_density(rc.peak, rc.center, rc.width, w)),
                num(closed.regularized_density(w)),
                num(closed.residual_density(w)),
                num(energy.0),
                num(energy.1),
                num(coupling.0),
                num(coupling.1),
                num(rel_dev(energy.1, energy.0)),
                num(rel_dev(coupling.1, coupling.0)),
            ]);
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell<'a>(t: &'a Table, row: usize, col: &str) -> &'a str {
        &t.rows[row][t.column(col).unwrap()]
    }

    fn value(t: &Table, row: usize, col: &str) -> f64 {
        cell(t, row, col).parse().unwrap()
    }

    #[test]
    fn standard_point_refrigerates() {
        let t = run(Command::Steady, &ModelConfig::default(), RunOptions::default()).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.rows[0].len(), STEADY_COLUMNS.len());
        assert!(value(&t, 0, "current_cold") > 0.0);
        assert_eq!(cell(&t, 0, "bounds_valid"), "true");
    }

    #[test]
    fn equal_temperatures_carry_no_current() {
        let mut c = ModelConfig::default();
        for b in &mut c.baths {
            b.beta = 1.0;
        }
        let t = run(Command::Steady, &c, RunOptions::default()).unwrap();
        for col in ["current_cold", "current_hot", "current_work"] {
            assert!(value(&t, 0, col).abs() < 1e-14, "{col} = {}", cell(&t, 0, col));
        }
    }

    #[test]
    fn reduced_flag_matches_analytics() {
        let t = run(Command::Steady, &ModelConfig::default(), RunOptions { reduced: true }).unwrap();
        assert_eq!(cell(&t, 0, "model"), "reduced");
        let i = value(&t, 0, "current_cold");
        let s = value(&t, 0, "noise");
        assert!(rel_dev(i, value(&t, 0, "analytic_current")) < 1e-2);
        assert!(rel_dev(s, value(&t, 0, "analytic_noise")) < 1e-2);
    }

    #[test]
    fn sweep_rows_in_grid_order() {
        let text = "sweep.x.param = n\nsweep.x.grid = list\nsweep.x.values = 5, 7\nsweep.y.param = cold.beta\nsweep.y.grid = lin\nsweep.y.from = 1.5\nsweep.y.to = 2.5\nsweep.y.count = 3\nworkers = 3\n";
        let c = ModelConfig::from_text(text).unwrap();
        let t = run(Command::Sweep, &c, RunOptions::default()).unwrap();
        assert_eq!(t.header[..3], ["x.n", "y.cold.beta", "status"]);
        assert_eq!(t.rows.len(), 6);
        assert_eq!(cell(&t, 4, "n"), "7");
        assert_eq!(value(&t, 4, "y.cold.beta"), 2.0);
    }

    #[test]
    fn failed_point_keeps_sweeping() {
        let text = "sweep.x.param = n\nsweep.x.grid = list\nsweep.x.values = 5, 6, 7\n";
        let c = ModelConfig::from_text(text).unwrap();
        let t = run(Command::Sweep, &c, RunOptions::default()).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert!(cell(&t, 1, "status").contains("odd"));
        assert!(cell(&t, 1, "current_cold").is_empty());
        assert_eq!(cell(&t, 2, "status"), "ok");
        assert!(t.rows.iter().all(|r| r.len() == t.header.len()));
    }

    #[test]
    fn large_threshold_is_instant() {
        let mut c = ModelConfig {
            n: 11,
            ..Default::default()
        };
        c.dynamics.threshold = 1e3;
        let t = run(Command::Dynamics, &c, RunOptions::default()).unwrap();
        assert_eq!(value(&t, 0, "t_th"), 0.0);
        assert!(cell(&t, 0, "slope").is_empty());
    }

    #[test]
    fn rcmap_agrees_with_quadrature() {
        let t = run(Command::Rcmap, &ModelConfig::default(), RunOptions::default()).unwrap();
        assert_eq!(t.rows.len(), 201);
        assert!((value(&t, 0, "rc_energy_closed") - 6.01_f64.sqrt()).abs() < 1e-14);
        assert!(value(&t, 0, "rc_energy_rel_dev") <= 1e-6);
        assert!(value(&t, 0, "rc_coupling_rel_dev") <= 1e-6);
    }

    #[test]
    fn reduced_command_columns() {
        let t = run(Command::Reduced, &ModelConfig::default(), RunOptions::default()).unwrap();
        assert!(value(&t, 0, "current_rel_dev") < 1e-2);
        assert!(value(&t, 0, "laser_current_rel_dev") < 1e-4);
    }
}
