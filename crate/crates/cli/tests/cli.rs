use std::collections::{BTreeSet, VecDeque};
use std::path::Path;
use std::process::{Command, Output};

fn qar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qar")).args(args).output().unwrap()
}

fn records(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn steady_defaults_to_stdout() {
    let out = qar(&["steady"]);
    assert!(out.status.success());
    let (h, rows) = records(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][col(&h, "status")], "ok");
    let current: f64 = rows[0][col(&h, "current_cold")].parse().unwrap();
    assert!(current > 0.0);
}

#[test]
fn exit_codes() {
    assert_eq!(qar(&["steady", "--set", "lukewarm.beta=1"]).status.code(), Some(2));
    assert_eq!(qar(&["steady", "--set", "n=30"]).status.code(), Some(2));
    assert_eq!(qar(&["steady", "--config", "/nonexistent/run.cfg"]).status.code(), Some(2));
    let timeout = qar(&["dynamics", "--set", "n=11", "--set", "dyn.t_max=1e-9"]);
    assert_eq!(timeout.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&timeout.stderr).contains("not reached"));
}

#[test]
fn sweeps_are_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sweep.x.param = n\nsweep.x.grid = odd\nsweep.x.from = 5\nsweep.x.to = 15\n\
         sweep.y.param = work.center\nsweep.y.grid = random\nsweep.y.from = 3.5\nsweep.y.to = 4.5\nsweep.y.count = 3\nseed = 9\n",
    );
    let run = |workers: &str, name: &str| {
        let out = dir.path().join(name);
        let status = qar(&["sweep", "--config", &cfg, "--workers", workers, "--out", out.to_str().unwrap()]).status;
        assert!(status.success());
        std::fs::read(out).unwrap()
    };
    let serial = run("1", "a.csv");
    assert_eq!(serial, run("4", "b.csv"));
    let (_, rows) = records(std::str::from_utf8(&serial).unwrap());
    assert_eq!(rows.len(), 18);
}

#[test]
fn thermalization_slope_column() {
    let out = qar(&[
        "dynamics",
        "--set", "sweep.x.param=n",
        "--set", "sweep.x.grid=list",
        "--set", "sweep.x.values=11,21,31",
    ]);
    assert!(out.status.success());
    let (h, rows) = records(std::str::from_utf8(&out.stdout).unwrap());
    let slope: f64 = rows[0][col(&h, "slope")].parse().unwrap();
    assert!((slope + 2.0).abs() < 0.2, "slope {slope}");
    assert!(rows.iter().all(|r| r[col(&h, "slope")] == rows[0][col(&h, "slope")]));
}

#[test]
fn trajectory_dump_decreases() {
    let out = qar(&["dynamics", "--set", "n=11", "--set", "dyn.trajectory=true", "--set", "dyn.points=12"]);
    assert!(out.status.success());
    let (h, rows) = records(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(rows.len(), 12);
    let s: Vec<f64> = rows.iter().map(|r| r[col(&h, "relative_entropy")].parse().unwrap()).collect();
    assert!(s.windows(2).all(|w| w[1] <= w[0] + 1e-15));
}

/// Positive cold current on a (δ_h, δ_w) grid at N = 31 forms one connected
/// region reaching down to work widths two to three orders below δ_c.
#[test]
fn cooling_region_in_width_plane() {
    let out = qar(&[
        "sweep",
        "--set", "sweep.x.param=hot.width",
        "--set", "sweep.x.grid=log",
        "--set", "sweep.x.from=1e-3",
        "--set", "sweep.x.to=1",
        "--set", "sweep.x.count=7",
        "--set", "sweep.y.param=work.width",
        "--set", "sweep.y.grid=log",
        "--set", "sweep.y.from=1e-5",
        "--set", "sweep.y.to=1e-1",
        "--set", "sweep.y.count=9",
    ]);
    assert!(out.status.success());
    let (h, rows) = records(std::str::from_utf8(&out.stdout).unwrap());
    let (ix, iy) = (7, 9);
    let cool: Vec<bool> = rows
        .iter()
        .map(|r| r[col(&h, "current_cold")].parse::<f64>().unwrap() > 0.0)
        .collect();
    let cells: BTreeSet<(usize, usize)> = (0..ix * iy).filter(|&k| cool[k]).map(|k| (k / iy, k % iy)).collect();
    assert!(!cells.is_empty());

    let start = *cells.iter().next().unwrap();
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((a, b)) = queue.pop_front() {
        let near = [(a.wrapping_sub(1), b), (a + 1, b), (a, b.wrapping_sub(1)), (a, b + 1)];
        for p in near {
            if cells.contains(&p) && seen.insert(p) {
                queue.push_back(p);
            }
        }
    }
    assert_eq!(seen, cells);

    let delta_c = 0.1;
    let deep = rows.iter().zip(&cool).any(|(r, &c)| {
        let w: f64 = r[col(&h, "y.work.width")].parse().unwrap();
        c && (delta_c * 1e-3..=delta_c * 1e-2 * (1.0 + 1e-12)).contains(&w)
    });
    assert!(deep);
    let broad_work_cools = rows.iter().zip(&cool).any(|(r, &c)| {
        c && r[col(&h, "y.work.width")].parse::<f64>().unwrap() >= delta_c
    });
    assert!(!broad_work_cools);
}

#[test]
fn rcmap_reports_closed_form_and_quadrature() {
    let out = qar(&["rcmap", "--set", "rc.cutoff=5,10", "--set", "rc.points=3"]);
    assert!(out.status.success());
    let (h, rows) = records(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(rows.len(), 6);
    let e: f64 = rows[3][col(&h, "rc_energy_quadrature")].parse().unwrap();
    assert!((e - 2.45153).abs() < 1e-5);
    for r in &rows {
        assert!(r[col(&h, "rc_coupling_rel_dev")].parse::<f64>().unwrap() <= 1e-6);
    }
}

#[test]
fn reduced_flag_tracks_analytics() {
    let out = qar(&["steady", "--reduced", "--set", "n=21"]);
    assert!(out.status.success());
    let (h, rows) = records(std::str::from_utf8(&out.stdout).unwrap());
    let v = |name: &str| rows[0][col(&h, name)].parse::<f64>().unwrap();
    assert!((v("current_cold") / v("analytic_current") - 1.0).abs() < 1e-2);
    assert!((v("noise") / v("analytic_noise") - 1.0).abs() < 1e-2);
}
