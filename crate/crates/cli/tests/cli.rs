use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const DUFFING_SOLID: &str = "\
[system]
builtin = duffing
[impulse.1]
time = -1
g1 = 0
g2 = -1
[impulse.2]
time = 1
g1 = 0
g2 = 1
[grid]
t_min = -6
t_max = 6
t_count = 241
[run]
command = melnikov
epsilon = 0.01
alpha = 0.5
";

const EDDY_TEXT: &str = "\
[system]
f1 = 2*x2 - 3*x2^2
f2 = 2*x1
param.c1 = 0
param.c2 = 0.6666666666666666
[impulse.1]
time = 0
g1 = (x1 - c1) / ((x1 - c1)^2 + (x2 - c2)^2)
g2 = (x2 - c2) / ((x1 - c1)^2 + (x2 - c2)^2)
[orbit]
saddle = 0, 0
branch = unstable+
target = 0, 0
amplitude = 5.656854249492381
extent = 12
[grid]
t_min = -4
t_max = 4
t_count = 41
[run]
command = flux
epsilon = 0.02
";

struct Run {
    dir: TempDir,
}

impl Run {
    fn new() -> Self {
        Self { dir: TempDir::new().unwrap() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn kickflow(&self, config: &Path, out: &str, extra: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_kickflow"))
            .arg("--config")
            .arg(config)
            .arg("--out")
            .arg(self.path(out))
            .args(extra)
            .output()
            .unwrap()
    }

    fn ok(&self, config: &Path, out: &str, extra: &[&str]) -> String {
        let o = self.kickflow(config, out, extra);
        assert!(o.status.success(), "kickflow failed: {}", String::from_utf8_lossy(&o.stderr));
        fs::read_to_string(self.path(&format!("{out}.csv"))).unwrap()
    }
}

fn rows(csv: &str) -> (Vec<&str>, Vec<Vec<&str>>) {
    let mut lines = csv.lines();
    let header = lines.next().unwrap().split(',').collect();
    (header, lines.map(|l| l.split(',').collect()).collect())
}

fn col(header: &[&str], name: &str) -> usize {
    header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).unzip();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let r = Run::new();
    let cfg = r.write("d.cfg", DUFFING_SOLID);
    let a = r.ok(&cfg, "a", &["--threads", "1"]);
    let b = r.ok(&cfg, "b", &["--threads", "4"]);
    let c = r.ok(&cfg, "c", &[]);
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_eq!(fs::read(r.path("a.meta")).unwrap(), fs::read(r.path("b.meta")).unwrap());
}

#[test]
fn sidecar_alone_reproduces_the_run() {
    let r = Run::new();
    let cases = [
        ("duffing", DUFFING_SOLID.to_string(), vec![""]),
        ("eddy", EDDY_TEXT.to_string(), vec![""]),
        (
            "sep",
            "system.builtin = eddy\n[grid]\nt_min = 0.1\nt_max = 0.6\nt_count = 2\n[run]\ncommand = separatrix\nseparatrix_samples = 21\n"
                .to_string(),
            vec!["", ".gate"],
        ),
        ("zeros", "system.builtin = duffing\nsystem.preset = dotted\n[grid]\np_min = -1\np_max = 1\np_count = 3\n[run]\ncommand = zeros\nseed = 7\n".to_string(), vec![""]),
    ];
    for (name, text, suffixes) in cases {
        let cfg = r.write(&format!("{name}.cfg"), &text);
        r.ok(&cfg, name, &[]);
        let again = format!("{name}-again");
        r.ok(&r.path(&format!("{name}.meta")), &again, &[]);
        for s in suffixes {
            let first = fs::read(r.path(&format!("{name}{s}.csv"))).unwrap();
            let second = fs::read(r.path(&format!("{again}{s}.csv"))).unwrap();
            assert_eq!(first, second, "{name}{s}");
        }
        assert_eq!(
            fs::read_to_string(r.path(&format!("{name}.meta"))).unwrap(),
            fs::read_to_string(r.path(&format!("{again}.meta"))).unwrap(),
            "{name}"
        );
    }
    assert!(fs::read_to_string(r.path("zeros.meta")).unwrap().contains("seed = 7"));
}

#[test]
fn jump_times_must_increase() {
    let r = Run::new();
    let cfg = r.write("bad.cfg", &DUFFING_SOLID.replace("time = 1\n", "time = -2\n"));
    let o = r.kickflow(&cfg, "x", &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("jump times not increasing"), "{err}");
    assert!(!r.path("x.csv").exists());
}

#[test]
fn alpha_outside_unit_interval_is_rejected_with_other_problems() {
    let r = Run::new();
    let text = DUFFING_SOLID.replace("alpha = 0.5", "alpha = 1.5\nepsilom = 2").replace("t_count = 241", "t_count = 0");
    let cfg = r.write("bad.cfg", &text);
    let o = r.kickflow(&cfg, "x", &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("3 problems"), "{err}");
    assert!(err.contains("`run.alpha` must lie in [0, 1]"), "{err}");
    assert!(err.contains("unknown key `run.epsilom`"), "{err}");
    assert!(err.contains("grid is empty"), "{err}");
    assert!(err.contains("bad.cfg:18:"), "{err}");
}

#[test]
fn zeros_without_sign_change_give_header_only() {
    let r = Run::new();
    let cfg = r.write("z.cfg", "system.builtin = duffing\n[grid]\nt_min = 2.5\nt_max = 6\n[run]\ncommand = zeros\n");
    let csv = r.ok(&cfg, "z", &[]);
    assert_eq!(csv, "p,t,dM_dp,dM_dt,simple,on_jump_set\n");
}

#[test]
fn melnikov_csv_samples_the_duffing_closed_form() {
    let r = Run::new();
    let csv = r.ok(&r.write("d.cfg", DUFFING_SOLID), "d", &[]);
    let (h, body) = rows(&csv);
    assert_eq!(h, ["p", "t", "side", "M"]);
    assert_eq!(body.len(), 241);
    let j = |s: f64| -(2f64.sqrt()) / s.cosh() * s.tanh();
    for row in &body {
        let t: f64 = row[1].parse().unwrap();
        let m: f64 = row[3].parse().unwrap();
        let expect = -j(-1.0 - t) + j(1.0 - t);
        assert!((m - expect).abs() <= 1e-10, "t = {t}: {m} vs {expect}");
    }
    let sides: Vec<&str> = body.iter().filter(|r| r[2] != "none").map(|r| r[2]).collect();
    assert_eq!(sides, ["after", "after"], "t = -1 and t = 1 lie on the grid");
}

#[test]
fn floats_use_seventeen_significant_digits() {
    let r = Run::new();
    let csv = r.ok(&r.write("d.cfg", DUFFING_SOLID), "d", &[]);
    for row in rows(&csv).1 {
        for cell in [row[0], row[1], row[3]] {
            let (mant, exp) = cell.split_once('e').unwrap();
            let digits = mant.trim_start_matches('-');
            assert_eq!(digits.len(), 18, "{cell}");
            assert_eq!(digits.as_bytes()[1], b'.', "{cell}");
            assert!(exp.parse::<i32>().is_ok(), "{cell}");
        }
    }
}

#[test]
fn oracle_error_on_parabolic_fits_slope_two() {
    let r = Run::new();
    let cfg = r.write(
        "o.cfg",
        "system.builtin = parabolic\n[grid]\nt_min = -0.5\nt_max = 0.5\nt_count = 2\n[run]\ncommand = oracle\n",
    );
    let csv = r.ok(&cfg, "o", &[]);
    let (h, body) = rows(&csv);
    let (k, e, pr, err) = (col(&h, "kind"), col(&h, "epsilon"), col(&h, "predicted"), col(&h, "error"));
    for kind in ["unstable", "stable"] {
        let live: Vec<_> = body.iter().filter(|r| r[k] == kind && r[pr].parse::<f64>().unwrap() != 0.0).collect();
        assert_eq!(live.len(), 3, "{kind}");
        let eps: Vec<f64> = live.iter().map(|r| r[e].parse().unwrap()).collect();
        let errs: Vec<f64> = live.iter().map(|r| r[err].parse().unwrap()).collect();
        let s = slope(&eps, &errs);
        assert!((s - 2.0).abs() <= 0.3, "{kind}: slope {s}, errors {errs:?}");
    }
}

#[test]
fn oracle_error_on_duffing_fits_slope_two() {
    let r = Run::new();
    let cfg = r.write(
        "o.cfg",
        "system.builtin = duffing\n[grid]\nt_min = 0.3\nt_max = 0.3\nt_count = 1\n[run]\ncommand = oracle\n",
    );
    let csv = r.ok(&cfg, "o", &[]);
    let (h, body) = rows(&csv);
    let (k, e, err) = (col(&h, "kind"), col(&h, "epsilon"), col(&h, "error"));
    for kind in ["unstable", "stable"] {
        let live: Vec<_> = body.iter().filter(|r| r[k] == kind).collect();
        let eps: Vec<f64> = live.iter().map(|r| r[e].parse().unwrap()).collect();
        let errs: Vec<f64> = live.iter().map(|r| r[err].parse().unwrap()).collect();
        let s = slope(&eps, &errs);
        assert!((s - 2.0).abs() <= 0.3, "{kind}: slope {s}, errors {errs:?}");
    }
}

#[test]
fn text_eddy_flux_is_negative_off_the_jump() {
    let r = Run::new();
    let csv = r.ok(&r.write("e.cfg", EDDY_TEXT), "e", &[]);
    let (h, body) = rows(&csv);
    assert_eq!(h, ["p", "t", "side", "leading"]);
    for row in body {
        let t: f64 = row[1].parse().unwrap();
        let phi: f64 = row[3].parse().unwrap();
        if t != 0.0 {
            assert!(phi < 0.0, "t = {t}: {phi}");
        }
    }
}

#[test]
fn separatrix_writes_curves_and_gate_table() {
    let r = Run::new();
    let cfg = r.write(
        "s.cfg",
        "system.builtin = eddy\n[grid]\nt_min = 0.1\nt_max = 0.6\nt_count = 2\n[run]\ncommand = separatrix\nseparatrix_samples = 11\n",
    );
    let csv = r.ok(&cfg, "s", &[]);
    let (h, body) = rows(&csv);
    assert_eq!(h, ["t", "side", "segment", "index", "x1", "x2"]);
    assert_eq!(body.len(), 2 * (12 + 2 + 12));
    let gate = fs::read_to_string(r.path("s.gate.csv")).unwrap();
    let (gh, gb) = rows(&gate);
    let (d, l) = (col(&gh, "direct"), col(&gh, "leading"));
    let phi: Vec<(f64, f64)> = gb.iter().map(|r| (r[d].parse().unwrap(), r[l].parse().unwrap())).collect();
    assert!(phi[0].0 < 0.0 && phi[1].0 > 0.0 && phi[1].0.abs() > phi[0].0.abs(), "{phi:?}");
    assert!(phi[0].1 < 0.0 && phi[1].1 > 0.0, "{phi:?}");
}

#[test]
fn resolvent_command_matches_constant_trace() {
    let r = Run::new();
    let cfg = r.write(
        "r.cfg",
        "system.builtin = expanding\n[grid]\nt_min = 0\nt_max = 5\nt_count = 6\n[run]\ncommand = resolvent\n",
    );
    let csv = r.ok(&cfg, "r", &[]);
    for row in rows(&csv).1 {
        let (tau, v): (f64, f64) = (row[1].parse().unwrap(), row[2].parse().unwrap());
        let exact = 0.5 * (0.5 * tau).exp();
        assert!((v / exact - 1.0).abs() <= 1e-6, "tau = {tau}: {v}");
    }
}

#[test]
fn missing_orbit_and_command_are_reported() {
    let r = Run::new();
    let cfg = r.write("p.cfg", "system.builtin = parabolic\n");
    let o = r.kickflow(&cfg, "x", &["melnikov"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no Heteroclinic orbit"));
    let o = r.kickflow(&cfg, "x", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no command given"));
}

#[test]
fn positional_command_overrides_config() {
    let r = Run::new();
    let cfg = r.write("d.cfg", &DUFFING_SOLID.replace("command = melnikov", "command = zeros"));
    let csv = r.ok(&cfg, "d", &["melnikov"]);
    assert!(csv.starts_with("p,t,side,M\n"));
    assert!(fs::read_to_string(r.path("d.meta")).unwrap().contains("command = melnikov"));
}

#[test]
fn oracle_on_parabolic_with_transport_formula_is_second_order_or_better() {
    let r = Run::new();
    let cfg = r.write(
        "o.cfg",
        "system.builtin = parabolic\n[grid]\nt_min = -0.5\nt_max = 0.5\nt_count = 2\n[run]\ncommand = oracle\nformula = transport\n",
    );
    let csv = r.ok(&cfg, "o", &[]);
    let (h, body) = rows(&csv);
    let (k, e, pr, err) = (col(&h, "kind"), col(&h, "epsilon"), col(&h, "predicted"), col(&h, "error"));
    for kind in ["unstable", "stable"] {
        let live: Vec<_> = body.iter().filter(|r| r[k] == kind && r[pr].parse::<f64>().unwrap() != 0.0).collect();
        assert_eq!(live.len(), 3, "{kind}");
        let eps: Vec<f64> = live.iter().map(|r| r[e].parse().unwrap()).collect();
        let errs: Vec<f64> = live.iter().map(|r| r[err].parse().unwrap()).collect();
        let s = slope(&eps, &errs);
        assert!(s >= 1.7, "{kind}: slope {s}, errors {errs:?}");
    }
}
