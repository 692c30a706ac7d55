//! Sectioned `key = value` run configuration.
//!
//! Keys are written either fully qualified (`run.epsilon = 0.01`) or relative
//! to the enclosing section (`epsilon = 0.01` under `[run]`). `#` starts a
//! comment. Every key must be recognised; problems are collected and reported
//! together.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use kickflow_core::builtin::{Builtin, DuffingPreset};
use kickflow_core::flow::Branch;
use kickflow_core::melnikov::{Formula, MelnikovKind, EXCLUSION_RADIUS};
use kickflow_core::{ManifoldKind, OrbitKind, Vec2};
use kickflow_dsl::parse;

use crate::error::{ConfigError, Problem};

const SECTIONS: [&str; 5] = ["system", "impulse", "orbit", "grid", "run"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Melnikov,
    Manifold,
    Flux,
    Zeros,
    Separatrix,
    Oracle,
    Resolvent,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Melnikov,
        Command::Manifold,
        Command::Flux,
        Command::Zeros,
        Command::Separatrix,
        Command::Oracle,
        Command::Resolvent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Melnikov => "melnikov",
            Command::Manifold => "manifold",
            Command::Flux => "flux",
            Command::Zeros => "zeros",
            Command::Separatrix => "separatrix",
            Command::Oracle => "oracle",
            Command::Resolvent => "resolvent",
        }
    }
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            let names: Vec<_> = Command::ALL.iter().map(|c| c.name()).collect();
            format!("unknown command `{s}` (expected one of {})", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SystemSpec {
    Builtin { which: Builtin, preset: Option<DuffingPreset> },
    Custom { f1: String, f2: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseSpec {
    pub time: f64,
    pub g1: String,
    pub g2: String,
}

/// Orbit selection. For builtins only `kind` and `window` apply; custom
/// systems integrate `branch` of the manifold of `saddle`, ending at
/// `target` when given (a connection).
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitSpec {
    pub kind: Option<OrbitKind>,
    pub window: Option<(f64, f64)>,
    pub saddle: Option<Vec2>,
    pub branch: Option<Branch>,
    pub target: Option<Vec2>,
    pub amplitude: f64,
    pub extent: f64,
    pub delta0: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub p_min: f64,
    pub p_max: f64,
    pub p_count: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub t_count: usize,
    pub exclusion: f64,
}

/// Which manifolds the `manifold` and `oracle` commands cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManifoldChoice {
    Unstable,
    Stable,
    Both,
}

impl ManifoldChoice {
    pub fn kinds(self) -> Vec<ManifoldKind> {
        match self {
            ManifoldChoice::Unstable => vec![ManifoldKind::Unstable],
            ManifoldChoice::Stable => vec![ManifoldKind::Stable],
            ManifoldChoice::Both => vec![ManifoldKind::Unstable, ManifoldKind::Stable],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub command: Option<Command>,
    pub epsilon: f64,
    pub alpha: f64,
    pub kind: MelnikovKind,
    pub manifold: ManifoldChoice,
    pub formula: Formula,
    pub resolvent_step: f64,
    pub integrator_tol: f64,
    pub oracle_tol: f64,
    pub oracle_epsilons: Vec<f64>,
    pub gate_p: f64,
    pub separatrix_samples: usize,
    pub separatrix_span: f64,
    pub direct_flux: bool,
    pub zero_samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub system: SystemSpec,
    pub params: BTreeMap<String, f64>,
    /// Empty for a builtin means its default schedule.
    pub impulses: Vec<ImpulseSpec>,
    pub orbit: OrbitSpec,
    pub grid: GridSpec,
    pub run: RunSpec,
}

struct Entry {
    value: String,
    line: usize,
}

/// Raw entries keyed by fully qualified name; extraction removes them so
/// leftovers are unknown keys.
struct Entries {
    map: BTreeMap<String, Entry>,
    problems: Vec<Problem>,
}

impl Entries {
    fn parse(text: &str) -> Self {
        let mut map: BTreeMap<String, Entry> = BTreeMap::new();
        let mut problems = Vec::new();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    problems.push(Problem::at(line, format!("malformed section header `{body}`")));
                    continue;
                };
                let name = name.trim();
                match check_section(name) {
                    Ok(()) => section = Some(name.to_string()),
                    Err(msg) => {
                        problems.push(Problem::at(line, msg));
                        section = None;
                    }
                }
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                problems.push(Problem::at(line, format!("expected `key = value`, found `{body}`")));
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || key.contains(char::is_whitespace) {
                problems.push(Problem::at(line, format!("malformed key `{key}`")));
                continue;
            }
            let head = key.split('.').next().unwrap_or("");
            let full = if SECTIONS.contains(&head) {
                key.to_string()
            } else if let Some(s) = &section {
                format!("{s}.{key}")
            } else {
                problems.push(Problem::at(line, format!("key `{key}` is outside any section")));
                continue;
            };
            if let Some(prev) = map.get(&full) {
                problems.push(Problem::at(line, format!("duplicate key `{full}` (first set on line {})", prev.line)));
                continue;
            }
            map.insert(full, Entry { value: value.to_string(), line });
        }
        Self { map, problems }
    }

    fn take(&mut self, key: &str) -> Option<Entry> {
        self.map.remove(key)
    }

    fn problem(&mut self, line: Option<usize>, message: String) {
        self.problems.push(Problem { line, message });
    }

    fn value<T>(&mut self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Option<(T, usize)> {
        let e = self.take(key)?;
        match parse(&e.value) {
            Ok(v) => Some((v, e.line)),
            Err(msg) => {
                self.problem(Some(e.line), format!("`{key}`: {msg}"));
                None
            }
        }
    }

    fn f64_or(&mut self, key: &str, default: f64) -> f64 {
        self.value(key, parse_f64).map_or(default, |(v, _)| v)
    }

    fn usize_or(&mut self, key: &str, default: usize) -> usize {
        self.value(key, |s| s.parse::<usize>().map_err(|_| format!("expected a non-negative integer, found `{s}`")))
            .map_or(default, |(v, _)| v)
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        self.map.get(key).map(|e| e.line)
    }
}

fn check_section(name: &str) -> Result<(), String> {
    if let Some(n) = name.strip_prefix("impulse.") {
        return match n.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(()),
            _ => Err(format!("impulse sections are numbered from 1, found `[{name}]`")),
        };
    }
    if SECTIONS.contains(&name) && name != "impulse" {
        Ok(())
    } else {
        Err(format!("unknown section `[{name}]`"))
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(format!("`{s}` is not finite")),
        Err(_) => Err(format!("expected a number, found `{s}`")),
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|x| parse_f64(x.trim())).collect()
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    match parse_list(s)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(format!("expected two comma-separated numbers, found `{s}`")),
    }
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("expected `true` or `false`, found `{s}`")),
    }
}

fn one_of<T: Copy>(s: &str, table: &[(&str, T)]) -> Result<T, String> {
    table.iter().find(|(n, _)| *n == s).map(|&(_, v)| v).ok_or_else(|| {
        let names: Vec<_> = table.iter().map(|(n, _)| *n).collect();
        format!("expected one of {}, found `{s}`", names.join(", "))
    })
}

const ORBIT_KINDS: [(&str, OrbitKind); 3] =
    [("unstable", OrbitKind::Unstable), ("stable", OrbitKind::Stable), ("heteroclinic", OrbitKind::Heteroclinic)];
const BRANCHES: [(&str, Branch); 4] = [
    ("unstable+", Branch::UnstablePlus),
    ("unstable-", Branch::UnstableMinus),
    ("stable+", Branch::StablePlus),
    ("stable-", Branch::StableMinus),
];
const PRESETS: [(&str, DuffingPreset); 3] =
    [("solid", DuffingPreset::Solid), ("dashed", DuffingPreset::Dashed), ("dotted", DuffingPreset::Dotted)];
const MELNIKOV_KINDS: [(&str, MelnikovKind); 3] =
    [("distance", MelnikovKind::Distance), ("unstable", MelnikovKind::Unstable), ("stable", MelnikovKind::Stable)];
const MANIFOLDS: [(&str, ManifoldChoice); 3] =
    [("unstable", ManifoldChoice::Unstable), ("stable", ManifoldChoice::Stable), ("both", ManifoldChoice::Both)];
const FORMULAS: [(&str, Formula); 2] = [("resolvent", Formula::Resolvent), ("transport", Formula::Transport)];

fn name_of<T: PartialEq + Copy>(v: T, table: &[(&'static str, T)]) -> &'static str {
    table.iter().find(|(_, x)| *x == v).map(|(n, _)| *n).expect("table covers every variant")
}

impl RunConfig {
    /// Parse and validate configuration text. `origin` labels diagnostics.
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let mut en = Entries::parse(text);
        let cfg = Self::extract(&mut en);
        for (key, e) in std::mem::take(&mut en.map) {
            en.problem(Some(e.line), format!("unknown key `{key}`"));
        }
        let mut problems = en.problems;
        problems.sort_by_key(|p| p.line.unwrap_or(usize::MAX));
        match cfg {
            Some(cfg) if problems.is_empty() => Ok(cfg),
            _ => Err(ConfigError { origin: origin.to_string(), problems }),
        }
    }

    fn extract(en: &mut Entries) -> Option<Self> {
        let params = extract_params(en);
        let param_names: Vec<String> = params.keys().cloned().collect();

        let builtin_line = en.line_of("system.builtin");
        let builtin = en.value("system.builtin", |s| Builtin::from_str(s).map_err(|e| e.to_string()));
        let preset = en.value("system.preset", |s| one_of(s, &PRESETS));
        let f1 = en.take("system.f1");
        let f2 = en.take("system.f2");
        let system = match (builtin, f1, f2) {
            (Some((which, _)), None, None) => {
                if let Some((_, line)) = preset {
                    if which != Builtin::Duffing {
                        en.problem(Some(line), "`system.preset` applies only to the duffing builtin".into());
                    }
                }
                Some(SystemSpec::Builtin { which, preset: preset.map(|(p, _)| p) })
            }
            (None, Some(f1), Some(f2)) if builtin_line.is_none() => {
                if let Some((_, line)) = preset {
                    en.problem(Some(line), "`system.preset` applies only to the duffing builtin".into());
                }
                for e in [&f1, &f2] {
                    if let Err(err) = parse(&e.value, &param_names) {
                        en.problem(Some(e.line), format!("expression `{}`: {err}", e.value));
                    }
                }
                Some(SystemSpec::Custom { f1: f1.value, f2: f2.value })
            }
            (b, f1, f2) => {
                if b.is_some() || builtin_line.is_some() || f1.is_some() || f2.is_some() {
                    let line = builtin_line.or(f1.as_ref().map(|e| e.line)).or(f2.as_ref().map(|e| e.line));
                    if builtin_line.is_some() && (f1.is_some() || f2.is_some()) {
                        en.problem(line, "give either `system.builtin` or `system.f1`/`system.f2`, not both".into());
                    } else if builtin_line.is_none() {
                        en.problem(line, "custom systems need both `system.f1` and `system.f2`".into());
                    }
                } else {
                    en.problem(None, "missing `system.builtin` (or `system.f1` and `system.f2`)".into());
                }
                None
            }
        };
        if matches!(system, Some(SystemSpec::Builtin { .. })) && !params.is_empty() {
            en.problem(None, "`system.param.*` applies only to custom systems and impulse expressions".into());
        }

        let impulses = extract_impulses(en, &param_names);
        if let (Some(SystemSpec::Builtin { preset: Some(_), .. }), false) = (&system, impulses.is_empty()) {
            en.problem(None, "`system.preset` cannot be combined with `[impulse.N]` sections".into());
        }
        if matches!(system, Some(SystemSpec::Custom { .. })) && impulses.is_empty() {
            en.problem(None, "custom systems need at least one `[impulse.N]` section".into());
        }
        let orbit = extract_orbit(en, system.as_ref());
        let grid = extract_grid(en);
        let default_eps = match &system {
            Some(SystemSpec::Builtin { which: Builtin::Eddy, .. }) => 0.02,
            _ => 0.01,
        };
        let run = extract_run(en, default_eps);
        Some(Self { system: system?, params, impulses, orbit, grid, run })
    }

    /// Canonical text with every setting explicit; parsing it gives back an
    /// equal configuration.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let f = |v: f64| format!("{v:?}");
        let list = |vs: &[f64]| vs.iter().map(|&v| format!("{v:?}")).collect::<Vec<_>>().join(", ");
        s.push_str("[system]\n");
        match &self.system {
            SystemSpec::Builtin { which, preset } => {
                writeln!(s, "builtin = {}", which.name()).unwrap();
                if let Some(p) = preset {
                    writeln!(s, "preset = {}", name_of(*p, &PRESETS)).unwrap();
                }
            }
            SystemSpec::Custom { f1, f2 } => {
                writeln!(s, "f1 = {f1}\nf2 = {f2}").unwrap();
            }
        }
        for (k, v) in &self.params {
            writeln!(s, "param.{k} = {}", f(*v)).unwrap();
        }
        for (i, imp) in self.impulses.iter().enumerate() {
            writeln!(s, "\n[impulse.{}]\ntime = {}\ng1 = {}\ng2 = {}", i + 1, f(imp.time), imp.g1, imp.g2).unwrap();
        }
        let o = &self.orbit;
        s.push_str("\n[orbit]\n");
        if let Some(k) = o.kind {
            writeln!(s, "kind = {}", name_of(k, &ORBIT_KINDS)).unwrap();
        }
        if let Some((lo, hi)) = o.window {
            writeln!(s, "window = {}", list(&[lo, hi])).unwrap();
        }
        if let Some(a) = o.saddle {
            writeln!(s, "saddle = {}", list(&[a.x, a.y])).unwrap();
        }
        if let Some(b) = o.branch {
            writeln!(s, "branch = {}", name_of(b, &BRANCHES)).unwrap();
        }
        if let Some(b) = o.target {
            writeln!(s, "target = {}", list(&[b.x, b.y])).unwrap();
        }
        if matches!(self.system, SystemSpec::Custom { .. }) {
            writeln!(
                s,
                "amplitude = {}\nextent = {}\ndelta0 = {}\nstep = {}",
                f(o.amplitude),
                f(o.extent),
                f(o.delta0),
                f(o.step)
            )
            .unwrap();
        }
        let g = &self.grid;
        writeln!(
            s,
            "\n[grid]\np_min = {}\np_max = {}\np_count = {}\nt_min = {}\nt_max = {}\nt_count = {}\nexclusion = {}",
            f(g.p_min),
            f(g.p_max),
            g.p_count,
            f(g.t_min),
            f(g.t_max),
            g.t_count,
            f(g.exclusion)
        )
        .unwrap();
        let r = &self.run;
        s.push_str("\n[run]\n");
        if let Some(c) = r.command {
            writeln!(s, "command = {}", c.name()).unwrap();
        }
        writeln!(s, "epsilon = {}\nalpha = {}", f(r.epsilon), f(r.alpha)).unwrap();
        writeln!(s, "kind = {}", name_of(r.kind, &MELNIKOV_KINDS)).unwrap();
        writeln!(s, "manifold = {}", name_of(r.manifold, &MANIFOLDS)).unwrap();
        writeln!(s, "formula = {}", name_of(r.formula, &FORMULAS)).unwrap();
        writeln!(s, "resolvent_step = {}", f(r.resolvent_step)).unwrap();
        writeln!(s, "integrator_tol = {}\noracle_tol = {}", f(r.integrator_tol), f(r.oracle_tol)).unwrap();
        writeln!(s, "oracle_epsilons = {}", list(&r.oracle_epsilons)).unwrap();
        writeln!(s, "gate_p = {}", f(r.gate_p)).unwrap();
        writeln!(s, "separatrix_samples = {}\nseparatrix_span = {}", r.separatrix_samples, f(r.separatrix_span))
            .unwrap();
        writeln!(s, "direct_flux = {}\nzero_samples = {}\nseed = {}", r.direct_flux, r.zero_samples, r.seed).unwrap();
        s
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn extract_params(en: &mut Entries) -> BTreeMap<String, f64> {
    let keys: Vec<String> = en.map.keys().filter(|k| k.starts_with("system.param.")).cloned().collect();
    let mut out = BTreeMap::new();
    for key in keys {
        let name = key["system.param.".len()..].to_string();
        let line = en.line_of(&key);
        let ok = kickflow_dsl::parser::is_identifier(&name) && !kickflow_dsl::parser::is_reserved(&name);
        if let Some((v, _)) = en.value(&key, parse_f64) {
            if ok {
                out.insert(name, v);
            } else {
                en.problem(line, format!("parameter name `{name}` is reserved or not an identifier"));
            }
        }
    }
    out
}

fn extract_impulses(en: &mut Entries, params: &[String]) -> Vec<ImpulseSpec> {
    let mut numbers = BTreeSet::new();
    for key in en.map.keys() {
        if let Some(rest) = key.strip_prefix("impulse.") {
            if let Some(n) = rest.split('.').next().and_then(|n| n.parse::<usize>().ok()) {
                numbers.insert(n);
            }
        }
    }
    let mut out = Vec::new();
    let mut prev: Option<(f64, usize)> = None;
    for (expected, &n) in (1..).zip(&numbers) {
        if n != expected {
            en.problem(
                None,
                format!("impulse sections must be numbered 1..n without gaps; `impulse.{expected}` is missing"),
            );
            break;
        }
        let time_key = format!("impulse.{n}.time");
        let time_line = en.line_of(&time_key);
        let time = en.value(&time_key, parse_f64);
        let mut expr = |c: &str| -> Option<String> {
            let key = format!("impulse.{n}.{c}");
            match en.take(&key) {
                None => {
                    en.problem(None, format!("missing `{key}`"));
                    None
                }
                Some(e) => match parse(&e.value, params) {
                    Ok(_) => Some(e.value),
                    Err(err) => {
                        en.problem(Some(e.line), format!("expression `{}`: {err}", e.value));
                        None
                    }
                },
            }
        };
        let (g1, g2) = (expr("g1"), expr("g2"));
        if time.is_none() && time_line.is_none() {
            en.problem(None, format!("missing `{time_key}`"));
        }
        if let Some((t, line)) = time {
            if let Some((pt, pn)) = prev {
                if t <= pt {
                    en.problem(
                        Some(line),
                        format!("jump times not increasing: impulse.{n}.time = {t} follows impulse.{pn}.time = {pt}"),
                    );
                }
            }
            prev = Some((t, n));
            if let (Some(g1), Some(g2)) = (g1, g2) {
                out.push(ImpulseSpec { time: t, g1, g2 });
            }
        }
    }
    out
}

fn extract_orbit(en: &mut Entries, system: Option<&SystemSpec>) -> OrbitSpec {
    let kind = en.value("orbit.kind", |s| one_of(s, &ORBIT_KINDS));
    let window = en.value("orbit.window", parse_pair);
    let saddle = en.value("orbit.saddle", parse_pair);
    let branch = en.value("orbit.branch", |s| one_of(s, &BRANCHES));
    let target = en.value("orbit.target", parse_pair);
    let custom_keys = ["orbit.amplitude", "orbit.extent", "orbit.delta0", "orbit.step"];
    let custom_lines: Vec<Option<usize>> = custom_keys.iter().map(|k| en.line_of(k)).collect();
    let spec = OrbitSpec {
        kind: kind.map(|(k, _)| k),
        window: window.map(|(w, _)| w),
        saddle: saddle.map(|((x, y), _)| Vec2::new(x, y)),
        branch: branch.map(|(b, _)| b),
        target: target.map(|((x, y), _)| Vec2::new(x, y)),
        amplitude: en.f64_or("orbit.amplitude", 1.0),
        extent: en.f64_or("orbit.extent", 15.0),
        delta0: en.f64_or("orbit.delta0", 1e-7),
        step: en.f64_or("orbit.step", 1e-3),
    };
    if let Some(((lo, hi), line)) = window {
        if !(lo < hi) {
            en.problem(Some(line), format!("orbit window [{lo}, {hi}] is empty"));
        }
    }
    match system {
        Some(SystemSpec::Builtin { .. }) => {
            for (key, line) in [
                ("orbit.saddle", saddle.map(|(_, l)| l)),
                ("orbit.branch", branch.map(|(_, l)| l)),
                ("orbit.target", target.map(|(_, l)| l)),
            ]
            .into_iter()
            .chain(custom_keys.iter().copied().zip(custom_lines.iter().copied()))
            {
                if let Some(line) = line {
                    en.problem(Some(line), format!("`{key}` applies only to custom systems"));
                }
            }
        }
        Some(SystemSpec::Custom { .. }) => {
            if saddle.is_none() && en.problems.iter().all(|p| !p.message.contains("orbit.saddle")) {
                en.problem(None, "custom systems need `orbit.saddle`".into());
            }
            if branch.is_none() && en.problems.iter().all(|p| !p.message.contains("orbit.branch")) {
                en.problem(None, "custom systems need `orbit.branch`".into());
            }
            if let Some((_, line)) = kind {
                en.problem(
                    Some(line),
                    "`orbit.kind` applies only to builtins; custom orbits follow `orbit.branch` and `orbit.target`"
                        .into(),
                );
            }
            for (key, v) in
                [("amplitude", spec.amplitude), ("extent", spec.extent), ("delta0", spec.delta0), ("step", spec.step)]
            {
                if !(v > 0.0) {
                    en.problem(None, format!("`orbit.{key}` must be positive, found {v}"));
                }
            }
        }
        None => {}
    }
    spec
}

fn extract_grid(en: &mut Entries) -> GridSpec {
    let g = GridSpec {
        p_min: en.f64_or("grid.p_min", 0.0),
        p_max: en.f64_or("grid.p_max", 0.0),
        p_count: en.usize_or("grid.p_count", 1),
        t_min: en.f64_or("grid.t_min", -4.0),
        t_max: en.f64_or("grid.t_max", 4.0),
        t_count: en.usize_or("grid.t_count", 161),
        exclusion: en.f64_or("grid.exclusion", EXCLUSION_RADIUS),
    };
    for (axis, lo, hi, n) in [("p", g.p_min, g.p_max, g.p_count), ("t", g.t_min, g.t_max, g.t_count)] {
        if n == 0 {
            en.problem(None, format!("grid is empty: `grid.{axis}_count` must be at least 1"));
        }
        if lo > hi {
            en.problem(None, format!("grid range `{axis}` is reversed: {lo} > {hi}"));
        }
    }
    if !(g.exclusion > 0.0) {
        en.problem(None, format!("`grid.exclusion` must be positive, found {}", g.exclusion));
    }
    g
}

fn extract_run(en: &mut Entries, default_eps: f64) -> RunSpec {
    let command = en.value("run.command", |s| s.parse::<Command>()).map(|(c, _)| c);
    let alpha_line = en.line_of("run.alpha");
    let r = RunSpec {
        command,
        epsilon: en.f64_or("run.epsilon", default_eps),
        alpha: en.f64_or("run.alpha", 0.5),
        kind: en.value("run.kind", |s| one_of(s, &MELNIKOV_KINDS)).map_or(MelnikovKind::Distance, |v| v.0),
        manifold: en.value("run.manifold", |s| one_of(s, &MANIFOLDS)).map_or(ManifoldChoice::Both, |v| v.0),
        formula: en.value("run.formula", |s| one_of(s, &FORMULAS)).map_or(Formula::Resolvent, |v| v.0),
        resolvent_step: en.f64_or("run.resolvent_step", 1e-3),
        integrator_tol: en.f64_or("run.integrator_tol", 1e-11),
        oracle_tol: en.f64_or("run.oracle_tol", 1e-13),
        oracle_epsilons: en.value("run.oracle_epsilons", parse_list).map_or(vec![4e-3, 2e-3, 1e-3], |v| v.0),
        gate_p: en.f64_or("run.gate_p", 0.0),
        separatrix_samples: en.usize_or("run.separatrix_samples", 201),
        separatrix_span: en.f64_or("run.separatrix_span", 6.0),
        direct_flux: en.value("run.direct_flux", parse_bool).is_some_and(|v| v.0),
        zero_samples: en.usize_or("run.zero_samples", 801),
        seed: en
            .value("run.seed", |s| {
                s.parse::<u64>().map_err(|_| format!("expected a non-negative integer, found `{s}`"))
            })
            .map_or(0, |v| v.0),
    };
    if !(0.0..=1.0).contains(&r.alpha) {
        en.problem(alpha_line, format!("`run.alpha` must lie in [0, 1], found {}", r.alpha));
    }
    for (key, v) in [
        ("resolvent_step", r.resolvent_step),
        ("integrator_tol", r.integrator_tol),
        ("oracle_tol", r.oracle_tol),
        ("separatrix_span", r.separatrix_span),
    ] {
        if !(v > 0.0) {
            en.problem(None, format!("`run.{key}` must be positive, found {v}"));
        }
    }
    if r.oracle_epsilons.is_empty() || r.oracle_epsilons.iter().any(|&e| !(e > 0.0)) {
        en.problem(None, "`run.oracle_epsilons` must be a non-empty list of positive numbers".into());
    }
    if r.separatrix_samples < 2 {
        en.problem(None, "`run.separatrix_samples` must be at least 2".into());
    }
    if r.zero_samples < 2 {
        en.problem(None, "`run.zero_samples` must be at least 2".into());
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn messages(text: &str) -> Vec<String> {
        RunConfig::parse(text, "test").unwrap_err().problems.into_iter().map(|p| p.message).collect()
    }

    #[test]
    fn qualified_and_relative_keys() {
        let a = RunConfig::parse("system.builtin = duffing\n[run]\nepsilon = 0.05\n", "a").unwrap();
        let b = RunConfig::parse("[system]\nbuiltin = duffing # note\n[grid]\nrun.epsilon = 0.05\n", "b").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.run.epsilon, 0.05);
        assert_eq!(a.run.alpha, 0.5);
    }

    #[test]
    fn duffing_statement_parameters() {
        let text = "[system]\nbuiltin = duffing\n[impulse.1]\ntime = -1\ng1 = 0\ng2 = -1\n\
                    [impulse.2]\ntime = 1\ng1 = 0\ng2 = 1\n[run]\nepsilon = 0.01\nalpha = 0.5\n";
        let c = RunConfig::parse(text, "t").unwrap();
        assert_eq!(c.impulses.iter().map(|i| i.time).collect::<Vec<_>>(), [-1.0, 1.0]);
        assert_eq!(c.impulses[0].g2, "-1");
        assert_eq!(c.impulses[1].g2, "1");
    }

    #[test]
    fn all_problems_are_reported() {
        let text = "[system]\nbuiltin = duffing\n[impulse.1]\ntime = 1\ng1 = 0\ng2 = 1\n\
                    [impulse.2]\ntime = -1\ng1 = 0\ng2 = x1 - ^ x2\n[run]\nalpha = 1.5\nepsilno = 0.1\n";
        let m = messages(text);
        assert_eq!(m.len(), 4, "{m:?}");
        assert!(m.iter().any(|s| s.contains("jump times not increasing")));
        assert!(m.iter().any(|s| s.contains("run.alpha")));
        assert!(m.iter().any(|s| s.contains("unknown key `run.epsilno`")));
        assert!(m.iter().any(|s| s.contains("expected an operand")));
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let e = RunConfig::parse("[system]\nbuiltin duffing\n[foo]\n", "x.cfg").unwrap_err();
        assert_eq!(e.problems[0].line, Some(2));
        assert_eq!(e.problems[1].line, Some(3));
        assert!(e.to_string().contains("x.cfg:2:"));
    }

    #[test]
    fn canonical_text_round_trips() {
        let text = "[system]\nf1 = x2\nf2 = x1 - a*x1^3\nparam.a = 1\n[impulse.1]\ntime = -0.5\ng1 = 0\ng2 = sin(x1)\n\
                    [orbit]\nsaddle = 0, 0\nbranch = unstable+\n[grid]\nt_count = 3\n[run]\ncommand = zeros\n";
        let c = RunConfig::parse(text, "t").unwrap();
        let back = RunConfig::parse(&c.to_text(), "canon").unwrap();
        assert_eq!(c, back);
        assert_eq!(back.to_text(), c.to_text());
    }

    #[test]
    fn builtin_rejects_custom_orbit_keys() {
        let m = messages("system.builtin = eddy\norbit.saddle = 0, 0\n");
        assert!(m[0].contains("only to custom systems"), "{m:?}");
    }
}
