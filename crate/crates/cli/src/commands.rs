//! One function per command. Each returns finished tables; rows are ordered
//! by grid index however the work was scheduled.

use rayon::prelude::*;

use kickflow_core::flow::{manifold_oracle, IntegratorSettings, OracleSettings};
use kickflow_core::melnikov::{
    displaced_point, find_heteroclinic_zeros, flux_gate_direct, flux_leading, linspace, pseudo_separatrix, resolvent,
    GridTime, MelnikovGrid, MelnikovKind, MelnikovProblem, MelnikovSettings, ResolventKind, SeparatrixSampling,
    ZeroSettings,
};
use kickflow_core::{ManifoldKind, OrbitKind, OrbitParametrization};

use crate::config::{Command, RunConfig};
use crate::error::{Context, Result};
use crate::setup::Setup;

/// A CSV table: header plus rows of already formatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Appended to the output prefix before `.csv`.
    pub suffix: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(suffix: &'static str, header: &[&'static str]) -> Self {
        Self { suffix, header: header.to_vec(), rows: Vec::new() }
    }
}

/// 17 significant digits, scientific notation.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Column layout of each command's main table; the text of `--help`.
pub fn columns(command: Command, cfg: Option<&RunConfig>) -> Vec<&'static str> {
    match command {
        Command::Melnikov => vec!["p", "t", "side", "M"],
        Command::Manifold => vec!["kind", "p", "t", "side", "M", "x1", "x2", "orbit_x1", "orbit_x2"],
        Command::Flux if cfg.is_some_and(|c| c.run.direct_flux) => {
            vec!["p", "t", "side", "leading", "direct", "orientation_consistent"]
        }
        Command::Flux => vec!["p", "t", "side", "leading"],
        Command::Zeros => vec!["p", "t", "dM_dp", "dM_dt", "simple", "on_jump_set"],
        Command::Separatrix => vec!["t", "side", "segment", "index", "x1", "x2"],
        Command::Oracle => vec!["kind", "p", "t", "side", "epsilon", "predicted", "measured", "error"],
        Command::Resolvent => vec!["p", "tau", "R"],
    }
}

pub const GATE_COLUMNS: [&str; 7] = ["t", "side", "p", "gate_length", "direct", "leading", "orientation_consistent"];

fn orbit_kind(kind: MelnikovKind) -> OrbitKind {
    match kind {
        MelnikovKind::Unstable => OrbitKind::Unstable,
        MelnikovKind::Stable => OrbitKind::Stable,
        MelnikovKind::Distance => OrbitKind::Heteroclinic,
    }
}

fn manifold_orbit(kind: ManifoldKind) -> OrbitKind {
    match kind {
        ManifoldKind::Unstable => OrbitKind::Unstable,
        ManifoldKind::Stable => OrbitKind::Stable,
    }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    setup: &'a Setup,
    ps: Vec<f64>,
    ts: Vec<f64>,
}

impl Ctx<'_> {
    fn problem<'b>(&'b self, orbit: &'b OrbitParametrization) -> MelnikovProblem<'b> {
        let settings = MelnikovSettings {
            formula: self.cfg.run.formula,
            resolvent_step: self.cfg.run.resolvent_step,
            ..MelnikovSettings::default()
        };
        MelnikovProblem::new(&self.setup.field, &self.setup.schedule, orbit).with_settings(settings)
    }

    fn times(&self) -> Vec<GridTime> {
        self.ts.iter().map(|&t| GridTime::resolve(&self.setup.schedule, t, self.cfg.grid.exclusion)).collect()
    }

    fn integrator(&self) -> IntegratorSettings {
        IntegratorSettings::dopri5(self.cfg.run.integrator_tol, self.cfg.run.integrator_tol)
    }

    fn sampling(&self) -> SeparatrixSampling {
        SeparatrixSampling { samples: self.cfg.run.separatrix_samples, span: self.cfg.run.separatrix_span }
    }
}

pub fn run(cfg: &RunConfig, command: Command, setup: &Setup) -> Result<Vec<Table>> {
    let g = &cfg.grid;
    let ctx = Ctx { cfg, setup, ps: linspace(g.p_min, g.p_max, g.p_count), ts: linspace(g.t_min, g.t_max, g.t_count) };
    match command {
        Command::Melnikov => melnikov(&ctx),
        Command::Manifold => manifold(&ctx),
        Command::Flux => flux(&ctx),
        Command::Zeros => zeros(&ctx),
        Command::Separatrix => separatrix(&ctx),
        Command::Oracle => oracle(&ctx),
        Command::Resolvent => resolvent_table(&ctx),
    }
}

fn melnikov(ctx: &Ctx<'_>) -> Result<Vec<Table>> {
    let kind = ctx.cfg.run.kind;
    let orbit = ctx.setup.orbit(orbit_kind(kind))?;
    let problem = ctx.problem(&orbit);
    let grid = MelnikovGrid::compute(&problem, kind, &ctx.ps, &ctx.ts, ctx.cfg.grid.exclusion)
        .context(|| format!("{} Melnikov grid", kind.name()))?;
    let mut table = Table::new("", &columns(Command::Melnikov, None));
    for (ip, &p) in grid.p.iter().enumerate() {
        for (it, gt) in grid.t.iter().enumerate() {
            table.rows.push(vec![num(p), num(gt.slice.time), gt.side_label().into(), num(grid.value(ip, it))]);
        }
    }
    Ok(vec![table])
}

fn manifold(ctx: &Ctx<'_>) -> Result<Vec<Table>> {
    let times = ctx.times();
    let (t_lo, t_hi) = (ctx.cfg.grid.t_min, ctx.cfg.grid.t_max);
    let mut table = Table::new("", &columns(Command::Manifold, None));
    for kind in ctx.cfg.run.manifold.kinds() {
        let orbit = ctx.setup.orbit(manifold_orbit(kind))?;
        let problem = ctx.problem(&orbit);
        let mk = MelnikovKind::from(kind);
        let blocks: Vec<Vec<Vec<String>>> = ctx
            .ps
            .par_iter()
            .map(|&p| -> Result<Vec<Vec<String>>> {
                let what = || format!("{} pseudo-manifold at p = {p}", kind.name());
                let slice = problem.at(mk, p, t_lo, t_hi).context(what)?;
                let base = orbit.point(p).context(what)?;
                times
                    .iter()
                    .map(|gt| {
                        let m = slice.value(gt.slice).context(what)?;
                        let x = displaced_point(&problem, p, m).context(what)?;
                        Ok(vec![
                            kind.name().into(),
                            num(p),
                            num(gt.slice.time),
                            gt.side_label().into(),
                            num(m),
                            num(x.x),
                            num(x.y),
                            num(base.x),
                            num(base.y),
                        ])
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        table.rows.extend(blocks.into_iter().flatten());
    }
    Ok(vec![table])
}

fn flux(ctx: &Ctx<'_>) -> Result<Vec<Table>> {
    let orbit = ctx.setup.orbit(OrbitKind::Heteroclinic)?;
    let problem = ctx.problem(&orbit);
    let times = ctx.times();
    let direct = ctx.cfg.run.direct_flux;
    let cells: Vec<(f64, GridTime)> = ctx.ps.iter().flat_map(|&p| times.iter().map(move |&g| (p, g))).collect();
    let (sampling, integrator) = (ctx.sampling(), ctx.integrator());
    let rows = cells
        .par_iter()
        .map(|&(p, gt)| -> Result<Vec<String>> {
            let what = || format!("flux at p = {p}, t = {}", gt.slice.time);
            let lead = flux_leading(&problem, p, gt.slice).context(what)?;
            let mut row = vec![num(p), num(gt.slice.time), gt.side_label().into(), num(lead)];
            if direct {
                let geom = pseudo_separatrix(&problem, p, gt.slice, &sampling, &integrator).context(what)?;
                let gate = flux_gate_direct(&ctx.setup.field, &geom);
                row.push(num(gate.value));
                row.push(gate.orientation_consistent.to_string());
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new("", &columns(Command::Flux, Some(ctx.cfg)));
    table.rows = rows;
    Ok(vec![table])
}

fn zeros(ctx: &Ctx<'_>) -> Result<Vec<Table>> {
    let orbit = ctx.setup.orbit(OrbitKind::Heteroclinic)?;
    let problem = ctx.problem(&orbit);
    let settings = ZeroSettings {
        t_samples: ctx.cfg.run.zero_samples,
        exclusion_radius: ctx.cfg.grid.exclusion,
        ..ZeroSettings::default()
    };
    let g = &ctx.cfg.grid;
    let found = find_heteroclinic_zeros(&problem, &ctx.ps, (g.t_min, g.t_max), &settings)
        .context(|| "zero scan of the distance Melnikov function".into())?;
    let mut table = Table::new("", &columns(Command::Zeros, None));
    for z in found {
        table.rows.push(vec![
            num(z.p),
            num(z.t),
            num(z.dm_dp),
            num(z.dm_dt),
            z.simple.to_string(),
            z.on_jump_set.to_string(),
        ]);
    }
    Ok(vec![table])
}

fn separatrix(ctx: &Ctx<'_>) -> Result<Vec<Table>> {
    let orbit = ctx.setup.orbit(OrbitKind::Heteroclinic)?;
    let problem = ctx.problem(&orbit);
    let p = ctx.cfg.run.gate_p;
    let (sampling, integrator) = (ctx.sampling(), ctx.integrator());
    let results = ctx
        .times()
        .into_par_iter()
        .map(|gt| {
            let what = || format!("pseudo-separatrix at p = {p}, t = {}", gt.slice.time);
            let geom = pseudo_separatrix(&problem, p, gt.slice, &sampling, &integrator).context(what)?;
            let gate = flux_gate_direct(&ctx.setup.field, &geom);
            let lead = flux_leading(&problem, p, gt.slice).context(what)?;
            Ok((gt, geom, gate, lead))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut curves = Table::new("", &columns(Command::Separatrix, None));
    let mut gates = Table::new(".gate", &GATE_COLUMNS);
    for (gt, geom, gate, lead) in results {
        let (t, side) = (num(gt.slice.time), gt.side_label());
        let gate_pts = [geom.gate_unstable, geom.gate_stable];
        for (segment, pts) in [("unstable", &geom.unstable[..]), ("gate", &gate_pts[..]), ("stable", &geom.stable[..])]
        {
            for (i, x) in pts.iter().enumerate() {
                curves.rows.push(vec![t.clone(), side.into(), segment.into(), i.to_string(), num(x.x), num(x.y)]);
            }
        }
        gates.rows.push(vec![
            t,
            side.into(),
            num(p),
            num(geom.gate_length()),
            num(gate.value),
            num(lead),
            gate.orientation_consistent.to_string(),
        ]);
    }
    Ok(vec![curves, gates])
}

fn oracle(ctx: &Ctx<'_>) -> Result<Vec<Table>> {
    let times = ctx.times();
    let tol = ctx.cfg.run.oracle_tol;
    let settings = OracleSettings { integrator: IntegratorSettings::dopri5(tol, tol), ..OracleSettings::default() };
    let mut table = Table::new("", &columns(Command::Oracle, None));
    for kind in ctx.cfg.run.manifold.kinds() {
        let orbit = ctx.setup.orbit(manifold_orbit(kind))?;
        let problem = ctx.problem(&orbit);
        let mk = MelnikovKind::from(kind);
        let cells: Vec<(f64, GridTime, f64)> = ctx
            .ps
            .iter()
            .flat_map(|&p| times.iter().flat_map(move |&g| ctx.cfg.run.oracle_epsilons.iter().map(move |&e| (p, g, e))))
            .collect();
        let rows = cells
            .par_iter()
            .map(|&(p, gt, eps)| -> Result<Vec<String>> {
                let what = || format!("{} oracle at p = {p}, t = {}, epsilon = {eps}", kind.name(), gt.slice.time);
                let m = problem.value(mk, p, gt.slice).context(what)?;
                let speed = ctx.setup.field.velocity(orbit.point(p).context(what)?).norm();
                let predicted = eps * m / speed;
                let sched = ctx.setup.schedule.with_epsilon(eps);
                let measured =
                    manifold_oracle(&ctx.setup.field, &sched, &orbit, kind, p, gt.slice, &settings).context(what)?;
                Ok(vec![
                    kind.name().into(),
                    num(p),
                    num(gt.slice.time),
                    gt.side_label().into(),
                    num(eps),
                    num(predicted),
                    num(measured),
                    num((measured - predicted).abs()),
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        table.rows.extend(rows);
    }
    Ok(vec![table])
}

fn resolvent_table(ctx: &Ctx<'_>) -> Result<Vec<Table>> {
    let kind = ctx.cfg.run.kind;
    let orbit = ctx.setup.orbit(orbit_kind(kind))?;
    let rkind = match kind {
        MelnikovKind::Unstable => ResolventKind::Unstable,
        MelnikovKind::Stable => ResolventKind::Stable,
        MelnikovKind::Distance => ResolventKind::TwoSided,
    };
    let g = &ctx.cfg.grid;
    let (forward, backward) = (g.t_max.max(0.0), (-g.t_min).max(0.0));
    let blocks = ctx
        .ps
        .par_iter()
        .map(|&p| -> Result<Vec<Vec<String>>> {
            let what = || format!("resolvent at p = {p}");
            let table = resolvent(&ctx.setup.field, &orbit, rkind, p, forward, backward, ctx.cfg.run.resolvent_step)
                .context(what)?;
            ctx.ts.iter().map(|&tau| Ok(vec![num(p), num(tau), num(table.value(tau).context(what)?)])).collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new("", &columns(Command::Resolvent, None));
    table.rows = blocks.into_iter().flatten().collect();
    Ok(vec![table])
}
