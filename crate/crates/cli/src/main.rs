use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;

use kickflow_cli::commands::{columns, GATE_COLUMNS};
use kickflow_cli::output::write_all;
use kickflow_cli::{run, CliError, Command, RunConfig, Setup};

const AFTER_HELP: &str = "\
Commands and CSV columns:
  melnikov    p,t,side,M        Melnikov function of run.kind on the p x t grid
  manifold    kind,p,t,side,M,x1,x2,orbit_x1,orbit_x2
                                leading-order pseudo-manifold points
  flux        p,t,side,leading  instantaneous flux eps*M; with run.direct_flux=true
                                also direct,orientation_consistent from the gate
  zeros       p,t,dM_dp,dM_dt,simple,on_jump_set
                                zeros of M(p, .) on [t_min, t_max] for each grid p
  separatrix  t,side,segment,index,x1,x2
                                pseudo-separatrix polylines at run.gate_p, plus
                                PREFIX.gate.csv: t,side,p,gate_length,direct,leading,orientation_consistent
  oracle      kind,p,t,side,epsilon,predicted,measured,error
                                direct simulation against eps*M/|f| over run.oracle_epsilons
  resolvent   p,tau,R           divergence resolvent for tau on the t grid

Grid times within grid.exclusion of a jump time are evaluated as one-sided
limits and marked `before` or `after` in the side column. Floats carry 17
significant digits. PREFIX.meta records the resolved configuration and can
be passed back as --config to repeat the run.";

#[derive(Parser, Debug)]
#[command(name = "kickflow", version, about = "Melnikov functions, pseudo-manifolds and flux for impulsively perturbed planar flows", after_long_help = AFTER_HELP)]
struct Args {
    /// Command to run; defaults to run.command from the configuration.
    #[arg(value_parser = |s: &str| s.parse::<Command>())]
    command: Option<Command>,
    /// Configuration file.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output prefix; writes PREFIX.csv and PREFIX.meta. Defaults to the command name.
    #[arg(long, value_name = "PREFIX")]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    /// Reserved; recorded in the sidecar. Overrides run.seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    #[arg(long)]
    verbose: bool,
}

fn main() {
    let args = Args::parse();
    if let Err(e) = execute(&args) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn execute(args: &Args) -> Result<(), CliError> {
    let origin = args.config.display().to_string();
    let text = std::fs::read_to_string(&args.config).map_err(|source| CliError::Io { path: origin.clone(), source })?;
    let mut cfg = RunConfig::parse(&text, &origin)?;
    if let Some(seed) = args.seed {
        cfg.run.seed = seed;
    }
    let command = args
        .command
        .or(cfg.run.command)
        .ok_or_else(|| CliError::Usage("no command given and the configuration has no run.command".into()))?;
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let start = Instant::now();
    let setup = Setup::build(&cfg)?;
    if args.verbose {
        eprintln!(
            "{}: {} impulses, epsilon {}, alpha {}, {} threads",
            command.name(),
            setup.schedule.len(),
            cfg.run.epsilon,
            cfg.run.alpha,
            rayon::current_num_threads()
        );
        eprintln!("columns: {}", columns(command, Some(&cfg)).join(","));
        if command == Command::Separatrix {
            eprintln!("gate columns: {}", GATE_COLUMNS.join(","));
        }
    }
    let tables = run(&cfg, command, &setup)?;
    let prefix = args.out.clone().unwrap_or_else(|| PathBuf::from(command.name()));
    let written = write_all(&prefix, &cfg, command, &tables)?;
    if args.verbose {
        for (path, t) in written.iter().zip(tables.iter().map(Some).chain(std::iter::once(None))) {
            match t {
                Some(t) => eprintln!("wrote {} ({} rows)", path.display(), t.rows.len()),
                None => eprintln!("wrote {}", path.display()),
            }
        }
        eprintln!("done in {:.3} s", start.elapsed().as_secs_f64());
    }
    Ok(())
}
