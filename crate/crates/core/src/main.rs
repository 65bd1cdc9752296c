use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use thz_ris::cli::{self, exit, Outcome, ScenarioConfig, SweepParam, SweepSpec};

#[derive(Parser)]
#[command(name = "thz-ris", version, about = "Ergodic capacity of active-RIS-assisted THz links")]
struct Cli {
    /// Override the Monte-Carlo seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the Monte-Carlo trial count
    #[arg(long, global = true)]
    trials: Option<u64>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Print the effective configuration instead of running
    #[arg(long, global = true)]
    dump_config: bool,

    /// Write output here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// Scenario file
    #[arg(long)]
    config: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Analytical ergodic capacity
    Capacity(ConfigArg),
    /// Compare the analytical capacity with Monte-Carlo
    Validate(ConfigArg),
    /// Monte-Carlo ergodic rate only
    Mc(ConfigArg),
    /// Capacity over a grid of one parameter
    Sweep {
        #[command(flatten)]
        config: ConfigArg,
        /// One of M, beta, P_s_dBm, f_Hz, d_a, d_b, kappa, phi, zeta
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated values
        #[arg(long, conflicts_with = "range", required_unless_present = "range")]
        values: Option<String>,
        /// start,stop,count
        #[arg(long)]
        range: Option<String>,
        /// Geometric spacing for --range
        #[arg(long, requires = "range")]
        log: bool,
        /// Also run Monte-Carlo at every point
        #[arg(long)]
        with_mc: bool,
    },
}

fn fail(code: i32, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("thz-ris: {msg}");
    ExitCode::from(code as u8)
}

fn parse_sweep(param: SweepParam, values: Option<&str>, range: Option<&str>, log: bool) -> thz_ris::Result<SweepSpec> {
    if let Some(v) = values {
        return SweepSpec::new(param, cli::parse_list(v)?);
    }
    let r = cli::parse_list(range.unwrap_or_default())?;
    let [start, stop, count] = r[..] else {
        return Err(thz_ris::Error::Domain("--range expects start,stop,count".into()));
    };
    if count < 1.0 || count.fract() != 0.0 {
        return Err(thz_ris::Error::Domain(format!("--range count must be a positive integer, got {count}")));
    }
    SweepSpec::from_range(param, start, stop, count as usize, log)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let args = match Cli::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(exit::USAGE as u8) } else { ExitCode::SUCCESS };
        }
    };

    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(exit::USAGE, e);
        }
    }

    let config_path = match &args.command {
        Command::Capacity(c) | Command::Validate(c) | Command::Mc(c) => &c.config,
        Command::Sweep { config, .. } => &config.config,
    };
    let mut cfg = match ScenarioConfig::from_path(config_path) {
        Ok(c) => c,
        Err(e) => return fail(exit::USAGE, format!("{}: {e}", config_path.display())),
    };
    if let Some(seed) = args.seed {
        cfg.mc.seed = seed;
    }
    if let Some(trials) = args.trials {
        if trials == 0 {
            return fail(exit::USAGE, "--trials must be >= 1");
        }
        cfg.mc.trials = trials;
    }

    let result = if args.dump_config {
        Ok((cfg.to_config_string(), Outcome::Ok))
    } else {
        let rows = match &args.command {
            Command::Capacity(_) => cli::run_capacity(&cfg).map(|r| (r, Outcome::Ok)),
            Command::Mc(_) => cli::run_mc(&cfg).map(|r| (r, Outcome::Ok)),
            Command::Validate(_) => cli::run_validate(&cfg),
            Command::Sweep {
                param,
                values,
                range,
                log,
                with_mc,
                ..
            } => match parse_sweep(*param, values.as_deref(), range.as_deref(), *log) {
                Ok(spec) => Ok(cli::run_sweep(&cfg, &spec, *with_mc)),
                Err(e) => return fail(exit::USAGE, e),
            },
        };
        rows.and_then(|(rows, outcome)| Ok((cli::to_csv_string(&rows)?, outcome)))
    };

    let (text, outcome) = match result {
        Ok(r) => r,
        Err(e) => return fail(cli::exit_code_for(&e), e),
    };

    let written = match &args.out {
        Some(p) => std::fs::write(p, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        return fail(exit::USAGE, e);
    }
    if outcome == Outcome::ValidationFailed {
        eprintln!("thz-ris: validation failed");
    }
    ExitCode::from(outcome.exit_code() as u8)
}
