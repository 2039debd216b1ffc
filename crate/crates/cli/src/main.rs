//! `wavebound`: constants, free solutions, inequality certificates,
//! blow-up iterations and finite-difference cross-checks from the shell.
//!
//! Exit status is 0 on success, 2 when a certificate records a violation
//! and 1 on usage or runtime errors.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::Outcome;
use config::RawConfig;

#[derive(Parser, Debug)]
#[command(name = "wavebound", version, about = "Radial wave equation bounds and blow-up experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Plain-text key = value file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    m: Option<usize>,
    #[arg(long, global = true)]
    p: Option<f64>,
    #[arg(long, global = true)]
    kappa: Option<f64>,
    /// power, gaussian, constant, velocity or zero.
    #[arg(long, global = true)]
    family: Option<String>,
    /// Family parameter `k=v`; repeatable.
    #[arg(long = "param", global = true, value_name = "K=V")]
    params: Vec<String>,
    /// Side length of tensor grids.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Certificate tolerance on the worst margin.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Any other config key, `key=value`; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lemma constants for a range of m, plus kappa0 and p0.
    Constants,
    /// Free solution on a grid over the exterior region.
    Free,
    /// Sampled certificate for one inequality.
    Verify {
        #[arg(value_enum)]
        which: Inequality,
    },
    /// Picard iteration at one apex.
    Iterate,
    /// Iteration for every kappa in `kappas`.
    Sweep,
    /// Finite-difference solve with a field dump.
    Fdm,
    /// Finite differences against the representation formula.
    Compare,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Inequality {
    Assumption,
    Theta,
    Nfact,
    Dtheta,
    Kernel,
    LowerOdd,
    LowerEven,
    LowerLow,
}

impl Inequality {
    fn name(self) -> &'static str {
        match self {
            Inequality::Assumption => "assumption",
            Inequality::Theta => "theta",
            Inequality::Nfact => "nfact",
            Inequality::Dtheta => "dtheta",
            Inequality::Kernel => "kernel",
            Inequality::LowerOdd => "lower-odd",
            Inequality::LowerEven => "lower-even",
            Inequality::LowerLow => "lower-low",
        }
    }
}

fn raw_config(c: &Common) -> Result<RawConfig, String> {
    let mut raw = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            RawConfig::parse(&text)?
        }
        None => RawConfig::default(),
    };
    for s in &c.sets {
        raw.set_pair(s, "")?;
    }
    for s in &c.params {
        raw.set_pair(s, "param.")?;
    }
    if let Some(v) = c.n {
        raw.set("n", v);
    }
    if let Some(v) = c.m {
        raw.set("m", v);
    }
    if let Some(v) = c.p {
        raw.set("p", v);
    }
    if let Some(v) = c.kappa {
        raw.set("kappa", v);
    }
    if let Some(v) = &c.family {
        raw.set("family", v);
    }
    if let Some(v) = c.grid {
        raw.set("grid", v);
    }
    if let Some(v) = c.tol {
        raw.set("tol", v);
    }
    if let Some(v) = c.seed {
        raw.set("seed", v);
    }
    if let Some(v) = &c.out {
        raw.set("out", v.display());
    }
    Ok(raw)
}

fn run(cli: Cli) -> commands::CliResult<Outcome> {
    let cfg = raw_config(&cli.common)?.resolve()?;
    let (label, outcome) = match cli.command {
        Command::Constants => ("constants".to_string(), commands::constants(&cfg)?),
        Command::Free => ("free".to_string(), commands::free(&cfg)?),
        Command::Verify { which } => (
            format!("verify {}", which.name()),
            commands::verify(&cfg, which.name())?,
        ),
        Command::Iterate => ("iterate".to_string(), commands::iterate(&cfg)?),
        Command::Sweep => ("sweep".to_string(), commands::sweep(&cfg)?),
        Command::Fdm => ("fdm".to_string(), commands::fdm(&cfg)?),
        Command::Compare => ("compare".to_string(), commands::compare(&cfg)?),
    };
    commands::write_atomic(&cfg.out.join("manifest.txt"), &cfg.manifest(&label))?;
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violated) => {
            eprintln!("certificate violated");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
