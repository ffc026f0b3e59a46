use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dieudonne::report::{self, Command, Report, RunConfig};
use dieudonne::sampler::Mode;
use dieudonne::stabilizer::DEFAULT_BUDGET;

#[derive(Parser)]
#[command(name = "dieudonne", version, about = "Sample Dieudonne lattices and classify their automorphism stabilizers")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample generators and print their digits.
    Sample(Common),
    /// Sample and run every structural check, or re-check a saved report.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Re-verify the points stored in this report instead of sampling.
        #[arg(long)]
        from: Option<PathBuf>,
        /// Only this trial of `--from`.
        #[arg(long, requires = "from")]
        trial: Option<u64>,
    },
    /// Stabilizer of each sample modulo Pi^s.
    Stabilizer(Common),
    /// Pass when at least one trial reaches the predicted class.
    Claim(Common),
    /// Solutions of the homogeneous level-0 system.
    Count(Common),
    /// Check that 1 + p x stabilizes the sampled lattices.
    Scalars {
        #[command(flatten)]
        common: Common,
        /// Random x per sample.
        #[arg(long, default_value_t = 100)]
        draws: usize,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    g: usize,
    #[arg(long)]
    p: u64,
    /// Field F_{p^{2k}}; defaults to g.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 2)]
    s: u32,
    /// polarized or nonpolarized
    #[arg(long, default_value = "polarized")]
    mode: Mode,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pi-precision of the model (default g + 1).
    #[arg(long)]
    precision: Option<u32>,
    /// log2 of the candidates enumerated per layer.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u32,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also print the report to standard output.
    #[arg(long)]
    json: bool,
}

impl Common {
    fn config(&self, command: Command) -> RunConfig {
        let mut c = RunConfig::new(command, self.g, self.p);
        c.k = self.k.unwrap_or(self.g);
        c.s = self.s;
        c.mode = self.mode;
        c.trials = self.trials.unwrap_or(command.default_trials());
        c.seed = self.seed;
        c.precision = self.precision;
        c.budget = self.budget;
        c
    }
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return usage(e);
        }
    }
    let (common, result) = match &cli.cmd {
        Cmd::Sample(c) => (c, report::run(&c.config(Command::Sample))),
        Cmd::Stabilizer(c) => (c, report::run(&c.config(Command::Stabilizer))),
        Cmd::Claim(c) => (c, report::run(&c.config(Command::Claim))),
        Cmd::Count(c) => (c, report::run(&c.config(Command::Count))),
        Cmd::Scalars { common, draws } => {
            let mut cfg = common.config(Command::Scalars);
            cfg.scalar_draws = *draws;
            (common, report::run(&cfg))
        }
        Cmd::Verify { common, from, trial } => {
            let r = match from {
                Some(path) => std::fs::read_to_string(path)
                    .map_err(|e| dieudonne::Error::InvalidArgument(format!("{}: {e}", path.display())))
                    .and_then(|s| Report::from_json(&s))
                    .and_then(|old| report::verify_report(&old, *trial)),
                None => report::run(&common.config(Command::Verify)),
            };
            (common, r)
        }
    };
    let rep = match result {
        Ok(r) => r,
        Err(e @ dieudonne::Error::InvalidArgument(_)) => return usage(e),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    print!("{}", rep.text_summary());
    if common.json {
        println!("{}", rep.to_json());
    }
    if let Some(path) = &common.out {
        if let Err(e) = std::fs::write(path, rep.to_json()) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    if rep.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
