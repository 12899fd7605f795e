mod commands;
mod report;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rellich::extremals::Inequality;
use rellich::{par, WeightedQuadrature};
use serde_json::json;

use commands::{FemConfig, Output};
use report::Report;

const THREADS_ENV: &str = "RELLICH_THREADS";

#[derive(Parser, Debug)]
#[command(name = "rellich", version, about = "Verification driver for Rellich-type inequalities with logarithmic weights")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report format; csv is only available for sweep tables.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Seed for random profile corpora.
    #[arg(long, default_value_t = 7, global = true)]
    seed: u64,
    /// Geometric panels of the weighted quadrature.
    #[arg(long, default_value_t = 60, global = true)]
    subintervals: usize,
    /// Gauss-Legendre nodes per panel.
    #[arg(long, default_value_t = 16, global = true)]
    points: usize,
    /// Panel grading ratio in (0, 1).
    #[arg(long, default_value_t = 0.7, global = true)]
    ratio: f64,
    /// Omit timing so that reports are byte-identical across runs.
    #[arg(long, global = true)]
    deterministic: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form constants per dimension.
    Constants {
        #[arg(long, default_value = "3..12", value_parser = parse_range)]
        n: NRange,
    },
    /// Exact polynomial identity suite.
    Identities {
        #[arg(long, default_value = "5..12", value_parser = parse_range)]
        n: NRange,
    },
    /// Mellin symbol minimum cross-checked by finite elements.
    BestConstant {
        #[arg(long, value_enum, default_value_t = Problem::Grad)]
        problem: Problem,
        #[arg(long, value_parser = parse_range)]
        n: NRange,
        /// Mesh depth in units of -ln r.
        #[arg(long, default_value_t = 600.0)]
        depth: f64,
        #[arg(long, default_value_t = 400)]
        elements: usize,
    },
    /// Minimizing spherical-harmonic mode per dimension.
    SymmetryBreaking {
        #[arg(long, default_value = "3..9", value_parser = parse_range)]
        n: NRange,
    },
    /// Change-of-variables validation on random profiles.
    Changevar {
        #[arg(long, value_parser = parse_range)]
        n: NRange,
        #[arg(long, default_value_t = 20)]
        profiles: usize,
    },
    /// Concentrating bubble sweep against the Sobolev constant.
    Sharpness {
        #[arg(long, value_parser = parse_range)]
        n: NRange,
        #[arg(long, default_value_t = 0.05)]
        rho: f64,
    },
    /// Optimality sweep of the X^mu weight for n = 3.
    OptimalityX4 {
        #[arg(long)]
        mu: f64,
    },
    /// Remainder positivity over the shipped profile corpora.
    Instances {
        #[arg(long, value_enum)]
        which: Which,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Problem {
    Grad,
    U,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Which {
    #[value(name = "thm2_n3")]
    Thm2N3,
    #[value(name = "thm2_n4")]
    Thm2N4,
    Eli,
    Thm1,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct NRange {
    lo: u32,
    hi: u32,
}

impl NRange {
    fn values(self) -> Vec<u32> {
        (self.lo..=self.hi).collect()
    }

    fn text(self) -> String {
        if self.lo == self.hi {
            self.lo.to_string()
        } else {
            format!("{}..{}", self.lo, self.hi)
        }
    }
}

fn parse_range(s: &str) -> Result<NRange, String> {
    let num = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("invalid dimension '{t}': {e}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => {
            let n = num(s)?;
            (n, n)
        }
    };
    if lo > hi {
        return Err(format!("empty range {s}"));
    }
    if hi > 64 {
        return Err(format!("dimension {hi} exceeds 64"));
    }
    Ok(NRange { lo, hi })
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

/// Checks everything that does not need computation; `Err` is a usage error.
fn validate(cli: &Cli) -> Result<(), String> {
    let min_n = |r: NRange, min: u32, what: &str| {
        if r.lo < min {
            Err(format!("{what} needs n >= {min}, got {}", r.lo))
        } else {
            Ok(())
        }
    };
    if !(cli.ratio > 0.0 && cli.ratio < 1.0) || cli.subintervals == 0 || cli.points < 2 {
        return Err("quadrature needs --subintervals >= 1, --points >= 2 and --ratio in (0, 1)".into());
    }
    let sweep = matches!(cli.command, Command::Sharpness { .. } | Command::OptimalityX4 { .. });
    if cli.format == Format::Csv && !sweep {
        return Err("csv output is only available for sharpness and optimality-x4".into());
    }
    match cli.command {
        Command::Constants { n } => min_n(n, 3, "constants"),
        Command::Identities { n } => min_n(n, 5, "identities"),
        Command::BestConstant { problem, n, depth, elements } => {
            min_n(n, if problem == Problem::U { 5 } else { 3 }, "best-constant")?;
            if !(depth > 0.0 && depth <= 700.0) || elements == 0 || elements > 500 {
                return Err("best-constant needs --depth in (0, 700] and --elements in 1..=500".into());
            }
            Ok(())
        }
        Command::SymmetryBreaking { n } => min_n(n, 3, "symmetry-breaking"),
        Command::Changevar { n, profiles } => {
            min_n(n, 5, "changevar")?;
            if profiles == 0 {
                return Err("--profiles must be positive".into());
            }
            Ok(())
        }
        Command::Sharpness { n, rho } => {
            min_n(n, 5, "sharpness")?;
            if n.lo != n.hi {
                return Err("sharpness takes a single dimension".into());
            }
            if !(rho > 0.0 && rho <= 0.1) {
                return Err("--rho must lie in (0, 0.1]".into());
            }
            Ok(())
        }
        Command::OptimalityX4 { mu } => {
            if !(mu > 1.0 && mu <= 8.0) {
                return Err("--mu must lie in (1, 8]".into());
            }
            Ok(())
        }
        Command::Instances { .. } => Ok(()),
    }
}

fn command_echo(cli: &Cli) -> serde_json::Value {
    let (name, args) = match cli.command {
        Command::Constants { n } => ("constants", json!({ "n": n.text() })),
        Command::Identities { n } => ("identities", json!({ "n": n.text() })),
        Command::BestConstant { problem, n, depth, elements } => (
            "best-constant",
            json!({
                "problem": if problem == Problem::Grad { "grad" } else { "u" },
                "n": n.text(),
                "depth": report::num(depth),
                "elements": elements,
            }),
        ),
        Command::SymmetryBreaking { n } => ("symmetry-breaking", json!({ "n": n.text() })),
        Command::Changevar { n, profiles } => ("changevar", json!({ "n": n.text(), "profiles": profiles })),
        Command::Sharpness { n, rho } => ("sharpness", json!({ "n": n.text(), "rho": report::num(rho) })),
        Command::OptimalityX4 { mu } => ("optimality-x4", json!({ "mu": report::num(mu) })),
        Command::Instances { which } => (
            "instances",
            json!({ "which": which.to_possible_value().map(|v| v.get_name().to_owned()) }),
        ),
    };
    json!({
        "name": name,
        "args": args,
        "seed": cli.seed,
        "quadrature": {
            "subintervals": cli.subintervals,
            "points": cli.points,
            "ratio": report::num(cli.ratio),
        },
    })
}

fn execute(cli: &Cli, quad: &WeightedQuadrature) -> rellich::Result<Output> {
    match cli.command {
        Command::Constants { n } => commands::constants(&n.values()),
        Command::Identities { n } => commands::identities(&n.values()),
        Command::BestConstant { problem, n, depth, elements } => {
            let name = if problem == Problem::Grad { "grad" } else { "u" };
            commands::best_constant(name, &n.values(), &FemConfig { depth, elements }, quad)
        }
        Command::SymmetryBreaking { n } => commands::symmetry_breaking(&n.values(), quad),
        Command::Changevar { n, profiles } => {
            let mut all = Output { records: Vec::new(), table: None };
            for d in n.values() {
                all.records.extend(commands::changevar(d, profiles, cli.seed, quad)?.records);
            }
            Ok(all)
        }
        Command::Sharpness { n, rho } => commands::sharpness(n.lo, rho, quad),
        Command::OptimalityX4 { mu } => commands::optimality(mu, quad),
        Command::Instances { which } => {
            let list = match which {
                Which::Thm2N3 => vec![Inequality::Thm2N3],
                Which::Thm2N4 => vec![Inequality::Thm2N4],
                Which::Eli => vec![Inequality::Eli],
                Which::Thm1 => vec![Inequality::Thm1],
                Which::All => vec![Inequality::Thm2N3, Inequality::Thm2N4, Inequality::Eli, Inequality::Thm1],
            };
            commands::instances(&list, quad)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(msg) = validate(&cli) {
        return usage(&msg);
    }
    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.parse::<usize>() {
            Ok(t) if t > 0 => {
                par::set_threads(t);
            }
            _ => return usage(&format!("{THREADS_ENV} must be a positive integer, got '{v}'")),
        }
    }
    let quad = match WeightedQuadrature::new(cli.subintervals, cli.points, cli.ratio) {
        Ok(q) => q,
        Err(e) => return usage(&e.to_string()),
    };

    let start = Instant::now();
    let out = match execute(&cli, &quad) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let rep = Report {
        command: command_echo(&cli),
        records: out.records,
        table: out.table,
        elapsed_ms: (!cli.deterministic).then_some(elapsed),
    };
    let text = match cli.format {
        Format::Json => rep.to_json(),
        Format::Csv => rep.table.as_ref().map(|t| t.to_csv()).unwrap_or_default(),
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(1);
    }
    if rep.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
