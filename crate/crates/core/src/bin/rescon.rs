//! Command-line front end: run a scenario, analyze its hypotheses, or generate one from a template.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rescon::adversary::{echo_fixed_point, mirror_push, random_gaussian, AdversaryModel};
use rescon::harness::{
    generate_scenario, read_config, run_scenario, summary_toml, write_scenario, write_trace, AlphaSpec, Template,
    TemplateParams,
};
use rescon::{ExecutionMode, HarnessError};

#[derive(Parser)]
#[command(
    name = "rescon",
    version,
    about = "Byzantine-resilient constrained consensus simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and optionally write its per-round trace.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        rounds: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// CSV trace; a `.summary.toml` is written next to it.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exit nonzero if any checked relation fails in any round.
        #[arg(long)]
        check_lemmas: bool,
        /// Run per-agent work on all cores; the trace is identical.
        #[arg(long)]
        parallel: bool,
    },
    /// Print the redundancy verdict, mu, step bound and contraction factor.
    Analyze {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Write a scenario file from a built-in template.
    Gen {
        /// scalar-two-sided, halfspace-fan-2d or thm1-counterexample
        #[arg(long)]
        template: Template,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        f: usize,
        /// `p/q` agents on `{x >= 0}` and `{x <= 0}`
        #[arg(long, value_parser = parse_split)]
        split: Option<(usize, usize)>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        rounds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `echo:<x1,x2,..>`, `mirror:<offset>` or `gaussian:<sigma>`
        #[arg(long, value_parser = parse_adversary)]
        adversary: Option<AdversaryModel>,
        /// A number, `auto` or `auto:<fraction>`
        #[arg(long)]
        alpha: Option<AlphaSpec>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_split(s: &str) -> Result<(usize, usize), String> {
    let (p, q) = s.split_once('/').ok_or("expected p/q")?;
    Ok((
        p.trim().parse().map_err(|e| format!("{e}"))?,
        q.trim().parse().map_err(|e| format!("{e}"))?,
    ))
}

fn parse_adversary(s: &str) -> Result<AdversaryModel, String> {
    let (kind, arg) = s.split_once(':').ok_or("expected <kind>:<parameters>")?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    match kind {
        "echo" => Ok(echo_fixed_point(arg.split(',').map(num).collect::<Result<_, _>>()?)),
        "mirror" => Ok(mirror_push(num(arg)?)),
        "gaussian" => Ok(AdversaryModel::RandomGaussian {
            sigma: num(arg)?,
            seed: None,
        }),
        other => Err(format!("unknown adversary `{other}`")),
    }
}

fn run(cli: Cli) -> Result<bool, HarnessError> {
    match cli.command {
        Command::Run {
            scenario,
            rounds,
            seed,
            out,
            check_lemmas,
            parallel,
        } => {
            let mut config = read_config(&scenario)?;
            if let Some(r) = rounds {
                config.rounds = r;
            }
            if let Some(s) = seed {
                config.seed = s;
            }
            let scenario = config.resolve()?;
            let mode = if parallel {
                ExecutionMode::Parallel
            } else {
                ExecutionMode::Serial
            };
            let trace = run_scenario(&scenario, mode)?;
            let summary = summary_toml(&trace)?;
            if let Some(out) = out {
                write_trace(&trace, &out)?;
                std::fs::write(out.with_extension("summary.toml"), &summary)?;
            }
            print!("{summary}");
            let failed = trace.failed_checks();
            if check_lemmas && !failed.is_empty() {
                eprintln!("failed checks: {}", failed.join(", "));
                return Ok(false);
            }
            Ok(true)
        }
        Command::Analyze { scenario } => {
            let scenario = read_config(&scenario)?.resolve()?;
            println!("alpha = {:e}", scenario.alpha);
            match &scenario.report {
                Some(report) => {
                    print!("{}", toml::to_string(report).map_err(HarnessError::Serialize)?);
                    println!("rho = {:e}", report.rho(scenario.alpha));
                }
                None => println!("no redundancy level and mu configured; rate guarantee not applicable"),
            }
            Ok(true)
        }
        Command::Gen {
            template,
            n,
            f,
            split,
            k,
            rounds,
            seed,
            adversary,
            alpha,
            out,
        } => {
            let params = TemplateParams {
                split,
                k,
                rounds,
                seed,
                adversary: adversary.map(|a| match a {
                    AdversaryModel::RandomGaussian { sigma, seed: None } => random_gaussian(sigma, seed),
                    other => other,
                }),
                alpha,
                ..TemplateParams::new(n, f)
            };
            let config = generate_scenario(template, &params)?;
            config.resolve()?;
            write_scenario(&config, &out)?;
            println!("wrote {}", out.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
