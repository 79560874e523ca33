use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use gew_core::groups::{GeneratingSet, Group};
use gew_core::parse::{parse_element, parse_group, parse_system};
use gew_core::suite::{self, CheckReport, RoundTripSpec, DEFAULT_SEED};

#[derive(Parser)]
#[command(
    name = "gew",
    version,
    about = "Equations over groups: bounded solvers and verification drivers"
)]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for the randomized drivers.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce a worked instance.
    #[command(subcommand)]
    Verify(Verify),
    /// Check the Lee properties of a candidate word on a ball of F(a,b).
    CheckLee {
        #[arg(long, default_value = "[z1,z2]")]
        word: String,
        #[arg(long, default_value_t = 2)]
        radius: usize,
    },
    /// Look for a non-commuting pair of law values in a free product of finite groups.
    CheckFreeproduct {
        /// Comma-separated factors: z<n>, s<n> or group descriptions.
        #[arg(long)]
        factors: String,
        #[arg(long, default_value_t = 4)]
        radius: usize,
    },
    /// Dehn reduction and commuting-pair checks in an orientable surface group.
    CheckSurface {
        #[arg(long, default_value_t = 2)]
        genus: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Solve a system through reduction, the template systems and the bounded solver.
    Roundtrip {
        #[arg(long)]
        system: PathBuf,
        /// TOML file with radius, law, generating set, witnesses and templates.
        #[arg(long)]
        config: PathBuf,
        /// Group for system files without a `group:` header.
        #[arg(long)]
        group: Option<String>,
    },
}

#[derive(Subcommand)]
enum Verify {
    /// Uniqueness of the template systems in F(b,c) x| <a>_2.
    Example1 {
        #[arg(long, default_value_t = 3)]
        radius: usize,
    },
    /// Build and verify observation equations x1^p...xm^p = f.
    Observation {
        #[arg(long, default_value = "symmetric(3)")]
        group: String,
        /// Target element; seeded targets are used when omitted.
        #[arg(long)]
        f: Option<String>,
        /// Comma-separated generators of finite order; defaults to the
        /// group's generators.
        #[arg(long)]
        generators: Option<String>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 8)]
        radius: usize,
    },
}

fn observation_reports(
    group: &str,
    f: Option<&str>,
    generators: Option<&str>,
    samples: usize,
    radius: usize,
    seed: u64,
) -> Result<Vec<CheckReport>> {
    let g = parse_group(group)?;
    let u = match generators {
        Some(list) => {
            let xs = list
                .split(',')
                .map(|s| parse_element(s.trim(), &g))
                .collect::<gew_core::Result<Vec<_>>>()?;
            GeneratingSet::symmetric_closure(&g, xs)?
        }
        None => g.default_generating_set()?,
    };
    let targets = match f {
        Some(f) => vec![parse_element(f, &g)?],
        None => suite::seeded_elements(&g, samples, seed)?,
    };
    Ok(vec![suite::observation(&g, &u, &targets, radius)])
}

fn roundtrip_reports(
    system: &PathBuf,
    config: &PathBuf,
    group: Option<&str>,
) -> Result<Vec<CheckReport>> {
    let default_group: Option<Group> = group.map(parse_group).transpose()?;
    let text =
        fs::read_to_string(system).with_context(|| format!("reading {}", system.display()))?;
    let sys = parse_system(&text, default_group.as_ref())
        .with_context(|| format!("in {}", system.display()))?;
    let spec: RoundTripSpec = toml::from_str(
        &fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?,
    )
    .with_context(|| format!("in {}", config.display()))?;
    let config = spec
        .build(&sys.group)
        .with_context(|| format!("in {}", config.display()))?;
    Ok(vec![suite::roundtrip(&sys, &config)])
}

fn run(cli: &Cli) -> Result<(&'static str, Vec<CheckReport>)> {
    Ok(match &cli.command {
        Command::Verify(Verify::Example1 { radius }) => {
            ("verify example1", suite::example1(*radius))
        }
        Command::Verify(Verify::Observation {
            group,
            f,
            generators,
            samples,
            radius,
        }) => (
            "verify observation",
            observation_reports(
                group,
                f.as_deref(),
                generators.as_deref(),
                *samples,
                *radius,
                cli.seed,
            )?,
        ),
        Command::CheckLee { word, radius } => ("check-lee", suite::lee(word, *radius)),
        Command::CheckFreeproduct { factors, radius } => {
            let fs = suite::parse_factors(factors)?;
            ("check-freeproduct", vec![suite::free_product(&fs, *radius)])
        }
        Command::CheckSurface { genus, samples } => {
            if *genus < 1 {
                bail!("genus must be at least 1");
            }
            ("check-surface", suite::surface(*genus, *samples, cli.seed))
        }
        Command::Roundtrip {
            system,
            config,
            group,
        } => (
            "roundtrip",
            roundtrip_reports(system, config, group.as_deref())?,
        ),
    })
}

fn print_text(reports: &[CheckReport]) {
    for r in reports {
        let status = match r.status {
            suite::Status::Pass => "PASS",
            suite::Status::Fail => "FAIL",
            suite::Status::Error => "ERROR",
        };
        println!(
            "{status:<5} {} ({}) [{} ms]",
            r.name, r.location, r.elapsed_ms
        );
        let details = serde_json::to_string_pretty(&r.details).unwrap_or_default();
        for line in details.lines() {
            println!("      {line}");
        }
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    println!("{passed} of {} checks passed", reports.len());
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("GEW_THREADS") {
        let n: usize = v
            .parse()
            .with_context(|| format!("GEW_THREADS must be a positive integer, got {v:?}"))?;
        if n == 0 {
            bail!("GEW_THREADS must be a positive integer, got 0");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = configure_threads().and_then(|()| run(&cli));
    let (command, reports) = match outcome {
        Ok(x) => x,
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "error": format!("{e:#}"), "passed": false }));
            } else {
                eprintln!("error: {e:#}");
            }
            return ExitCode::from(2);
        }
    };
    let passed = suite::all_passed(&reports);
    if cli.json {
        let out = json!({
            "command": command,
            "seed": cli.seed,
            "passed": passed,
            "reports": reports,
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&out).expect("report serializes")
        );
    } else {
        print_text(&reports);
    }
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
