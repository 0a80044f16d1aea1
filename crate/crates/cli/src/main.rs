use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use platoon_fdi::scenario::{self, catalog, catalog_sources, parse_scenario, RunMode, ScenarioSpec};
use platoon_fdi::verify;

#[derive(Parser)]
#[command(
    name = "platoon-fdi",
    version,
    about = "Platoon takeover-fault simulation and identification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    FullBank,
    Blending,
    Both,
}

impl From<Mode> for RunMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::FullBank => RunMode::FullBank,
            Mode::Blending => RunMode::Blending,
            Mode::Both => RunMode::Both,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario, or the whole catalog when --scenario is omitted.
    Run {
        /// Scenario file, or the name of a shipped scenario such as s1_accel.
        #[arg(long)]
        scenario: Option<String>,
        /// Identification mode; defaults to both when the scenario has a
        /// [blend] section, else full-bank.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Output directory. A single run writes here directly; catalog runs
        /// use one subdirectory per scenario.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Integration step override (s).
        #[arg(long)]
        dt: Option<f64>,
        /// Measurement-noise seed override.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the shipped scenarios, or write them out with --out.
    Catalog {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the numerical self-checks.
    Verify {
        /// Also run the simulation-based self-consistency sweep.
        #[arg(long)]
        full: bool,
    },
}

fn load(arg: &str) -> Result<ScenarioSpec> {
    if let Some(spec) = catalog().into_iter().find(|s| s.name == arg) {
        return Ok(spec);
    }
    let text = fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?;
    parse_scenario(&text).with_context(|| format!("parsing {arg}"))
}

fn apply_overrides(spec: &mut ScenarioSpec, dt: Option<f64>, seed: Option<u64>) -> Result<()> {
    if let Some(dt) = dt {
        spec.dt = dt;
    }
    if let Some(seed) = seed {
        spec.noise.seed = seed;
    }
    spec.validate()?;
    Ok(())
}

fn run_one(
    mut spec: ScenarioSpec,
    mode: Option<Mode>,
    out: Option<PathBuf>,
    dt: Option<f64>,
    seed: Option<u64>,
) -> Result<()> {
    apply_overrides(&mut spec, dt, seed)?;
    let mode = mode.map_or(spec.default_mode(), RunMode::from);
    let outcome = scenario::run(&spec, mode)?;
    let dir = out.unwrap_or_else(|| spec.output_dir());
    scenario::write_artifacts(&outcome, &dir).with_context(|| format!("writing {}", dir.display()))?;
    print!("{}", outcome.report_text);
    println!("artifacts     {}", dir.display());
    Ok(())
}

fn run_catalog(mode: Option<Mode>, out: Option<PathBuf>, dt: Option<f64>, seed: Option<u64>) -> Result<()> {
    let mut specs = catalog();
    for s in &mut specs {
        apply_overrides(s, dt, seed)?;
    }
    let root = out.unwrap_or_else(|| PathBuf::from("out"));
    let mut failed = false;
    for (name, result) in scenario::run_many(&specs, &root, mode.map(RunMode::from)) {
        match result {
            Ok(r) => println!(
                "{name:<16} identified {:<8} truth {:<8} correct {:<5} converged {:>8}  blend {:<8} {:>6.2} s",
                opt(r.identified),
                opt(r.truth),
                r.correct,
                opt(r.convergence_time.map(|t| format!("{t:.3}"))),
                opt(r.blend_identified),
                r.wall_clock.as_secs_f64()
            ),
            Err(e) => {
                failed = true;
                eprintln!("{name:<16} error: {e}");
            }
        }
    }
    println!("artifacts in {}", root.display());
    if failed {
        bail!("some scenarios failed to run");
    }
    Ok(())
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_owned(), |v| v.to_string())
}

fn write_catalog(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (file, text) in catalog_sources() {
        fs::write(dir.join(file), text)?;
    }
    println!("wrote {} scenarios to {}", catalog_sources().len(), dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            scenario: Some(s),
            mode,
            out,
            dt,
            seed,
        } => load(&s).and_then(|spec| run_one(spec, mode, out, dt, seed)),
        Command::Run {
            scenario: None,
            mode,
            out,
            dt,
            seed,
        } => run_catalog(mode, out, dt, seed),
        Command::Catalog { out: Some(dir) } => write_catalog(&dir),
        Command::Catalog { out: None } => {
            for s in catalog() {
                let fault = s
                    .fault
                    .map_or("none".to_owned(), |f| format!("k={} t_f={} {}", f.k, f.t_f, f.driver));
                let blend = if s.blend.is_some() { " +blend" } else { "" };
                println!(
                    "{:<16} N={} {} {fault}{blend}",
                    s.name, s.platoon.n, s.platoon.architecture
                );
            }
            Ok(())
        }
        Command::Verify { full } => verify::run_all(full).map_err(Into::into).map(|checks| {
            for c in &checks {
                println!("{} {:<24} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            println!("{} of {} checks passed", checks.len() - failed, checks.len());
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
