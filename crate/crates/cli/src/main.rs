use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use thhforge_cli::commands::{self, KernelArgs, Rendered};
use thhforge_cli::config::{FileConfig, OutputFormat, Overrides, RunConfig, CACHE_ENV};
use thhforge_cli::output::envelope_json;
use thhforge_cli::verify::{self, VerifyOptions};
use thhforge_cli::exit;

#[derive(Parser)]
#[command(name = "thhforge", version, about = "Steenrod, Hochschild, Bökstedt and Adams computations for THH")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format: table, json, csv or svg.
    #[arg(long, global = true)]
    format: Option<OutputFormat>,
    #[arg(long, global = true)]
    p: Option<u32>,
    /// Degree bound.
    #[arg(long, global = true)]
    maxdeg: Option<u32>,
    /// Cache directory (also THHFORGE_CACHE).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Write the output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// The mod 2 Steenrod algebra and its subalgebras.
    #[command(subcommand)]
    Steenrod(SteenrodCmd),
    /// Hochschild homology of a presented algebra.
    #[command(subcommand)]
    Hh(HhCmd),
    /// The Bökstedt spectral sequence for H_*(THH(R)).
    #[command(subcommand)]
    Bokstedt(BokstedtCmd),
    /// Adams spectral sequences for THH(ku) ∧ M and THH(ko) ∧ Y.
    #[command(subcommand)]
    Adams(AdamsCmd),
    /// Run the acceptance suite.
    Verify {
        /// Criteria to run concurrently.
        #[arg(long)]
        jobs: Option<usize>,
        /// Only these criterion ids (comma separated).
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<u32>>,
    },
}

#[derive(Subcommand)]
enum SteenrodCmd {
    /// Admissible basis in one degree.
    Basis {
        #[arg(long)]
        degree: u32,
        /// Restrict to a subalgebra such as A2.
        #[arg(long)]
        subalgebra: Option<String>,
    },
    /// Total rank of a finite subalgebra.
    Rank {
        #[arg(long)]
        subalgebra: String,
    },
    /// The quotient of a subalgebra by a left ideal.
    Quotient {
        #[arg(long)]
        subalgebra: String,
        /// Comma-separated generators, e.g. "Sq1,Sq2Sq3".
        #[arg(long)]
        ideal: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        shift: i32,
        /// Print only the total rank.
        #[arg(long)]
        total_rank: bool,
    },
    /// Kernel of right multiplication between two quotient modules.
    Kernel {
        #[arg(long)]
        subalgebra: String,
        #[arg(long)]
        map: String,
        #[arg(long)]
        source_ideal: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        source_shift: i32,
        #[arg(long)]
        target_ideal: String,
        /// Check the kernel is cyclic on this element ...
        #[arg(long)]
        generator: Option<String>,
        /// ... with exactly this annihilator ideal.
        #[arg(long)]
        annihilator: Option<String>,
    },
    /// Pairing of a Steenrod element with a Milnor monomial of A_*.
    Pair {
        #[arg(long)]
        element: String,
        #[arg(long)]
        monomial: String,
    },
}

#[derive(Subcommand)]
enum HhCmd {
    Compute {
        /// idempotent, poly2, ext1 or ext1-poly2.
        #[arg(long, conflicts_with = "presentation")]
        preset: Option<String>,
        /// JSON algebra presentation.
        #[arg(long)]
        presentation: Option<PathBuf>,
        /// Largest homological degree.
        #[arg(long, default_value_t = 6)]
        qmax: usize,
        /// Include cycle representatives.
        #[arg(long)]
        reps: bool,
    },
}

#[derive(Subcommand)]
enum BokstedtCmd {
    Run {
        /// Catalog id (hf, hz, ku, ko, tmf, ell, ju, bp, bp<n>) or "custom".
        #[arg(long)]
        spectrum: Option<String>,
        /// JSON description of H_*(R) for --spectrum custom.
        #[arg(long)]
        presentation: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum AdamsCmd {
    Run {
        /// thh-ku-M (alias thh-ku-mod2) or thh-ko-Y.
        #[arg(long)]
        target: Option<String>,
        /// Also write the E∞ chart as SVG.
        #[arg(long)]
        chart: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::USAGE as u8)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::FAILURE as u8)
        }
    }
}

enum Failure {
    Usage(anyhow::Error),
    Compute(anyhow::Error),
}

fn usage(e: anyhow::Error) -> Failure {
    Failure::Usage(e)
}

fn compute(e: anyhow::Error) -> Failure {
    Failure::Compute(e)
}

fn run(cli: Cli) -> Result<i32, Failure> {
    let file = match &cli.global.config {
        Some(path) => FileConfig::load(path).map_err(usage)?,
        None => FileConfig::default(),
    };
    let mut flags = Overrides {
        p: cli.global.p,
        maxdeg: cli.global.maxdeg,
        format: cli.global.format,
        cache_dir: cli.global.cache_dir.clone(),
        ..Default::default()
    };
    match &cli.command {
        Command::Bokstedt(BokstedtCmd::Run { spectrum, presentation }) => {
            flags.spectrum = spectrum.clone();
            flags.presentation = presentation.clone();
        }
        Command::Adams(AdamsCmd::Run { target, .. }) => flags.target = target.clone(),
        Command::Hh(HhCmd::Compute { presentation, .. }) => flags.presentation = presentation.clone(),
        Command::Verify { jobs, .. } => {
            flags.jobs = *jobs;
            flags.verify = Some(true);
        }
        Command::Steenrod(_) => {}
    }
    let env_cache = std::env::var_os(CACHE_ENV).map(PathBuf::from);
    let cfg = RunConfig::resolve(&file, &flags, env_cache).map_err(usage)?;

    let (name, rendered) = match &cli.command {
        Command::Steenrod(cmd) => steenrod(&cfg, cmd)?,
        Command::Hh(HhCmd::Compute { preset, qmax, reps, .. }) => {
            let pres = match (&cfg.presentation, preset) {
                (Some(path), _) => commands::read_presentation(path).map_err(usage)?,
                (None, Some(name)) => commands::hh_preset(name, cfg.p).map_err(usage)?,
                (None, None) => return Err(usage(anyhow!("hh compute needs --preset or --presentation"))),
            };
            let maxdeg = if cli.global.maxdeg.is_none() && file.maxdeg.is_none() && pres.generators.iter().all(|g| g.degree == 0) {
                0
            } else {
                cfg.maxdeg
            };
            ("hh compute", commands::hh_compute_cmd(&pres, maxdeg, *qmax, *reps).map_err(compute)?)
        }
        Command::Bokstedt(BokstedtCmd::Run { .. }) => {
            let spectrum = cfg.spectrum.clone().ok_or_else(|| usage(anyhow!("bokstedt run needs --spectrum")))?;
            let r = commands::bokstedt_run_cmd(&spectrum, cfg.p, cfg.maxdeg, cfg.presentation.as_deref())
                .map_err(compute)?;
            ("bokstedt run", r)
        }
        Command::Adams(AdamsCmd::Run { chart, .. }) => {
            let target = cfg.target.clone().ok_or_else(|| usage(anyhow!("adams run needs --target")))?;
            let r = commands::adams_run_cmd(&target, cfg.maxdeg).map_err(compute)?;
            if let (Some(path), Some(svg)) = (chart, &r.svg) {
                std::fs::write(path, svg)
                    .with_context(|| format!("writing {}", path.display()))
                    .map_err(compute)?;
            }
            ("adams run", r)
        }
        Command::Verify { only, .. } => {
            let opts = VerifyOptions {
                jobs: cfg.jobs,
                maxdeg: cli.global.maxdeg.or(file.maxdeg),
                cache_dir: cfg.cache_dir.clone(),
                only: only.clone(),
            };
            let report = match verify::run(&opts) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(exit::INSUFFICIENT_RANGE);
                }
            };
            let code = if report.all_passed() { exit::OK } else { exit::FAILURE };
            let rows: Vec<Vec<String>> = report
                .criteria
                .iter()
                .map(|c| {
                    vec![
                        c.id.to_string(),
                        c.name.to_string(),
                        format!("{:?}", c.status).to_lowercase(),
                        c.elapsed_ms.to_string(),
                        c.detail.clone(),
                    ]
                })
                .collect();
            let r = Rendered {
                json: serde_json::to_value(&report).map_err(|e| compute(e.into()))?,
                table: report.lines(),
                csv: thhforge_cli::output::csv(&["id", "name", "status", "elapsed_ms", "detail"], &rows),
                svg: None,
            };
            emit(&cli, &cfg, "verify", &r)?;
            return Ok(code);
        }
    };
    emit(&cli, &cfg, name, &rendered)?;
    Ok(exit::OK)
}

fn steenrod(cfg: &RunConfig, cmd: &SteenrodCmd) -> Result<(&'static str, Rendered), Failure> {
    Ok(match cmd {
        SteenrodCmd::Basis { degree, subalgebra } => {
            if *degree > cfg.hard_cap {
                return Err(usage(anyhow!("degree {degree} exceeds the hard cap {}", cfg.hard_cap)));
            }
            ("steenrod basis", commands::steenrod_basis_cmd(cfg, *degree, subalgebra.as_deref()).map_err(compute)?)
        }
        SteenrodCmd::Rank { subalgebra } => ("steenrod rank", commands::steenrod_rank_cmd(subalgebra).map_err(compute)?),
        SteenrodCmd::Quotient {
            subalgebra,
            ideal,
            shift,
            total_rank,
        } => (
            "steenrod quotient",
            commands::steenrod_quotient_cmd(subalgebra, ideal, *shift, *total_rank).map_err(compute)?,
        ),
        SteenrodCmd::Kernel {
            subalgebra,
            map,
            source_ideal,
            source_shift,
            target_ideal,
            generator,
            annihilator,
        } => (
            "steenrod kernel",
            commands::steenrod_kernel_cmd(&KernelArgs {
                subalgebra,
                map,
                source_ideal,
                source_shift: *source_shift,
                target_ideal,
                generator: generator.as_deref(),
                annihilator: annihilator.as_deref(),
            })
            .map_err(compute)?,
        ),
        SteenrodCmd::Pair { element, monomial } => {
            ("steenrod pair", commands::steenrod_pair_cmd(element, monomial).map_err(compute)?)
        }
    })
}

fn emit(cli: &Cli, cfg: &RunConfig, command: &str, r: &Rendered) -> Result<(), Failure> {
    let text = match cfg.format {
        OutputFormat::Json => envelope_json(command, cfg, r.json.clone()).map_err(compute)?,
        f => r.text(f).map_err(usage)?,
    };
    match &cli.global.output {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(compute),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
