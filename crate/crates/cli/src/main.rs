use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use intmod::modular::verify_modular;
use intmod::types_enum::{all_sq_egyptian, enumerate_sq_egyptian};
use intmod_cli::pipeline::{
    self, read_jsonl, write_jsonl, ModularRecord, Outputs, Stage, SOLVE_STATUS_FILE,
};
use intmod_cli::{build_report, run_pipeline, PipelineConfig};

#[derive(Parser)]
#[command(
    name = "intmod",
    version,
    about = "Classify integral modular data of small rank"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long, global = true)]
    checkpoint_dir: Option<PathBuf>,
    /// Per-type time budget of the ring search, in seconds.
    #[arg(long, global = true)]
    budget_s: Option<f64>,
    /// Per-call time budget of the local criterion, in seconds.
    #[arg(long, global = true, default_value_t = 2.0)]
    filter_budget_s: f64,
    #[arg(long, global = true, default_value_t = 9)]
    max_rank: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StageArg {
    Types,
    Filter,
    Solve,
    Smatrix,
    Modular,
}

impl From<StageArg> for Stage {
    fn from(s: StageArg) -> Stage {
        match s {
            StageArg::Types => Stage::Types,
            StageArg::Filter => Stage::Filter,
            StageArg::Solve => Stage::Solve,
            StageArg::Smatrix => Stage::Smatrix,
            StageArg::Modular => Stage::Modular,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solutions of sum 1/s_i^2 = q with s_1 >= ... >= s_len.
    Egyptian {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        len: usize,
        /// Keep only solutions where every s_i divides s_1.
        #[arg(long)]
        divisible: bool,
    },
    /// Enumerate candidate types up to the maximal rank.
    Types {
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Apply the exclusion criteria to a type list.
    Filter {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Search fusion rings of every surviving type.
    Solve {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Character tables and self-transpose candidates.
    Smatrix {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Spin vectors and the exact modular-data checks.
    Modular {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, hide = true, default_value_t = 1)]
        amv_modulus_divisor: u64,
    },
    /// Re-run the exact checks on a modular data file.
    Verify {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Summarize the outputs in the output directory.
    Report,
    /// Run the pipeline end to end, resuming from checkpoints.
    Run {
        #[arg(long, value_delimiter = ',')]
        stages: Option<Vec<StageArg>>,
        #[arg(long, hide = true, default_value_t = 1)]
        amv_modulus_divisor: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn path_or(p: Option<PathBuf>, dir: &std::path::Path, name: &str) -> PathBuf {
    p.unwrap_or_else(|| dir.join(name))
}

fn execute(cli: Cli) -> Result<bool> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .context("thread pool")?;
    }
    let dir = cli.out_dir.clone();
    let filter_budget = Duration::from_secs_f64(cli.filter_budget_s);
    let solve_budget = cli.budget_s.map(Duration::from_secs_f64);
    match cli.command {
        Command::Egyptian { q, len, divisible } => {
            let sols = if divisible {
                enumerate_sq_egyptian(q, len)
            } else {
                all_sq_egyptian(q, len)
            };
            for s in &sols {
                println!("{}", serde_json::to_string(s)?);
            }
            eprintln!("{} solutions", sols.len());
            Ok(true)
        }
        Command::Types { output } => {
            let mut v = pipeline::stage_types(cli.max_rank);
            pipeline::sort_types(&mut v);
            let out = path_or(output, &dir, Stage::Types.file());
            write_jsonl(&out, &v)?;
            eprintln!("{} types -> {}", v.len(), out.display());
            Ok(true)
        }
        Command::Filter { input, output } => {
            let types = read_jsonl(&path_or(input, &dir, Stage::Types.file()))?;
            let mut v = pipeline::stage_filter(&types, filter_budget);
            pipeline::sort_filter(&mut v);
            let out = path_or(output, &dir, Stage::Filter.file());
            write_jsonl(&out, &v)?;
            let kept = v.iter().filter(|r| r.excluded_by.is_none()).count();
            eprintln!("{kept} of {} types survive -> {}", v.len(), out.display());
            Ok(true)
        }
        Command::Solve { input, output } => {
            let rows = read_jsonl(&path_or(input, &dir, Stage::Filter.file()))?;
            let (mut status, mut rings) = pipeline::stage_solve(&rows, solve_budget)?;
            pipeline::sort_solve(&mut status, &mut rings);
            let out = path_or(output, &dir, Stage::Solve.file());
            write_jsonl(&out, &rings)?;
            write_jsonl(&out.with_file_name(SOLVE_STATUS_FILE), &status)?;
            let incomplete = status.iter().filter(|s| !s.complete).count();
            eprintln!(
                "{} rings -> {} ({incomplete} types out of budget)",
                rings.len(),
                out.display()
            );
            Ok(incomplete == 0)
        }
        Command::Smatrix { input, output } => {
            let rings = read_jsonl(&path_or(input, &dir, Stage::Solve.file()))?;
            let mut v = pipeline::stage_smatrix(&rings);
            pipeline::sort_smatrix(&mut v);
            let out = path_or(output, &dir, Stage::Smatrix.file());
            write_jsonl(&out, &v)?;
            let st = v.iter().filter(|r| !r.candidates.is_empty()).count();
            eprintln!(
                "{st} self-transposable of {} commutative rings -> {}",
                v.len(),
                out.display()
            );
            Ok(true)
        }
        Command::Modular {
            input,
            output,
            amv_modulus_divisor,
        } => {
            if amv_modulus_divisor == 0 {
                bail!("AMV modulus divisor must be positive");
            }
            let sm = read_jsonl(&path_or(input, &dir, Stage::Smatrix.file()))?;
            let mut v = pipeline::stage_modular(&sm, amv_modulus_divisor);
            pipeline::sort_modular(&mut v);
            let out = path_or(output, &dir, Stage::Modular.file());
            write_jsonl(&out, &v)?;
            eprintln!("{} modular data -> {}", v.len(), out.display());
            Ok(true)
        }
        Command::Verify { input } => {
            let data: Vec<ModularRecord> =
                read_jsonl(&path_or(input, &dir, Stage::Modular.file()))?;
            let mut all = true;
            for r in &data {
                let rep = verify_modular(&r.datum.ring, &r.datum.s, &r.datum.spins);
                let spins: Vec<String> = r.datum.spins.iter().map(|q| q.to_string()).collect();
                if rep.ok() {
                    println!("ok    {} [{}]", r.datum.ring_hash, spins.join(","));
                } else {
                    all = false;
                    println!(
                        "FAIL  {} [{}] {:?}",
                        r.datum.ring_hash,
                        spins.join(","),
                        rep.failures()
                    );
                }
            }
            Ok(all)
        }
        Command::Report => {
            let report = build_report(cli.max_rank, &Outputs::load(&dir)?);
            print!("{}", report.render());
            Ok(report.ok())
        }
        Command::Run {
            stages,
            amv_modulus_divisor,
        } => {
            let mut cfg = PipelineConfig::new(cli.max_rank, dir);
            if let Some(s) = stages {
                cfg.stages = s.into_iter().map(Stage::from).collect();
            }
            cfg.filter_budget = filter_budget;
            cfg.solve_budget = solve_budget;
            cfg.checkpoint_dir = cli.checkpoint_dir;
            cfg.amv_modulus_divisor = amv_modulus_divisor;
            let report = run_pipeline(&cfg)?;
            print!("{}", report.render());
            Ok(report.ok())
        }
    }
}
