use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use somnus::harness::{
    cmd_dynamic, cmd_gen, cmd_report_tradeoff, cmd_run, cmd_verify, ExperimentConfig,
};
use somnus::sim::SimConfig;
use somnus::Error;

/// Sleeping-model simulator and O-LOCAL experiment runner.
#[derive(Parser)]
#[command(name = "somnus", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write generated graphs, one file per seed.
    Gen(Common),
    /// Run one algorithm per seed and print per-phase metrics as CSV.
    Run {
        #[command(flatten)]
        common: Common,
        /// Directory for metrics, decisions, decision logs and traces.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Sweep the degree cap and fit awake and clock growth.
    Report(Common),
    /// Run the exhaustive oracle and invariant suites.
    Verify {
        /// Largest vertex count of the exhaustive enumeration (at most 8).
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..=8))]
        max_n: u32,
        #[arg(long)]
        strict: Option<bool>,
    },
    /// Apply random change batches and repair the solution after each.
    Dynamic {
        #[command(flatten)]
        common: Common,
        /// Directory for the generated batch files.
        #[arg(long)]
        export: Option<PathBuf>,
    },
}

/// Flags override values read from `--config`.
#[derive(Args)]
struct Common {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    k: Option<String>,
    /// Defect parameter of the `defective` algorithm.
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    dmax: Option<String>,
    /// Comma-separated seeds.
    #[arg(long)]
    seed: Option<String>,
    /// Comma-separated degree caps for `report`.
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    batches: Option<String>,
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    labels: Option<String>,
    #[arg(long)]
    strict: Option<String>,
    #[arg(long)]
    trace: bool,
    /// Output file (or directory for `gen`); stdout when absent.
    #[arg(long)]
    out: Option<String>,
}

impl Common {
    fn load(&self) -> somnus::Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::parse(&read(path)?)?,
            None => ExperimentConfig::default(),
        };
        let flags = [
            ("algo", &self.algo),
            ("eps", &self.eps),
            ("k", &self.k),
            ("p", &self.p),
            ("family", &self.family),
            ("n", &self.n),
            ("dmax", &self.dmax),
            ("seeds", &self.seed),
            ("sweep", &self.sweep),
            ("t", &self.t),
            ("batches", &self.batches),
            ("strategy", &self.strategy),
            ("problem", &self.problem),
            ("labels", &self.labels),
            ("strict", &self.strict),
            ("out", &self.out),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                config.set(key, v)?;
            }
        }
        config.trace |= self.trace;
        config.validate()?;
        Ok(config)
    }
}

fn read(path: &Path) -> somnus::Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn write(path: &Path, contents: &str) -> somnus::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.display().to_string(),
            message: e.to_string(),
        })?;
    }
    std::fs::write(path, contents).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn emit(out: Option<&str>, contents: &str) -> somnus::Result<()> {
    match out {
        Some(path) => write(Path::new(path), contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

/// Exit status: 0 on success, 1 when a validator failed.
fn execute(command: Command) -> somnus::Result<bool> {
    match command {
        Command::Gen(common) => {
            let config = common.load()?;
            let files = cmd_gen(&config)?;
            match &config.out {
                Some(dir) => {
                    for (name, text) in &files {
                        write(&Path::new(dir).join(name), text)?;
                    }
                }
                None => files.values().for_each(|text| print!("{text}")),
            }
            Ok(true)
        }
        Command::Run { common, export } => {
            let config = common.load()?;
            let output = cmd_run(&config)?;
            if let Some(dir) = export {
                for run in &output.runs {
                    let s = run.seed;
                    write(&dir.join(format!("metrics-{s}.csv")), &run.metrics.to_csv())?;
                    write(&dir.join(format!("decisions-{s}.csv")), &run.decisions_csv)?;
                    if let Some(log) = &run.log_json {
                        write(&dir.join(format!("decision-log-{s}.json")), log)?;
                    }
                    if config.trace {
                        write(&dir.join(format!("trace-{s}.json")), &run.trace_json())?;
                    }
                }
            }
            emit(config.out.as_deref(), &output.csv)?;
            for run in output.runs.iter().filter(|r| !r.valid) {
                eprintln!(
                    "seed {}: invalid output: {}",
                    run.seed,
                    run.violation.as_deref().unwrap_or("unknown")
                );
            }
            Ok(output.all_valid())
        }
        Command::Report(common) => {
            let config = common.load()?;
            let report = cmd_report_tradeoff(&config)?;
            emit(config.out.as_deref(), &report.to_text())?;
            Ok(report
                .sweeps
                .iter()
                .all(|s| s.points.iter().all(|p| p.valid)))
        }
        Command::Verify { max_n, strict } => {
            let config = SimConfig {
                strict_delivery: strict.unwrap_or(true),
                ..SimConfig::default()
            };
            let report = cmd_verify(max_n as usize, &config)?;
            print!("{}", report.to_text());
            Ok(report.passed())
        }
        Command::Dynamic { common, export } => {
            let config = common.load()?;
            let output = cmd_dynamic(&config)?;
            if let Some(dir) = export {
                for run in &output.runs {
                    for (i, batch) in run.batches.iter().enumerate() {
                        write(
                            &dir.join(format!("batch-{}-{:03}.txt", run.seed, i + 1)),
                            &batch.to_text(),
                        )?;
                    }
                }
            }
            emit(config.out.as_deref(), &output.csv)?;
            Ok(output.all_valid())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
