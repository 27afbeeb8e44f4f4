use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};

use cohom::benchio::{
    parse_config, render_config, render_results, resolve_seed, BenchConfig, Format, Manifest,
    ResultRow, RunResult, SEED_ENV,
};
use cohom::combinatorics::{enumerate_combinations, pair_chart, render_chart, render_combinations};
use cohom::montecarlo::simulate_scan;
use cohom::optics::BeamSplitter;
use cohom::validate::{run_all, ValidateOptions};

/// Coherence-driven Hong-Ou-Mandel bench simulator.
#[derive(Parser, Debug)]
#[command(name = "cohom", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Bench configuration file (defaults apply when omitted).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Write data here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format; tables and charts print as text when omitted.
    #[arg(long, global = true, value_enum)]
    format: Option<OutFormat>,

    /// RNG seed; overrides COHOM_SEED and the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Suppress progress messages.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The 16 path/polarization configurations of a photon pair.
    Enumerate,
    /// The detector pair chart.
    Chart,
    /// Closed-form intensities and coincidences over the configured delays.
    Analytic,
    /// Monte Carlo run at a single bench point.
    Simulate,
    /// Monte Carlo run over the configured tau21 scan.
    Scan,
    /// Run the consistency suite.
    Validate {
        #[arg(long, hide = true, value_name = "RAD")]
        inject_bs_phase: Option<f64>,
        #[arg(long, hide = true)]
        n_pairs: Option<u64>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

enum Failure {
    Validation,
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Ctx {
    cli: Cli,
    started: Instant,
    started_unix_s: f64,
}

impl Ctx {
    fn progress(&self, msg: &str) {
        if !self.cli.quiet {
            eprintln!("{msg}");
        }
    }

    fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.cli.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()?;
                Ok(())
            }
        }
    }

    fn load_config(&self) -> Result<BenchConfig, Failure> {
        let mut cfg = match &self.cli.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                parse_config(&text)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
            }
            None => BenchConfig::default(),
        };
        let env = std::env::var(SEED_ENV).ok();
        cfg.seed = resolve_seed(self.cli.seed, env.as_deref(), cfg.seed)?;
        Ok(cfg)
    }

    fn result(&self, command: &str, cfg: &BenchConfig, rows: Vec<ResultRow>) -> RunResult {
        RunResult {
            manifest: Manifest {
                tool: "cohom".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                command: command.into(),
                seed: cfg.seed,
                config: render_config(cfg),
                started_unix_s: self.started_unix_s,
                wall_clock_s: self.started.elapsed().as_secs_f64(),
            },
            rows,
        }
    }

    fn emit_result(&self, result: &RunResult) -> Result<(), Failure> {
        let format = match self.cli.format {
            Some(OutFormat::Json) => Format::Json,
            _ => Format::Csv,
        };
        self.emit(&render_results(result, format)?)
    }
}

fn analytic(ctx: &Ctx) -> Result<(), Failure> {
    let cfg = ctx.load_config()?;
    let rows = cfg
        .points()
        .iter()
        .map(|(tau21, run)| ResultRow::analytic(*tau21, run))
        .collect::<Result<Vec<_>, _>>()?;
    ctx.emit_result(&ctx.result("analytic", &cfg, rows))
}

fn monte_carlo(ctx: &Ctx, scan: bool) -> Result<(), Failure> {
    let cfg = ctx.load_config()?;
    match (scan, cfg.scan().is_some()) {
        (false, true) => {
            return Err(Failure::Usage(
                "config describes a tau21 scan; use `cohom scan`".into(),
            ))
        }
        (true, false) => {
            return Err(Failure::Usage(
                "config has no tau21 scan (set tau21_start_s and tau21_stop_s)".into(),
            ))
        }
        _ => {}
    }
    let points = cfg.points();
    ctx.progress(&format!(
        "simulating {} point(s) x {} pairs, {} mode, seed {}",
        points.len(),
        cfg.n_pairs,
        cfg.mode,
        cfg.seed
    ));
    let configs: Vec<_> = points.iter().map(|(_, c)| c.clone()).collect();
    let counts = simulate_scan(&configs)?;
    let rows = points
        .iter()
        .zip(&counts)
        .map(|((tau21, _), c)| ResultRow::from_counts(*tau21, c))
        .collect();
    ctx.progress(&format!(
        "done in {:.2} s",
        ctx.started.elapsed().as_secs_f64()
    ));
    ctx.emit_result(&ctx.result(if scan { "scan" } else { "simulate" }, &cfg, rows))
}

fn validate(ctx: &Ctx, inject_bs_phase: Option<f64>, n_pairs: Option<u64>) -> Result<(), Failure> {
    let mut opts = ValidateOptions::default();
    if let Some(phase) = inject_bs_phase {
        opts.splitter = BeamSplitter {
            reflection_phase_error: phase,
        };
    }
    if let Some(n) = n_pairs {
        opts.n_pairs = n.max(1);
    }
    if let Some(seed) = ctx.cli.seed {
        opts.seed = seed;
    }
    let report = run_all(&opts, |c| ctx.progress(&c.line()));
    ctx.emit(&report.render())?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Validation)
    }
}

fn table_output<T: serde::Serialize>(
    ctx: &Ctx,
    value: &T,
    text: String,
    csv: impl FnOnce() -> Result<String, Failure>,
) -> Result<(), Failure> {
    match ctx.cli.format {
        None => ctx.emit(&text),
        Some(OutFormat::Json) => ctx.emit(&(serde_json::to_string_pretty(value)? + "\n")),
        Some(OutFormat::Csv) => ctx.emit(&csv()?),
    }
}

fn enumerate(ctx: &Ctx) -> Result<(), Failure> {
    let table = enumerate_combinations();
    let join = |v: &[cohom::combinatorics::PhotonLabel]| {
        v.iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    table_output(ctx, &table, render_combinations(&table), || {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "index",
            "photon1",
            "photon2",
            "up",
            "down",
            "port_a",
            "port_b",
            "classification",
        ])?;
        for (k, r) in table.iter().enumerate() {
            w.write_record([
                (k + 1).to_string(),
                r.photon1.to_string(),
                r.photon2.to_string(),
                join(&r.up),
                join(&r.down),
                join(&r.port_a),
                join(&r.port_b),
                r.classification.to_string(),
            ])?;
        }
        Ok(String::from_utf8(
            w.into_inner().map_err(|e| e.to_string())?,
        )?)
    })
}

fn chart(ctx: &Ctx) -> Result<(), Failure> {
    let chart = pair_chart();
    table_output(ctx, &chart, render_chart(&chart), || {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![String::from("row")];
        header.extend(chart.columns.iter().map(|(d, l)| format!("D{d}:{l}")));
        w.write_record(&header)?;
        for ((d, l), cells) in chart.rows.iter().zip(&chart.cells) {
            let mut record = vec![format!("D{d}:{l}")];
            record.extend(cells.iter().map(|c| c.marker().to_string()));
            w.write_record(&record)?;
        }
        Ok(String::from_utf8(
            w.into_inner().map_err(|e| e.to_string())?,
        )?)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        cli,
        started: Instant::now(),
        started_unix_s: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0.0, |d| d.as_secs_f64()),
    };
    let outcome = match &ctx.cli.command {
        Command::Enumerate => enumerate(&ctx),
        Command::Chart => chart(&ctx),
        Command::Analytic => analytic(&ctx),
        Command::Simulate => monte_carlo(&ctx, false),
        Command::Scan => monte_carlo(&ctx, true),
        Command::Validate {
            inject_bs_phase,
            n_pairs,
        } => validate(&ctx, *inject_bs_phase, *n_pairs),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("cohom: {msg}");
            ExitCode::from(2)
        }
    }
}
