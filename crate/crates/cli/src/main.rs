mod commands;
mod config;
mod report;

use clap::{Parser, Subcommand};
use commands::{Context, Flags, Outcome};
use config::ExperimentConfig;
use report::{Report, ReportCheck, Timings, Versions, REPORT_SCHEMA};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;
use wwl::Error;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_ASSUMPTION: u8 = 3;

#[derive(Parser)]
#[command(name = "wwl", version, about = "Weinstein transform and two-wavelet experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML experiment configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// output directory, overriding the config's `output`
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// forward transform of `input`, with Plancherel and round-trip checks
    Transform,
    /// convolution of `input` with `second`
    Convolve {
        /// also run the direct-quadrature oracle (at most 64 nodes per axis)
        #[arg(long)]
        oracle: bool,
    },
    /// continuous wavelet transform of `input` with `wavelets.phi`
    Cwt {
        #[arg(long)]
        oracle: bool,
    },
    /// admissibility and two-wavelet constants of `wavelets.phi`, `wavelets.psi`
    Admissibility,
    /// Parseval-type formula for `input`, `second` and the wavelet pair
    Parseval,
    /// Calderon multiplier, truncated reconstruction and window sweeps
    Calderon {
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        /// nested windows (2^-k, 2^k) for k = 0..=K
        #[arg(long, value_name = "K")]
        sweep: Option<u32>,
        #[arg(long)]
        oracle: bool,
    },
    /// the full acceptance suite
    Selftest,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Transform => "transform",
            Command::Convolve { .. } => "convolve",
            Command::Cwt { .. } => "cwt",
            Command::Admissibility => "admissibility",
            Command::Parseval => "parseval",
            Command::Calderon { .. } => "calderon",
            Command::Selftest => "selftest",
        }
    }

    fn flags(&self) -> Flags {
        let mut f = Flags { gamma: None, delta: None, sweep: None, oracle: false };
        match *self {
            Command::Convolve { oracle } | Command::Cwt { oracle } => f.oracle = oracle,
            Command::Calderon { gamma, delta, sweep, oracle } => {
                f = Flags { gamma, delta, sweep, oracle };
            }
            _ => {}
        }
        f
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Assumption(_) | Error::Admissibility(_) | Error::Precondition(_) => EXIT_ASSUMPTION,
        _ => EXIT_CONFIG,
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("WWL_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("WWL_THREADS must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("WWL_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn load_config(path: Option<&Path>) -> Result<(ExperimentConfig, PathBuf), String> {
    let Some(path) = path else {
        return Ok((ExperimentConfig::default(), PathBuf::from(".")));
    };
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let cfg = ExperimentConfig::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((cfg, base))
}

fn run(command: &Command, cx: &Context) -> wwl::Result<Outcome> {
    let flags = command.flags();
    match command {
        Command::Transform => commands::transform(cx),
        Command::Convolve { .. } => commands::convolve_cmd(cx, &flags),
        Command::Cwt { .. } => commands::cwt_cmd(cx, &flags),
        Command::Admissibility => commands::admissibility(cx),
        Command::Parseval => commands::parseval(cx),
        Command::Calderon { .. } => commands::calderon_cmd(cx, &flags),
        Command::Selftest => commands::selftest_cmd(cx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("wwl: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    let (cfg, base) = match load_config(cli.config.as_deref()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("wwl: configuration error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let out = cli.output.clone().unwrap_or_else(|| base.join(&cfg.output));
    let start = Instant::now();
    let flags = cli.command.flags();
    let flags_json = json!({"gamma": flags.gamma, "delta": flags.delta, "sweep": flags.sweep, "oracle": flags.oracle});

    let outcome = std::fs::create_dir_all(&out)
        .map_err(Error::from)
        .and_then(|_| Context::new(&cfg, &base, &out))
        .and_then(|cx| run(&cli.command, &cx));
    let (checks, results, error, code) = match outcome {
        Ok(o) => {
            let checks: Vec<ReportCheck> = o.checks.iter().map(ReportCheck::from).collect();
            let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
            (checks, o.results, None, if pass { 0 } else { EXIT_CHECK_FAILED })
        }
        Err(e) => {
            eprintln!("wwl: {e}");
            (Vec::new(), serde_json::Value::Null, Some(e.to_string()), exit_code(&e))
        }
    };
    let report = Report {
        schema: REPORT_SCHEMA,
        command: cli.command.name().into(),
        versions: Versions { wwl: env!("CARGO_PKG_VERSION"), wwl_core: wwl::VERSION },
        config: cfg.clone(),
        flags: flags_json,
        pass: code == 0,
        error,
        checks,
        results,
        timings: Timings { total_seconds: start.elapsed().as_secs_f64() },
    };
    let written = report.write(&out).and_then(|_| std::fs::write(out.join("config.echo.toml"), cfg.to_toml()));
    if let Err(e) = written {
        eprintln!("wwl: cannot write report to {}: {e}", out.display());
        return ExitCode::from(EXIT_CONFIG);
    }
    for c in &report.checks {
        println!("{} {}: {:.3e} (limit {:.1e})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.limit);
    }
    println!("{}: {} -> {}", report.command, if report.pass { "pass" } else { "fail" }, out.join("report.json").display());
    ExitCode::from(code)
}
