mod commands;
mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use hypshadow::{Error, ErrorKind, Result};
use serde::Serialize;
use serde_json::{json, Value};

use commands::Artifacts;

#[derive(Parser)]
#[command(name = "hypshadow", version, about = "Transfer-operator hyperbolicity diagnostics and shadowing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config document; a missing file is treated as `{}`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for per-point work (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = "hypshadow-out")]
    out: PathBuf,
}

#[derive(Subcommand, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// K-stability of the inverse-norm proxy at sampled points.
    Diagnose,
    /// Refine a pseudo-orbit into a true orbit.
    Shadow,
    /// Slowed-family boundary experiment.
    Boundary,
    /// Build and certify an inverse of Γ along one orbit.
    Inverse,
    /// Graded norm bounds of Γ and its inverse.
    Norms,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Diagnose => "diagnose",
            Command::Shadow => "shadow",
            Command::Boundary => "boundary",
            Command::Inverse => "inverse",
            Command::Norms => "norms",
        }
    }

    fn seeded(self) -> bool {
        matches!(self, Command::Diagnose | Command::Shadow | Command::Boundary)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Usage => 2,
        ErrorKind::Numeric => 3,
        ErrorKind::Precondition => 4,
    }
}

fn read_config(path: Option<&Path>) -> Result<Value> {
    let Some(path) = path else {
        return Ok(json!({}));
    };
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    if text.trim().is_empty() {
        return Ok(json!({}));
    }
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn execute<T: Serialize + serde::de::DeserializeOwned>(doc: Value, f: impl FnOnce(&T) -> Result<Artifacts>) -> Result<(Value, Artifacts)> {
    let cfg: T = config::parse(doc)?;
    let artifacts = f(&cfg)?;
    Ok((serde_json::to_value(&cfg)?, artifacts))
}

fn run(cli: &Cli) -> Result<PathBuf> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let mut doc = read_config(cli.config.as_deref())?;
    config::check_required(cli.command, &doc)?;
    if cli.command.seeded() {
        config::override_seed(&mut doc, cli.seed);
    }
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(Error::Config("--workers must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    }
    let base = cli.config.as_deref().and_then(Path::parent).map(Path::to_path_buf).unwrap_or_default();
    let (effective, artifacts) = match cli.command {
        Command::Diagnose => execute(doc, commands::diagnose)?,
        Command::Shadow => execute(doc, |c| commands::shadow(c, &base))?,
        Command::Boundary => execute(doc, commands::boundary)?,
        Command::Inverse => execute(doc, commands::inverse)?,
        Command::Norms => execute(doc, commands::norms)?,
    };

    let name = cli.command.name();
    fs::create_dir_all(&cli.out)?;
    let record = json!({
        "command": name,
        "version": env!("CARGO_PKG_VERSION"),
        "config": effective,
        "result": artifacts.result,
    });
    let record_path = cli.out.join(format!("{name}.json"));
    fs::write(&record_path, serde_json::to_string_pretty(&record)? + "\n")?;
    for (suffix, body) in &artifacts.tables {
        fs::write(cli.out.join(format!("{name}_{suffix}")), body)?;
    }
    // wall-clock data lives apart from the record so reruns compare byte for byte
    let meta = json!({
        "started_unix": started.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0),
        "elapsed_seconds": clock.elapsed().as_secs_f64(),
        "workers": rayon::current_num_threads(),
    });
    fs::write(cli.out.join(format!("{name}.meta.json")), serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(record_path)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(path) => {
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
