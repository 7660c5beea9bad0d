use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ballistic::scenario::{run_scenario, ExperimentConfig, ScenarioKind};
use ballistic::Error;
use clap::{Args, Parser, Subcommand};

/// Dispersion branches, non-resonant sets and ballistic transport
/// experiments driven by TOML scenario files.
///
/// Every flag can also be set through the environment with the `BALLISTIC_`
/// prefix (`BALLISTIC_CONFIG`, `BALLISTIC_OUT`, `BALLISTIC_SEED`,
/// `BALLISTIC_WORKERS`, `BALLISTIC_QUIET`).
///
/// Exit status: 0 on success, 1 on numeric failures or failed checks,
/// 2 on configuration errors.
#[derive(Debug, Parser)]
#[command(name = "ballistic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file.
    #[arg(long, global = true, env = "BALLISTIC_CONFIG")]
    config: Option<PathBuf>,
    /// Output directory; defaults to `out/<config stem>`.
    #[arg(long, global = true, env = "BALLISTIC_OUT")]
    out: Option<PathBuf>,
    /// Overrides the seed of the scenario file.
    #[arg(long, global = true, env = "BALLISTIC_SEED")]
    seed: Option<u64>,
    /// Worker threads for cell-parallel work (default: all cores).
    #[arg(long, global = true, env = "BALLISTIC_WORKERS")]
    workers: Option<usize>,
    /// Print nothing on success.
    #[arg(long, global = true, env = "BALLISTIC_QUIET")]
    quiet: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Potential invariants and, for quasi-periodic potentials, A1/A2.
    Validate,
    /// Dispersion branch, non-resonant mask and blended extension.
    Bands,
    /// Isoenergetic curves and direction-set measures.
    Isoenergy,
    /// Transform diagnostics: Parseval, contraction, closeness, cutoffs.
    Transform,
    /// Abel/Cesàro transport report.
    Transport,
    /// Stationary-phase front comparison.
    Front,
    /// Runs whatever kind the scenario file declares.
    Run,
}

impl Command {
    fn kind(self) -> Option<ScenarioKind> {
        match self {
            Command::Validate => Some(ScenarioKind::Validate),
            Command::Bands => Some(ScenarioKind::Bands),
            Command::Isoenergy => Some(ScenarioKind::Isoenergy),
            Command::Transform => Some(ScenarioKind::Transform),
            Command::Transport => Some(ScenarioKind::Transport),
            Command::Front => Some(ScenarioKind::Front),
            Command::Run => None,
        }
    }
}

enum Failure {
    Schema(String),
    Numeric(String),
}

fn default_out(config: &Path) -> PathBuf {
    let stem = config.file_stem().map_or_else(|| "scenario".into(), |s| s.to_string_lossy().into_owned());
    Path::new("out").join(stem)
}

fn execute(cli: &Cli) -> Result<bool, Failure> {
    let c = &cli.common;
    let path = c.config.as_ref().ok_or_else(|| Failure::Schema("missing --config".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Schema(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::parse(&text, path).map_err(|e| Failure::Schema(e.to_string()))?;
    if let Some(want) = cli.command.kind() {
        if cfg.kind != want {
            return Err(Failure::Schema(format!(
                "config error in {}: line {}: scenario kind is `{}`, subcommand expects `{}`",
                path.display(),
                ballistic::scenario::config::locate_key(&text, "kind"),
                cfg.kind.name(),
                want.name()
            )));
        }
    }
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    if let Some(n) = c.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Failure::Numeric(e.to_string()))?;
    }
    let out = c.out.clone().unwrap_or_else(|| default_out(path));
    let outcome = run_scenario(&cfg, &text, &out).map_err(|e| match e {
        Error::Config { .. } => Failure::Schema(e.to_string()),
        e => Failure::Numeric(e.to_string()),
    })?;
    if !c.quiet {
        println!("{} (seed {}): {}", cfg.kind.name(), cfg.seed, outcome.summary);
        for a in &outcome.manifest.artifacts {
            println!("  {}  {}", a.sha256, out.join(&a.file).display());
        }
        println!("  manifest  {}", out.join("manifest.json").display());
        if !outcome.passed {
            println!("checks failed");
        }
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Schema(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
