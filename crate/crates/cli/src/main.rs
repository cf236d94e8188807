use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ssf_core::campaign::{self, CampaignConfig, CampaignKind};
use ssf_core::{Error, Exec};

#[derive(Parser, Debug)]
#[command(name = "ssf", version, about = "Second-order spectral shift verification campaigns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification campaign; exit 1 if any check fails.
    Verify,
    /// Write shift-function samples (eta.csv or xi.csv).
    Eta,
    /// Write a semi-spectral CDF and truncation tables.
    Diagnose,
    /// Summarize an existing summary.csv in --out.
    Report,
}

/// Flags mirror the config keys and override values from `--config`.
#[derive(Args, Debug, Default)]
struct Overrides {
    /// JSON campaign config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// linear, mult, cayley_sa, cayley_diss, dilation or truncate.
    #[arg(long, global = true)]
    kind: Option<String>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Comma-separated matrix dimensions.
    #[arg(long, global = true, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Comma-separated polynomial degrees.
    #[arg(long, global = true, value_delimiter = ',')]
    degrees: Option<Vec<u32>>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Angle grid size.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Run trials one at a time.
    #[arg(long, global = true)]
    sequential: bool,
    /// With `verify`, also write a sample file.
    #[arg(long, global = true)]
    emit_samples: bool,
}

enum Failure {
    Verification(String),
    Config(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Config(e.to_string()),
            other => Failure::Verification(other.to_string()),
        }
    }
}

impl Overrides {
    fn resolve(&self) -> Result<CampaignConfig, Failure> {
        let mut cfg = match &self.config {
            Some(p) => CampaignConfig::from_file(p).map_err(|e| Failure::Config(e.to_string()))?,
            None => CampaignConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(k) = &self.kind {
            cfg.kind = k.parse::<CampaignKind>().map_err(|e| Failure::Config(e.to_string()))?;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(d) = &self.dims {
            cfg.dims = d.clone();
        }
        if let Some(d) = &self.degrees {
            cfg.degrees = d.clone();
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        if let Some(g) = self.grid {
            cfg.grid = g;
        }
        if self.sequential {
            cfg.exec = Exec::Sequential;
        }
        if self.emit_samples {
            cfg.emit_samples = true;
        }
        cfg.validate().map_err(|e| Failure::Config(e.to_string()))?;
        Ok(cfg)
    }
}

fn out_dir(cfg: &CampaignConfig) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

fn verify(cfg: &CampaignConfig) -> Result<(), Failure> {
    let outcome = campaign::run_campaign(cfg)?;
    match &cfg.out {
        Some(dir) => {
            for p in outcome.write_artifacts(dir)? {
                eprintln!("wrote {}", p.display());
            }
            if cfg.emit_samples {
                eprintln!("wrote {}", campaign::emit_shift_samples(cfg, dir)?.display());
            }
        }
        None => print!("{}", outcome.csv_string()?),
    }
    let total = outcome.reports.len();
    let failed = outcome.failures().count();
    eprintln!(
        "{}: {} checks, {} failed, max residual {:.3e}",
        cfg.kind.as_str(),
        total,
        failed,
        outcome.max_residual()
    );
    for r in outcome.failures().take(10) {
        eprintln!("  FAIL {} seed={} dim={} residual={:e} {:?}", r.check, r.seed, r.dim, r.residual, r.warnings);
    }
    if failed > 0 {
        return Err(Failure::Verification(format!("{failed} of {total} checks failed")));
    }
    Ok(())
}

fn report(cfg: &CampaignConfig) -> Result<(), Failure> {
    let path = out_dir(cfg).join("summary.csv");
    let file = File::open(&path).map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let lines = campaign::summarize_csv(file).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    println!("{:<12} {:>6} {:>6} {:>12}", "kind", "rows", "failed", "max_resid");
    let mut failed = 0;
    for l in &lines {
        println!("{:<12} {:>6} {:>6} {:>12.3e}", l.kind, l.rows, l.failed, l.max_residual);
        failed += l.failed;
    }
    if failed > 0 {
        return Err(Failure::Verification(format!("{failed} failed rows in {}", path.display())));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = cli.overrides.resolve()?;
    match cli.command {
        Command::Verify => verify(&cfg),
        Command::Eta => {
            let p = campaign::emit_shift_samples(&cfg, &out_dir(&cfg))?;
            println!("{}", p.display());
            Ok(())
        }
        Command::Diagnose => {
            for p in campaign::diagnose(&cfg, &out_dir(&cfg))? {
                println!("{}", p.display());
            }
            Ok(())
        }
        Command::Report => report(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Config(m)) => {
            eprintln!("{m}");
            ExitCode::from(2)
        }
    }
}
