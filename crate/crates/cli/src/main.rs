use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rfso_cli::presets::{preset, PRESET_NAMES};
use rfso_cli::scenario::{db_to_linear, load, Loaded};
use rfso_cli::{run_files, write_csv, MethodChoice, ResultRow};
use rfso_core::mcsim::McConfig;

const EVAL_ERROR: u8 = 1;
const INPUT_ERROR: u8 = 2;

/// Outage probability of dual-hop RF/FSO relaying with partial relay
/// selection on outdated CSI. SNRs are power dB (10^(dB/10)) throughout.
#[derive(Parser)]
#[command(name = "rfso", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct McArgs {
    /// Monte Carlo samples per point
    #[arg(long, default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    /// Seed of the Monte Carlo streams
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Random streams per point; the result depends on this, not on the core count
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u16).range(1..))]
    workers: u16,
}

impl McArgs {
    fn config(&self) -> McConfig {
        McConfig {
            n_samples: self.samples,
            seed: self.seed,
            workers: usize::from(self.workers),
            ..McConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every sweep point of a scenario file
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Comma-separated list
        #[arg(long, value_enum, value_delimiter = ',', default_value = "exact")]
        method: Vec<MethodChoice>,
        #[command(flatten)]
        mc: McArgs,
        #[arg(long, default_value = "results.csv")]
        out: PathBuf,
    },
    /// Write the scenario files of a figure and evaluate them
    Preset {
        #[arg(value_parser = PRESET_NAMES)]
        name: String,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the methods of the preset
        #[arg(long, value_enum, value_delimiter = ',')]
        method: Vec<MethodChoice>,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Check a scenario file and print its derived constants
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn load_or_report(path: &Path) -> Result<Loaded, ExitCode> {
    match load(path) {
        Ok(l) => {
            for w in &l.warnings {
                eprintln!("warning: {w}");
            }
            Ok(l)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Err(ExitCode::from(INPUT_ERROR))
        }
    }
}

fn finish(rows: &[ResultRow], out: &Path, started: Instant) -> ExitCode {
    if let Err(e) = write_csv(out, rows) {
        eprintln!("error: cannot write {}: {e}", out.display());
        return ExitCode::from(EVAL_ERROR);
    }
    let failed = rows.iter().filter(|r| r.failed).count();
    eprintln!(
        "{} rows written to {} in {:.1} s",
        rows.len(),
        out.display(),
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        eprintln!("{failed} evaluation(s) failed; see the diagnostics column");
        return ExitCode::from(EVAL_ERROR);
    }
    ExitCode::SUCCESS
}

fn validate(path: &Path) -> ExitCode {
    let loaded = match load_or_report(path) {
        Ok(l) => l,
        Err(code) => return code,
    };
    let f = &loaded.file;
    let built = f.build().expect("validated on load");
    let s = &built.scenario;
    let c = &s.fso.constants;
    println!("scenario {}", f.id);
    println!("  gamma_th   {} ({} dB)", db_to_linear(f.gamma_th_db), f.gamma_th_db);
    println!("  relays     M = {}, l = {}, rho = {}", s.rf.relays, s.rf.rank, f.rho);
    println!("  mu1, mu2   {} dB, {} dB", f.mu1_db, f.mu2_db);
    if let Some(g) = &s.fso.geometry {
        println!("  sigma_R^2  {}", g.sigma_r2);
    }
    println!("  xi         {}", s.fso.xi);
    println!("  g, Omega'  {}, {}", c.g, c.omega_prime);
    for sw in &f.sweeps {
        println!("  sweep      {} = {} ({} points)", sw.var, sw.value_text(), sw.len());
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    match cli.command {
        Command::Run {
            scenario,
            method,
            mc,
            out,
        } => {
            let loaded = match load_or_report(&scenario) {
                Ok(l) => l,
                Err(code) => return code,
            };
            let rows = run_files(&[loaded.file], &method, &mc.config());
            finish(&rows, &out, started)
        }
        Command::Preset {
            name,
            out,
            method,
            mc,
        } => {
            let p = preset(&name).expect("name checked by the parser");
            if let Err(e) = std::fs::create_dir_all(&out) {
                eprintln!("error: cannot create {}: {e}", out.display());
                return ExitCode::from(INPUT_ERROR);
            }
            for f in &p.files {
                let path = out.join(format!("{}.scn", f.id));
                if let Err(e) = std::fs::write(&path, f.emit()) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(EVAL_ERROR);
                }
            }
            let methods = if method.is_empty() { p.methods.clone() } else { method };
            eprintln!("{}: {} ({} curves)", p.name, p.title, p.files.len());
            let rows = run_files(&p.files, &methods, &mc.config());
            finish(&rows, &out.join(format!("{}.csv", p.name)), started)
        }
        Command::Validate { scenario } => validate(&scenario),
    }
}
