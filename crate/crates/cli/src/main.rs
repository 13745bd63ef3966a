use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use harvest_cli::edr::{run_edr, write_edr_csv};
use harvest_cli::validation::{select, Verdict};
use harvest_cli::{run_sweep, write_csv, Config, Status, Sweep};
use harvest_core::{correlation_report, pair_state, VacuumKind};

const OK: u8 = 0;
const VALIDATION_FAILED: u8 = 1;
const CONFIG_ERROR: u8 = 2;
const NUMERICAL_FAILURE: u8 = 3;

#[derive(Parser)]
#[command(name = "harvest", version, about = "Correlations of static detector pairs near (1+1) black holes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the [sweep] section of a config and write one CSV row per grid point and vacuum.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; 0 picks one per core.
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Run the built-in validation suite.
    Validate {
        /// Only criteria whose id or title matches.
        #[arg(long)]
        filter: Option<String>,
    },
    /// Excitation to de-excitation ratio of detector A over switching widths.
    Edr {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated switching widths.
        #[arg(long, value_delimiter = ',', required = true)]
        sigma_grid: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Print the full reduced state for the scenario of a config.
    Single {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load(path: &Path) -> Result<Config, ExitCode> {
    Config::load(path).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(CONFIG_ERROR)
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, ExitCode> {
    File::create(path).map(BufWriter::new).map_err(|e| {
        eprintln!("error: cannot write {}: {e}", path.display());
        ExitCode::from(CONFIG_ERROR)
    })
}

fn sweep(config: &Path, out: &Path, workers: usize) -> Result<ExitCode, ExitCode> {
    let cfg = load(config)?;
    let Some(sw) = Sweep::from_config(&cfg) else {
        eprintln!("error: {} has no [sweep] section", config.display());
        return Err(ExitCode::from(CONFIG_ERROR));
    };
    let rows = run_sweep(&cfg, &sw, workers).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(NUMERICAL_FAILURE)
    })?;
    let failed = rows.iter().filter(|r| matches!(r.status, Status::Failed(_))).count();
    let flagged = rows.iter().filter(|r| r.status == Status::Flagged).count();
    write_csv(create(out)?, &sw.outputs, &rows).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(CONFIG_ERROR)
    })?;
    log::info!("{} rows, {flagged} flagged, {failed} failed", rows.len());
    if failed > 0 {
        eprintln!("warning: {failed} of {} rows failed; see the status column", rows.len());
    }
    Ok(ExitCode::from(OK))
}

fn validate(filter: Option<&str>) -> ExitCode {
    let chosen = select(filter);
    if chosen.is_empty() {
        eprintln!("error: no criterion matches {:?}", filter.unwrap_or(""));
        return ExitCode::from(CONFIG_ERROR);
    }
    let mut all = true;
    for c in chosen {
        let r = c.run();
        print!("{r}");
        all &= r.verdict() == Verdict::Pass;
    }
    ExitCode::from(if all { OK } else { VALIDATION_FAILED })
}

fn edr(config: &Path, sigmas: &[f64], out: &Path, workers: usize) -> Result<ExitCode, ExitCode> {
    let cfg = load(config)?;
    if sigmas.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        eprintln!("error: --sigma-grid entries must be positive");
        return Err(ExitCode::from(CONFIG_ERROR));
    }
    let rows = run_edr(&cfg, sigmas, workers).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(NUMERICAL_FAILURE)
    })?;
    write_edr_csv(create(out)?, &rows).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(CONFIG_ERROR)
    })?;
    Ok(ExitCode::from(OK))
}

fn single(config: &Path) -> Result<ExitCode, ExitCode> {
    let cfg = load(config)?;
    let vacuum = cfg.scenario.vacuum.unwrap_or(VacuumKind::Unruh);
    let fail = |e: harvest_core::Error| {
        eprintln!("error: {e}");
        ExitCode::from(NUMERICAL_FAILURE)
    };
    let s = cfg.scenario(vacuum, None).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(CONFIG_ERROR)
    })?;
    s.validate().map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(CONFIG_ERROR)
    })?;
    let p = pair_state(&s).map_err(fail)?;
    let c = correlation_report(&s).map_err(fail)?;
    let f = |x: f64| format!("{x:.11e}");
    println!("vacuum = {vacuum}");
    println!("r_A = {}", f(s.det_a.radius));
    println!("r_B = {}", f(s.det_b.radius));
    for (name, z, e) in [
        ("L_AA", p.state.l_aa, p.errors.l_aa),
        ("L_BB", p.state.l_bb, p.errors.l_bb),
        ("L_AB", p.state.l_ab, p.errors.l_ab),
        ("M_nonlocal", p.state.m_nonlocal, p.errors.m_nonlocal),
    ] {
        println!("{name} = {} {} i  (err {})", f(z.re), f(z.im), f(e));
    }
    println!("concurrence = {}", f(c.concurrence));
    println!("mutual_information = {}", f(c.mutual_information));
    println!("l_plus = {}", f(c.l_plus));
    println!("l_minus = {}", f(c.l_minus));
    println!("estimator = {}", f(c.estimator));
    println!("status = {}", if p.flagged { "flagged" } else { "ok" });
    Ok(ExitCode::from(OK))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let r = match cli.command {
        Command::Sweep { config, out, workers } => sweep(&config, &out, workers),
        Command::Validate { filter } => Ok(validate(filter.as_deref())),
        Command::Edr { config, sigma_grid, out, workers } => edr(&config, &sigma_grid, &out, workers),
        Command::Single { config } => single(&config),
    };
    r.unwrap_or_else(|code| code)
}
