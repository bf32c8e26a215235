use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ssh_sre::Phase;
use ssh_sre_cli::output::{aklt_csv, emit, scan_csv, statmech_csv};
use ssh_sre_cli::selftest::run_selftest;
use ssh_sre_cli::{run_aklt, run_scan, run_statmech, CliError, Mode, Overrides, ScanConfig, StatmechConfig};

#[derive(Parser)]
#[command(name = "ssh-sre", version, about = "Charge-resolved entanglement scans for SSH chains with defects")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Slide a window across the chain; lattice, asymptotic or both.
    ScanInterval(Overrides),
    /// Sweep the zero-mode weight on a window over a defect.
    ZeroModeScan(Overrides),
    /// Fully dimerized chain (δ = 1) against the closed forms.
    Dimerized(Overrides),
    /// Constrained-state decomposition and chemical-potential diagnostics.
    Statmech {
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, value_parser = parse_phase, default_value = "defect")]
        phase: Phase,
        #[arg(long)]
        eps_zero: Option<f64>,
        #[arg(long)]
        q_min: Option<usize>,
        #[arg(long)]
        q_max: Option<usize>,
    },
    /// AKLT / product interface tables.
    Aklt(Overrides),
    /// Fast invariant checks on small chains.
    Selftest,
}

fn parse_phase(s: &str) -> Result<Phase, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| format!("unknown phase {s:?}"))
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("SSH_SRE_THREADS") else { return Ok(()) };
    let threads: usize = value
        .parse()
        .map_err(|_| CliError::Config(format!("SSH_SRE_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

/// Resolves file and flags over `base`. Interval subcommands keep whatever mode
/// that yields; the other subcommands always run their own mode.
fn with_mode(o: &Overrides, mode: Mode, base: ScanConfig) -> Result<ScanConfig, CliError> {
    let mut c = ScanConfig::resolve(Some(base), o)?;
    if matches!(mode, Mode::Dimerized | Mode::Aklt | Mode::Statmech) {
        c.mode = mode;
    }
    Ok(c)
}

fn scan(config: ScanConfig) -> Result<(), CliError> {
    let out = run_scan(&config)?;
    let csv = scan_csv(&out.rows);
    emit(&config, "scan", &csv, &out.rows)?;
    if config.outputs.csv_path.is_none() {
        print!("{csv}");
    }
    if let Some(d) = out.max_checked_deviation {
        eprintln!("max bulk deviation {d:e} (tolerance {:e})", config.tolerance);
    }
    if out.violations > 0 {
        return Err(CliError::Validation(format!("{} rows exceed tolerance {:e}", out.violations, config.tolerance)));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::ScanInterval(o) => scan(with_mode(&o, Mode::Lattice, ScanConfig::default())?),
        Command::ZeroModeScan(o) => {
            let base = ScanConfig {
                m_range: [41, 41],
                p_list: Some((0..=100).map(|i| i as f64 / 100.0).collect()),
                mode: Mode::Both,
                ..ScanConfig::default()
            };
            scan(with_mode(&o, Mode::Both, base)?)
        }
        Command::Dimerized(o) => {
            let mut base = ScanConfig::default();
            base.chain.delta = 1.0;
            let mut c = with_mode(&o, Mode::Dimerized, base)?;
            c.chain.delta = 1.0;
            scan(c)
        }
        Command::Statmech { overrides, phase, eps_zero, q_min, q_max } => {
            let mut c = with_mode(&overrides, Mode::Statmech, ScanConfig::default())?;
            let q_range = match (q_min, q_max) {
                (Some(a), Some(b)) => Some([a, b]),
                (None, None) => c.statmech.as_ref().and_then(|s| s.q_range),
                _ => return Err(CliError::Config("--q-min and --q-max go together".into())),
            };
            if c.statmech.is_none() || q_min.is_some() || eps_zero.is_some() {
                c.statmech = Some(StatmechConfig { phase, eps_zero, q_range });
            }
            let out = run_statmech(&c)?;
            let csv = statmech_csv(&out.rows);
            emit(&c, "statmech", &csv, &out.rows)?;
            if c.outputs.csv_path.is_none() {
                print!("{csv}");
            }
            if out.violations > 0 {
                return Err(CliError::Validation(format!("{} statmech rows exceed tolerance", out.violations)));
            }
            Ok(())
        }
        Command::Aklt(o) => {
            let c = with_mode(&o, Mode::Aklt, ScanConfig::default())?;
            let out = run_aklt(&c)?;
            let csv = aklt_csv(&out.rows);
            emit(&c, "aklt", &csv, &out.rows)?;
            if c.outputs.csv_path.is_none() {
                print!("{csv}");
            }
            if out.violations > 0 {
                return Err(CliError::Validation(format!("{} AKLT rows exceed tolerance", out.violations)));
            }
            Ok(())
        }
        Command::Selftest => {
            let checks = run_selftest()?;
            let mut failed = 0;
            for c in &checks {
                let status = if c.passed() { "PASS" } else { "FAIL" };
                println!("{status} {} ({:e} <= {:e})", c.name, c.value, c.tolerance);
                failed += usize::from(!c.passed());
            }
            if failed > 0 {
                return Err(CliError::Validation(format!("{failed} self-checks failed")));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
