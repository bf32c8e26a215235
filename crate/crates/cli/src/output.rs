use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ScanConfig;
use crate::error::CliError;
use crate::reports::{AkltRow, StatmechRow};
use crate::scan::ScanRow;

pub const SCHEMA_VERSION: u32 = 1;

/// Shortest round-trip decimal; empty for `None`.
fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn header(kind: &str, columns: &str) -> String {
    format!("#schema={SCHEMA_VERSION} kind={kind}\n{columns}\n")
}

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = header("scan", "m,p,q,dq,n,Z1_q,S_n_q,S,S_c,S_f,source,abs_dev");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.m,
            opt(r.p),
            r.q,
            r.dq,
            num(r.n),
            num(r.z1_q),
            opt(r.s_n_q),
            num(r.s),
            num(r.s_c),
            num(r.s_f),
            r.source.as_str(),
            opt(r.abs_dev)
        );
    }
    out
}

pub fn statmech_csv(rows: &[StatmechRow]) -> String {
    let mut out = header(
        "statmech",
        "q,dq,mu,constrained_S,Z1p_q,S_q,reconstructed_S_q,decomposition_residual,mu_invariance,position,level,degeneracy",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.q,
            r.dq,
            num(r.mu),
            num(r.constrained_entropy),
            num(r.constrained_probability),
            opt(r.sre),
            opt(r.reconstructed_sre),
            num(r.decomposition_residual),
            num(r.mu_invariance),
            r.position,
            opt(r.level),
            r.degeneracy
        );
    }
    out
}

pub fn aklt_csv(rows: &[AkltRow]) -> String {
    let mut out = header("aklt", "region,ground_state,p,eta,n,jz,Z1_jz,S_n_jz,S_n,S,S_c,S_f,rdm_deviation");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.region,
            r.ground_state,
            opt(r.p),
            num(r.eta),
            num(r.n),
            r.jz,
            num(r.z1),
            opt(r.s_n_jz),
            num(r.s_n),
            num(r.s),
            num(r.s_c),
            num(r.s_f),
            num(r.rdm_deviation)
        );
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub scan_tolerance: f64,
    pub bulk_margin_cells: usize,
    pub check_min_probability: f64,
    pub lambda_tolerance: f64,
    pub empty_sector: f64,
    pub degeneracy_threshold: f64,
    pub occupation_tolerance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub schema: u32,
    pub kind: String,
    pub tool_version: &'static str,
    pub core_version: &'static str,
    pub config_sha256: String,
    pub chain_sha256: String,
    pub csv_sha256: String,
    pub tolerances: Tolerances,
    pub config: ScanConfig,
}

impl Metadata {
    pub fn new(kind: &str, config: &ScanConfig, csv: &str) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            kind: kind.to_string(),
            tool_version: env!("CARGO_PKG_VERSION"),
            core_version: ssh_sre::VERSION,
            config_sha256: config.hash(),
            chain_sha256: hex::encode(Sha256::digest(config.chain.to_json().as_bytes())),
            csv_sha256: hex::encode(Sha256::digest(csv.as_bytes())),
            tolerances: Tolerances {
                scan_tolerance: config.tolerance,
                bulk_margin_cells: config.bulk_margin,
                check_min_probability: crate::scan::CHECK_MIN_PROBABILITY,
                lambda_tolerance: ssh_sre::entanglement::LAMBDA_TOLERANCE,
                empty_sector: ssh_sre::entanglement::EMPTY_SECTOR,
                degeneracy_threshold: ssh_sre::statmech::DEGENERACY_THRESHOLD,
                occupation_tolerance: ssh_sre::statmech::OCCUPATION_TOLERANCE,
            },
            config: config.clone(),
        }
    }
}

#[derive(Serialize)]
struct JsonDocument<'a, R: Serialize> {
    metadata: Metadata,
    rows: &'a [R],
}

pub fn json_document<R: Serialize>(metadata: Metadata, rows: &[R]) -> String {
    let mut text = serde_json::to_string_pretty(&JsonDocument { metadata, rows }).expect("rows serialize");
    text.push('\n');
    text
}

/// Writes a regular file through a sibling temporary file and renames it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io { path: path.display().to_string(), source };
    // Devices, pipes and symlinks to them are written in place.
    if let Ok(meta) = std::fs::metadata(path) {
        if !meta.is_file() {
            let mut f = std::fs::OpenOptions::new().write(true).open(path).map_err(io)?;
            return f.write_all(contents.as_bytes()).map_err(io);
        }
    }
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(io)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result.map_err(io)
}

/// Writes the CSV and JSON artifacts named in the config, if any.
pub fn emit<R: Serialize>(config: &ScanConfig, kind: &str, csv: &str, rows: &[R]) -> Result<(), CliError> {
    if let Some(path) = &config.outputs.csv_path {
        write_atomic(path, csv)?;
    }
    if let Some(path) = &config.outputs.json_path {
        write_atomic(path, &json_document(Metadata::new(kind, config, csv), rows))?;
    }
    Ok(())
}
