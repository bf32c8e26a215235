use rayon::prelude::*;
use serde::Serialize;
use ssh_sre::asymptotics::{asymptotic_table, dimerized_table, zero_mode_table};
use ssh_sre::{
    classify_window, AsymptoticParams, ChainSpec, ChargeResolvedTable, OccupationPolicy, Phase, SolvedChain, Window,
    WindowClass,
};

use crate::config::{Mode, ScanConfig};
use crate::error::CliError;

/// Rows cover `|Δq| ≤ DQ_ROWS`.
pub const DQ_ROWS: i64 = 3;

/// Sectors lighter than this on the lattice are left out of the tolerance check.
pub const CHECK_MIN_PROBABILITY: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Lattice,
    Asymptotic,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Lattice => "lattice",
            Source::Asymptotic => "asymptotic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub m: usize,
    pub p: Option<f64>,
    pub q: i64,
    pub dq: i64,
    pub n: f64,
    pub z1_q: f64,
    pub s_n_q: Option<f64>,
    pub s: f64,
    pub s_c: f64,
    pub s_f: f64,
    pub source: Source,
    /// `max(|ΔZ₁(q)|, |ΔS_n(q)|)` against the lattice row; asymptotic rows
    /// of `both` scans only.
    pub abs_dev: Option<f64>,
    #[serde(skip)]
    pub checked: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanOutput {
    pub rows: Vec<ScanRow>,
    /// Largest deviation over checked rows, when the scan compares pipelines.
    pub max_checked_deviation: Option<f64>,
    pub violations: usize,
}

/// Unit of parallel work: one window at one zero-mode weight.
#[derive(Debug, Clone, Copy)]
struct Unit {
    window: Window,
    p: Option<f64>,
}

fn units(config: &ScanConfig) -> Vec<Unit> {
    let ps: Vec<Option<f64>> = match &config.p_list {
        Some(ps) => ps.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    config.windows().flat_map(|window| ps.iter().map(move |&p| Unit { window, p })).collect()
}

fn rows_from_table(m: usize, p: Option<f64>, table: &ChargeResolvedTable, source: Source) -> Vec<ScanRow> {
    (-DQ_ROWS..=DQ_ROWS)
        .filter_map(|dq| {
            let i = table.index_of_dq(dq)?;
            Some(ScanRow {
                m,
                p,
                q: table.q_values[i],
                dq,
                n: table.n,
                z1_q: table.probabilities[i],
                s_n_q: table.sre_renyi[i],
                s: table.totals.s,
                s_c: table.totals.s_c,
                s_f: table.totals.s_f,
                source,
                abs_dev: None,
                checked: false,
            })
        })
        .collect()
}

fn lattice_rows(chain: &SolvedChain, config: &ScanConfig, unit: Unit) -> Result<Vec<ScanRow>, CliError> {
    let policy = match unit.p {
        Some(p) => OccupationPolicy::hybrid(p, 0.0),
        None => OccupationPolicy::below_half(),
    };
    let lambdas = chain.lambdas(&policy, unit.window)?;
    let mut rows = Vec::new();
    for &n in &config.n_list {
        let table = ChargeResolvedTable::from_lambdas(&lambdas, n)?;
        rows.extend(rows_from_table(unit.window.start, unit.p, &table, Source::Lattice));
    }
    Ok(rows)
}

/// Off-window weight of the zero mode `√(1-p)ψ₁ + √p ψ₂` for a window
/// holding defect `index`.
fn off_window_weight(p: f64, index: usize) -> f64 {
    if index == 0 {
        p
    } else {
        1.0 - p
    }
}

/// Analytical table for one window: dimerized closed forms at `δ = 1`,
/// theta-function asymptotics otherwise.
pub fn analytical_table(spec: &ChainSpec, class: WindowClass, ell: usize, n: f64, p: Option<f64>) -> Result<ChargeResolvedTable, CliError> {
    let zero_mode = match (class.phase, class.defect, p) {
        (Phase::Defect, Some(index), Some(p)) => Some(off_window_weight(p, index)),
        _ => None,
    };
    if spec.delta == 1.0 {
        return Ok(dimerized_table(class.phase, ell, n, zero_mode)?);
    }
    let params = AsymptoticParams::new(spec.delta)?;
    Ok(match zero_mode {
        Some(p) => zero_mode_table(p, n, &params, ell)?,
        None => asymptotic_table(class.phase, n, ell, &params)?,
    })
}

fn asymptotic_rows(config: &ScanConfig, unit: Unit) -> Result<Vec<ScanRow>, CliError> {
    let class = classify_window(&config.chain, unit.window)?;
    let mut rows = Vec::new();
    for &n in &config.n_list {
        let table = analytical_table(&config.chain, class, config.window_length, n, unit.p)?;
        rows.extend(rows_from_table(unit.window.start, unit.p, &table, Source::Asymptotic));
    }
    Ok(rows)
}

/// Both cuts at least `margin` cells from every defect site.
pub fn is_bulk_window(spec: &ChainSpec, window: Window, margin: usize) -> Result<bool, CliError> {
    let (left, right) = window.cut_bonds(spec.n_sites);
    let defects = spec.defect_sites()?;
    let near = |bond: usize| {
        let next = bond % spec.n_sites + 1;
        defects.iter().any(|&s| spec.site_distance(s, bond).min(spec.site_distance(s, next)) < 2 * margin)
    };
    Ok(!near(left) && !near(right))
}

fn compare(lattice: &[ScanRow], asymptotic: &mut [ScanRow], bulk: bool, tolerance: f64) -> usize {
    let mut violations = 0;
    for row in asymptotic.iter_mut() {
        let Some(lat) = lattice.iter().find(|r| r.dq == row.dq && r.n == row.n) else { continue };
        let ds = match (lat.s_n_q, row.s_n_q) {
            (Some(a), Some(b)) => (a - b).abs(),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        };
        let dev = (lat.z1_q - row.z1_q).abs().max(ds);
        row.abs_dev = Some(dev);
        row.checked = bulk && lat.z1_q > CHECK_MIN_PROBABILITY;
        if row.checked && dev > tolerance {
            violations += 1;
        }
    }
    violations
}

fn interleave(mut lattice: Vec<ScanRow>, asymptotic: Vec<ScanRow>) -> Vec<ScanRow> {
    lattice.extend(asymptotic);
    lattice.sort_by(|a, b| a.q.cmp(&b.q).then(a.n.total_cmp(&b.n)).then(a.source.cmp(&b.source)));
    lattice
}

/// Runs a `lattice`, `asymptotic`, `both` or `dimerized` scan. Rows are
/// ordered by `m`, then `p`, then `q`, then `n`, lattice before asymptotic.
pub fn run_scan(config: &ScanConfig) -> Result<ScanOutput, CliError> {
    config.validate()?;
    let (want_lattice, want_asymptotic) = match config.mode {
        Mode::Lattice => (true, false),
        Mode::Asymptotic => (false, true),
        Mode::Both | Mode::Dimerized => (true, true),
        Mode::Statmech | Mode::Aklt => {
            return Err(CliError::Config(format!("{:?} is not an interval scan", config.mode)));
        }
    };
    let chain = if want_lattice { Some(SolvedChain::new(config.chain.clone())?) } else { None };
    let work = units(config);
    let per_unit: Vec<(Vec<ScanRow>, usize)> = work
        .par_iter()
        .map(|&unit| -> Result<(Vec<ScanRow>, usize), CliError> {
            let lattice = match &chain {
                Some(c) => lattice_rows(c, config, unit)?,
                None => Vec::new(),
            };
            let mut asymptotic = if want_asymptotic { asymptotic_rows(config, unit)? } else { Vec::new() };
            let mut violations = 0;
            if want_lattice && want_asymptotic {
                let bulk = is_bulk_window(&config.chain, unit.window, config.bulk_margin)?;
                violations = compare(&lattice, &mut asymptotic, bulk, config.tolerance);
            }
            Ok((interleave(lattice, asymptotic), violations))
        })
        .collect::<Result<_, _>>()?;
    let violations = per_unit.iter().map(|(_, v)| v).sum();
    let rows: Vec<ScanRow> = per_unit.into_iter().flat_map(|(r, _)| r).collect();
    let max_checked_deviation = rows
        .iter()
        .filter(|r| r.checked)
        .filter_map(|r| r.abs_dev)
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))));
    Ok(ScanOutput { rows, max_checked_deviation, violations })
}
