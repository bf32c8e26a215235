//! Non-interval outputs: constrained-state (chemical potential) reports and
//! the AKLT tables.

use serde::Serialize;
use ssh_sre::aklt::{aklt_entropies, AkltCase, AkltGroundState, AkltRegion};
use ssh_sre::asymptotics::window_spectrum;
use ssh_sre::statmech::{bulk_defect_spectrum, equipartition_report, MuPosition};
use ssh_sre::{AsymptoticParams, Phase};

use crate::config::ScanConfig;
use crate::error::CliError;

/// Sectors entering the `μ`-invariance check.
pub const STATMECH_MIN_PROBABILITY: f64 = 1e-12;
pub const DECOMPOSITION_TOLERANCE: f64 = 1e-8;
pub const MU_INVARIANCE_TOLERANCE: f64 = 1e-10;
pub const AKLT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatmechRow {
    pub q: usize,
    pub dq: i64,
    pub mu: f64,
    pub constrained_entropy: f64,
    pub constrained_probability: f64,
    pub sre: Option<f64>,
    pub reconstructed_sre: Option<f64>,
    pub decomposition_residual: f64,
    pub mu_invariance: f64,
    pub position: &'static str,
    pub level: Option<f64>,
    pub degeneracy: usize,
}

/// Pseudo-energies of an `ℓ`-cell window: the union of the two cut spectra
/// truncated at `|l| ≤ ℓ/2`, or for a defect with a zero-mode level the bulk
/// spectrum `ε(l - ℓ)` plus `ε_zero`.
pub fn statmech_spectrum(phase: Phase, eps_zero: Option<f64>, ell: usize, params: &AsymptoticParams) -> Result<Vec<f64>, CliError> {
    match (phase, eps_zero) {
        (Phase::Defect, Some(ez)) => {
            let mut levels = bulk_defect_spectrum(params.epsilon, ell);
            levels.push(ez);
            levels.sort_by(f64::total_cmp);
            Ok(levels)
        }
        (Phase::Defect, None) => Ok(bulk_defect_spectrum(params.epsilon, ell)),
        (_, Some(_)) => Err(CliError::Config("eps_zero needs a defect spectrum".into())),
        (phase, None) => Ok(window_spectrum(phase, params, (ell / 2).max(1))?),
    }
}

pub struct StatmechOutput {
    pub rows: Vec<StatmechRow>,
    pub violations: usize,
}

pub fn run_statmech(config: &ScanConfig) -> Result<StatmechOutput, CliError> {
    config.validate()?;
    let sm = config.statmech.as_ref().expect("validated");
    let params = AsymptoticParams::new(config.chain.delta)?;
    let ell = config.window_length;
    let spectrum = statmech_spectrum(sm.phase, sm.eps_zero, ell, &params)?;
    let [lo, hi] = sm.q_range.unwrap_or([ell.saturating_sub(3).max(1), ell + 3]);
    if lo == 0 || hi >= spectrum.len() || lo > hi {
        return Err(CliError::Config(format!("q_range [{lo}, {hi}] outside 1..{}", spectrum.len())));
    }
    let report = equipartition_report(&spectrum, lo..=hi, STATMECH_MIN_PROBABILITY)?;
    let mut violations = 0;
    let rows = report
        .into_iter()
        .map(|r| {
            if r.decomposition_residual > DECOMPOSITION_TOLERANCE || r.mu_invariance > MU_INVARIANCE_TOLERANCE {
                violations += 1;
            }
            let (position, level, degeneracy) = match r.position {
                MuPosition::InGap { .. } => ("gap", None, 0),
                MuPosition::AtLevel { level, degeneracy } => ("level", Some(level), degeneracy),
            };
            StatmechRow {
                q: r.q,
                dq: r.q as i64 - ell as i64,
                mu: r.mu,
                constrained_entropy: r.constrained_entropy,
                constrained_probability: r.constrained_probability,
                sre: r.sre,
                reconstructed_sre: r.reconstructed_sre,
                decomposition_residual: r.decomposition_residual,
                mu_invariance: r.mu_invariance,
                position,
                level,
                degeneracy,
            }
        })
        .collect();
    Ok(StatmechOutput { rows, violations })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AkltRow {
    pub region: &'static str,
    pub ground_state: &'static str,
    pub p: Option<f64>,
    pub eta: f64,
    pub n: f64,
    pub jz: i64,
    pub z1: f64,
    pub s_n_jz: Option<f64>,
    pub s_n: f64,
    pub s: f64,
    pub s_c: f64,
    pub s_f: f64,
    pub rdm_deviation: f64,
}

pub struct AkltOutput {
    pub rows: Vec<AkltRow>,
    pub violations: usize,
}

fn region_name(r: AkltRegion) -> &'static str {
    match r {
        AkltRegion::TrivialProduct => "trivial_product",
        AkltRegion::AkltBulk => "aklt_bulk",
        AkltRegion::DefectInterface => "defect_interface",
    }
}

/// Triplet tables for every region, then the hybridized interface for each
/// `p` (default `0, 0.1, …, 0.5`).
pub fn run_aklt(config: &ScanConfig) -> Result<AkltOutput, CliError> {
    config.validate()?;
    let default_ps: Vec<f64> = (0..=5).map(|i| i as f64 / 10.0).collect();
    let ps = config.p_list.clone().unwrap_or(default_ps);
    let mut cases = vec![
        AkltCase::new(AkltRegion::TrivialProduct, AkltGroundState::TripletPm1)?,
        AkltCase::new(AkltRegion::AkltBulk, AkltGroundState::TripletPm1)?,
        AkltCase::new(AkltRegion::DefectInterface, AkltGroundState::TripletPm1)?,
    ];
    for &p in &ps {
        cases.push(AkltCase::new(AkltRegion::DefectInterface, AkltGroundState::Hybrid { p })?);
    }
    let mut rows = Vec::new();
    let mut violations = 0;
    for case in cases {
        for &n in &config.n_list {
            let e = aklt_entropies(case, n)?;
            if e.rdm_deviation > AKLT_TOLERANCE {
                violations += 1;
            }
            let (ground_state, p) = match case.ground_state {
                AkltGroundState::TripletPm1 => ("triplet_pm1", None),
                AkltGroundState::Hybrid { p } => ("hybrid", Some(p)),
            };
            for (i, &jz) in e.table.q_values.iter().enumerate() {
                rows.push(AkltRow {
                    region: region_name(case.region),
                    ground_state,
                    p,
                    eta: e.eta,
                    n,
                    jz,
                    z1: e.table.probabilities[i],
                    s_n_jz: e.table.sre_renyi[i],
                    s_n: e.table.totals.s_n,
                    s: e.table.totals.s,
                    s_c: e.table.totals.s_c,
                    s_f: e.table.totals.s_f,
                    rdm_deviation: e.rdm_deviation,
                });
            }
        }
    }
    Ok(AkltOutput { rows, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Mode, StatmechConfig};

    #[test]
    fn trivial_statmech_report() {
        let config = ScanConfig {
            mode: Mode::Statmech,
            statmech: Some(StatmechConfig { phase: Phase::Trivial, eps_zero: None, q_range: None }),
            ..ScanConfig::default()
        };
        let out = run_statmech(&config).unwrap();
        assert_eq!(out.violations, 0);
        assert_eq!(out.rows.len(), 7);
        let odd = out.rows.iter().find(|r| r.dq == 1).unwrap();
        assert_eq!(odd.position, "level");
        assert_eq!(odd.degeneracy, 2);
    }

    #[test]
    fn aklt_rows() {
        let config = ScanConfig { mode: Mode::Aklt, n_list: vec![1.0, 2.0], ..ScanConfig::default() };
        let out = run_aklt(&config).unwrap();
        assert_eq!(out.violations, 0);
        assert!(out.rows.iter().any(|r| r.region == "aklt_bulk" && r.jz == 0));
    }
}
