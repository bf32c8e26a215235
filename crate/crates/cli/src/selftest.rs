//! Quick invariant checks on small chains, meant to run in a second or two.

use std::f64::consts::{LN_2, PI};

use ssh_sre::aklt::{aklt_entropies, AkltCase, AkltGroundState, AkltRegion};
use ssh_sre::asymptotics::dimerized_table;
use ssh_sre::statmech::{bulk_defect_spectrum, equipartition_report};
use ssh_sre::{
    charged_moment, classify_window, srpf_exact, total_renyi, ChainSpec, ChargeResolvedTable, DefectKind,
    OccupationPolicy, SolvedChain, Window,
};

use crate::error::CliError;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value.is_finite() && self.value <= self.tolerance
    }
}

fn table_gap(a: &ChargeResolvedTable, b: &ChargeResolvedTable) -> f64 {
    let mut gap = (a.totals.s_n - b.totals.s_n).abs();
    for dq in -2..=2 {
        gap = gap.max((a.probability_dq(dq) - b.probability_dq(dq)).abs());
        if let (Some(x), Some(y)) = (a.sre_dq(dq), b.sre_dq(dq)) {
            gap = gap.max((x - y).abs());
        }
    }
    gap
}

pub fn run_selftest() -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();

    let dimer = ChainSpec::two_defect(80, 1.0, DefectKind::OneSite);
    let solved = SolvedChain::new(dimer.clone())?;
    let mut worst = 0.0f64;
    for m in [5, 14, 32] {
        let w = Window::new(m, 4);
        let class = classify_window(&dimer, w)?;
        let lambdas = solved.lambdas(&OccupationPolicy::below_half(), w)?;
        for n in [1.0, 2.0] {
            let lattice = ChargeResolvedTable::from_lambdas(&lambdas, n)?;
            let exact = dimerized_table(class.phase, 4, n, None)?;
            worst = worst.max(table_gap(&lattice, &exact));
        }
    }
    checks.push(Check { name: "dimerized lattice equals closed forms", value: worst, tolerance: 1e-10 });

    let spec = ChainSpec::two_defect(120, 0.4, DefectKind::OneSite);
    let chain = SolvedChain::new(spec)?;
    let lambdas = chain.lambdas(&OccupationPolicy::below_half(), Window::new(40, 8))?;
    let z1 = srpf_exact(&lambdas, 1.0)?;
    checks.push(Check { name: "sector probabilities sum to one", value: (z1.iter().sum::<f64>() - 1.0).abs(), tolerance: 1e-12 });

    let z2 = srpf_exact(&lambdas, 2.0)?;
    let points = 64;
    let mut fourier = 0.0f64;
    for (q, &expected) in z2.iter().enumerate() {
        let sum: f64 = (0..points)
            .map(|k| {
                let alpha = -PI + 2.0 * PI * k as f64 / points as f64;
                let z = charged_moment(&lambdas, 2.0, alpha).unwrap_or_default();
                let phase = alpha * q as f64;
                z.re * phase.cos() + z.im * phase.sin()
            })
            .sum();
        fourier = fourier.max((sum / points as f64 - expected).abs());
    }
    checks.push(Check { name: "charged moments transform to sector weights", value: fourier, tolerance: 1e-12 });

    let s2 = total_renyi(&lambdas, 2.0)?;
    let table = ChargeResolvedTable::from_lambdas(&lambdas, 2.0)?;
    checks.push(Check { name: "total Renyi entropy consistent", value: (table.totals.s_n - s2).abs(), tolerance: 1e-12 });
    checks.push(Check {
        name: "configurational plus fluctuation equals total",
        value: (table.totals.s_c + table.totals.s_f - table.totals.s).abs(),
        tolerance: 1e-12,
    });

    let mut rdm = 0.0f64;
    for p in [0.0, 0.1, 0.3, 0.5] {
        let case = AkltCase::new(AkltRegion::DefectInterface, AkltGroundState::Hybrid { p })?;
        rdm = rdm.max(aklt_entropies(case, 2.0)?.rdm_deviation);
    }
    checks.push(Check { name: "AKLT interface density matrix", value: rdm, tolerance: 1e-12 });

    let bulk = aklt_entropies(AkltCase::new(AkltRegion::AkltBulk, AkltGroundState::TripletPm1)?, 1.0)?;
    checks.push(Check { name: "AKLT bulk entropy is 2 ln 2", value: (bulk.table.totals.s - 2.0 * LN_2).abs(), tolerance: 1e-14 });

    let mut spectrum = bulk_defect_spectrum(0.5, 6);
    spectrum.push(0.1);
    spectrum.sort_by(f64::total_cmp);
    let rows = equipartition_report(&spectrum, 4..=8, 1e-12)?;
    let residual = rows.iter().map(|r| r.decomposition_residual).fold(0.0, f64::max);
    let invariance = rows.iter().map(|r| r.mu_invariance).fold(0.0, f64::max);
    checks.push(Check { name: "constrained entropy decomposition", value: residual, tolerance: 1e-8 });
    checks.push(Check { name: "sector entropies independent of mu", value: invariance, tolerance: 1e-10 });

    Ok(checks)
}
