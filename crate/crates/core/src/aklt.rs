//! Spin-1 chain with an AKLT half and a `Π|0⟩` product half.
//!
//! Only the effective two-spin-½ description of the edge modes is used: the
//! `J^z`-resolved entropies follow from the fully dimerized SSH tables, and
//! the hybridized `J^z_tot = 0` ground states from a diagonal 4×4 density
//! matrix.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{binary_renyi, dimerized_table};
use crate::entanglement::{config_fluct_split, ChargeResolvedTable, Totals};
use crate::error::{Error, Result};
use crate::linalg::{eigh_symmetric, Matrix};
use crate::model::Phase;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AkltRegion {
    TrivialProduct,
    AkltBulk,
    DefectInterface,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AkltGroundState {
    /// `J^z_tot = ±1`; the resolved tables use the `-1` member.
    TripletPm1,
    /// `√(1-p)|⇕⟩₊ + √p|⇕⟩₋`.
    Hybrid { p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AkltCase {
    pub region: AkltRegion,
    pub ground_state: AkltGroundState,
}

impl AkltCase {
    pub fn new(region: AkltRegion, ground_state: AkltGroundState) -> Result<Self> {
        let case = Self { region, ground_state };
        case.validate()?;
        Ok(case)
    }

    pub fn validate(&self) -> Result<()> {
        match self.ground_state {
            AkltGroundState::TripletPm1 => Ok(()),
            AkltGroundState::Hybrid { .. } if self.region != AkltRegion::DefectInterface => {
                Err(Error::Domain("hybridized ground states only differ on a defect interface".into()))
            }
            AkltGroundState::Hybrid { p } if !(0.0..=1.0).contains(&p) => {
                Err(Error::Domain(format!("p must lie in [0, 1], got {p}")))
            }
            _ => Ok(()),
        }
    }

    /// `η = 2√(p(1-p))`; zero for the triplets.
    pub fn eta(&self) -> f64 {
        match self.ground_state {
            AkltGroundState::Hybrid { p } => eta(p),
            AkltGroundState::TripletPm1 => 0.0,
        }
    }
}

pub fn eta(p: f64) -> f64 {
    2.0 * (p * (1.0 - p)).sqrt()
}

/// `(1/(1-n)) ln(((1+η)/2)ⁿ + ((1-η)/2)ⁿ)`, the entropy of the `J^z_A = 0`
/// sector on a defect interface.
pub fn hybrid_sector_entropy(eta: f64, n: f64) -> f64 {
    binary_renyi(0.5 * (1.0 + eta), n)
}

/// `ρ = I/4 - (η/4) diag(1, 1, -1, -1)` in the basis `↑↑, ↓↑, ↑↓, ↓↓`.
pub fn interface_rdm(eta: f64) -> Matrix {
    let signs = [1.0, 1.0, -1.0, -1.0];
    Matrix::from_fn(4, 4, |i, j| if i == j { 0.25 - 0.25 * eta * signs[i] } else { 0.0 })
}

/// `J^z_A` of the basis states `↑↑, ↓↑, ↑↓, ↓↓`.
const INTERFACE_JZ: [i64; 4] = [1, 0, 0, -1];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AkltEntropies {
    pub case: AkltCase,
    pub n: f64,
    pub eta: f64,
    /// Rows are `J^z_A` (`q_values`, offset 0).
    pub table: ChargeResolvedTable,
    /// Largest deviation between the diagonalized 4×4 density matrix and
    /// the closed forms; zero when no matrix is involved.
    pub rdm_deviation: f64,
}

impl AkltEntropies {
    pub fn totals(&self) -> &Totals {
        &self.table.totals
    }
}

fn relabel(mut table: ChargeResolvedTable) -> ChargeResolvedTable {
    table.q_values = table.q_values.iter().map(|q| q - table.offset).collect();
    table.offset = 0;
    table
}

/// Total and `J^z`-resolved entropies of a window in the given region.
pub fn aklt_entropies(case: AkltCase, n: f64) -> Result<AkltEntropies> {
    case.validate()?;
    let phase = match case.region {
        AkltRegion::TrivialProduct => Phase::Trivial,
        AkltRegion::AkltBulk => Phase::Topological,
        AkltRegion::DefectInterface => Phase::Defect,
    };
    let p = match case.ground_state {
        AkltGroundState::TripletPm1 => {
            let table = relabel(dimerized_table(phase, 1, n, None)?);
            return Ok(AkltEntropies { case, n, eta: 0.0, table, rdm_deviation: 0.0 });
        }
        AkltGroundState::Hybrid { p } => p,
    };
    let eta = eta(p);
    let table = hybrid_table(eta, n);
    let rdm_deviation = rdm_cross_check(eta, n, &table)?;
    Ok(AkltEntropies { case, n, eta, table, rdm_deviation })
}

fn hybrid_table(eta: f64, n: f64) -> ChargeResolvedTable {
    let (up, down) = (0.25 * (1.0 + eta), 0.25 * (1.0 - eta));
    let sector = hybrid_sector_entropy(eta, n);
    let vn = hybrid_sector_entropy(eta, 1.0);
    // J = -1 holds ↓↓ (weight (1+η)/4), J = +1 holds ↑↑ (weight (1-η)/4).
    let probabilities = vec![up, 0.5, down];
    let z_n = vec![up.powf(n), up.powf(n) + down.powf(n), down.powf(n)];
    let filled = |w: f64, s: f64| if w > 0.0 { Some(s) } else { None };
    let sre_vn = vec![filled(up, 0.0), Some(vn), filled(down, 0.0)];
    let sre_renyi = vec![filled(up, 0.0), Some(sector), filled(down, 0.0)];
    let mut table = ChargeResolvedTable {
        n,
        offset: 0,
        q_values: vec![-1, 0, 1],
        z_n,
        probabilities,
        sre_renyi,
        sre_vn,
        totals: Totals { s_n: 0.0, s: 0.0, s_c: 0.0, s_f: 0.0, mean_charge: -0.5 * eta },
    };
    let (s_c, s_f) = config_fluct_split(&table);
    table.totals = Totals {
        s_n: std::f64::consts::LN_2 + sector,
        s: std::f64::consts::LN_2 + vn,
        s_c,
        s_f,
        mean_charge: -0.5 * eta,
    };
    table
}

/// Diagonalizes the 4×4 density matrix and compares total and per-sector
/// entropies with the closed forms in `table`.
fn rdm_cross_check(eta: f64, n: f64, table: &ChargeResolvedTable) -> Result<f64> {
    let eig = eigh_symmetric(&interface_rdm(eta))?;
    let renyi = |ws: &[f64]| -> f64 {
        let total: f64 = ws.iter().sum();
        if total <= 0.0 {
            return 0.0;
        }
        let ps: Vec<f64> = ws.iter().map(|w| w / total).collect();
        if n == 1.0 {
            -ps.iter().map(|&p| if p > 0.0 { p * p.ln() } else { 0.0 }).sum::<f64>()
        } else {
            ps.iter().map(|p| p.powf(n)).sum::<f64>().ln() / (1.0 - n)
        }
    };
    let mut deviation = (renyi(&eig.values) - table.totals.s_n).abs();
    // The matrix is diagonal, so eigenvector i is concentrated on one basis state.
    for (i, &jz) in table.q_values.iter().enumerate() {
        let weights: Vec<f64> = (0..4)
            .filter(|&k| {
                let v = eig.vector(k);
                let basis = (0..4).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap();
                INTERFACE_JZ[basis] == jz
            })
            .map(|k| eig.values[k].max(0.0))
            .collect();
        let p: f64 = weights.iter().sum();
        deviation = deviation.max((p - table.probabilities[i]).abs());
        if let Some(s) = table.sre_renyi[i] {
            deviation = deviation.max((renyi(&weights) - s).abs());
        }
    }
    Ok(deviation)
}

/// Excess entropy of the hybridized interface over the triplet,
/// `S_n^{(η)} - S_n^{triplet}`.
pub fn aklt_excess(eta: f64, n: f64) -> f64 {
    hybrid_sector_entropy(eta, n)
}

/// SSH zero-mode weight reproducing the AKLT excess at `η`.
pub fn ssh_equivalent_p(eta: f64) -> f64 {
    0.5 * (1.0 + eta)
}
