//! Average-charge constraint on the entanglement Hamiltonian.
//!
//! Replacing `H_A` by `H_A - μQ_A` shifts every pseudo-energy by `-μ`. The
//! constrained state has the same sector entropies as the original one;
//! only the charge distribution moves.

use serde::{Deserialize, Serialize};

use crate::asymptotics::binary_entropy;
use crate::entanglement::{fermi, SectorLogs};
use crate::error::{Error, Result};

/// Levels closer than this count as degenerate, and `μ` closer than this to
/// a level counts as sitting on it.
pub const DEGENERACY_THRESHOLD: f64 = 1e-6;

/// Half-width added around the finite spectrum to bracket `μ`.
pub const MU_BRACKET: f64 = 40.0;

pub const OCCUPATION_TOLERANCE: f64 = 1e-12;

const MAX_BISECTIONS: usize = 400;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstrainedState {
    pub spectrum: Vec<f64>,
    pub q_target: f64,
    pub mu: f64,
}

impl ConstrainedState {
    pub fn solve(spectrum: &[f64], q_target: f64) -> Result<Self> {
        let mu = solve_mu(spectrum, q_target)?;
        Ok(Self { spectrum: spectrum.to_vec(), q_target, mu })
    }

    pub fn occupations(&self) -> Vec<f64> {
        shifted_occupations(&self.spectrum, self.mu)
    }

    pub fn entropy(&self) -> f64 {
        constrained_entropy(&self.spectrum, self.mu)
    }

    /// `|Σ f(ε_i - μ) - q|`.
    pub fn residual(&self) -> f64 {
        (mean_occupation(&self.spectrum, self.mu) - self.q_target).abs()
    }
}

/// `f(ε_i - μ)` for every level; `±∞` levels stay empty/full.
pub fn shifted_occupations(spectrum: &[f64], mu: f64) -> Vec<f64> {
    spectrum.iter().map(|&e| fermi(e - mu)).collect()
}

pub fn mean_occupation(spectrum: &[f64], mu: f64) -> f64 {
    shifted_occupations(spectrum, mu).iter().sum()
}

/// Chemical potential with `Σ f(ε_i - μ) = q_target`.
///
/// `+∞` levels are frozen empty and `-∞` levels frozen full; the latter are
/// subtracted from the target before bisecting over the finite levels.
pub fn solve_mu(spectrum: &[f64], q_target: f64) -> Result<f64> {
    if spectrum.iter().any(|e| e.is_nan()) {
        return Err(Error::Domain("spectrum contains NaN".into()));
    }
    let full = spectrum.iter().filter(|&&e| e == f64::NEG_INFINITY).count() as f64;
    let finite: Vec<f64> = spectrum.iter().copied().filter(|e| e.is_finite()).collect();
    let target = q_target - full;
    if !(target > 0.0 && target < finite.len() as f64) {
        return Err(Error::ChargeOutOfRange { target: q_target, lo: full, hi: full + finite.len() as f64 });
    }
    let min = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let max = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut lo, mut hi) = (min - MU_BRACKET, max + MU_BRACKET);
    let mut mu = 0.5 * (lo + hi);
    for _ in 0..MAX_BISECTIONS {
        mu = 0.5 * (lo + hi);
        let diff = mean_occupation(&finite, mu) - target;
        if diff.abs() < OCCUPATION_TOLERANCE || hi - lo <= f64::EPSILON * mu.abs().max(1.0) {
            break;
        }
        if diff < 0.0 {
            lo = mu;
        } else {
            hi = mu;
        }
    }
    Ok(mu)
}

/// Entropy of the constrained state, `Σ h(f(ε_i - μ))`.
pub fn constrained_entropy(spectrum: &[f64], mu: f64) -> f64 {
    shifted_occupations(spectrum, mu).into_iter().map(binary_entropy).sum()
}

/// Bulk spectrum `ε(l - ℓ)`, `l = 1 ..= 2ℓ-1`, of a window across a defect.
/// Together with one zero-mode level it fills the `2ℓ` modes of the window.
pub fn bulk_defect_spectrum(epsilon: f64, ell: usize) -> Vec<f64> {
    (1..2 * ell as i64).map(|l| epsilon * (l - ell as i64) as f64).collect()
}

/// Where `μ` sits relative to the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MuPosition {
    /// Charge fluctuations are suppressed.
    InGap { below: Option<f64>, above: Option<f64> },
    /// Levels within the degeneracy threshold of `μ`; equipartition breaks
    /// when there is more than one.
    AtLevel { level: f64, degeneracy: usize },
}

pub fn mu_position(spectrum: &[f64], mu: f64) -> MuPosition {
    let on: Vec<f64> = spectrum.iter().copied().filter(|e| (e - mu).abs() < DEGENERACY_THRESHOLD).collect();
    if let Some(&level) = on.first() {
        return MuPosition::AtLevel { level, degeneracy: on.len() };
    }
    let below = spectrum.iter().copied().filter(|&e| e < mu).fold(None, |acc: Option<f64>, e| Some(acc.map_or(e, |a| a.max(e))));
    let above = spectrum.iter().copied().filter(|&e| e > mu).fold(None, |acc: Option<f64>, e| Some(acc.map_or(e, |a| a.min(e))));
    MuPosition::InGap { below, above }
}

/// Sector probabilities and von Neumann SREs of a spectrum shifted by `μ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorDecomposition {
    pub mu: f64,
    pub probabilities: Vec<f64>,
    pub sre: Vec<Option<f64>>,
}

impl SectorDecomposition {
    pub fn new(spectrum: &[f64], mu: f64) -> Self {
        let shifted: Vec<f64> = spectrum.iter().map(|e| e - mu).collect();
        let logs = SectorLogs::von_neumann_from_epsilons(&shifted);
        let sre = (0..logs.log_z.len()).map(|q| logs.vn_entropy(q)).collect();
        Self { mu, probabilities: logs.z(), sre }
    }

    /// `Σ Z₁'(q) S(q) - Σ Z₁'(q) ln Z₁'(q)`.
    pub fn entropy(&self) -> f64 {
        self.probabilities
            .iter()
            .zip(&self.sre)
            .map(|(&p, s)| if p > 0.0 { p * s.unwrap_or(0.0) - p * p.ln() } else { 0.0 })
            .sum()
    }
}

/// One row of [`equipartition_report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquipartitionRow {
    pub q: usize,
    pub mu: f64,
    pub constrained_entropy: f64,
    /// `Z₁'(q)` of the constrained distribution.
    pub constrained_probability: f64,
    /// `S(q)` recomputed from the `μ`-shifted occupations.
    pub reconstructed_sre: Option<f64>,
    /// `S(q)` of the unconstrained spectrum.
    pub sre: Option<f64>,
    /// `|S̃ - Σ Z₁' S + Σ Z₁' ln Z₁'|`.
    pub decomposition_residual: f64,
    /// Largest `|S_μ(q') - S_0(q')|` over sectors with `Z₁, Z₁' > min_probability`.
    pub mu_invariance: f64,
    pub position: MuPosition,
}

/// Sector-by-sector constrained-state diagnostics for target charges
/// `q_range`. `min_probability` selects the sectors that enter the
/// `μ`-invariance check.
pub fn equipartition_report(
    spectrum: &[f64],
    q_range: impl IntoIterator<Item = usize>,
    min_probability: f64,
) -> Result<Vec<EquipartitionRow>> {
    let base = SectorDecomposition::new(spectrum, 0.0);
    q_range
        .into_iter()
        .map(|q| {
            let mu = solve_mu(spectrum, q as f64)?;
            let shifted = SectorDecomposition::new(spectrum, mu);
            let constrained = constrained_entropy(spectrum, mu);
            let mut invariance: f64 = 0.0;
            for (i, (a, b)) in shifted.sre.iter().zip(&base.sre).enumerate() {
                if shifted.probabilities[i] > min_probability && base.probabilities[i] > min_probability {
                    if let (Some(a), Some(b)) = (a, b) {
                        invariance = invariance.max((a - b).abs());
                    }
                }
            }
            Ok(EquipartitionRow {
                q,
                mu,
                constrained_entropy: constrained,
                constrained_probability: shifted.probabilities.get(q).copied().unwrap_or(0.0),
                reconstructed_sre: shifted.sre.get(q).copied().flatten(),
                sre: base.sre.get(q).copied().flatten(),
                decomposition_residual: (constrained - shifted.entropy()).abs(),
                mu_invariance: invariance,
                position: mu_position(spectrum, mu),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::window_spectrum;
    use crate::model::Phase;
    use crate::specialfn::AsymptoticParams;
    use std::f64::consts::LN_2;

    fn trivial_spectrum(eps: f64, ell: usize) -> Vec<f64> {
        let half = ell as i64 / 2;
        let mut levels: Vec<f64> = (-half + 1..=half).flat_map(|l| [(2 * l - 1) as f64 * eps; 2]).collect();
        levels.sort_by(f64::total_cmp);
        levels
    }

    #[test]
    fn mu_in_trivial_phase() {
        let eps = AsymptoticParams::new(0.3).unwrap().epsilon;
        let spec = trivial_spectrum(eps, 20);
        assert_eq!(spec.len(), 40);
        assert!(solve_mu(&spec, 20.0).unwrap().abs() < 1e-10);
        let mu = solve_mu(&spec, 21.0).unwrap();
        assert!((mu - eps).abs() < 1e-10);
        assert_eq!(mu_position(&spec, mu), MuPosition::AtLevel { level: eps, degeneracy: 2 });
        assert!(matches!(mu_position(&spec, 0.0), MuPosition::InGap { .. }));
        assert!(solve_mu(&[0.0], 0.5).unwrap().abs() < 1e-12);
    }

    #[test]
    fn sentinels_and_range() {
        let spec = [f64::NEG_INFINITY, 0.0, f64::INFINITY];
        assert!(solve_mu(&spec, 1.5).unwrap().abs() < 1e-12);
        assert!(solve_mu(&spec, 1.0).is_err());
        assert!(solve_mu(&spec, 2.0).is_err());
        assert!(solve_mu(&[1.0, 2.0], -0.1).is_err());
        assert!((constrained_entropy(&spec, 0.0) - LN_2).abs() < 1e-15);
    }

    #[test]
    fn constrained_entropy_limits() {
        let spec = [-1.0, 0.5, 2.0];
        assert!(constrained_entropy(&spec, 1e4) < 1e-12);
        assert!(constrained_entropy(&spec, -1e4) < 1e-12);
        assert!((constrained_entropy(&[0.7], 0.7) - LN_2).abs() < 1e-15);
        let eps = AsymptoticParams::new(0.3).unwrap().epsilon;
        let spec = trivial_spectrum(eps, 20);
        let s = constrained_entropy(&spec, eps);
        let sre = SectorDecomposition::new(&spec, 0.0).sre[21].unwrap();
        assert!((2.0 * s - 3.0 * LN_2 - sre).abs() < 5e-2);
        assert!((sre - LN_2).abs() < 5e-2);
    }

    #[test]
    fn decomposition_closes_and_sres_are_mu_invariant() {
        let eps = AsymptoticParams::new(0.3).unwrap().epsilon;
        let spectra = [
            trivial_spectrum(eps, 20),
            window_spectrum(Phase::Topological, &AsymptoticParams::new(0.3).unwrap(), 9).unwrap(),
            {
                let mut s = bulk_defect_spectrum(eps, 20);
                s.push(0.4);
                s
            },
            (0..17).map(|i| (i as f64 * 0.37).sin() * 3.0).collect(),
        ];
        for spec in &spectra {
            assert!(spec.len() <= 40);
            let rows = equipartition_report(spec, 1..spec.len(), 1e-12).unwrap();
            for row in rows {
                assert!(row.decomposition_residual < 1e-8, "{row:?}");
                assert!(row.mu_invariance < 1e-10, "{row:?}");
            }
        }
    }

    #[test]
    fn equidistant_spectrum_gives_equal_sres() {
        let eps = AsymptoticParams::new(0.3).unwrap().epsilon;
        let spec: Vec<f64> = (-19..=20).map(|l| l as f64 * eps).collect();
        let rows = equipartition_report(&spec, 17..=23, 1e-12).unwrap();
        let s0 = rows[3].reconstructed_sre.unwrap();
        for row in &rows {
            assert!((row.reconstructed_sre.unwrap() - s0).abs() < 1e-10);
            assert!(matches!(row.position, MuPosition::InGap { .. }));
        }
    }

    #[test]
    fn doubly_degenerate_spectrum_alternates() {
        let eps = AsymptoticParams::new(0.3).unwrap().epsilon;
        let spec = trivial_spectrum(eps, 20);
        let rows = equipartition_report(&spec, 16..=24, 1e-12).unwrap();
        for row in &rows {
            let s = row.reconstructed_sre.unwrap();
            let even = rows.iter().find(|r| r.q == 20).unwrap().reconstructed_sre.unwrap();
            if (row.q as i64 - 20) % 2 == 0 {
                assert!((s - even).abs() < 1e-6);
            } else {
                assert!(s > even + 0.5);
                assert!(matches!(row.position, MuPosition::AtLevel { degeneracy: 2, .. }));
            }
        }
    }

    #[test]
    fn zero_mode_degeneracy_maximizes_sre() {
        let eps = AsymptoticParams::new(0.3).unwrap().epsilon;
        let ell = 20;
        for dq in -2..=2i64 {
            let q = (ell as i64 + dq) as usize;
            let sre_at = |ez: f64| {
                let mut spec = bulk_defect_spectrum(eps, ell);
                spec.push(ez);
                SectorDecomposition::new(&spec, 0.0).sre[q].unwrap()
            };
            let (mut a, mut b) = (eps * dq as f64 - 2.0, eps * dq as f64 + 2.0);
            let g = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..80 {
                let (c, d) = (b - g * (b - a), a + g * (b - a));
                if sre_at(c) > sre_at(d) {
                    b = d;
                } else {
                    a = c;
                }
            }
            assert!((0.5 * (a + b) - eps * dq as f64).abs() < 1e-4, "dq={dq}");
            let mut spec = bulk_defect_spectrum(eps, ell);
            for ez in [-3.0, -0.5, 0.0, 1.7, 6.0] {
                spec.push(ez);
                let mu = solve_mu(&spec, q as f64).unwrap();
                spec.pop();
                let lower = eps * (dq - 1) as f64;
                let upper = eps * (dq + 1) as f64;
                assert!(lower < mu && mu < upper, "dq={dq} ez={ez} mu={mu}");
            }
        }
    }
}
