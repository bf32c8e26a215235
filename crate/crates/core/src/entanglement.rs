//! Entanglement from correlation-matrix eigenvalues: total entropies, charged
//! moments and the exact charge-resolved tables.
//!
//! The reduced density matrix of a free-fermion window factorizes into modes
//! occupied with probability `λ_i`, so every charge-resolved quantity is a
//! coefficient of `Π_i [(1-λ_i)ⁿ + λ_iⁿ x]`. The coefficients are accumulated
//! in log space; every term in the convolution is non-negative, so tiny
//! sectors keep full relative accuracy.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Correlation eigenvalues may leave `[0, 1]` by this much before being an error.
pub const LAMBDA_TOLERANCE: f64 = 1e-10;

/// Sectors with `Z₁(q)` below this are reported as empty.
pub const EMPTY_SECTOR: f64 = 1e-14;

/// Clamps eigenvalues into `[0, 1]`, rejecting anything outside by more than
/// [`LAMBDA_TOLERANCE`].
pub fn clamp_lambdas(raw: &[f64]) -> Result<Vec<f64>> {
    raw.iter()
        .map(|&x| {
            if !(-LAMBDA_TOLERANCE..=1.0 + LAMBDA_TOLERANCE).contains(&x) {
                Err(Error::EigenvalueOutOfRange(x))
            } else {
                Ok(x.clamp(0.0, 1.0))
            }
        })
        .collect()
}

fn check_lambdas(lambdas: &[f64]) -> Result<()> {
    match lambdas.iter().find(|&&x| !(0.0..=1.0).contains(&x)) {
        Some(&x) => Err(Error::EigenvalueOutOfRange(x)),
        None => Ok(()),
    }
}

fn check_index(n: f64) -> Result<()> {
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::Domain(format!("Rényi index must be positive, got {n}")));
    }
    Ok(())
}

/// `x ln x` with `0 ln 0 = 0`.
fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// `n ln x` with `ln 0 = -∞`.
fn log_pow(x: f64, n: f64) -> f64 {
    if x > 0.0 {
        n * x.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// `ln(Σ e^{x_i})`, tolerant of `-∞` entries.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Single-particle entanglement spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementSpectrum {
    pub lambdas: Vec<f64>,
    /// `ln((1-λ)/λ)`: `+∞` for `λ = 0`, `-∞` for `λ = 1`.
    pub epsilons: Vec<f64>,
}

impl EntanglementSpectrum {
    pub fn from_lambdas(lambdas: &[f64]) -> Result<Self> {
        let lambdas = clamp_lambdas(lambdas)?;
        let epsilons = lambdas.iter().map(|&l| pseudo_energy(l)).collect();
        Ok(Self { lambdas, epsilons })
    }

    pub fn from_epsilons(epsilons: &[f64]) -> Self {
        let lambdas = epsilons.iter().map(|&e| fermi(e)).collect();
        Self { lambdas, epsilons: epsilons.to_vec() }
    }
}

pub fn pseudo_energy(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        f64::INFINITY
    } else if lambda >= 1.0 {
        f64::NEG_INFINITY
    } else {
        ((1.0 - lambda) / lambda).ln()
    }
}

/// `1 / (e^ε + 1)`, stable for large `|ε|`.
pub fn fermi(epsilon: f64) -> f64 {
    if epsilon >= 0.0 {
        let e = (-epsilon).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + epsilon.exp())
    }
}

/// `(1/(1-n)) Σ ln(λⁿ + (1-λ)ⁿ)`.
pub fn total_renyi(lambdas: &[f64], n: f64) -> Result<f64> {
    check_index(n)?;
    if n == 1.0 {
        return Err(Error::RenyiIndexOne);
    }
    check_lambdas(lambdas)?;
    let sum: f64 = lambdas.iter().map(|&l| (l.powf(n) + (1.0 - l).powf(n)).ln()).sum();
    Ok(sum / (1.0 - n))
}

/// `-Σ [λ ln λ + (1-λ) ln(1-λ)]`.
pub fn total_vn(lambdas: &[f64]) -> Result<f64> {
    check_lambdas(lambdas)?;
    Ok(-lambdas.iter().map(|&l| xlogx(l) + xlogx(1.0 - l)).sum::<f64>())
}

/// `Z_n(α) = Π (λⁿ e^{iα} + (1-λ)ⁿ)`, evaluated as a sum of complex logs.
pub fn charged_moment(lambdas: &[f64], n: f64, alpha: f64) -> Result<Complex64> {
    check_index(n)?;
    check_lambdas(lambdas)?;
    let phase = Complex64::from_polar(1.0, alpha);
    let log_sum: Complex64 = lambdas
        .iter()
        .map(|&l| (phase * l.powf(n) + (1.0 - l).powf(n)).ln())
        .sum();
    Ok(log_sum.exp())
}

/// Log-space coefficients of `Π [(1-λ)ⁿ + λⁿ x]` and, at `n = 1`, of
/// `G(x) = -∂_n Π [(1-λ)ⁿ + λⁿ x] |_{n=1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorLogs {
    pub log_z: Vec<f64>,
    pub log_g: Option<Vec<f64>>,
}

impl SectorLogs {
    /// Coefficients of `Π [(1-λ)ⁿ + λⁿ x]` only.
    pub fn renyi(lambdas: &[f64], n: f64) -> Self {
        Self::renyi_from_logs(lambdas.iter().map(|&l| mode_logs(l)), n)
    }

    /// Probabilities `Z₁(q)` together with `G(q)`.
    pub fn von_neumann(lambdas: &[f64]) -> Self {
        Self::von_neumann_from_logs(lambdas.iter().map(|&l| mode_logs(l)))
    }

    /// As [`SectorLogs::renyi`], from pseudo-energies. Occupations near 0 or
    /// 1 keep full relative accuracy in both `λ` and `1-λ`.
    pub fn renyi_from_epsilons(epsilons: &[f64], n: f64) -> Self {
        Self::renyi_from_logs(epsilons.iter().map(|&e| epsilon_logs(e)), n)
    }

    pub fn von_neumann_from_epsilons(epsilons: &[f64]) -> Self {
        Self::von_neumann_from_logs(epsilons.iter().map(|&e| epsilon_logs(e)))
    }

    fn renyi_from_logs(modes: impl Iterator<Item = (f64, f64)>, n: f64) -> Self {
        let mut log_z = vec![0.0];
        for (la, lb) in modes {
            log_z = convolve_log(&log_z, scale_log(la, n), scale_log(lb, n));
        }
        Self { log_z, log_g: None }
    }

    fn von_neumann_from_logs(modes: impl Iterator<Item = (f64, f64)>) -> Self {
        let mut log_z = vec![0.0];
        let mut log_g = vec![f64::NEG_INFINITY];
        for (la, lb) in modes {
            // ln(-x ln x) for x = 1-λ and x = λ.
            let (da, db) = (log_entropy_term(la), log_entropy_term(lb));
            let len = log_z.len() + 1;
            let mut next_g = Vec::with_capacity(len);
            for q in 0..len {
                let mut terms = [f64::NEG_INFINITY; 4];
                if q < log_z.len() {
                    terms[0] = log_g[q] + la;
                    terms[1] = log_z[q] + da;
                }
                if q > 0 {
                    terms[2] = log_g[q - 1] + lb;
                    terms[3] = log_z[q - 1] + db;
                }
                next_g.push(log_sum_exp(&terms));
            }
            log_g = next_g;
            log_z = convolve_log(&log_z, la, lb);
        }
        Self { log_z, log_g: Some(log_g) }
    }

    pub fn z(&self) -> Vec<f64> {
        self.log_z.iter().map(|x| x.exp()).collect()
    }

    /// `S(q) = G(q)/Z₁(q) + ln Z₁(q)`; `None` for sectors of zero weight.
    pub fn vn_entropy(&self, q: usize) -> Option<f64> {
        let log_g = self.log_g.as_ref()?;
        let lz = self.log_z[q];
        if lz == f64::NEG_INFINITY {
            return None;
        }
        Some((log_g[q] - lz).exp() + lz)
    }
}

/// `(ln(1-λ), ln λ)`.
fn mode_logs(l: f64) -> (f64, f64) {
    let log_a = if l < 0.5 { (-l).ln_1p() } else { log_pow(1.0 - l, 1.0) };
    (log_a, log_pow(l, 1.0))
}

/// `(ln(1-λ), ln λ)` for `λ = 1/(e^ε + 1)`.
fn epsilon_logs(e: f64) -> (f64, f64) {
    (-softplus(-e), -softplus(e))
}

/// `ln(1 + e^x)`.
fn softplus(x: f64) -> f64 {
    if x == f64::INFINITY {
        x
    } else if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn scale_log(l: f64, n: f64) -> f64 {
    if l == f64::NEG_INFINITY {
        l
    } else {
        n * l
    }
}

/// `ln(-x ln x)` from `ln x`.
fn log_entropy_term(log_x: f64) -> f64 {
    if log_x < 0.0 && log_x > f64::NEG_INFINITY {
        log_x + (-log_x).ln()
    } else {
        f64::NEG_INFINITY
    }
}

fn convolve_log(log_p: &[f64], la: f64, lb: f64) -> Vec<f64> {
    let len = log_p.len() + 1;
    (0..len)
        .map(|q| {
            let keep = if q < log_p.len() { log_p[q] + la } else { f64::NEG_INFINITY };
            let add = if q > 0 { log_p[q - 1] + lb } else { f64::NEG_INFINITY };
            log_sum_exp(&[keep, add])
        })
        .collect()
}

/// Exact SRPF `𝒵_n(q)`, `q = 0 ..= len(λ)`.
pub fn srpf_exact(lambdas: &[f64], n: f64) -> Result<Vec<f64>> {
    check_index(n)?;
    check_lambdas(lambdas)?;
    Ok(SectorLogs::renyi(lambdas, n).z())
}

/// Rényi SRE `S_n(q)`; `None` when `Z₁(q)` is below [`EMPTY_SECTOR`].
pub fn sre(lambdas: &[f64], n: f64, q: usize) -> Result<Option<f64>> {
    check_index(n)?;
    if n == 1.0 {
        return Err(Error::RenyiIndexOne);
    }
    check_lambdas(lambdas)?;
    if q > lambdas.len() {
        return Ok(None);
    }
    let zn = SectorLogs::renyi(lambdas, n);
    let z1 = SectorLogs::renyi(lambdas, 1.0);
    Ok(renyi_sector(&zn.log_z, &z1.log_z, n, q))
}

/// Von Neumann SRE `S(q)`; `None` when `Z₁(q)` is below [`EMPTY_SECTOR`].
pub fn sre_vn(lambdas: &[f64], q: usize) -> Result<Option<f64>> {
    check_lambdas(lambdas)?;
    if q > lambdas.len() {
        return Ok(None);
    }
    let logs = SectorLogs::von_neumann(lambdas);
    if logs.log_z[q].exp() < EMPTY_SECTOR {
        return Ok(None);
    }
    Ok(logs.vn_entropy(q))
}

fn renyi_sector(log_zn: &[f64], log_z1: &[f64], n: f64, q: usize) -> Option<f64> {
    if log_z1[q].exp() < EMPTY_SECTOR {
        return None;
    }
    Some((log_zn[q] - n * log_z1[q]) / (1.0 - n))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    /// Total Rényi entropy; equals `s` when `n = 1`.
    pub s_n: f64,
    pub s: f64,
    pub s_c: f64,
    pub s_f: f64,
    pub mean_charge: f64,
}

/// Charge-resolved partition functions and entropies of one window.
///
/// Row `i` is charge `q_values[i]`; `dq` is the deviation from the reference
/// charge `offset`. At `n = 1` the Rényi columns repeat the von Neumann ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargeResolvedTable {
    pub n: f64,
    pub offset: i64,
    pub q_values: Vec<i64>,
    pub z_n: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub sre_renyi: Vec<Option<f64>>,
    pub sre_vn: Vec<Option<f64>>,
    pub totals: Totals,
}

impl ChargeResolvedTable {
    /// Table of a window with `lambdas.len() = 2ℓ` modes; the reference
    /// charge is half the mode count.
    pub fn from_lambdas(lambdas: &[f64], n: f64) -> Result<Self> {
        check_index(n)?;
        let lambdas = clamp_lambdas(lambdas)?;
        let vn = SectorLogs::von_neumann(&lambdas);
        let probabilities = vn.z();
        let sre_vn: Vec<Option<f64>> = (0..probabilities.len())
            .map(|q| if probabilities[q] < EMPTY_SECTOR { None } else { vn.vn_entropy(q) })
            .collect();
        let (z_n, sre_renyi, s_n) = if n == 1.0 {
            (probabilities.clone(), sre_vn.clone(), total_vn(&lambdas)?)
        } else {
            let zn = SectorLogs::renyi(&lambdas, n);
            let sre = (0..probabilities.len()).map(|q| renyi_sector(&zn.log_z, &vn.log_z, n, q)).collect();
            (zn.z(), sre, total_renyi(&lambdas, n)?)
        };
        let mean_charge = probabilities.iter().enumerate().map(|(q, p)| q as f64 * p).sum();
        let mut table = Self {
            n,
            offset: (lambdas.len() / 2) as i64,
            q_values: (0..probabilities.len() as i64).collect(),
            z_n,
            probabilities,
            sre_renyi,
            sre_vn,
            totals: Totals { s_n, s: total_vn(&lambdas)?, s_c: 0.0, s_f: 0.0, mean_charge },
        };
        let (s_c, s_f) = config_fluct_split(&table);
        table.totals.s_c = s_c;
        table.totals.s_f = s_f;
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.q_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q_values.is_empty()
    }

    /// Row index of charge `offset + dq`, if present.
    pub fn index_of_dq(&self, dq: i64) -> Option<usize> {
        self.q_values.iter().position(|&q| q == self.offset + dq)
    }

    pub fn dq(&self, i: usize) -> i64 {
        self.q_values[i] - self.offset
    }

    pub fn probability_dq(&self, dq: i64) -> f64 {
        self.index_of_dq(dq).map_or(0.0, |i| self.probabilities[i])
    }

    pub fn z_n_dq(&self, dq: i64) -> f64 {
        self.index_of_dq(dq).map_or(0.0, |i| self.z_n[i])
    }

    pub fn sre_dq(&self, dq: i64) -> Option<f64> {
        self.index_of_dq(dq).and_then(|i| self.sre_renyi[i])
    }

    pub fn sre_vn_dq(&self, dq: i64) -> Option<f64> {
        self.index_of_dq(dq).and_then(|i| self.sre_vn[i])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    /// One row per charge: `q,dq,n,Z_n,Z_1,S_n,S`. Empty sectors leave the
    /// entropy fields blank.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,dq,n,Z_n,Z_1,S_n,S\n");
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        for i in 0..self.len() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                self.q_values[i],
                self.dq(i),
                self.n,
                self.z_n[i],
                self.probabilities[i],
                opt(self.sre_renyi[i]),
                opt(self.sre_vn[i]),
            ));
        }
        out
    }
}

/// `(S_c, S_f)` with `S_c = Σ Z₁(q) S(q)` and `S_f = -Σ Z₁(q) ln Z₁(q)`.
pub fn config_fluct_split(table: &ChargeResolvedTable) -> (f64, f64) {
    let mut s_c = 0.0;
    let mut s_f = 0.0;
    for (p, s) in table.probabilities.iter().zip(&table.sre_vn) {
        if let Some(s) = s {
            s_c += p * s;
        }
        s_f -= xlogx(*p);
    }
    (s_c, s_f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    fn dimerized(phase: &str, l: usize) -> Vec<f64> {
        match phase {
            "triv" => [vec![0.0; l], vec![1.0; l]].concat(),
            "top" => [vec![0.0; l - 1], vec![0.5; 2], vec![1.0; l - 1]].concat(),
            _ => [vec![0.0; l], vec![0.5], vec![1.0; l - 1]].concat(),
        }
    }

    /// Exhaustive sum over the 2^m occupation patterns.
    fn brute_force(lambdas: &[f64], n: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let m = lambdas.len();
        let mut zn = vec![0.0; m + 1];
        let mut z1 = vec![0.0; m + 1];
        let mut probs: Vec<Vec<f64>> = vec![Vec::new(); m + 1];
        for mask in 0u32..(1 << m) {
            let mut p = 1.0;
            for (i, &l) in lambdas.iter().enumerate() {
                p *= if mask >> i & 1 == 1 { l } else { 1.0 - l };
            }
            let q = mask.count_ones() as usize;
            zn[q] += p.powf(n);
            z1[q] += p;
            probs[q].push(p);
        }
        let s = (0..=m)
            .map(|q| -probs[q].iter().map(|p| xlogx(p / z1[q])).sum::<f64>())
            .collect();
        (zn, z1, s)
    }

    fn lcg(seed: u64, count: usize) -> Vec<f64> {
        let mut s = seed;
        (0..count)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                0.02 + 0.96 * ((s >> 11) as f64 / (1u64 << 53) as f64)
            })
            .collect()
    }

    #[test]
    fn dimerized_totals() {
        let l = 20;
        for n in [0.5, 2.0, 3.0] {
            assert!((total_renyi(&dimerized("top", l), n).unwrap() - 2.0 * LN_2).abs() < 1e-12);
            assert!((total_renyi(&dimerized("def", l), n).unwrap() - LN_2).abs() < 1e-12);
            assert!(total_renyi(&dimerized("triv", l), n).unwrap().abs() < 1e-12);
        }
        assert!(matches!(total_renyi(&[0.5], 1.0), Err(Error::RenyiIndexOne)));
        assert!((total_vn(&dimerized("top", l)).unwrap() - 2.0 * LN_2).abs() < 1e-12);
    }

    #[test]
    fn dimerized_charged_moments() {
        let l = 20;
        for (n, alpha) in [(1.0, 0.4), (2.0, -1.3), (3.0, 2.9)] {
            let triv = charged_moment(&dimerized("triv", l), n, alpha).unwrap();
            let expected = Complex64::from_polar(1.0, alpha * l as f64);
            assert!((triv - expected).norm() < 1e-12);
            let def = charged_moment(&dimerized("def", l), n, alpha).unwrap();
            let expected = Complex64::from_polar(1.0, alpha * (l as f64 - 0.5))
                * (2.0 * (alpha / 2.0).cos() / 2f64.powf(n));
            assert!((def - expected).norm() < 1e-12);
            let at_zero = charged_moment(&dimerized("top", l), n, 0.0).unwrap();
            let z: f64 = dimerized("top", l).iter().map(|&x| x.powf(n) + (1.0 - x).powf(n)).product();
            assert!((at_zero.re - z).abs() < 1e-12 && at_zero.im.abs() < 1e-12);
        }
    }

    #[test]
    fn dimerized_tables() {
        let l = 20;
        let top = ChargeResolvedTable::from_lambdas(&dimerized("top", l), 1.0).unwrap();
        assert!((top.probability_dq(-1) - 0.25).abs() < 1e-15);
        assert!((top.probability_dq(0) - 0.5).abs() < 1e-15);
        assert!((top.probability_dq(1) - 0.25).abs() < 1e-15);
        assert!((top.sre_vn_dq(0).unwrap() - LN_2).abs() < 1e-12);
        assert!(top.sre_vn_dq(1).unwrap().abs() < 1e-12);
        assert_eq!(top.sre_vn_dq(2), None);
        assert!((top.totals.s_c - 0.5 * LN_2).abs() < 1e-12);
        assert!((top.totals.s_f - 1.5 * LN_2).abs() < 1e-12);
        for n in [2.0, 3.0] {
            let t = ChargeResolvedTable::from_lambdas(&dimerized("top", l), n).unwrap();
            assert!((t.sre_dq(0).unwrap() - LN_2).abs() < 1e-12);
            assert!(t.sre_dq(-1).unwrap().abs() < 1e-12);
            let d = ChargeResolvedTable::from_lambdas(&dimerized("def", l), n).unwrap();
            assert!((d.z_n_dq(-1) - 0.5f64.powf(n)).abs() < 1e-15);
            assert!((d.z_n_dq(0) - 0.5f64.powf(n)).abs() < 1e-15);
            assert_eq!(d.z_n_dq(1), 0.0);
            assert!(d.sre_dq(0).unwrap().abs() < 1e-12 && d.sre_dq(-1).unwrap().abs() < 1e-12);
        }
        let def = ChargeResolvedTable::from_lambdas(&dimerized("def", l), 1.0).unwrap();
        assert!(def.totals.s_c.abs() < 1e-12 && (def.totals.s_f - LN_2).abs() < 1e-12);
        let triv = ChargeResolvedTable::from_lambdas(&dimerized("triv", l), 1.0).unwrap();
        assert!(triv.totals.s_c.abs() < 1e-12 && triv.totals.s_f.abs() < 1e-12);
    }

    #[test]
    fn matches_brute_force_enumeration() {
        for (seed, m) in [(1, 2), (2, 4), (3, 6)] {
            let lambdas = lcg(seed, m);
            for n in [1.0, 2.0, 3.0, 0.7] {
                let (zn, z1, s) = brute_force(&lambdas, n);
                let exact = srpf_exact(&lambdas, n).unwrap();
                for q in 0..=m {
                    assert!((exact[q] - zn[q]).abs() < 1e-12);
                    if n != 1.0 {
                        let expected = (zn[q] / z1[q].powf(n)).ln() / (1.0 - n);
                        assert!((sre(&lambdas, n, q).unwrap().unwrap() - expected).abs() < 1e-12);
                    }
                    assert!((sre_vn(&lambdas, q).unwrap().unwrap() - s[q]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn vn_matches_finite_difference() {
        let lambdas = lcg(11, 4);
        let h = 1e-4;
        for q in 0..=4 {
            let f = |n: f64| {
                let zn = srpf_exact(&lambdas, n).unwrap()[q];
                let z1 = srpf_exact(&lambdas, 1.0).unwrap()[q];
                zn.ln() - n * z1.ln()
            };
            let fd = -(f(1.0 + h) - f(1.0 - h)) / (2.0 * h);
            assert!((sre_vn(&lambdas, q).unwrap().unwrap() - fd).abs() < 1e-6);
        }
    }

    #[test]
    fn fourier_sum_rule_and_quadrature() {
        let lambdas = lcg(5, 12);
        for n in [1.0, 2.0, 3.0] {
            let exact = srpf_exact(&lambdas, n).unwrap();
            let total: f64 = exact.iter().sum();
            assert!((total - charged_moment(&lambdas, n, 0.0).unwrap().re).abs() < 1e-10);
            let points = 4096;
            for (q, &zq) in exact.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..points {
                    let alpha = -PI + 2.0 * PI * j as f64 / points as f64;
                    acc += charged_moment(&lambdas, n, alpha).unwrap() * Complex64::from_polar(1.0, -alpha * q as f64);
                }
                assert!((acc.re / points as f64 - zq).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn empty_sectors_are_flagged() {
        let lambdas = [0.0, 0.0, 1.0, 0.3];
        assert_eq!(sre_vn(&lambdas, 0).unwrap(), None);
        assert_eq!(sre(&lambdas, 2.0, 4).unwrap(), None);
        assert!(sre_vn(&lambdas, 1).unwrap().unwrap().abs() < 1e-15);
    }

    #[test]
    fn clamping_and_peschel_round_trip() {
        assert_eq!(clamp_lambdas(&[-5e-11, 1.0 + 5e-11]).unwrap(), vec![0.0, 1.0]);
        assert!(matches!(clamp_lambdas(&[1.0 + 1e-8]), Err(Error::EigenvalueOutOfRange(_))));
        let spec = EntanglementSpectrum::from_lambdas(&[0.0, 0.2, 0.5, 0.9, 1.0]).unwrap();
        assert_eq!(spec.epsilons[0], f64::INFINITY);
        assert_eq!(spec.epsilons[4], f64::NEG_INFINITY);
        for (&l, &e) in spec.lambdas.iter().zip(&spec.epsilons).skip(1).take(3) {
            assert!((fermi(e) - l).abs() < 1e-10);
        }
    }

    #[test]
    fn table_invariants() {
        let lambdas = lcg(9, 10);
        let t = ChargeResolvedTable::from_lambdas(&lambdas, 2.0).unwrap();
        assert!((t.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!((t.totals.mean_charge - lambdas.iter().sum::<f64>()).abs() < 1e-10);
        assert!((t.totals.s_c + t.totals.s_f - t.totals.s).abs() < 1e-10);
        assert!(t.z_n.iter().all(|&z| z >= 0.0));
        let csv = t.to_csv();
        assert_eq!(csv.lines().count(), 12);
        let back: ChargeResolvedTable = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(back, t);
    }
}
