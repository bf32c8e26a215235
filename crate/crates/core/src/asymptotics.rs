//! Closed-form predictions: the fully dimerized limit, the theta-function
//! asymptotics of long windows, and windows with an excited zero mode.
//!
//! `Δq` is measured from `ℓ` in every case. A defect window therefore has its
//! Gaussian centred at `Δq = -1/2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entanglement::{config_fluct_split, ChargeResolvedTable, Totals};
use crate::error::{Error, Result};
use crate::model::Phase;
use crate::specialfn::{theta2, theta3, AsymptoticParams};

/// `|Δq|` cut-off for every sum over charge sectors.
pub const DQ_TRUNCATION: i64 = 12;

/// Step sizes of the Richardson-extrapolated replica limit.
const VN_STEPS: (f64, f64) = (1e-3, 5e-4);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowCase {
    pub case: Phase,
    pub ell: usize,
    pub params: AsymptoticParams,
    pub zero_mode_p: Option<f64>,
}

impl WindowCase {
    pub fn new(case: Phase, ell: usize, params: AsymptoticParams) -> Self {
        Self { case, ell, params, zero_mode_p: None }
    }

    pub fn with_zero_mode(mut self, p: f64) -> Self {
        self.zero_mode_p = Some(p);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.ell == 0 {
            return Err(Error::Domain("window length must be positive".into()));
        }
        match self.zero_mode_p {
            Some(_) if self.case != Phase::Defect => {
                Err(Error::Domain("a zero-mode weight needs a defect window".into()))
            }
            Some(p) if !(0.0..=1.0).contains(&p) => Err(Error::Domain(format!("p must lie in [0, 1], got {p}"))),
            _ => Ok(()),
        }
    }

    /// Exact SRPFs and SREs in the asymptotic regime.
    pub fn table(&self, n: f64) -> Result<ChargeResolvedTable> {
        self.validate()?;
        match self.zero_mode_p {
            Some(p) => zero_mode_table(p, n, &self.params, self.ell),
            None => asymptotic_table(self.case, n, self.ell, &self.params),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bond {
    Strong,
    Weak,
}

fn check_index(n: f64) -> Result<()> {
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::Domain(format!("Rényi index must be positive, got {n}")));
    }
    Ok(())
}

fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// `-p ln p - (1-p) ln(1-p)`.
pub fn binary_entropy(p: f64) -> f64 {
    -xlogx(p) - xlogx(1.0 - p)
}

/// `(1/(1-n)) ln(pⁿ + (1-p)ⁿ)`; the binary entropy at `n = 1`.
pub fn binary_renyi(p: f64, n: f64) -> f64 {
    if n == 1.0 {
        binary_entropy(p)
    } else {
        (p.powf(n) + (1.0 - p).powf(n)).ln() / (1.0 - n)
    }
}

/// Charge offset of the window's average charge from `ℓ`.
fn charge_shift(case: Phase) -> f64 {
    match case {
        Phase::Defect => -0.5,
        _ => 0.0,
    }
}

/// Assembles a table over `q = ℓ + Δq` from per-sector data.
fn build_table(
    n: f64,
    ell: usize,
    dqs: &[i64],
    z_n: Vec<f64>,
    probabilities: Vec<f64>,
    sre_renyi: Vec<Option<f64>>,
    sre_vn: Vec<Option<f64>>,
    s_n: Option<f64>,
) -> ChargeResolvedTable {
    let offset = ell as i64;
    let q_values: Vec<i64> = dqs.iter().map(|d| offset + d).collect();
    let mean_charge = q_values.iter().zip(&probabilities).map(|(&q, p)| q as f64 * p).sum();
    let mut table = ChargeResolvedTable {
        n,
        offset,
        q_values,
        z_n,
        probabilities,
        sre_renyi,
        sre_vn,
        totals: Totals { s_n: 0.0, s: 0.0, s_c: 0.0, s_f: 0.0, mean_charge },
    };
    let (s_c, s_f) = config_fluct_split(&table);
    table.totals.s_c = s_c;
    table.totals.s_f = s_f;
    table.totals.s = s_c + s_f;
    table.totals.s_n = s_n.unwrap_or(s_c + s_f);
    table
}

/// Exact tables at `δ = 1`. `p` is the zero-mode weight off the window and
/// only applies to defect windows; `None` means the zero mode is empty.
pub fn dimerized_table(case: Phase, ell: usize, n: f64, p: Option<f64>) -> Result<ChargeResolvedTable> {
    check_index(n)?;
    if ell == 0 {
        return Err(Error::Domain("window length must be positive".into()));
    }
    if let Some(p) = p {
        if case != Phase::Defect {
            return Err(Error::Domain("a zero-mode weight needs a defect window".into()));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("p must lie in [0, 1], got {p}")));
        }
    }
    let half = 0.5f64;
    let (dqs, z1, s_sector, s_n_total): (Vec<i64>, Vec<f64>, Vec<(f64, f64)>, f64) = match (case, p) {
        (Phase::Trivial, _) => (vec![0], vec![1.0], vec![(0.0, 0.0)], 0.0),
        (Phase::Topological, _) => (
            vec![-1, 0, 1],
            vec![0.25, 0.5, 0.25],
            vec![(0.0, 0.0), (std::f64::consts::LN_2, std::f64::consts::LN_2), (0.0, 0.0)],
            2.0 * std::f64::consts::LN_2,
        ),
        (Phase::Defect, None) => (vec![-1, 0], vec![half, half], vec![(0.0, 0.0); 2], std::f64::consts::LN_2),
        (Phase::Defect, Some(p)) => (
            vec![-1, 0, 1],
            vec![half * p, half, half * (1.0 - p)],
            vec![(0.0, 0.0), (binary_renyi(p, n), binary_entropy(p)), (0.0, 0.0)],
            std::f64::consts::LN_2 + binary_renyi(p, n),
        ),
    };
    let z_n: Vec<f64> = match (case, p) {
        (Phase::Topological, _) => vec![0.25f64.powf(n), 2.0 * 0.25f64.powf(n), 0.25f64.powf(n)],
        (Phase::Defect, None) => vec![half.powf(n); 2],
        (Phase::Defect, Some(p)) => vec![
            half.powf(n) * p.powf(n),
            half.powf(n) * (p.powf(n) + (1.0 - p).powf(n)),
            half.powf(n) * (1.0 - p).powf(n),
        ],
        _ => vec![1.0],
    };
    let filled = |z: f64, s: f64| if z > 0.0 { Some(s) } else { None };
    let sre_vn = z1.iter().zip(&s_sector).map(|(&z, &(_, s))| filled(z, s)).collect();
    let sre_renyi = z1
        .iter()
        .zip(&s_sector)
        .map(|(&z, &(sn, s))| filled(z, if n == 1.0 { s } else { sn }))
        .collect();
    let s_n = if n == 1.0 { None } else { Some(s_n_total) };
    Ok(build_table(n, ell, &dqs, z_n, z1, sre_renyi, sre_vn, s_n))
}

/// Excess entropy `ΔS^{(p)}_n` of the dimerized defect window with a zero mode.
pub fn dimerized_excess(p: f64, n: f64) -> f64 {
    binary_renyi(p, n)
}

/// Common prefactors of the asymptotic formulas at Rényi index `n`.
struct Elliptic {
    n: f64,
    eps: f64,
    k: f64,
    kp: f64,
    kn: f64,
    knp: f64,
    theta3_n: f64,
}

impl Elliptic {
    fn new(n: f64, params: &AsymptoticParams) -> Result<Self> {
        check_index(n)?;
        let (kn, knp) = params.modulus(n)?;
        Ok(Self {
            n,
            eps: params.epsilon,
            k: params.k,
            kp: params.k_prime,
            kn,
            knp,
            theta3_n: theta3(0.0, params.nome(n))?,
        })
    }

    /// `(k'ⁿ / (k_n k_n' k^{2n}))^{1/3}`.
    fn top_prefactor(&self) -> f64 {
        (self.kp.powf(self.n) / (self.kn * self.knp * self.k.powf(2.0 * self.n))).cbrt()
    }

    /// `(kⁿ k'ⁿ / (k_n k_n'))^{1/3}`.
    fn triv_prefactor(&self) -> f64 {
        ((self.k * self.kp).powf(self.n) / (self.kn * self.knp)).cbrt()
    }

    /// `(k'ⁿ / (k_n k_n' k^{n/2}))^{1/3}`.
    fn def_prefactor(&self) -> f64 {
        (self.kp.powf(self.n) / (self.kn * self.knp * self.k.powf(0.5 * self.n))).cbrt()
    }

    fn nome(&self, factor: f64) -> f64 {
        (-factor * self.n * self.eps).exp()
    }
}

/// Modulus-and-theta contribution of one window boundary. The boundary phase
/// `e^{iαΓ}` is not defined for a single cut and is left out.
pub fn boundary_moment(bond: Bond, n: f64, alpha: f64, params: &AsymptoticParams) -> Result<f64> {
    let el = Elliptic::new(n, params)?;
    let zeta = params.nome(n);
    let scale = 2f64.powf(-(n - 1.0) / 3.0);
    Ok(match bond {
        Bond::Strong => scale * el.top_prefactor().sqrt() * theta2(0.5 * alpha, zeta)? / el.theta3_n,
        Bond::Weak => scale * el.triv_prefactor().sqrt() * theta3(0.5 * alpha, zeta)? / el.theta3_n,
    })
}

/// Charged moment `Z_n(α)` of a long window, with the phase fixed by the
/// average charge (`ℓ`, or `ℓ - 1/2` across a defect).
pub fn charged_moment_asymptotic(case: Phase, n: f64, alpha: f64, ell: usize, params: &AsymptoticParams) -> Result<Complex64> {
    let (left, right) = match case {
        Phase::Topological => (Bond::Strong, Bond::Strong),
        Phase::Trivial => (Bond::Weak, Bond::Weak),
        Phase::Defect => (Bond::Strong, Bond::Weak),
    };
    let modulus = boundary_moment(left, n, alpha, params)? * boundary_moment(right, n, alpha, params)?;
    let mean = ell as f64 + charge_shift(case);
    Ok(Complex64::from_polar(modulus, alpha * mean))
}

/// Asymptotic SRPF `𝒵_n(ℓ + Δq)`.
pub fn srpf_asymptotic(case: Phase, n: f64, dq: i64, params: &AsymptoticParams) -> Result<f64> {
    let el = Elliptic::new(n, params)?;
    let d = dq as f64;
    let denominator = el.theta3_n.powi(2);
    let odd = dq.rem_euclid(2) == 1;
    Ok(match case {
        Phase::Topological | Phase::Trivial => {
            let gauss = (-0.5 * n * el.eps * d * d).exp();
            let zeta2 = el.nome(2.0);
            let (prefactor, use_theta3) = if case == Phase::Topological {
                (el.top_prefactor(), odd)
            } else {
                (el.triv_prefactor(), !odd)
            };
            let parity = if use_theta3 { theta3(0.0, zeta2)? } else { theta2(0.0, zeta2)? };
            gauss * prefactor * parity / (4f64.powf((n - 1.0) / 3.0) * denominator)
        }
        Phase::Defect => {
            let gauss = (-0.5 * n * el.eps * (d + 0.5).powi(2)).exp();
            gauss * theta2(0.0, el.nome(0.5))? * el.def_prefactor()
                / (4f64.powf((2.0 * n + 1.0) / 6.0) * denominator)
        }
    })
}

/// `σ_n`, the sector-independent part of every asymptotic Rényi SRE.
pub fn sigma_n(n: f64, params: &AsymptoticParams) -> Result<f64> {
    if n == 1.0 {
        return Err(Error::RenyiIndexOne);
    }
    let el = Elliptic::new(n, params)?;
    let t3 = theta3(0.0, params.nome(1.0))?;
    let inner = t3.powf(2.0 * n) / el.theta3_n.powi(2)
        * ((el.k * el.kp).powf(n) / (4f64.powf(n - 1.0) * el.kn * el.knp)).cbrt();
    Ok(inner.ln() / (1.0 - n))
}

/// Asymptotic Rényi SRE `S_n(ℓ + Δq)` in the `σ_n` form.
pub fn sre_asymptotic(case: Phase, n: f64, dq: i64, params: &AsymptoticParams) -> Result<f64> {
    let sigma = sigma_n(n, params)?;
    let odd = dq.rem_euclid(2) == 1;
    let eps = params.epsilon;
    let ratio = |theta: fn(f64, f64) -> Result<f64>, factor: f64| -> Result<f64> {
        Ok(theta(0.0, (-factor * n * eps).exp())? / theta(0.0, (-factor * eps).exp())?.powf(n))
    };
    let rest = match case {
        Phase::Topological | Phase::Trivial => {
            let use_theta3 = (case == Phase::Topological) == odd;
            if use_theta3 {
                ratio(theta3, 2.0)?
            } else {
                ratio(theta2, 2.0)?
            }
        }
        Phase::Defect => 2f64.powf(n - 1.0) * ratio(theta2, 0.5)?,
    };
    Ok(sigma + rest.ln() / (1.0 - n))
}

/// The same SRE from the ratio of asymptotic SRPFs; an independent route to
/// [`sre_asymptotic`].
pub fn sre_from_srpf(case: Phase, n: f64, dq: i64, params: &AsymptoticParams) -> Result<f64> {
    if n == 1.0 {
        return Err(Error::RenyiIndexOne);
    }
    let zn = srpf_asymptotic(case, n, dq, params)?;
    let z1 = srpf_asymptotic(case, 1.0, dq, params)?;
    Ok((zn / z1.powf(n)).ln() / (1.0 - n))
}

fn richardson(f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let average = |h: f64| -> Result<f64> { Ok(0.5 * (f(1.0 + h)? + f(1.0 - h)?)) };
    let (h1, h2) = VN_STEPS;
    Ok((4.0 * average(h2)? - average(h1)?) / 3.0)
}

/// Von Neumann SRE by Richardson extrapolation of `S_{1±h}`.
pub fn sre_vn_asymptotic(case: Phase, dq: i64, params: &AsymptoticParams) -> Result<f64> {
    richardson(|n| sre_asymptotic(case, n, dq, params))
}

/// Which entanglement spectrum to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    /// Half-infinite cut at a strong bond: `2lε`.
    StrongCut,
    /// Half-infinite cut at a weak bond: `(2l-1)ε`.
    WeakCut,
    /// A window across a defect (strong ∪ weak): `lε`.
    Defect,
}

/// Pseudo-energies with `|l| ≤ count`, ascending. The weak-cut spectrum uses
/// `l = -count+1 ..= count` so it stays symmetric.
pub fn defect_spectrum(kind: SpectrumKind, params: &AsymptoticParams, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Domain("count must be at least 1".into()));
    }
    let c = count as i64;
    let eps = params.epsilon;
    Ok(match kind {
        SpectrumKind::StrongCut => (-c..=c).map(|l| 2.0 * l as f64 * eps).collect(),
        SpectrumKind::WeakCut => (-c + 1..=c).map(|l| (2 * l - 1) as f64 * eps).collect(),
        SpectrumKind::Defect => (-c..=c).map(|l| l as f64 * eps).collect(),
    })
}

/// Pseudo-energies of a finite window: the union of the spectra of its two
/// cuts, each truncated at `|l| ≤ count`.
pub fn window_spectrum(case: Phase, params: &AsymptoticParams, count: usize) -> Result<Vec<f64>> {
    let (a, b) = match case {
        Phase::Topological => (SpectrumKind::StrongCut, SpectrumKind::StrongCut),
        Phase::Trivial => (SpectrumKind::WeakCut, SpectrumKind::WeakCut),
        Phase::Defect => (SpectrumKind::StrongCut, SpectrumKind::WeakCut),
    };
    let mut levels = defect_spectrum(a, params, count)?;
    levels.extend(defect_spectrum(b, params, count)?);
    levels.sort_by(f64::total_cmp);
    Ok(levels)
}

fn truncated_dqs(ell: usize) -> Vec<i64> {
    let ell = ell as i64;
    (-DQ_TRUNCATION.min(ell)..=DQ_TRUNCATION.min(ell)).collect()
}

/// Asymptotic SRPF/SRE table over `|Δq| ≤ 12`.
pub fn asymptotic_table(case: Phase, n: f64, ell: usize, params: &AsymptoticParams) -> Result<ChargeResolvedTable> {
    check_index(n)?;
    let dqs = truncated_dqs(ell);
    let z_n = dqs.iter().map(|&d| srpf_asymptotic(case, n, d, params)).collect::<Result<Vec<_>>>()?;
    let z1 = dqs.iter().map(|&d| srpf_asymptotic(case, 1.0, d, params)).collect::<Result<Vec<_>>>()?;
    let sre_vn = dqs.iter().map(|&d| sre_vn_asymptotic(case, d, params).map(Some)).collect::<Result<Vec<_>>>()?;
    let (sre_renyi, s_n) = if n == 1.0 {
        (sre_vn.clone(), None)
    } else {
        let s = dqs.iter().map(|&d| sre_asymptotic(case, n, d, params).map(Some)).collect::<Result<Vec<_>>>()?;
        let total = charged_moment_asymptotic(case, n, 0.0, ell, params)?.re.ln() / (1.0 - n);
        (s, Some(total))
    };
    Ok(build_table(n, ell, &dqs, z_n, z1, sre_renyi, sre_vn, s_n))
}

/// `ε_zero = ln(p / (1-p))` for off-window weight `p`.
pub fn zero_mode_level(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Off-window weight `p` at which `ε_zero = εΔq`, maximizing `S^{(p)}(ℓ + Δq)`.
/// In terms of the in-window weight `1 - p` this is `1 / (1 + e^{εΔq})`.
pub fn crossing_p(dq: i64, params: &AsymptoticParams) -> f64 {
    1.0 / (1.0 + (-params.epsilon * dq as f64).exp())
}

/// Excess Rényi SRE of sector `Δq` caused by an excited zero mode with
/// off-window weight `p`.
pub fn zero_mode_excess(p: f64, n: f64, dq: i64, params: &AsymptoticParams) -> f64 {
    let x = params.epsilon * dq as f64;
    if n == 1.0 {
        // Occupation of the zero-mode level relative to the sector's level.
        let f = if p >= 1.0 {
            1.0
        } else if p <= 0.0 {
            0.0
        } else {
            1.0 / (1.0 + (x - zero_mode_level(p)).exp())
        };
        return binary_entropy(f);
    }
    let log_num = log_add(n * p.ln(), n * ((1.0 - p).ln() + x));
    let log_den = n * log_add(p.ln(), (1.0 - p).ln() + x);
    (log_num - log_den) / (1.0 - n)
}

fn log_add(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Defect window with an excited zero mode of off-window weight `p`:
/// `𝒵^{(p)}_n(q) = pⁿ 𝒵^def_n(q) + (1-p)ⁿ 𝒵^def_n(q-1)`.
pub fn zero_mode_table(p: f64, n: f64, params: &AsymptoticParams, ell: usize) -> Result<ChargeResolvedTable> {
    check_index(n)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p must lie in [0, 1], got {p}")));
    }
    let dqs = truncated_dqs(ell);
    let mix = |m: f64, d: i64| -> Result<f64> {
        Ok(p.powf(m) * srpf_asymptotic(Phase::Defect, m, d, params)?
            + (1.0 - p).powf(m) * srpf_asymptotic(Phase::Defect, m, d - 1, params)?)
    };
    let z_n = dqs.iter().map(|&d| mix(n, d)).collect::<Result<Vec<_>>>()?;
    let z1 = dqs.iter().map(|&d| mix(1.0, d)).collect::<Result<Vec<_>>>()?;
    let sre_vn = dqs
        .iter()
        .map(|&d| Ok(Some(sre_vn_asymptotic(Phase::Defect, d, params)? + zero_mode_excess(p, 1.0, d, params))))
        .collect::<Result<Vec<_>>>()?;
    let (sre_renyi, s_n) = if n == 1.0 {
        (sre_vn.clone(), None)
    } else {
        let s = dqs
            .iter()
            .map(|&d| Ok(Some(sre_asymptotic(Phase::Defect, n, d, params)? + zero_mode_excess(p, n, d, params))))
            .collect::<Result<Vec<_>>>()?;
        let base = charged_moment_asymptotic(Phase::Defect, n, 0.0, ell, params)?.re;
        let total = ((p.powf(n) + (1.0 - p).powf(n)) * base).ln() / (1.0 - n);
        (s, Some(total))
    };
    Ok(build_table(n, ell, &dqs, z_n, z1, sre_renyi, sre_vn, s_n))
}
