//! Occupied single-particle states and restricted correlation matrices.

use serde::{Deserialize, Serialize};

use crate::entanglement::clamp_lambdas;
use crate::error::{Error, Result};
use crate::linalg::{self, dot, eigh_symmetric, EigenSystem, Matrix};
use crate::model::{build_hamiltonian, ChainSpec, Window};

/// Default near-zero threshold in units of the hopping `t`.
pub const DEFAULT_NEAR_ZERO: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Filling {
    /// Only strictly negative modes; both near-zero modes empty.
    BelowHalf,
    /// Negative modes plus one zero-mode state.
    Half,
}

/// Which zero-mode state is filled at half filling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroModeState {
    /// `√(1-p) ψ₁ + e^{iφ} √p ψ₂`.
    Hybrid { p: f64, phi: f64 },
    /// The lower of the two near-zero eigenvectors.
    Eigenstate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OccupationPolicy {
    pub base_filling: Filling,
    pub zero_mode: Option<ZeroModeState>,
    /// Modes with `|E| < near_zero · t` count as zero modes.
    pub near_zero: f64,
}

impl Default for OccupationPolicy {
    fn default() -> Self {
        Self::below_half()
    }
}

impl OccupationPolicy {
    pub fn below_half() -> Self {
        Self { base_filling: Filling::BelowHalf, zero_mode: None, near_zero: DEFAULT_NEAR_ZERO }
    }

    pub fn hybrid(p: f64, phi: f64) -> Self {
        Self {
            base_filling: Filling::Half,
            zero_mode: Some(ZeroModeState::Hybrid { p, phi }),
            near_zero: DEFAULT_NEAR_ZERO,
        }
    }

    pub fn eigenstate() -> Self {
        Self {
            base_filling: Filling::Half,
            zero_mode: Some(ZeroModeState::Eigenstate),
            near_zero: DEFAULT_NEAR_ZERO,
        }
    }

    pub fn with_near_zero(mut self, threshold: f64) -> Self {
        self.near_zero = threshold;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.near_zero.is_finite() && self.near_zero > 0.0) {
            return Err(Error::Domain(format!("near-zero threshold must be positive, got {}", self.near_zero)));
        }
        match (self.base_filling, self.zero_mode) {
            (Filling::BelowHalf, None) | (Filling::Half, Some(ZeroModeState::Eigenstate)) => Ok(()),
            (Filling::Half, Some(ZeroModeState::Hybrid { p, phi })) => {
                if !(0.0..=1.0).contains(&p) || !phi.is_finite() {
                    Err(Error::Domain(format!("hybridization needs p in [0, 1] and finite φ, got p={p}, φ={phi}")))
                } else {
                    Ok(())
                }
            }
            (Filling::BelowHalf, Some(_)) => {
                Err(Error::Domain("below-half filling cannot occupy a zero mode".into()))
            }
            (Filling::Half, None) => Err(Error::Domain("half filling needs a zero-mode state".into())),
        }
    }
}

/// Zero modes rotated to sit on defect 1 (`psi1`) and defect 2 (`psi2`).
#[derive(Debug, Clone)]
pub struct ZeroModePair {
    pub psi1: Vec<f64>,
    pub psi2: Vec<f64>,
    /// The two near-zero energies, ascending.
    pub energies: [f64; 2],
    /// Weight of `psi1` on the half of the ring closer to defect 1.
    pub localization: f64,
}

impl ZeroModePair {
    /// Real and imaginary parts of `√(1-p) ψ₁ + e^{iφ} √p ψ₂`.
    pub fn hybrid(&self, p: f64, phi: f64) -> (Vec<f64>, Vec<f64>) {
        let (a, b) = ((1.0 - p).sqrt(), p.sqrt());
        let (s, c) = phi.sin_cos();
        let re = self.psi1.iter().zip(&self.psi2).map(|(x, y)| a * x + b * c * y).collect();
        let im = self.psi2.iter().map(|y| b * s * y).collect();
        (re, im)
    }

    pub fn overlap(&self) -> f64 {
        dot(&self.psi1, &self.psi2)
    }
}

fn near_zero_indices(eig: &EigenSystem, threshold: f64) -> Vec<usize> {
    (0..eig.dim()).filter(|&i| eig.values[i].abs() < threshold).collect()
}

/// Rotates the two near-zero eigenvectors so the first is maximally weighted
/// on the half of the ring closer to defect 1.
pub fn localized_zero_modes(eig: &EigenSystem, spec: &ChainSpec, near_zero: f64) -> Result<ZeroModePair> {
    if spec.defects.len() != 2 {
        return Err(Error::InvalidChain(format!(
            "zero-mode localization needs exactly two defects, got {}",
            spec.defects.len()
        )));
    }
    let idx = near_zero_indices(eig, near_zero * spec.t);
    if idx.len() != 2 {
        return Err(Error::ZeroModeCount(idx.len()));
    }
    let centres = spec.defect_sites()?;
    let side: Vec<f64> = (1..=spec.n_sites)
        .map(|s| {
            if spec.site_distance(s, centres[0]) < spec.site_distance(s, centres[1]) {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let (u, v) = (eig.vector(idx[0]), eig.vector(idx[1]));
    let weighted = |a: &[f64], b: &[f64]| a.iter().zip(b).zip(&side).map(|((x, y), w)| x * y * w).sum::<f64>();
    let (m00, m01, m11) = (weighted(u, u), weighted(u, v), weighted(v, v));
    let theta = 0.5 * (2.0 * m01).atan2(m00 - m11);
    let (s, c) = theta.sin_cos();
    let mut psi1: Vec<f64> = u.iter().zip(v).map(|(x, y)| c * x + s * y).collect();
    let mut psi2: Vec<f64> = u.iter().zip(v).map(|(x, y)| -s * x + c * y).collect();
    fix_sign(&mut psi1);
    fix_sign(&mut psi2);
    let localization = weighted(&psi1, &psi1);
    Ok(ZeroModePair {
        psi1,
        psi2,
        energies: [eig.values[idx[0]], eig.values[idx[1]]],
        localization,
    })
}

/// Makes the largest-magnitude component positive.
fn fix_sign(v: &mut [f64]) {
    let pivot = v.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
    if pivot < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Two-point function `⟨c†_i c_j⟩` on a set of sites. Complex when a
/// hybridized zero mode with `φ ≠ 0` is filled.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    pub window: Option<Window>,
    /// 0-based site indices in row order.
    pub sites: Vec<usize>,
    pub re: Matrix,
    pub im: Option<Matrix>,
}

impl CorrelationMatrix {
    pub fn dim(&self) -> usize {
        self.sites.len()
    }

    pub fn trace(&self) -> f64 {
        self.re.trace()
    }

    /// Eigenvalues in ascending order, checked and clamped to `[0, 1]`.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let raw = match &self.im {
            Some(im) if im.max_abs() > 0.0 => {
                // Real embedding [[Re, -Im], [Im, Re]] doubles every eigenvalue.
                let n = self.dim();
                let big = Matrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
                    (true, true) => self.re[(i, j)],
                    (false, false) => self.re[(i - n, j - n)],
                    (true, false) => -im[(i, j - n)],
                    (false, true) => im[(i - n, j)],
                });
                let doubled = linalg::eigvalsh(&big)?;
                doubled.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect()
            }
            _ => linalg::eigvalsh(&self.re)?,
        };
        clamp_lambdas(&raw)
    }
}

/// Occupied states for a policy: indices of real eigenmodes plus an optional
/// extra (possibly complex) state.
#[derive(Debug, Clone)]
pub struct OccupiedStates {
    pub modes: Vec<usize>,
    pub extra: Option<(Vec<f64>, Vec<f64>)>,
}

pub fn occupied_states(eig: &EigenSystem, spec: &ChainSpec, policy: &OccupationPolicy) -> Result<OccupiedStates> {
    policy.validate()?;
    let threshold = policy.near_zero * spec.t;
    let modes: Vec<usize> = (0..eig.dim()).filter(|&i| eig.values[i] <= -threshold).collect();
    let extra = match policy.zero_mode {
        None => None,
        Some(ZeroModeState::Eigenstate) => {
            let idx = near_zero_indices(eig, threshold);
            let lower = *idx.first().ok_or(Error::ZeroModeCount(0))?;
            Some((eig.vector(lower).to_vec(), vec![0.0; eig.dim()]))
        }
        Some(ZeroModeState::Hybrid { p, phi }) => {
            Some(localized_zero_modes(eig, spec, policy.near_zero)?.hybrid(p, phi))
        }
    };
    Ok(OccupiedStates { modes, extra })
}

/// Restriction of the occupied-state projector to arbitrary 0-based sites.
pub fn correlation_on_sites(eig: &EigenSystem, occupied: &OccupiedStates, sites: &[usize]) -> CorrelationMatrix {
    let n = sites.len();
    let mut re = Matrix::zeros(n, n);
    let mut buf = vec![0.0; n];
    let mut add = |m: &mut Matrix, v: &[f64]| {
        for (b, &s) in buf.iter_mut().zip(sites) {
            *b = v[s];
        }
        for i in 0..n {
            let a = buf[i];
            if a == 0.0 {
                continue;
            }
            for (r, &bj) in m.row_mut(i).iter_mut().zip(&buf) {
                *r += a * bj;
            }
        }
    };
    for &k in &occupied.modes {
        add(&mut re, eig.vector(k));
    }
    let mut im = None;
    if let Some((a, b)) = &occupied.extra {
        add(&mut re, a);
        add(&mut re, b);
        if b.iter().any(|&x| x != 0.0) {
            // Im(Ψ*_i Ψ_j) = a_i b_j - b_i a_j.
            im = Some(Matrix::from_fn(n, n, |i, j| {
                a[sites[i]] * b[sites[j]] - b[sites[i]] * a[sites[j]]
            }));
        }
    }
    CorrelationMatrix { window: None, sites: sites.to_vec(), re, im }
}

/// Correlation matrix of the window for the given occupation.
pub fn correlation_matrix(
    eig: &EigenSystem,
    spec: &ChainSpec,
    policy: &OccupationPolicy,
    window: Window,
) -> Result<CorrelationMatrix> {
    window.validate(spec)?;
    let inside = spec
        .defect_sites()?
        .into_iter()
        .filter(|&s| window.contains_site(s, spec.n_sites))
        .count();
    if inside > 1 {
        return Err(Error::TooManyDefectsInWindow(inside));
    }
    let occupied = occupied_states(eig, spec, policy)?;
    let mut c = correlation_on_sites(eig, &occupied, &window.indices(spec.n_sites));
    c.window = Some(window);
    Ok(c)
}

/// A chain together with its diagonalized Hamiltonian.
#[derive(Debug, Clone)]
pub struct SolvedChain {
    pub spec: ChainSpec,
    pub eig: EigenSystem,
}

impl SolvedChain {
    pub fn new(spec: ChainSpec) -> Result<Self> {
        let h = build_hamiltonian(&spec)?;
        let eig = eigh_symmetric(&h.matrix)?;
        Ok(Self { spec, eig })
    }

    pub fn correlation(&self, policy: &OccupationPolicy, window: Window) -> Result<CorrelationMatrix> {
        correlation_matrix(&self.eig, &self.spec, policy, window)
    }

    /// Correlation eigenvalues of a window.
    pub fn lambdas(&self, policy: &OccupationPolicy, window: Window) -> Result<Vec<f64>> {
        self.correlation(policy, window)?.eigenvalues()
    }

    pub fn zero_modes(&self, near_zero: f64) -> Result<ZeroModePair> {
        localized_zero_modes(&self.eig, &self.spec, near_zero)
    }
}
