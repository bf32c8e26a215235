//! SSH chain specification and single-particle Hamiltonian.
//!
//! Sites are numbered `1..=N` in the public API; bond `b` joins sites `b` and
//! `b + 1`, and under periodic boundary conditions bond `N` joins `N` and `1`.
//! Without defects bond `b` carries `-t (1 + δ (-1)^b)`, so even (inter-cell)
//! bonds are strong for `δ > 0`. A defect reverses the pattern from its flip
//! bond onward; the next defect reverses it back.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DefectKind {
    /// A single site isolated between two weak bonds.
    #[serde(rename = "one_site", alias = "1s")]
    OneSite,
    /// Three sites joined by two strong bonds.
    #[serde(rename = "three_site", alias = "3s")]
    ThreeSite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DefectSpec {
    pub cell: usize,
    pub kind: DefectKind,
}

impl DefectSpec {
    pub fn new(cell: usize, kind: DefectKind) -> Self {
        Self { cell, kind }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub n_sites: usize,
    pub t: f64,
    pub delta: f64,
    pub boundary: Boundary,
    #[serde(default)]
    pub defects: Vec<DefectSpec>,
}

impl ChainSpec {
    pub fn new(n_sites: usize, t: f64, delta: f64, boundary: Boundary) -> Self {
        Self { n_sites, t, delta, boundary, defects: Vec::new() }
    }

    pub fn with_defect(mut self, cell: usize, kind: DefectKind) -> Self {
        self.defects.push(DefectSpec::new(cell, kind));
        self
    }

    /// Periodic chain of `n_sites` with two defects of the same kind at
    /// cells `L/4` and `3L/4`.
    pub fn two_defect(n_sites: usize, delta: f64, kind: DefectKind) -> Self {
        let cells = n_sites / 2;
        Self::new(n_sites, 1.0, delta, Boundary::Periodic)
            .with_defect(cells / 4, kind)
            .with_defect(3 * cells / 4, kind)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self =
            serde_json::from_str(text).map_err(|e| Error::InvalidChain(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("chain spec serializes")
    }

    /// Number of unit cells `L = N / 2`.
    pub fn cells(&self) -> usize {
        self.n_sites / 2
    }

    pub fn n_bonds(&self) -> usize {
        match self.boundary {
            Boundary::Periodic => self.n_sites,
            Boundary::Open => self.n_sites - 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 4 || self.n_sites % 2 != 0 {
            return Err(Error::InvalidChain(format!(
                "n_sites must be even and at least 4, got {}",
                self.n_sites
            )));
        }
        if !(self.t.is_finite() && self.t > 0.0) {
            return Err(Error::InvalidChain(format!("hopping t must be positive, got {}", self.t)));
        }
        if !(self.delta.is_finite() && (-1.0..=1.0).contains(&self.delta)) {
            return Err(Error::InvalidChain(format!(
                "dimerization must lie in [-1, 1], got {}",
                self.delta
            )));
        }
        let cells = self.cells();
        for d in &self.defects {
            if d.cell < 1 || d.cell > cells {
                return Err(Error::DefectOutOfRange { cell: d.cell, cells });
            }
        }
        if self.defects.windows(2).any(|w| w[0].cell >= w[1].cell) {
            return Err(Error::InvalidChain("defect cells must be strictly increasing".into()));
        }
        if self.boundary == Boundary::Periodic && self.defects.len() % 2 != 0 {
            return Err(Error::OddDefectCount(self.defects.len()));
        }
        let n_bonds = self.n_bonds();
        for (d, b) in self.defects.iter().zip(self.raw_flip_bonds()) {
            if b > n_bonds {
                return Err(Error::DefectOutOfRange { cell: d.cell, cells });
            }
        }
        Ok(())
    }

    /// Sign selecting which bond parity is strong in the first segment.
    fn base_sign(&self) -> i32 {
        if self.delta < 0.0 {
            -1
        } else {
            1
        }
    }

    fn raw_flip_bonds(&self) -> Vec<usize> {
        let mut sign = self.base_sign();
        self.defects
            .iter()
            .map(|d| {
                // With sign +1 even bonds are strong: isolating site 2j needs
                // bond 2j weakened, a trimer centred on 2j+1 needs bond 2j+1
                // strengthened.
                let even = (d.kind == DefectKind::OneSite) == (sign == 1);
                sign = -sign;
                if even {
                    2 * d.cell
                } else {
                    2 * d.cell + 1
                }
            })
            .collect()
    }

    /// Bonds at which the dimerization pattern reverses, one per defect.
    pub fn flip_bonds(&self) -> Result<Vec<usize>> {
        self.validate()?;
        Ok(self.raw_flip_bonds())
    }

    /// Central site of each defect (the isolated site of a 1s defect, the
    /// middle of a 3s trimer). Coincides with the flip bond index.
    pub fn defect_sites(&self) -> Result<Vec<usize>> {
        self.flip_bonds()
    }

    /// Hopping amplitude of every bond, indexed `0..n_bonds` for bonds `1..=n_bonds`.
    pub fn bond_amplitudes(&self) -> Result<Vec<f64>> {
        let flips = self.flip_bonds()?;
        let mut pattern = 1.0;
        let mut next = flips.iter().peekable();
        let amps = (1..=self.n_bonds())
            .map(|b| {
                if next.peek() == Some(&&b) {
                    pattern = -pattern;
                    next.next();
                }
                let parity = if b % 2 == 0 { 1.0 } else { -1.0 };
                -self.t * (1.0 + pattern * self.delta * parity)
            })
            .collect();
        Ok(amps)
    }

    /// Periodic distance between two 1-based sites (plain distance when open).
    pub fn site_distance(&self, a: usize, b: usize) -> usize {
        let d = a.abs_diff(b);
        match self.boundary {
            Boundary::Periodic => d.min(self.n_sites - d),
            Boundary::Open => d,
        }
    }
}

/// The single-particle Hamiltonian together with its bond amplitudes.
#[derive(Debug, Clone)]
pub struct HoppingMatrix {
    pub matrix: Matrix,
    pub bonds: Vec<f64>,
}

impl HoppingMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

pub fn build_hamiltonian(spec: &ChainSpec) -> Result<HoppingMatrix> {
    let bonds = spec.bond_amplitudes()?;
    let n = spec.n_sites;
    let mut h = Matrix::zeros(n, n);
    for (idx, &amp) in bonds.iter().enumerate() {
        let i = idx;
        let j = (idx + 1) % n;
        h[(i, j)] = amp;
        h[(j, i)] = amp;
    }
    Ok(HoppingMatrix { matrix: h, bonds })
}

/// Band energy `2t sqrt(cos²(k/2) + δ² sin²(k/2))` of the clean chain.
pub fn dispersion(k: f64, t: f64, delta: f64) -> f64 {
    let (s, c) = (0.5 * k).sin_cos();
    2.0 * t * (c * c + delta * delta * s * s).sqrt()
}

/// Zero-mode localization length in cells, `1 / (2 artanh |δ|)`.
pub fn localization_length(delta: f64) -> f64 {
    let d = delta.abs();
    if d == 0.0 {
        f64::INFINITY
    } else if d >= 1.0 {
        0.0
    } else {
        1.0 / (2.0 * d.atanh())
    }
}

/// An interval of `len` consecutive cells starting at cell `start` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub start: usize,
    pub len: usize,
}

impl Window {
    pub fn new(start: usize, len: usize) -> Self {
        Self { start, len }
    }

    pub fn n_sites(&self) -> usize {
        2 * self.len
    }

    /// 1-based sites `2m-1 ..= 2(m+ℓ-1)`, wrapped onto the ring.
    pub fn sites(&self, n_sites: usize) -> Vec<usize> {
        let first = 2 * self.start - 1;
        (0..self.n_sites()).map(|k| (first - 1 + k) % n_sites + 1).collect()
    }

    /// 0-based row indices of the window sites.
    pub fn indices(&self, n_sites: usize) -> Vec<usize> {
        self.sites(n_sites).into_iter().map(|s| s - 1).collect()
    }

    pub fn contains_site(&self, site: usize, n_sites: usize) -> bool {
        let first = 2 * self.start - 1;
        let offset = (site + n_sites - first) % n_sites;
        offset < self.n_sites()
    }

    /// Bonds severed by the window: left cut `2m-2`, right cut `2(m+ℓ-1)`.
    /// Bond 0 wraps to bond `N`.
    pub fn cut_bonds(&self, n_sites: usize) -> (usize, usize) {
        let left = if self.start == 1 { n_sites } else { 2 * self.start - 2 };
        let right = 2 * (self.start + self.len - 1);
        let right = if right > n_sites { right - n_sites } else { right };
        (left, right)
    }

    pub fn validate(&self, spec: &ChainSpec) -> Result<()> {
        let cells = spec.cells();
        if self.len == 0 {
            return Err(Error::InvalidWindow("window length must be positive".into()));
        }
        if self.start < 1 || self.start > cells {
            return Err(Error::InvalidWindow(format!(
                "start cell {} outside 1..={}",
                self.start, cells
            )));
        }
        if self.len >= cells {
            return Err(Error::InvalidWindow(format!(
                "window of {} cells does not fit a chain of {} cells with a complement",
                self.len, cells
            )));
        }
        if spec.boundary == Boundary::Open && (self.start == 1 || self.start + self.len > cells) {
            return Err(Error::InvalidWindow(
                "window touches an open edge; both cuts must be interior bonds".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Topological,
    Trivial,
    Defect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowClass {
    pub phase: Phase,
    /// Index into `ChainSpec::defects` of the defect inside the window.
    pub defect: Option<usize>,
}

/// Classifies a window by the strength of its two cut bonds: two strong cuts
/// are topological, two weak cuts trivial, one of each brackets a defect.
pub fn classify_window(spec: &ChainSpec, window: Window) -> Result<WindowClass> {
    window.validate(spec)?;
    if spec.delta == 0.0 {
        return Err(Error::InvalidWindow("undimerized chain has no phase labels".into()));
    }
    let amps = spec.bond_amplitudes()?;
    let (left, right) = window.cut_bonds(spec.n_sites);
    let strong = |b: usize| amps[b - 1].abs() > spec.t;
    let inside: Vec<usize> = spec
        .defect_sites()?
        .iter()
        .enumerate()
        .filter(|(_, &s)| window.contains_site(s, spec.n_sites))
        .map(|(i, _)| i)
        .collect();
    if inside.len() > 1 {
        return Err(Error::TooManyDefectsInWindow(inside.len()));
    }
    let phase = match (strong(left), strong(right)) {
        (true, true) => Phase::Topological,
        (false, false) => Phase::Trivial,
        _ => Phase::Defect,
    };
    Ok(WindowClass { phase, defect: inside.first().copied() })
}
