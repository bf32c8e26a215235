use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use ssh_sre::{classify_window, ChainSpec, DefectKind, Phase, Window};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Lattice,
    Asymptotic,
    Both,
    Statmech,
    Dimerized,
    Aklt,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default)]
    pub csv_path: Option<PathBuf>,
    #[serde(default)]
    pub json_path: Option<PathBuf>,
}

/// Spectrum fed to the constrained-state report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatmechConfig {
    pub phase: Phase,
    /// Extra zero-mode level, only for defect spectra.
    #[serde(default)]
    pub eps_zero: Option<f64>,
    /// Inclusive target-charge range; defaults to `ℓ-3 ..= ℓ+3`.
    #[serde(default)]
    pub q_range: Option<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub chain: ChainSpec,
    pub window_length: usize,
    /// Inclusive range of window starts (cells).
    pub m_range: [usize; 2],
    pub n_list: Vec<f64>,
    /// Zero-mode weights on defect 2; absent means both zero modes empty.
    #[serde(default)]
    pub p_list: Option<Vec<f64>>,
    #[serde(default)]
    pub outputs: Outputs,
    pub mode: Mode,
    /// Largest allowed `|lattice - asymptotic|` on bulk windows.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Windows whose cuts are closer than this many cells to a defect are
    /// excluded from the tolerance check.
    #[serde(default = "default_bulk_margin")]
    pub bulk_margin: usize,
    #[serde(default)]
    pub statmech: Option<StatmechConfig>,
}

fn default_tolerance() -> f64 {
    1e-3
}

fn default_bulk_margin() -> usize {
    8
}

impl Default for ScanConfig {
    /// Two 1s defects at `L/4`, `3L/4` in a 400-site ring, `δ = 0.3`, `ℓ = 20`.
    fn default() -> Self {
        Self {
            chain: ChainSpec::two_defect(400, 0.3, DefectKind::OneSite),
            window_length: 20,
            m_range: [1, 200],
            n_list: vec![1.0, 2.0, 3.0],
            p_list: None,
            outputs: Outputs::default(),
            mode: Mode::Lattice,
            tolerance: default_tolerance(),
            bulk_margin: default_bulk_margin(),
            statmech: None,
        }
    }
}

/// Command-line overrides; every `Some` replaces the file value.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n_sites: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub hopping: Option<f64>,
    /// Replaces the kind of every defect.
    #[arg(long, value_parser = parse_kind)]
    pub defect_kind: Option<DefectKind>,
    #[arg(long)]
    pub ell: Option<usize>,
    #[arg(long)]
    pub m_start: Option<usize>,
    #[arg(long)]
    pub m_end: Option<usize>,
    /// Comma-separated Rényi indices.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<f64>>,
    /// Comma-separated zero-mode weights.
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<f64>>,
    #[arg(long)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

fn parse_kind(s: &str) -> Result<DefectKind, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| format!("unknown defect kind {s:?}"))
}

impl ScanConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// File values (or defaults), then flags.
    pub fn resolve(base: Option<Self>, o: &Overrides) -> Result<Self, CliError> {
        let mut c = match (&o.config, base) {
            (Some(path), _) => Self::load(path)?,
            (None, Some(b)) => b,
            (None, None) => Self::default(),
        };
        if let Some(v) = o.n_sites {
            c.chain.n_sites = v;
        }
        if let Some(v) = o.delta {
            c.chain.delta = v;
        }
        if let Some(v) = o.hopping {
            c.chain.t = v;
        }
        if let Some(kind) = o.defect_kind {
            c.chain.defects.iter_mut().for_each(|d| d.kind = kind);
        }
        if let Some(v) = o.ell {
            c.window_length = v;
        }
        if let Some(v) = o.m_start {
            c.m_range[0] = v;
        }
        if let Some(v) = o.m_end {
            c.m_range[1] = v;
        }
        if let Some(v) = &o.n {
            c.n_list = v.clone();
        }
        if let Some(v) = &o.p {
            c.p_list = Some(v.clone());
        }
        if let Some(v) = o.mode {
            c.mode = v;
        }
        if let Some(v) = o.tolerance {
            c.tolerance = v;
        }
        if let Some(v) = &o.csv {
            c.outputs.csv_path = Some(v.clone());
        }
        if let Some(v) = &o.json {
            c.outputs.json_path = Some(v.clone());
        }
        Ok(c)
    }

    pub fn windows(&self) -> impl Iterator<Item = Window> + '_ {
        (self.m_range[0]..=self.m_range[1]).map(|m| Window::new(m, self.window_length))
    }

    /// Checks everything a scan relies on before any numerics run.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        self.chain.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if self.n_list.is_empty() || self.n_list.iter().any(|&n| !(n.is_finite() && n > 0.0)) {
            return bad(format!("n_list must hold positive Rényi indices, got {:?}", self.n_list));
        }
        if let Some(ps) = &self.p_list {
            if ps.is_empty() || ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return bad(format!("p_list entries must lie in [0, 1], got {ps:?}"));
            }
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return bad(format!("tolerance must be positive, got {}", self.tolerance));
        }
        if self.m_range[0] < 1 || self.m_range[0] > self.m_range[1] || self.m_range[1] > self.chain.cells() {
            return bad(format!("m_range {:?} outside 1..={}", self.m_range, self.chain.cells()));
        }
        match self.mode {
            Mode::Statmech => {
                if self.statmech.is_none() {
                    return bad("statmech mode needs a statmech block".into());
                }
                self.asymptotic_delta()?;
            }
            Mode::Aklt => {}
            Mode::Asymptotic | Mode::Both => {
                if self.chain.delta != 1.0 {
                    self.asymptotic_delta()?;
                }
                self.check_windows()?;
            }
            Mode::Dimerized => {
                if self.chain.delta != 1.0 {
                    return bad(format!("dimerized mode needs δ = 1, got {}", self.chain.delta));
                }
                self.check_windows()?;
            }
            Mode::Lattice => self.check_windows()?,
        }
        Ok(())
    }

    fn check_windows(&self) -> Result<(), CliError> {
        for w in self.windows() {
            classify_window(&self.chain, w).map_err(|e| CliError::Config(format!("window m={}: {e}", w.start)))?;
        }
        Ok(())
    }

    fn asymptotic_delta(&self) -> Result<f64, CliError> {
        let d = self.chain.delta;
        if d > 0.0 && d < 1.0 {
            Ok(d)
        } else {
            Err(CliError::Config(format!("asymptotic predictions need 0 < δ < 1, got {d}")))
        }
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let base = ScanConfig { window_length: 10, ..ScanConfig::default() };
        let o = Overrides { ell: Some(12), delta: Some(0.5), n: Some(vec![2.0]), ..Overrides::default() };
        let c = ScanConfig::resolve(Some(base), &o).unwrap();
        assert_eq!(c.window_length, 12);
        assert_eq!(c.chain.delta, 0.5);
        assert_eq!(c.n_list, vec![2.0]);
        assert_eq!(c.m_range, [1, 200]);
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let c = ScanConfig::default();
        let back = ScanConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
        c.validate().unwrap();
        assert!(ScanConfig { m_range: [0, 3], ..c.clone() }.validate().is_err());
        assert!(ScanConfig { n_list: vec![], ..c.clone() }.validate().is_err());
        assert!(ScanConfig { p_list: Some(vec![1.5]), ..c.clone() }.validate().is_err());
        assert!(ScanConfig { window_length: 120, ..c.clone() }.validate().is_err());
        assert!(ScanConfig { mode: Mode::Statmech, ..c.clone() }.validate().is_err());
        assert!(ScanConfig::from_json(r#"{"bogus": 1}"#).is_err());
    }
}
