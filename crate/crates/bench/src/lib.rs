//! Fixtures shared by the benchmarks.

use ssh_sre::{ChainSpec, DefectKind, SolvedChain};

pub fn reference_chain(n_sites: usize, delta: f64) -> ChainSpec {
    ChainSpec::two_defect(n_sites, delta, DefectKind::OneSite)
}

pub fn solved_reference(n_sites: usize, delta: f64) -> SolvedChain {
    SolvedChain::new(reference_chain(n_sites, delta)).expect("reference chain solves")
}
