//! Charge-resolved entanglement of SSH chains with topological defects.
//!
//! The lattice side builds the hopping Hamiltonian, fills the single-particle
//! states and reduces the ground-state correlation matrix to a window. The
//! analytical side provides the dimerized tables, theta-function asymptotics,
//! zero-mode and chemical-potential diagnostics, and the AKLT analogue.

pub mod aklt;
pub mod asymptotics;
pub mod entanglement;
pub mod error;
pub mod groundstate;
pub mod linalg;
pub mod model;
pub mod specialfn;
pub mod statmech;

pub use aklt::{aklt_entropies, AkltCase, AkltEntropies, AkltGroundState, AkltRegion};
pub use asymptotics::{
    charged_moment_asymptotic, dimerized_table, srpf_asymptotic, sre_asymptotic, sre_vn_asymptotic,
    zero_mode_table, Bond, WindowCase,
};
pub use entanglement::{
    charged_moment, srpf_exact, total_renyi, total_vn, ChargeResolvedTable, EntanglementSpectrum, Totals,
};
pub use error::{Error, Result};
pub use groundstate::{correlation_matrix, CorrelationMatrix, OccupationPolicy, SolvedChain};
pub use model::{
    build_hamiltonian, classify_window, Boundary, ChainSpec, DefectKind, DefectSpec, Phase, Window, WindowClass,
};
pub use specialfn::AsymptoticParams;
pub use statmech::{constrained_entropy, equipartition_report, solve_mu, ConstrainedState, MuPosition};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
