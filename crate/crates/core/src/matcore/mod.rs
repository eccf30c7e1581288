//! Dense complex linear algebra used by the rest of the crate.

mod cmatrix;
pub(crate) mod dense;
mod funcs;
mod inertia;
mod jordan;
mod spectrum;

pub use cmatrix::{CMatrix, DEFAULT_TOL};
pub use funcs::{expm, log_jordan_block, logm_principal, principal_log};
pub use inertia::{eta_pq, inertia, Inertia, Signature};
pub use jordan::{jordan_structure, BlockRef, JordanData, JordanItem};
pub use spectrum::{cluster_radius, kernel_dim, raw_eigenvalues, schur_eigenvalues, spectral_order, EigenCluster};
