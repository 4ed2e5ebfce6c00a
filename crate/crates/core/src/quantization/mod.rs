//! Section bases, Hilb_k and FS_k, Bergman densities, ψ and σ-balanced metrics.

pub mod balanced;
pub mod herm;
pub mod maps;
pub mod psi;
pub mod sections;

pub use balanced::{balanced_residual, sigma_balanced_iterate, IterationOutcome, IterationRecord};
pub use herm::{log_base_entry, Factorization, HermForm};
pub use maps::{bergman, bergman_with_metric, fs, fs_with, hilb, hilb_with_metric, BergmanField};
pub use psi::{calibrate_c0, psi_potential, PsiField};
pub use sections::{section_basis, SectionBasis};
