//! Sweeps that bind the urn computations to the correlation inequalities.
//!
//! Every ratio inequality is cross-multiplied; comparisons with a `0/0` side
//! are skipped and show up in the verdict's `skipped` count.

mod boxes;
mod dr26;
mod interval;
mod lattice;
mod mainthm;
mod mukl;
mod suite;

pub use dr26::{verify_dr26, MAX_DR26_BALLS};
pub use interval::{verify_interval_cna, verify_threshold_cna};
pub use lattice::{nlcf_values, verify_nlcf, verify_propcvx_cornlc, window_function, MAX_NLCF_BALLS};
pub use mainthm::{verify_mainthm_a, verify_mainthm_a_pair, verify_mainthm_b, verify_mainthm_b_all};
pub use mukl::{mukl_instances, mukl_verdict, verify_mukl, verify_mukl_all, MuklInstance, MuklVariant};
pub use suite::{GeneratorSpec, InstanceReport, Theorem, TheoremSuite};
