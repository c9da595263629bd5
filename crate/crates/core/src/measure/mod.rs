//! Finite measures on products of chains and the property checkers that run on them.

pub mod antipodal;
pub mod correlation;
pub mod dominance;
pub mod events;
pub mod fields;
pub mod finite;
pub mod lattice;
pub mod sequence;
pub mod space;

pub use antipodal::{alpha_sequence, check_app, check_capp};
pub use correlation::{check_cna, check_cnc, check_na, check_nc, NaCaps};
pub use dominance::{check_normalized_matching, dominance_by_enumeration, stochastic_dominance};
pub use events::{enumerate_upsets, MonotoneEvent};
pub use fields::{falsify_fields, FieldMode};
pub use finite::{FieldVector, FiniteMeasure, MeasureFile};
pub use lattice::{check_nlc, check_support_convex, LatticeFn, NlcDirection};
pub use sequence::{binomial_split, check_bna_grid, check_slc, check_ulc, default_alpha_grid};
pub use space::ChainProductSpace;
