//! Exact checks and seeded searches around open correlation questions for urns.

mod farr;
mod ideal;
mod nmp;
mod qq;
mod search;
mod welsh;

pub use farr::{farr_all, farr_check, farr_probabilities, MAX_FARR_BALLS, MAX_FARR_URNS};
pub use ideal::{IdealSource, IdealSpec, MAX_IDEAL_BALLS};
pub use nmp::{check_nmp_question, subset_law, MAX_NMP_BALLS};
pub use qq::{qq_check, xi_law, CellBlock, MAX_QQ_ASSIGNMENTS, MAX_QQ_CELLS};
pub use search::{
    farr_search, ideal_search, qcna_search, rayleigh_search, recheck_rayleigh, SearchCaps, SearchInstance,
    SearchReport,
};
pub use welsh::{
    asymptotic_note, welsh_asymptotics, welsh_first, welsh_probabilities, welsh_record, welsh_scan, welsh_verdict,
    AsymptoticRow, WelshInstance, WelshRecord, WelshScan, WELSH_FIRST_S,
};
