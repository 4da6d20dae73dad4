//! Exact arithmetic in cyclotomic fields, plus numeric recognition helpers.

pub mod cyc;
pub mod hp;
pub mod numtheory;
pub mod recognize;

pub use cyc::CycNumber;
pub use hp::{eval_cyc, HpComplex, HpReal};
pub use recognize::{recognize_cyclotomic, recognize_cyclotomic_adaptive, OrbitRecognizer};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("{candidates} cyclotomic candidates match the approximation")]
    AmbiguousRecognition { candidates: usize },
    #[error("bounded search space too large ({size} points)")]
    SearchTooLarge { size: u64 },
}
