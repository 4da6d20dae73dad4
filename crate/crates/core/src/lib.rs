pub mod arith;
pub mod chartable;
pub mod criteria;
pub mod fixtures;
pub mod fusion;
pub mod modular;
pub mod solver;
pub mod types_enum;
