pub mod expr;
pub mod equivalence;
pub mod detsys;
pub mod verifier;
pub mod classifier;
pub mod input;
pub mod report;
pub mod table;
