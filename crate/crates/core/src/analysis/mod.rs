//! Independent checks of the cascade engine and the attachment-factor sweep.

pub mod generators;
mod oracle;
mod sweep;
mod theorem;

pub use oracle::{fixed_point_oracle, oracle_compare};
pub use sweep::{derive_seed, sweep_epsilon, SweepResult, SweepRow};
pub use theorem::{verify_theorem1, Counterexample, TheoremCheck, TheoremReport};
