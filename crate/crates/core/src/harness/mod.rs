//! Corpus generation, verification sweeps, and benchmarks behind the
//! `pinvtool` CLI.

pub mod bench;
pub mod corpus;
pub mod report;
pub mod rng;
pub mod verify;

pub use bench::{bench, BenchReport};
pub use corpus::{ColTag, CorpusSpec, Instance, RankPattern};
pub use report::RunReport;
pub use verify::{verify_instance, verify_pair, verify_sweep};
