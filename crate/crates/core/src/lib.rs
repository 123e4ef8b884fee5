//! Exact-arithmetic toolkit for foliated surface singularity germs.
//!
//! The toolkit models germs through weighted dual graphs of exceptional
//! curves carrying foliation data, computes foliated discrepancies and
//! partial/minimal log discrepancies with exact rationals, classifies the
//! log canonical dual graphs, drives blowup searches, and provides a local
//! analytic layer for polynomial vector-field germs (indices, Seidenberg
//! reduction).

pub mod rat;
pub mod graph;
pub mod linalg;
pub mod discrepancy;
pub mod classify;
pub mod family;
pub mod blowup;
pub mod poly;
pub mod germ;
pub mod io;
pub mod verify;
pub mod cli;

pub use cli::cli_main;
