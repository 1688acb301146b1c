//! Exact minimum-bandwidth cooperative regenerating (MBCR) codes.
//!
//! * [`gf`], [`matrix`], [`mds`]: finite-field arithmetic and MDS generators.
//! * [`code`]: the `d = k`, `n = d + r` code family with any-`k` reconstruction
//!   and three-step cooperative repair of `r` simultaneous failures.
//! * [`bounds`]: exact-rational repair-bandwidth lower bound and the
//!   cut-type linear program that certifies it.
//! * [`flowgraph`]: information flow graphs, staged cuts and exact max-flow.
//! * [`simulator`]: multi-round fail/repair lifecycle with bandwidth accounting.

pub mod bounds;
pub mod code;
pub mod error;
pub mod flowgraph;
pub mod gf;
pub mod matrix;
pub mod mds;
pub mod simulator;

pub use error::{Error, Result};
