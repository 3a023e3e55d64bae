//! Dynamic longest-increasing-subsequence engines.
//!
//! The crate bundles four LIS engines and the machinery they share:
//!
//! * [`static_lis`] — patience sorting and the brute-force oracles that
//!   everything else is validated against.
//! * [`ccp`] — the Chen–Chu–Pinsker exact dynamic structure with update
//!   time O(opt log n).
//! * [`monge`], [`sag`], [`lis_oracle`] — a unit-Monge / seaweed-matrix
//!   toolkit: O(n log n) seaweed products, slice alignment graph distance
//!   oracles, and the semi-local LIS oracle built on them.
//! * [`exact`] — the randomized exact dynamic LIS with sublinear update
//!   time: layered baskets, boundary sampling, SMAWK sweeps, and the
//!   log-n ensemble.
//! * [`grid`] — extended grid packing: multisegments and the approximate
//!   rectangle-LIS indexes (static and dynamic).
//! * [`seq`], [`scheduler`] — the shared order-statistic sequence and the
//!   block-to-worst-case scheduler.

pub mod ccp;
pub mod engine;
pub mod exact;
pub mod grid;
pub mod lis_oracle;
pub mod monge;
pub mod rng;
pub mod sag;
pub mod scheduler;
pub mod seq;
pub mod smawk;
pub mod static_lis;

pub use engine::{ApproxEngine, CcpEngine, DynLisEngine, ExactEngine, PatienceEngine};
pub use rng::Rng64;
pub use seq::{DynSeq, EditOp, Handle, SeqError};
pub use static_lis::{levels, lis_rect_brute, patience_lis, PointSet, Rect};
