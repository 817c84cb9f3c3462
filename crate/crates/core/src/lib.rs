//! Shared mathematical objects of quantum information theory and free convex
//! geometry.
//!
//! The crate is organised around a dense complex/Hermitian linear algebra core
//! ([`linalg`]) and a small conic solver ([`sdp`], [`lp`]). On top of these sit
//! the domain modules: free spectrahedra and joint measurability
//! ([`freespec`]), positivity and separability ([`separability`]), quantum
//! magic squares and dilations ([`magic`]), non-local games with moment-matrix
//! relaxations ([`games`]), and matrix product density operators with
//! moment-based positivity bounds ([`tensornet`]).

pub mod error;
pub mod formats;
pub mod freespec;
pub mod games;
pub mod linalg;
pub mod lp;
pub mod magic;
pub mod sdp;
pub mod separability;
pub mod tensornet;

pub use error::{Error, Result};

/// Default relative tolerance for positive semidefiniteness checks.
///
/// All modules inherit this unless the caller overrides it.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Upper bound on worker threads for multi-start searches, taken from the
/// `FREECONVEX_THREADS` environment variable (defaults to the machine's
/// available parallelism). Results are deterministic regardless of the cap.
pub fn thread_cap() -> usize {
    std::env::var("FREECONVEX_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        })
}
