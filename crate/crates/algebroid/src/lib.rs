//! Exact calculus on transitive Lie algebroids and matrix derivation algebras.
//!
//! Everything is computed over Q: scalars are multivariate polynomials with
//! exact rational coefficients, so every identity checked by this crate is a
//! decidable polynomial identity verified with zero tolerance.
//!
//! The crate is organized around a single bigraded form representation
//! ([`forms::MixedForm`]): components indexed by a set of coordinate legs
//! (dx) and a set of fiber legs (theta), with values in scalars, in a Lie
//! algebra, or in a matrix algebra. On top of it sit connection and
//! curvature calculus ([`connections`]), the derivation-based
//! noncommutative calculus of matrix algebras ([`ncg`]), a concrete trivial
//! principal bundle with unipotent structure group ([`atiyah`]), and atlas
//! gluing data ([`atlas`]). The [`checks`] registry and [`runner`] execute
//! named identity checks over scenario files.

use std::sync::atomic::{AtomicU32, Ordering};

pub mod atiyah;
pub mod atlas;
pub mod checks;
pub mod connections;
pub mod error;
pub mod forms;
pub mod lie;
pub mod matrix;
pub mod ncg;
pub mod parallel;
pub mod poly;
pub mod runner;
pub mod sample;
pub mod scenario;

pub use error::{Error, Result};

/// Global polynomial degree cap. 0 means unlimited.
///
/// Operations that can raise polynomial degree (wedge products, graded
/// brackets, curvatures, conjugations) reject results whose total degree
/// exceeds the cap. The cap never truncates: wherever two cap settings both
/// succeed, they produce identical values.
static DEGREE_CAP: AtomicU32 = AtomicU32::new(6);

/// Current degree cap (0 = unlimited).
pub fn degree_cap() -> u32 {
    DEGREE_CAP.load(Ordering::Relaxed)
}

/// Set the degree cap (0 = unlimited).
pub fn set_degree_cap(cap: u32) {
    DEGREE_CAP.store(cap, Ordering::Relaxed);
}

/// Default degree cap, used when a scenario does not override it.
pub const DEFAULT_DEGREE_CAP: u32 = 6;

pub(crate) fn check_degree(total_degree: usize) -> Result<()> {
    let cap = degree_cap();
    if cap != 0 && total_degree > cap as usize {
        return Err(Error::DegreeCap {
            degree: total_degree,
            cap,
        });
    }
    Ok(())
}
