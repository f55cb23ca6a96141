//! Exact-arithmetic calculus for divisor classes on moduli spaces of stable
//! pointed curves.
//!
//! The crate provides:
//! - a canonical sparse representation of divisor classes over the standard
//!   basis (lambda, delta0, point classes, boundary classes) with exact
//!   rational coefficients ([`class::DivisorClass`]);
//! - pullback tables for the standard comparison maps between these spaces
//!   ([`maps`]);
//! - one-parameter test families with exact intersection pairings
//!   ([`families`]);
//! - enumerative counts and parity identities for linear series ([`counting`]);
//! - exact rational linear algebra (fraction-free elimination) ([`linalg`]);
//! - constraint-system certificates that pin down distinguished subspaces of
//!   divisor classes ([`certify`]).

pub mod basis;
pub mod certify;
pub mod class;
pub mod classes;
pub mod counting;
pub mod error;
pub mod families;
pub mod linalg;
pub mod maps;
pub mod rational;
pub mod serial;

pub use basis::{BasisElement, BoundaryIndex, MarkSet, Relabeling, SpaceId};
pub use class::DivisorClass;
pub use error::{Error, Result};
pub use rational::{Integer, Rational};
