//! Exact counts of rational curves on blow-ups of the projective plane.
//!
//! The invariant N_{d,α} counts genus-0 curves in the class dH − Σ aᵢEᵢ on
//! the plane blown up at r general points, passing through 3d − |α| − 1
//! general points. Everything here is exact big-integer arithmetic: the
//! recursion engine, an independent associativity-relation verifier, Cremona
//! transformation utilities, and a line-oriented cache format.

pub mod cache;
pub mod cremona;
pub mod engine;
pub mod lattice;
pub mod relations;

pub use engine::{Engine, EngineConfig, EngineError, MemoStore, PivotRule};
pub use lattice::{BigCount, CanonKey, CanonResult, CurveClass, SplitPair};
