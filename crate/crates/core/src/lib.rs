//! Étale covers of projective hypersurfaces over finite fields.
//!
//! The crate builds, for a hypersurface X = V(F) in P^{n+1} over F_p, a finite
//! morphism X → P^n that is étale away from a hyperplane H, sends a chosen
//! subscheme into H and keeps a chosen finite set of points off H. Every
//! output is accompanied by a certificate checkable with polynomial
//! arithmetic alone, and an independent point-counting oracle.

pub mod arith;
pub mod cli;
pub mod cover;
pub mod error;
pub mod geometry;
pub mod ideal;
pub mod linalg;
pub mod poly;
pub mod sections;
pub mod verify;

pub use error::{Error, Result};
