//! Exact-arithmetic workbench for shifted Poisson and shifted symplectic
//! structures on differential graded-commutative algebras.
//!
//! The crate is organized in layers:
//!
//! * graded kernel — [`gens`], [`element`], [`derivation`]: generators with
//!   bidegrees, normalized monomials with Koszul signs, graded derivations
//!   and substitutions;
//! * geometry — [`algebra`], [`derham`], [`polyvector`]: dgc-algebras with
//!   internal differentials, Kähler forms with the de Rham pair, shifted
//!   polyvectors with the Schouten bracket;
//! * solvers — [`mc`], [`compat`], [`stacky`]: Maurer–Cartan obstruction
//!   towers and gauges, the compatibility calculus between brackets and
//!   pre-symplectic forms, Chevalley–Eilenberg stacks;
//! * audit — [`check`]: closed-form re-implementations used to re-verify
//!   every certificate the solvers emit, plus [`basis`]/[`linalg`] for the
//!   exact linear algebra underneath.
//!
//! All arithmetic is over arbitrary-precision rationals; there are no
//! floating-point tolerances anywhere.

pub mod algebra;
pub mod basis;
pub mod check;
pub mod compat;
pub mod derham;
pub mod derivation;
pub mod element;
pub mod error;
pub mod gens;
pub mod linalg;
pub mod mc;
pub mod polyvector;
pub mod q;
pub mod stacky;

pub use algebra::Algebra;
pub use element::{Element, Monomial};
pub use error::{Error, Result};
pub use gens::{GenId, Generators, GeneratorSpec, Kind};
pub use q::Q;
