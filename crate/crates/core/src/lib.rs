//! Exact computations with Segre sets, reflections and the derived
//! algebraic sets attached to holomorphic maps between real-algebraic CR
//! submanifolds in graph form.

pub mod corpus;
pub mod determinacy;
pub mod dsl;
pub mod gauss;
pub mod ideal;
pub mod models;
pub mod parse;
pub mod poly;
pub mod reflection;
pub mod shrink;

pub use gauss::GaussRational;
pub use ideal::{Ideal, TermOrder};
pub use poly::{Group, Monomial, MultiPoly, Var};
