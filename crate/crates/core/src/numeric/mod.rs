//! Scalar numerics shared by the map families, the orbit engine and the
//! lemma checks.

pub mod diff;
pub mod holder;
pub mod ode;
pub mod quadrature;
pub mod roots;
pub mod smooth;
pub mod summation;

pub use summation::CompensatedSum;
