//! Reference computations that share no code with the loss assembly in
//! `dfr-core`: hand-written quadrature of the weak residuals and
//! finite-difference gradient checks.

pub mod oracle;

pub use oracle::*;
