//! Exact and asymptotic enumeration of RNA secondary structures in the
//! homopolymer model.

pub mod series;
pub mod asymptotics;
pub mod models;
pub mod structures;
pub mod thermo;
