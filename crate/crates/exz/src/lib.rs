//! Computational potential theory for zero distributions of orthogonal
//! and related polynomial sequences on planar domains: arbitrary-precision
//! Arnoldi builds of area-orthonormal sequences, Faber-type sequences from
//! exterior-map series, Leja boundary surrogates, Green-function corner
//! probes, Monte Carlo balayage, and weak-star convergence diagnostics.

pub mod error;
pub mod num;
pub mod geometry;
pub mod numerics;
pub mod eig;
pub mod orthopoly;
pub mod potential;
pub mod balayage;
pub mod diagnostics;
pub mod io;
