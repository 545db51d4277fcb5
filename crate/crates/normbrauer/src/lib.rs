//! Computes the unramified Brauer group of a norm-equation variety
//! `N_{L/k}(t) = a`, for an etale algebra `L = K x prod K_i` with `K/k`
//! cyclic, purely from finite Galois data `(G, G_K, {G_{K_i}})`.
//!
//! The answer is produced twice on small instances: once by the
//! combinatorial congruence group `C(L)/D`, and once by a brute-force
//! group-cohomology computation of `Sha^2_cycl(G, T-hat)` from the
//! character lattice. The two must agree; a mismatch is a hard failure.

pub mod comb;
pub mod config;
pub mod gamma;
pub mod global;
pub mod group;
pub mod oracle;
pub mod report;
pub mod tower;
pub mod zlinalg;

