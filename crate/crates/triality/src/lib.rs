//! Verification of the generation properties of triality automorphisms of
//! O8+(2) and O8+(3): group constructions, staged checks and reports.

pub mod atlas;
pub mod geometry;
pub mod golden;
pub mod pipeline;
pub mod q2;
pub mod q3;
pub mod report;
pub mod selftest;
