//! Object arrangement solver.

pub mod schedule;
