pub mod geometry;
pub mod field;
pub mod solver;
pub mod problems;
pub mod harness;
