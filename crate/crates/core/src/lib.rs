pub mod algorithms;
pub mod graph;
pub mod harness;
pub mod problems;
pub mod solvers;
