//! Benchmark harness: map generators, reference oracles, a baseline
//! RRT* planner, experiment drivers and output writers.

pub mod mapgen;
pub mod oracle;
pub mod rrt;
pub mod stats;
pub mod experiments;
pub mod svg;
