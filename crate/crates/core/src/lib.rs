//! Convex-dissection topology for 2D occupancy maps.
//!
//! The free space of a map is split into convex cells whose shared edges
//! (cutlines) form a small graph. Homotopy classes of paths become reduced
//! walks in that graph, and the planner in [`planner`] searches several
//! classes at once.

pub mod geometry;
pub mod map_ingest;
pub mod decomposition;
pub mod topology;
pub mod map;
pub mod shortest_path;
pub mod planner;
