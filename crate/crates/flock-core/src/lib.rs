//! Decentralized flocking control engine: zone-based behavioral rules over
//! bearing/distance (or raw-state) sensing, a simplified single-zone model,
//! directional obstacle avoidance, pursuit intruders, and a batch simulation
//! loop with CSV metrics export.

pub mod behaviors;
pub mod geometry;
pub mod metrics;
pub mod perception;
pub mod runner;
pub mod scenario;
pub mod sim;
pub mod simplified;
