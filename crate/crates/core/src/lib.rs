//! Deterministic discrete-event simulator for data collection from ground
//! sensor meshes: a mobile hub harvesting a Bluetooth-Mesh-style network
//! with Friend and Low-Power nodes under flooding / MAM0 / MAM1 relay
//! policies, and a decentralized UAV fleet (DADCA) patrolling points of
//! interest against a centralized TSP-ferry baseline.

pub mod air;
pub mod des;
pub mod ground;
pub mod mesh;
pub mod metrics;
pub mod mobility;
pub mod radio;
pub mod rng;
pub mod routing;
pub mod scenario;
pub mod tour;
