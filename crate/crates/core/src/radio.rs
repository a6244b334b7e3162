//! Unit-disk broadcast medium: inclusive range, fixed per-hop latency,
//! Bernoulli loss per broadcast delivery. The medium is stateless; duty
//! cycling is handled at the node layer by dropping deliveries that arrive
//! while a radio is off.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::des::{EntityId, SimTime};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Position { x, y }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    /// Radio coverage radius in meters, inclusive boundary.
    pub range_m: f64,
    pub per_hop_latency: SimTime,
    /// Probability a single broadcast delivery is lost. Unicast exchanges
    /// (routed data, friend polls) model link-layer acks and do not take
    /// loss draws.
    pub loss_prob: f64,
}

impl RadioParams {
    pub fn validate(&self) -> Result<(), RadioError> {
        if !(self.range_m > 0.0) {
            return Err(RadioError::BadParams("range_m must be > 0".into()));
        }
        if !(0.0..=1.0).contains(&self.loss_prob) {
            return Err(RadioError::BadParams("loss_prob must be in [0,1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum RadioError {
    #[error("unknown node id {0}")]
    UnknownNode(EntityId),
    #[error("invalid radio params: {0}")]
    BadParams(String),
}

/// All entities within `range_m` of `node` (inclusive), excluding `node`.
pub fn neighbors(
    node: EntityId,
    positions: &BTreeMap<EntityId, Position>,
    params: &RadioParams,
) -> Result<Vec<EntityId>, RadioError> {
    let origin = positions.get(&node).ok_or(RadioError::UnknownNode(node))?;
    Ok(positions
        .iter()
        .filter(|(id, pos)| **id != node && origin.distance(pos) <= params.range_m)
        .map(|(id, _)| *id)
        .collect())
}

pub fn in_range(a: &Position, b: &Position, range_m: f64) -> bool {
    a.distance(b) <= range_m
}

/// Per-neighbor loss draw for one broadcast. Returns the neighbors the
/// transmission actually reaches; delivery events fire at now + latency.
/// Draws come from the sender's own substream, in neighbor-id order.
pub fn broadcast_reach<R: Rng>(
    neighbors: &[EntityId],
    params: &RadioParams,
    rng: &mut R,
) -> Vec<EntityId> {
    neighbors
        .iter()
        .filter(|_| {
            if params.loss_prob <= 0.0 {
                true
            } else if params.loss_prob >= 1.0 {
                // still consume a draw so loss_prob=1 and 0 replay identically
                let _: f64 = rng.gen();
                false
            } else {
                rng.gen::<f64>() >= params.loss_prob
            }
        })
        .copied()
        .collect()
}
