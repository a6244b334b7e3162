//! Managed-relay routing state: per-node route tables over discovery
//! floods (the node's map of next hops toward each contact node) and the
//! MAM0 / MAM1 replacement policies against the plain-flooding baseline.
//!
//! Route hooks run on every delivered Discovery copy; the mesh dedup cache
//! gates re-flooding and the data-emission trigger, not route learning.
//! MAM0 therefore tracks the most recent relayer heard, while MAM1 keeps
//! the fewest-hops relayer for as long as the entry is younger than delta.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::des::{EntityId, SimTime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteEntry {
    /// The contact node T1 this entry leads to.
    pub sink: EntityId,
    pub next_hop: EntityId,
    pub hop_count: u8,
    pub learned_at: SimTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RelayPolicy {
    Flooding,
    Mam0,
    /// delta: expiry window in ms; a route younger than delta is protected
    /// and only beaten by strictly fewer hops, an older one is expired and
    /// replaced by any newer advertisement.
    Mam1 { delta: SimTime },
}

impl RelayPolicy {
    pub fn is_routed(&self) -> bool {
        !matches!(self, RelayPolicy::Flooding)
    }

    pub fn name(&self) -> &'static str {
        match self {
            RelayPolicy::Flooding => "flooding",
            RelayPolicy::Mam0 => "mam0",
            RelayPolicy::Mam1 { .. } => "mam1",
        }
    }
}

/// Should `candidate` replace `current`? Hop-count ties keep the incumbent.
pub fn should_replace(
    current: Option<&RouteEntry>,
    candidate: &RouteEntry,
    policy: &RelayPolicy,
    now: SimTime,
) -> bool {
    let Some(cur) = current else { return !matches!(policy, RelayPolicy::Flooding) };
    match policy {
        RelayPolicy::Flooding => false,
        RelayPolicy::Mam0 => true,
        RelayPolicy::Mam1 { delta } => {
            if now.saturating_sub(cur.learned_at) > *delta {
                true
            } else {
                candidate.hop_count < cur.hop_count
            }
        }
    }
}

/// The per-node `mapToReach`: one entry per sink plus the current
/// data-sink choice, both maintained under the active policy.
#[derive(Debug, Clone, Default)]
pub struct RouteTable {
    entries: BTreeMap<EntityId, RouteEntry>,
    choice: Option<RouteEntry>,
}

impl RouteTable {
    pub fn entry(&self, sink: EntityId) -> Option<&RouteEntry> {
        self.entries.get(&sink)
    }

    /// Where this node currently sends locally originated data.
    pub fn choice(&self) -> Option<&RouteEntry> {
        self.choice.as_ref()
    }

    pub fn update(&mut self, candidate: RouteEntry, policy: &RelayPolicy, now: SimTime) {
        if should_replace(self.entries.get(&candidate.sink), &candidate, policy, now) {
            self.entries.insert(candidate.sink, candidate);
        }
        if should_replace(self.choice.as_ref(), &candidate, policy, now) {
            self.choice = Some(candidate);
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EntityId, &RouteEntry)> {
        self.entries.iter()
    }
}
