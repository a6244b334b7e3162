//! Ground-node building blocks: roles, typed messages, the bounded dedup
//! cache that realizes flooding semantics, low-power duty cycling, and the
//! friend-side store for sleeping neighbors.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::des::{EntityId, SimTime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeRole {
    Relay,
    Friend,
    LowPower,
    SensorOnly,
}

impl NodeRole {
    /// Relay and Friend nodes rebroadcast network messages.
    pub fn relays(self) -> bool {
        matches!(self, NodeRole::Relay | NodeRole::Friend)
    }

    pub fn always_on(self) -> bool {
        !matches!(self, NodeRole::LowPower)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MessageKind {
    /// Routing advertisement flood; `sink` carries the contact node T1 and
    /// `hub` the collector identity for metrics attribution.
    Discovery,
    SensorData,
}

/// Identity of a data item: (origin, seq) is unique per origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ItemId {
    pub origin: EntityId,
    pub seq: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub kind: MessageKind,
    pub origin: EntityId,
    pub seq: u32,
    pub ttl: u8,
    pub hop_count: u8,
    /// Destination contact node for routed data / the contact node a
    /// Discovery flood advertises.
    pub sink: Option<EntityId>,
    pub hub: Option<EntityId>,
    pub created_at: SimTime,
    pub payload_bytes: u32,
}

impl Message {
    pub fn item(&self) -> ItemId {
        ItemId { origin: self.origin, seq: self.seq }
    }
}

/// Bounded (origin, seq) cache with oldest-first eviction. A cached id is
/// never relayed twice.
#[derive(Debug, Clone)]
pub struct DedupCache {
    order: VecDeque<ItemId>,
    set: HashSet<ItemId>,
    capacity: usize,
}

impl DedupCache {
    pub fn new(capacity: usize) -> Self {
        DedupCache { order: VecDeque::new(), set: HashSet::new(), capacity }
    }

    pub fn contains(&self, id: ItemId) -> bool {
        self.set.contains(&id)
    }

    /// Returns true if the id was fresh (and is now cached).
    pub fn insert(&mut self, id: ItemId) -> bool {
        if self.set.contains(&id) {
            return false;
        }
        if self.order.len() == self.capacity {
            if let Some(old) = self.order.pop_front() {
                self.set.remove(&old);
            }
        }
        self.order.push_back(id);
        self.set.insert(id);
        true
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DutyCycle {
    pub wake_interval: SimTime,
    pub wake_duration: SimTime,
    pub phase: SimTime,
}

impl DutyCycle {
    /// Radio on during [phase + k*interval, phase + k*interval + duration).
    pub fn is_awake(&self, t: SimTime) -> bool {
        let interval = self.wake_interval.millis();
        let phase = self.phase.millis() % interval;
        let offset = (t.millis() + interval - phase) % interval;
        offset < self.wake_duration.millis()
    }

    /// First wake start at or after t.
    pub fn next_wake(&self, t: SimTime) -> SimTime {
        let interval = self.wake_interval.millis();
        let phase = self.phase.millis() % interval;
        let t_ms = t.millis();
        if t_ms <= phase {
            return SimTime(phase);
        }
        let k = (t_ms - phase).div_ceil(interval);
        SimTime(phase + k * interval)
    }
}

/// Messages a Friend holds for one sleeping LPN, released only at that
/// LPN's poll. Overflow drops the oldest entry.
#[derive(Debug, Clone, Default)]
pub struct FriendQueue {
    entries: VecDeque<Message>,
    seen: HashSet<ItemId>,
}

impl FriendQueue {
    pub fn store(&mut self, msg: Message, capacity: usize) -> Option<Message> {
        if !self.seen.insert(msg.item()) {
            return None; // one stored copy per flood / item
        }
        let dropped = if self.entries.len() == capacity {
            self.entries.pop_front()
        } else {
            None
        };
        self.entries.push_back(msg);
        dropped
    }

    pub fn drain(&mut self) -> Vec<Message> {
        self.entries.drain(..).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
