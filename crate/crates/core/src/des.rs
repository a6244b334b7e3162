//! Deterministic discrete-event core: integer-millisecond clock and a
//! (fire_at, seq) ordered event queue.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Simulation time in integer milliseconds since run start.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
pub struct SimTime(pub u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);

    pub fn millis(self) -> u64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / 1000.0
    }

    pub fn saturating_sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.saturating_sub(rhs.0))
    }
}

impl Add for SimTime {
    type Output = SimTime;
    fn add(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 + rhs.0)
    }
}

impl Sub for SimTime {
    type Output = SimTime;
    fn sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 - rhs.0)
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}ms", self.0)
    }
}

/// Identifier for a simulated entity (ground node, hub, UAV, ground station).
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct EntityId(pub u32);

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct EventId(pub u64);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DesError {
    #[error("event scheduled in the past: fire_at {fire_at} < clock {clock}")]
    PastEvent { fire_at: SimTime, clock: SimTime },
}

struct QueuedEvent<P> {
    fire_at: SimTime,
    seq: u64,
    payload: P,
}

impl<P> PartialEq for QueuedEvent<P> {
    fn eq(&self, other: &Self) -> bool {
        self.fire_at == other.fire_at && self.seq == other.seq
    }
}
impl<P> Eq for QueuedEvent<P> {}
impl<P> PartialOrd for QueuedEvent<P> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<P> Ord for QueuedEvent<P> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.fire_at, self.seq).cmp(&(other.fire_at, other.seq))
    }
}

/// Event engine: a clock plus a queue totally ordered by (fire_at, insertion seq).
///
/// Insertion order breaks ties at equal fire times, so a run over a fixed
/// schedule is reproducible regardless of heap internals.
pub struct Engine<P> {
    clock: SimTime,
    next_seq: u64,
    queue: BinaryHeap<Reverse<QueuedEvent<P>>>,
    processed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSummary {
    pub events_processed: u64,
    pub final_clock: SimTime,
}

impl<P> Engine<P> {
    pub fn new() -> Self {
        Engine {
            clock: SimTime::ZERO,
            next_seq: 0,
            queue: BinaryHeap::new(),
            processed: 0,
        }
    }

    pub fn clock(&self) -> SimTime {
        self.clock
    }

    pub fn pending(&self) -> usize {
        self.queue.len()
    }

    pub fn events_processed(&self) -> u64 {
        self.processed
    }

    /// Enqueue an event. Scheduling before the current clock is a protocol
    /// logic bug and is rejected.
    pub fn schedule(&mut self, fire_at: SimTime, payload: P) -> Result<EventId, DesError> {
        if fire_at < self.clock {
            return Err(DesError::PastEvent {
                fire_at,
                clock: self.clock,
            });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.queue.push(Reverse(QueuedEvent {
            fire_at,
            seq,
            payload,
        }));
        Ok(EventId(seq))
    }

    /// Pop the next event with fire_at <= end, advancing the clock to it.
    pub fn pop_until(&mut self, end: SimTime) -> Option<(SimTime, P)> {
        match self.queue.peek() {
            Some(Reverse(ev)) if ev.fire_at <= end => {
                let Reverse(ev) = self.queue.pop().unwrap();
                debug_assert!(ev.fire_at >= self.clock, "causality violation");
                self.clock = ev.fire_at;
                self.processed += 1;
                Some((ev.fire_at, ev.payload))
            }
            _ => None,
        }
    }

    /// Advance the clock to `end` (used after the queue is exhausted).
    pub fn finish_at(&mut self, end: SimTime) -> RunSummary {
        if end > self.clock {
            self.clock = end;
        }
        RunSummary {
            events_processed: self.processed,
            final_clock: self.clock,
        }
    }

    /// Drain remaining queued payloads (events past end_time); used by the
    /// run accountant to find in-flight messages at summary time.
    pub fn drain_pending(&mut self) -> Vec<P> {
        let mut out: Vec<QueuedEvent<P>> = self.queue.drain().map(|Reverse(e)| e).collect();
        out.sort_by_key(|e| (e.fire_at, e.seq));
        out.into_iter().map(|e| e.payload).collect()
    }
}

impl<P> Default for Engine<P> {
    fn default() -> Self {
        Self::new()
    }
}
