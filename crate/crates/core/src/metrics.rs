//! Run accounting. Every sensor-data copy in the system is tracked from
//! generation to a terminal outcome (unique delivery, residing in some
//! buffer, or a recorded drop), so byte conservation can be asserted at
//! summary time rather than sampled. The emitted trace is line-delimited;
//! recomputing the summary from the trace reproduces it exactly.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::des::{EntityId, SimTime};
use crate::mesh::ItemId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum DropCause {
    /// Data older than the freshness limit at a forwarding decision.
    Stale,
    /// Bounded buffer overflow (oldest evicted).
    Overflow,
    /// TTL exhausted in transit.
    Ttl,
    /// Broadcast copy lost on the air (or no receiver in range).
    Loss,
    /// Arrived while the receiver's radio was off.
    Sleep,
    /// Duplicate copy discarded by a dedup cache.
    Dedup,
}

impl DropCause {
    fn tag(self) -> &'static str {
        match self {
            DropCause::Stale => "stale",
            DropCause::Overflow => "overflow",
            DropCause::Ttl => "ttl",
            DropCause::Loss => "loss",
            DropCause::Sleep => "sleep",
            DropCause::Dedup => "dedup",
        }
    }
}

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("byte conservation violated: {0}")]
    Conservation(String),
    #[error("malformed trace line {line}: {msg}")]
    BadTrace { line: usize, msg: String },
}

struct ItemState {
    bytes: u32,
    created_at: SimTime,
    live_copies: i64,
    delivered: bool,
    terminal: Option<DropCause>,
}

/// Per-run summary. `collected_ratio` is unique delivered bytes divided by
/// generated bytes; delays are creation-to-first-delivery, unique only.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct RunMetrics {
    pub generated_bytes: u64,
    pub unique_collected_bytes: u64,
    pub duplicate_collected_bytes: u64,
    pub collected_ratio: f64,
    pub delay_median_ms: Option<u64>,
    pub delay_p95_ms: Option<u64>,
    pub delay_samples: u64,
    pub in_flight_bytes: u64,
    pub dropped_bytes: BTreeMap<String, u64>,
    pub relay_tx_total: u64,
    pub planning_ops_total: u64,
    /// Planning ops spent per re-division event (fleet change replans).
    pub replan_ops: Vec<u64>,
    pub events_processed: u64,
    pub final_clock_ms: u64,
    pub trace_hash: String,
}

impl RunMetrics {
    pub fn dropped_total(&self) -> u64 {
        self.dropped_bytes.values().sum()
    }
}

/// Live accountant: fed by the simulation as events happen; also builds
/// the trace (one record per line) and its hash.
pub struct Accountant {
    items: HashMap<ItemId, ItemState>,
    delivered_order: Vec<ItemId>,
    delay_samples: Vec<u64>,
    generated_bytes: u64,
    unique_bytes: u64,
    dup_bytes: u64,
    relay_tx: BTreeMap<EntityId, u64>,
    planning_ops: u64,
    replan_ops: Vec<u64>,
    visits: BTreeMap<u32, Vec<SimTime>>,
    hasher: Sha256,
    trace: Option<Vec<String>>,
}

impl Accountant {
    /// `keep_trace` retains trace lines in memory for writing to disk;
    /// the hash is always computed.
    pub fn new(keep_trace: bool) -> Self {
        Accountant {
            items: HashMap::new(),
            delivered_order: Vec::new(),
            delay_samples: Vec::new(),
            generated_bytes: 0,
            unique_bytes: 0,
            dup_bytes: 0,
            relay_tx: BTreeMap::new(),
            planning_ops: 0,
            replan_ops: Vec::new(),
            visits: BTreeMap::new(),
            hasher: Sha256::new(),
            trace: keep_trace.then(Vec::new),
        }
    }

    fn emit(&mut self, line: String) {
        self.hasher.update(line.as_bytes());
        self.hasher.update(b"\n");
        if let Some(t) = &mut self.trace {
            t.push(line);
        }
    }

    pub fn on_generated(&mut self, item: ItemId, bytes: u32, t: SimTime) {
        self.generated_bytes += bytes as u64;
        self.items.insert(
            item,
            ItemState {
                bytes,
                created_at: t,
                live_copies: 1,
                delivered: false,
                terminal: None,
            },
        );
        self.emit(format!("G {} {} {} {}", t.0, item.origin, item.seq, bytes));
    }

    /// One in-transit/buffered copy of `item` turned into `fanout` copies
    /// (0 = the copy died on the air with no receiver).
    pub fn on_fanout(&mut self, item: ItemId, fanout: usize, t: SimTime) {
        if fanout == 0 {
            self.on_copy_dropped(item, DropCause::Loss, t);
        } else if let Some(st) = self.items.get_mut(&item) {
            st.live_copies += fanout as i64 - 1;
        }
    }

    /// A single copy died without reaching a collector.
    pub fn on_copy_dropped(&mut self, item: ItemId, cause: DropCause, t: SimTime) {
        let Some(st) = self.items.get_mut(&item) else { return };
        st.live_copies -= 1;
        debug_assert!(st.live_copies >= 0, "copy underflow for {item:?}");
        if st.live_copies <= 0 && !st.delivered && st.terminal.is_none() {
            st.terminal = Some(cause);
            let bytes = st.bytes;
            self.emit(format!(
                "X {} {} {} {} {}",
                t.0,
                item.origin,
                item.seq,
                bytes,
                cause.tag()
            ));
        }
    }

    /// A copy reached a collector (hub or ground station).
    pub fn on_delivered(&mut self, item: ItemId, collector: EntityId, t: SimTime) {
        let Some(st) = self.items.get_mut(&item) else { return };
        st.live_copies -= 1;
        let first = !st.delivered;
        st.delivered = true;
        let (bytes, created) = (st.bytes, st.created_at);
        if first {
            self.unique_bytes += bytes as u64;
            self.delay_samples.push(t.saturating_sub(created).0);
            self.delivered_order.push(item);
        } else {
            self.dup_bytes += bytes as u64;
        }
        self.emit(format!(
            "D {} {} {} {} {} {}",
            t.0,
            item.origin,
            item.seq,
            bytes,
            collector,
            if first { "u" } else { "d" }
        ));
    }

    pub fn on_relay_tx(&mut self, node: EntityId, t: SimTime) {
        *self.relay_tx.entry(node).or_insert(0) += 1;
        self.emit(format!("R {} {}", t.0, node));
    }

    pub fn on_planning(&mut self, uav: EntityId, ops: u64, replan: bool, t: SimTime) {
        self.planning_ops += ops;
        if replan {
            self.replan_ops.push(ops);
        }
        self.emit(format!(
            "P {} {} {} {}",
            t.0,
            uav,
            ops,
            if replan { 1 } else { 0 }
        ));
    }

    pub fn on_visit(&mut self, poi: u32, uav: EntityId, t: SimTime) {
        self.visits.entry(poi).or_default().push(t);
        self.emit(format!("V {} {} {}", t.0, poi, uav));
    }

    pub fn on_meet(&mut self, a: EntityId, b: EntityId, t: SimTime) {
        self.emit(format!("M {} {} {}", t.0, a, b));
    }

    pub fn visits(&self) -> &BTreeMap<u32, Vec<SimTime>> {
        &self.visits
    }

    pub fn unique_bytes(&self) -> u64 {
        self.unique_bytes
    }

    /// Close the run: verify conservation, emit the final residual record,
    /// and produce the summary.
    pub fn summarize(
        mut self,
        events_processed: u64,
        final_clock: SimTime,
    ) -> Result<(RunMetrics, Option<Vec<String>>), MetricsError> {
        let mut in_flight: u64 = 0;
        let mut dropped: BTreeMap<String, u64> = BTreeMap::new();
        for (id, st) in &self.items {
            if st.delivered {
                continue;
            }
            if st.live_copies > 0 {
                in_flight += st.bytes as u64;
            } else if let Some(cause) = st.terminal {
                *dropped.entry(cause.tag().to_string()).or_insert(0) += st.bytes as u64;
            } else {
                return Err(MetricsError::Conservation(format!(
                    "item ({}, {}) vanished: not delivered, no live copy, no drop record",
                    id.origin, id.seq
                )));
            }
        }
        let accounted = self.unique_bytes + in_flight + dropped.values().sum::<u64>();
        if accounted != self.generated_bytes {
            return Err(MetricsError::Conservation(format!(
                "generated {} != unique {} + in_flight {} + dropped {}",
                self.generated_bytes,
                self.unique_bytes,
                in_flight,
                dropped.values().sum::<u64>()
            )));
        }

        let mut residual = format!("F {} {}", final_clock.0, in_flight);
        for (cause, bytes) in &dropped {
            let _ = write!(residual, " {cause}={bytes}");
        }
        self.emit(residual);

        let mut delays = self.delay_samples.clone();
        delays.sort_unstable();
        let pick = |q: f64| -> Option<u64> {
            if delays.is_empty() {
                None
            } else {
                let idx = ((delays.len() - 1) as f64 * q).round() as usize;
                Some(delays[idx])
            }
        };

        let hash = format!("{:x}", self.hasher.clone().finalize());
        let metrics = RunMetrics {
            generated_bytes: self.generated_bytes,
            unique_collected_bytes: self.unique_bytes,
            duplicate_collected_bytes: self.dup_bytes,
            collected_ratio: if self.generated_bytes == 0 {
                0.0
            } else {
                self.unique_bytes as f64 / self.generated_bytes as f64
            },
            delay_median_ms: pick(0.5),
            delay_p95_ms: pick(0.95),
            delay_samples: delays.len() as u64,
            in_flight_bytes: in_flight,
            dropped_bytes: dropped,
            relay_tx_total: self.relay_tx.values().sum(),
            planning_ops_total: self.planning_ops,
            replan_ops: self.replan_ops.clone(),
            events_processed,
            final_clock_ms: final_clock.0,
            trace_hash: hash,
        };
        Ok((metrics, self.trace))
    }
}

/// Recompute a summary by folding over an emitted trace. Independent of
/// the live accounting path: parses the line records only.
pub fn fold_trace<'a, I: Iterator<Item = &'a str>>(
    lines: I,
    events_processed: u64,
) -> Result<RunMetrics, MetricsError> {
    let mut generated: u64 = 0;
    let mut unique: u64 = 0;
    let mut dup: u64 = 0;
    let mut created: HashMap<ItemId, u64> = HashMap::new();
    let mut delays: Vec<u64> = Vec::new();
    let mut dropped: BTreeMap<String, u64> = BTreeMap::new();
    let mut relay_tx: u64 = 0;
    let mut planning: u64 = 0;
    let mut replans: Vec<u64> = Vec::new();
    let mut in_flight: u64 = 0;
    let mut final_clock: u64 = 0;
    let mut hasher = Sha256::new();

    for (n, line) in lines.enumerate() {
        hasher.update(line.as_bytes());
        hasher.update(b"\n");
        let bad = |msg: &str| MetricsError::BadTrace { line: n + 1, msg: msg.into() };
        let mut f = line.split(' ');
        let kind = f.next().ok_or_else(|| bad("empty"))?;
        let mut num = |what: &str| -> Result<u64, MetricsError> {
            f.next()
                .and_then(|s| s.parse::<u64>().ok())
                .ok_or(MetricsError::BadTrace { line: n + 1, msg: what.into() })
        };
        match kind {
            "G" => {
                let t = num("t")?;
                let origin = num("origin")?;
                let seq = num("seq")?;
                let bytes = num("bytes")?;
                generated += bytes;
                created.insert(
                    ItemId { origin: EntityId(origin as u32), seq: seq as u32 },
                    t,
                );
            }
            "D" => {
                let t = num("t")?;
                let origin = num("origin")?;
                let seq = num("seq")?;
                let bytes = num("bytes")?;
                let _collector = num("collector")?;
                let flag = f.next().ok_or_else(|| bad("flag"))?;
                if flag == "u" {
                    unique += bytes;
                    let at = created
                        .get(&ItemId { origin: EntityId(origin as u32), seq: seq as u32 })
                        .copied()
                        .ok_or_else(|| bad("delivery before generation"))?;
                    delays.push(t.saturating_sub(at));
                } else {
                    dup += bytes;
                }
            }
            "X" => {
                let _t = num("t")?;
                let _origin = num("origin")?;
                let _seq = num("seq")?;
                let bytes = num("bytes")?;
                let cause = f.next().ok_or_else(|| bad("cause"))?;
                *dropped.entry(cause.to_string()).or_insert(0) += bytes;
            }
            "R" => {
                let _t = num("t")?;
                relay_tx += 1;
            }
            "P" => {
                let _t = num("t")?;
                let _uav = num("uav")?;
                let ops = num("ops")?;
                let replan = num("replan")?;
                planning += ops;
                if replan == 1 {
                    replans.push(ops);
                }
            }
            "V" | "M" => {}
            "F" => {
                final_clock = num("t")?;
                in_flight = num("in_flight")?;
            }
            other => return Err(bad(&format!("unknown record kind {other}"))),
        }
    }

    delays.sort_unstable();
    let pick = |q: f64| -> Option<u64> {
        if delays.is_empty() {
            None
        } else {
            Some(delays[((delays.len() - 1) as f64 * q).round() as usize])
        }
    };

    Ok(RunMetrics {
        generated_bytes: generated,
        unique_collected_bytes: unique,
        duplicate_collected_bytes: dup,
        collected_ratio: if generated == 0 { 0.0 } else { unique as f64 / generated as f64 },
        delay_median_ms: pick(0.5),
        delay_p95_ms: pick(0.95),
        delay_samples: delays.len() as u64,
        in_flight_bytes: in_flight,
        dropped_bytes: dropped,
        relay_tx_total: relay_tx,
        planning_ops_total: planning,
        replan_ops: replans,
        events_processed,
        final_clock_ms: final_clock,
        trace_hash: format!("{:x}", hasher.finalize()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(origin: u32, seq: u32) -> ItemId {
        ItemId { origin: EntityId(origin), seq }
    }

    #[test]
    fn same_item_at_two_collectors_is_one_unique_one_dup() {
        let mut acc = Accountant::new(false);
        acc.on_generated(item(1, 1), 20, SimTime(0));
        acc.on_fanout(item(1, 1), 2, SimTime(5));
        acc.on_delivered(item(1, 1), EntityId(100), SimTime(10));
        acc.on_delivered(item(1, 1), EntityId(101), SimTime(12));
        let (m, _) = acc.summarize(4, SimTime(100)).unwrap();
        assert_eq!(m.unique_collected_bytes, 20);
        assert_eq!(m.duplicate_collected_bytes, 20);
        assert_eq!(m.delay_median_ms, Some(10));
    }

    #[test]
    fn hand_built_byte_arithmetic() {
        // 10 items of 20 bytes: 8 delivered (one of them twice),
        // 2 never emitted (still buffered).
        let mut acc = Accountant::new(false);
        for s in 0..10 {
            acc.on_generated(item(1, s), 20, SimTime(s as u64));
        }
        for s in 0..7 {
            acc.on_delivered(item(1, s), EntityId(100), SimTime(50 + s as u64));
        }
        acc.on_fanout(item(1, 7), 2, SimTime(60));
        acc.on_delivered(item(1, 7), EntityId(100), SimTime(61));
        acc.on_delivered(item(1, 7), EntityId(101), SimTime(62));
        let (m, _) = acc.summarize(0, SimTime(100)).unwrap();
        assert_eq!(m.unique_collected_bytes, 160);
        assert_eq!(m.duplicate_collected_bytes, 20);
        assert_eq!(m.in_flight_bytes, 40);
        assert_eq!(m.generated_bytes, 200);
    }

    #[test]
    fn vanished_item_fails_conservation() {
        let mut acc = Accountant::new(false);
        acc.on_generated(item(1, 1), 20, SimTime(0));
        acc.on_fanout(item(1, 1), 1, SimTime(1));
        // simulate a bug: copy destroyed without a drop record
        acc.items.get_mut(&item(1, 1)).unwrap().live_copies = 0;
        assert!(acc.summarize(0, SimTime(10)).is_err());
    }

    #[test]
    fn dropped_copies_settle_into_terminal_cause() {
        let mut acc = Accountant::new(false);
        acc.on_generated(item(1, 1), 20, SimTime(0));
        acc.on_fanout(item(1, 1), 3, SimTime(1));
        acc.on_copy_dropped(item(1, 1), DropCause::Dedup, SimTime(2));
        acc.on_copy_dropped(item(1, 1), DropCause::Sleep, SimTime(3));
        acc.on_copy_dropped(item(1, 1), DropCause::Ttl, SimTime(4));
        let (m, _) = acc.summarize(0, SimTime(10)).unwrap();
        assert_eq!(m.dropped_bytes.get("ttl"), Some(&20));
        assert_eq!(m.dropped_total(), 20);
    }

    #[test]
    fn zero_deliveries_reports_absent_delay() {
        let mut acc = Accountant::new(false);
        acc.on_generated(item(1, 1), 20, SimTime(0));
        let (m, _) = acc.summarize(0, SimTime(10)).unwrap();
        assert_eq!(m.collected_ratio, 0.0);
        assert_eq!(m.delay_median_ms, None);
        assert_eq!(m.delay_samples, 0);
    }

    #[test]
    fn all_delivered_once_gives_ratio_one() {
        let mut acc = Accountant::new(false);
        for s in 0..5 {
            acc.on_generated(item(1, s), 10, SimTime(0));
            acc.on_delivered(item(1, s), EntityId(100), SimTime(7));
        }
        let (m, _) = acc.summarize(0, SimTime(10)).unwrap();
        assert!((m.collected_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fold_reproduces_live_summary() {
        let mut acc = Accountant::new(true);
        acc.on_generated(item(1, 1), 20, SimTime(0));
        acc.on_generated(item(2, 1), 20, SimTime(5));
        acc.on_fanout(item(1, 1), 2, SimTime(6));
        acc.on_delivered(item(1, 1), EntityId(100), SimTime(10));
        acc.on_copy_dropped(item(1, 1), DropCause::Dedup, SimTime(11));
        acc.on_copy_dropped(item(2, 1), DropCause::Stale, SimTime(12));
        acc.on_relay_tx(EntityId(3), SimTime(13));
        acc.on_planning(EntityId(200), 42, true, SimTime(14));
        let (live, trace) = acc.summarize(9, SimTime(20)).unwrap();
        let folded = fold_trace(trace.unwrap().iter().map(|s| s.as_str()), 9).unwrap();
        assert_eq!(live, folded);
    }
}
