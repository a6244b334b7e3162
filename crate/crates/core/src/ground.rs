//! Ground-side simulation: a mobile hub on a circular trajectory sends a
//! discovery packet every second; each in-range contact node starts a
//! routing-advertisement flood; nodes answer with buffered sensor data,
//! relayed either by flooding or by the MAM0 / MAM1 managed-relay
//! policies. Friend nodes store advertisements for their sleeping
//! low-power neighbors and flush batched data on a timeout.
//!
//! Route learning runs on every delivered advertisement copy; the dedup
//! cache gates re-flooding and the per-flood data-emission trigger.
//! Broadcasts take per-delivery loss draws; unicast hops model link-layer
//! acks and are reliable.

use std::collections::{BTreeMap, HashSet, VecDeque};

use rand_chacha::ChaCha8Rng;

use crate::des::{Engine, EntityId, SimTime};
use crate::mesh::{DedupCache, DutyCycle, FriendQueue, ItemId, Message, MessageKind, NodeRole};
use crate::metrics::{Accountant, DropCause, MetricsError, RunMetrics};
use crate::mobility::{generate_placement, position_at, PlacementSpec, Trajectory};
use crate::radio::{broadcast_reach, in_range, Position, RadioParams};
use crate::rng::{entity_rng, named_rng};
use crate::routing::{RelayPolicy, RouteEntry, RouteTable};
use crate::scenario::Scenario;

pub const HUB_ID: EntityId = EntityId(1000);

#[derive(Debug, Clone)]
enum Ev {
    HubTick,
    Deliver { to: EntityId, from: EntityId, msg: Message },
    LpnWake { node: EntityId },
    Sample { node: EntityId },
    FlushExpire { friend: EntityId, sink: EntityId, expires: SimTime },
}

struct Node {
    id: EntityId,
    role: NodeRole,
    pos: Position,
    duty: Option<DutyCycle>,
    friend: Option<EntityId>,
    lpn_clients: Vec<EntityId>,
    dedup: DedupCache,
    buffer: VecDeque<Message>,
    /// FN only: LPN data batched while a flush timer is armed, per sink.
    flush_buf: Vec<Message>,
    flush_timers: BTreeMap<EntityId, SimTime>,
    routes: RouteTable,
    next_seq: u32,
    emitted_floods: HashSet<ItemId>,
    friend_store: BTreeMap<EntityId, FriendQueue>,
}

impl Node {
    fn is_awake(&self, t: SimTime) -> bool {
        match &self.duty {
            Some(d) => d.is_awake(t),
            None => true,
        }
    }
}

pub struct GroundWorld {
    cfg: Scenario,
    params: RadioParams,
    nodes: BTreeMap<EntityId, Node>,
    neighbors: BTreeMap<EntityId, Vec<EntityId>>,
    hub_traj: Trajectory,
    engine: Engine<Ev>,
    acc: Accountant,
    rngs: BTreeMap<EntityId, ChaCha8Rng>,
    flood_seq: u32,
    /// When enabled, every change of a node's data-sink choice is logged
    /// (node, sink, next_hop); used by the policy-degeneracy checks.
    pub log_choices: bool,
    pub choice_log: Vec<(SimTime, EntityId, EntityId, EntityId)>,
    /// every route-hook invocation: (t, node, sink, relayer, candidate hops)
    pub candidate_log: Vec<(SimTime, EntityId, EntityId, EntityId, u8)>,
}

/// Route-decision history from a logged run: `choices` holds every change
/// of a node's data-sink choice, `candidates` every route-hook invocation.
#[derive(Debug, Default)]
pub struct RouteLogs {
    pub choices: Vec<(SimTime, EntityId, EntityId, EntityId)>,
    pub candidates: Vec<(SimTime, EntityId, EntityId, EntityId, u8)>,
}

pub struct GroundOutput {
    pub metrics: RunMetrics,
    pub trace: Option<Vec<String>>,
}

impl GroundWorld {
    /// Build the world from a scenario: placement from the run seed, roles
    /// assigned in id order (Relay block, then Friend, LowPower, SensorOnly).
    pub fn new(cfg: &Scenario, keep_trace: bool) -> Self {
        let spec = PlacementSpec { area: cfg.area, count: cfg.ground_node_count() };
        let positions = generate_placement(&spec, cfg.seed);
        let mut roles = Vec::new();
        roles.extend(std::iter::repeat(NodeRole::Relay).take(cfg.relay_count));
        roles.extend(std::iter::repeat(NodeRole::Friend).take(cfg.friend_count));
        roles.extend(std::iter::repeat(NodeRole::LowPower).take(cfg.lpn_count));
        roles.extend(std::iter::repeat(NodeRole::SensorOnly).take(cfg.sensor_count));
        let layout = positions.into_iter().zip(roles).collect();
        Self::with_layout(cfg, layout, keep_trace)
    }

    /// Explicit node layout; used by tests that need exact topologies.
    pub fn with_layout(
        cfg: &Scenario,
        layout: Vec<(Position, NodeRole)>,
        keep_trace: bool,
    ) -> Self {
        let params = cfg.radio_params();
        let mut nodes = BTreeMap::new();
        let mut phase_rng = named_rng(cfg.seed, "lpn-phases");
        for (i, (pos, role)) in layout.into_iter().enumerate() {
            let id = EntityId(i as u32);
            let duty = if role == NodeRole::LowPower {
                let phase = if cfg.aligned_phases {
                    SimTime(0)
                } else {
                    SimTime(rand::Rng::gen_range(
                        &mut phase_rng,
                        0..cfg.wake_interval.0,
                    ))
                };
                Some(DutyCycle {
                    wake_interval: cfg.wake_interval,
                    wake_duration: cfg.wake_duration,
                    phase,
                })
            } else {
                None
            };
            nodes.insert(
                id,
                Node {
                    id,
                    role,
                    pos,
                    duty,
                    friend: None,
                    lpn_clients: Vec::new(),
                    dedup: DedupCache::new(cfg.dedup_capacity),
                    buffer: VecDeque::new(),
                    flush_buf: Vec::new(),
                    flush_timers: BTreeMap::new(),
                    routes: RouteTable::default(),
                    next_seq: 0,
                    emitted_floods: HashSet::new(),
                    friend_store: BTreeMap::new(),
                },
            );
        }

        // static neighbor lists (ground nodes never move)
        let mut neighbors: BTreeMap<EntityId, Vec<EntityId>> = BTreeMap::new();
        let ids: Vec<EntityId> = nodes.keys().copied().collect();
        for &a in &ids {
            let mut nbrs = Vec::new();
            for &b in &ids {
                if a != b && in_range(&nodes[&a].pos, &nodes[&b].pos, params.range_m) {
                    nbrs.push(b);
                }
            }
            neighbors.insert(a, nbrs);
        }

        // friendship: each LPN binds to the nearest in-range Friend,
        // distance ties to the lowest id; binding is static for the run
        let bindings: Vec<(EntityId, EntityId)> = nodes
            .values()
            .filter(|n| n.role == NodeRole::LowPower)
            .filter_map(|lpn| {
                nodes
                    .values()
                    .filter(|f| {
                        f.role == NodeRole::Friend
                            && in_range(&lpn.pos, &f.pos, params.range_m)
                    })
                    .map(|f| {
                        let d = lpn.pos.distance(&f.pos);
                        (d, f.id)
                    })
                    .min_by(|a, b| a.partial_cmp(b).unwrap())
                    .map(|(_, fid)| (lpn.id, fid))
            })
            .collect();
        for (lpn, friend) in bindings {
            nodes.get_mut(&lpn).unwrap().friend = Some(friend);
            nodes.get_mut(&friend).unwrap().lpn_clients.push(lpn);
        }

        let rngs = ids
            .iter()
            .map(|&id| (id, entity_rng(cfg.seed, id)))
            .collect();

        GroundWorld {
            params,
            nodes,
            neighbors,
            hub_traj: Trajectory::Circular {
                center: cfg.hub_center,
                radius_m: cfg.hub_radius_m,
                speed_mps: cfg.hub_speed_mps,
                phase_rad: 0.0,
            },
            engine: Engine::new(),
            acc: Accountant::new(keep_trace),
            rngs,
            flood_seq: 0,
            log_choices: false,
            choice_log: Vec::new(),
            candidate_log: Vec::new(),
            cfg: cfg.clone(),
        }
    }

    pub fn hub_pos(&self, t: SimTime) -> Position {
        position_at(&self.hub_traj, t)
    }

    pub fn routes(&self, id: EntityId) -> &RouteTable {
        &self.nodes[&id].routes
    }

    pub fn neighbor_ids(&self, id: EntityId) -> &[EntityId] {
        &self.neighbors[&id]
    }

    fn schedule(&mut self, at: SimTime, ev: Ev) {
        self.engine
            .schedule(at, ev)
            .expect("ground world scheduled an event in the past");
    }

    /// Seed the periodic event streams (hub ticks, samples, LPN wakes).
    fn seed_events(&mut self) {
        self.schedule(self.cfg.discovery_period, Ev::HubTick);
        let ids: Vec<EntityId> = self.nodes.keys().copied().collect();
        for id in ids {
            self.schedule(self.cfg.sample_period, Ev::Sample { node: id });
            if let Some(duty) = self.nodes[&id].duty {
                self.schedule(duty.next_wake(SimTime(0)), Ev::LpnWake { node: id });
            }
        }
    }

    /// Run the bundled scenario end to end.
    pub fn run(mut self) -> Result<GroundOutput, MetricsError> {
        self.seed_events();
        self.run_until_end()?;
        self.finish()
    }

    fn run_until_end(&mut self) -> Result<(), MetricsError> {
        let end = self.cfg.end_time;
        while let Some((t, ev)) = self.engine.pop_until(end) {
            self.dispatch(t, ev);
        }
        self.engine.finish_at(end);
        Ok(())
    }

    fn finish(self) -> Result<GroundOutput, MetricsError> {
        let summary = (self.engine.events_processed(), self.engine.clock());
        let (metrics, trace) = self.acc.summarize(summary.0, summary.1)?;
        Ok(GroundOutput { metrics, trace })
    }

    /// Test hook: run with externally controlled floods instead of hub
    /// ticks. Seeds samples/wakes only if `periodic` is set.
    pub fn run_manual(
        mut self,
        floods: Vec<(SimTime, EntityId)>,
        periodic: bool,
    ) -> Result<(GroundOutput, RouteLogs), MetricsError> {
        self.run_floods(floods, periodic)?;
        let logs = RouteLogs {
            choices: std::mem::take(&mut self.choice_log),
            candidates: std::mem::take(&mut self.candidate_log),
        };
        self.finish().map(|o| (o, logs))
    }

    /// Like `run_manual` but borrows, so route tables stay inspectable.
    pub fn run_floods(
        &mut self,
        floods: Vec<(SimTime, EntityId)>,
        periodic: bool,
    ) -> Result<(), MetricsError> {
        if periodic {
            self.seed_events();
        }
        for (at, contact) in floods {
            self.flood_seq += 1;
            let seq = self.flood_seq;
            let msg = Message {
                kind: MessageKind::Discovery,
                origin: contact,
                seq,
                ttl: self.cfg.ttl,
                hop_count: 0,
                sink: Some(contact),
                hub: Some(HUB_ID),
                created_at: at,
                payload_bytes: 1,
            };
            self.schedule(at, Ev::Deliver { to: contact, from: HUB_ID, msg });
        }
        self.run_until_end()
    }

    /// Snapshot of route tables for oracle tests: node -> (sink -> (next_hop, hops)).
    pub fn route_snapshot(&self) -> BTreeMap<EntityId, BTreeMap<EntityId, (EntityId, u8)>> {
        self.nodes
            .iter()
            .map(|(id, n)| {
                (
                    *id,
                    n.routes
                        .iter()
                        .map(|(s, e)| (*s, (e.next_hop, e.hop_count)))
                        .collect(),
                )
            })
            .collect()
    }

    fn dispatch(&mut self, t: SimTime, ev: Ev) {
        match ev {
            Ev::HubTick => self.on_hub_tick(t),
            Ev::Deliver { to, from, msg } => self.on_deliver(t, to, from, msg),
            Ev::LpnWake { node } => self.on_lpn_wake(t, node),
            Ev::Sample { node } => self.on_sample(t, node),
            Ev::FlushExpire { friend, sink, expires } => self.on_flush(t, friend, sink, expires),
        }
    }

    fn on_hub_tick(&mut self, t: SimTime) {
        let next = t + self.cfg.discovery_period;
        if next <= self.cfg.end_time {
            self.schedule(next, Ev::HubTick);
        }
        let hub = self.hub_pos(t);
        let contacts: Vec<EntityId> = self
            .nodes
            .values()
            .filter(|n| in_range(&n.pos, &hub, self.cfg.hub_range_m) && n.is_awake(t))
            .map(|n| n.id)
            .collect();
        for contact in contacts {
            // the contact node hands its own buffer straight to the hub
            let held: Vec<Message> = self.nodes.get_mut(&contact).unwrap().buffer.drain(..).collect();
            for m in held {
                self.try_handoff(t, contact, m);
            }
            // and starts a routing-advertisement flood with a fresh seq
            self.flood_seq += 1;
            let msg = Message {
                kind: MessageKind::Discovery,
                origin: contact,
                seq: self.flood_seq,
                ttl: self.cfg.ttl,
                hop_count: 0,
                sink: Some(contact),
                hub: Some(HUB_ID),
                created_at: t,
                payload_bytes: 1,
            };
            let node = self.nodes.get_mut(&contact).unwrap();
            // the contact itself never routes through the flood: it IS the sink
            node.dedup.insert(msg.item());
            self.broadcast(t, contact, msg, false);
        }
    }

    /// Broadcast `msg` from `sender` to its static neighbors with loss
    /// draws; `accounted` marks sensor-data copies that the conservation
    /// accountant tracks.
    fn broadcast(&mut self, t: SimTime, sender: EntityId, msg: Message, accounted: bool) {
        let nbrs = self.neighbors[&sender].clone();
        let rng = self.rngs.get_mut(&sender).unwrap();
        let mut reach = broadcast_reach(&nbrs, &self.params, rng);
        // the hub overhears sensor-data broadcasts within range
        let mut hub_copy = false;
        if msg.kind == MessageKind::SensorData {
            let hub = self.hub_pos(t);
            if in_range(&self.nodes[&sender].pos, &hub, self.cfg.hub_range_m) {
                let rng = self.rngs.get_mut(&sender).unwrap();
                if broadcast_reach(&[HUB_ID], &self.params, rng).len() == 1 {
                    hub_copy = true;
                }
            }
        }
        self.acc.on_relay_tx(sender, t);
        if accounted {
            self.acc
                .on_fanout(msg.item(), reach.len() + usize::from(hub_copy), t);
        }
        if hub_copy {
            self.acc.on_delivered(msg.item(), HUB_ID, t + self.params.per_hop_latency);
        }
        for to in reach.drain(..) {
            self.schedule(
                t + self.params.per_hop_latency,
                Ev::Deliver { to, from: sender, msg },
            );
        }
    }

    fn on_deliver(&mut self, t: SimTime, to: EntityId, from: EntityId, msg: Message) {
        let node = self.nodes.get_mut(&to).unwrap();
        if !node.is_awake(t) {
            // radio off: broadcast copies die here; the friend-side store
            // keeps advertisements for its LPNs independently
            if msg.kind == MessageKind::SensorData {
                self.acc.on_copy_dropped(msg.item(), DropCause::Sleep, t);
            }
            return;
        }
        match msg.kind {
            MessageKind::Discovery => self.on_discovery(t, to, from, msg),
            MessageKind::SensorData => self.on_sensor_data(t, to, from, msg),
        }
    }

    fn on_discovery(&mut self, t: SimTime, to: EntityId, from: EntityId, msg: Message) {
        let sink = msg.sink.expect("discovery carries its contact node");
        let policy = self.cfg.policy;
        // route learning sees every copy (MAM0 tracks the most recent
        // relayer); re-flooding and data emission are dedup-gated
        if to != sink && from != HUB_ID {
            let candidate = RouteEntry {
                sink,
                next_hop: from,
                hop_count: msg.hop_count + 1,
                learned_at: t,
            };
            let node = self.nodes.get_mut(&to).unwrap();
            let before = node.routes.choice().copied();
            node.routes.update(candidate, &policy, t);
            if self.log_choices {
                self.candidate_log.push((t, to, sink, from, candidate.hop_count));
                let after = self.nodes[&to].routes.choice().copied();
                if after.map(|e| (e.sink, e.next_hop)) != before.map(|e| (e.sink, e.next_hop)) {
                    let e = after.unwrap();
                    self.choice_log.push((t, to, e.sink, e.next_hop));
                }
            }
        }

        let node = self.nodes.get_mut(&to).unwrap();
        let fresh = node.dedup.insert(msg.item());
        if !fresh {
            return;
        }
        // friend nodes hold the advertisement for their sleeping LPNs and
        // arm (or re-arm) the flush timer for this sink
        if node.role == NodeRole::Friend {
            let clients = node.lpn_clients.clone();
            let mut stored = msg;
            stored.hop_count += 1; // one hop LPN -> FN on the way back
            for lpn in clients {
                let node = self.nodes.get_mut(&to).unwrap();
                node.friend_store.entry(lpn).or_default().store(
                    Message { ttl: stored.ttl.saturating_sub(1), ..stored },
                    self.cfg.node_buffer_cap,
                );
            }
            if policy.is_routed() {
                let expires = t + self.cfg.flush_timeout;
                self.nodes
                    .get_mut(&to)
                    .unwrap()
                    .flush_timers
                    .insert(sink, expires);
                self.schedule(expires, Ev::FlushExpire { friend: to, sink, expires });
            }
        }
        // discovery packets always flood, relayed by Relay/Friend roles
        let node = self.nodes.get_mut(&to).unwrap();
        if node.role.relays() && msg.ttl > 1 {
            // the hub handing the advertisement to the contact node is not
            // a mesh hop: the contact originates the flood at hop 0
            let relayed = Message {
                ttl: msg.ttl - 1,
                hop_count: if from == HUB_ID { msg.hop_count } else { msg.hop_count + 1 },
                ..msg
            };
            self.broadcast(t, to, relayed, false);
        }
        self.emit_data(t, to, msg.item());
    }

    /// RA-triggered data emission: drain the local buffer toward the
    /// current policy choice (or flood it), once per flood seq per node.
    fn emit_data(&mut self, t: SimTime, id: EntityId, flood: ItemId) {
        let node = self.nodes.get_mut(&id).unwrap();
        if !node.emitted_floods.insert(flood) {
            return;
        }
        if node.buffer.is_empty() {
            return;
        }
        let items: Vec<Message> = node.buffer.drain(..).collect();
        self.send_items(t, id, items);
    }

    fn send_items(&mut self, t: SimTime, id: EntityId, items: Vec<Message>) {
        let policy = self.cfg.policy;
        for mut item in items {
            if t.saturating_sub(item.created_at) > self.cfg.freshness_limit {
                self.acc.on_copy_dropped(item.item(), DropCause::Stale, t);
                continue;
            }
            match policy {
                RelayPolicy::Flooding => {
                    item.sink = None;
                    item.ttl = self.cfg.ttl;
                    let node = self.nodes.get_mut(&id).unwrap();
                    node.dedup.insert(item.item());
                    self.broadcast(t, id, item, true);
                }
                _ => {
                    let choice = self.nodes[&id].routes.choice().copied();
                    match choice {
                        Some(route) => {
                            item.sink = Some(route.sink);
                            item.ttl = self.cfg.ttl;
                            if route.sink == id {
                                self.try_handoff(t, id, item);
                            } else {
                                self.unicast(t, id, route.next_hop, item);
                            }
                        }
                        None => {
                            // no route learned yet: hold
                            self.hold(t, id, item);
                        }
                    }
                }
            }
        }
    }

    fn hold(&mut self, t: SimTime, id: EntityId, item: Message) {
        let cap = self.cfg.node_buffer_cap;
        let node = self.nodes.get_mut(&id).unwrap();
        if node.buffer.len() >= cap {
            let oldest = node.buffer.pop_front().unwrap();
            self.acc.on_copy_dropped(oldest.item(), DropCause::Overflow, t);
        }
        self.nodes.get_mut(&id).unwrap().buffer.push_back(item);
    }

    /// Reliable one-hop unicast (link-layer acks); still TTL-bounded.
    fn unicast(&mut self, t: SimTime, from: EntityId, to: EntityId, item: Message) {
        self.acc.on_relay_tx(from, t);
        let sent = Message {
            ttl: item.ttl - 1,
            hop_count: item.hop_count + 1,
            ..item
        };
        self.schedule(
            t + self.params.per_hop_latency,
            Ev::Deliver { to, from, msg: sent },
        );
    }

    fn try_handoff(&mut self, t: SimTime, contact: EntityId, item: Message) {
        if t.saturating_sub(item.created_at) > self.cfg.freshness_limit {
            self.acc.on_copy_dropped(item.item(), DropCause::Stale, t);
            return;
        }
        let hub = self.hub_pos(t);
        if in_range(&self.nodes[&contact].pos, &hub, self.cfg.hub_range_m) {
            self.acc.on_delivered(item.item(), HUB_ID, t);
        } else {
            self.hold(t, contact, item);
        }
    }

    fn on_sensor_data(&mut self, t: SimTime, to: EntityId, from: EntityId, msg: Message) {
        match msg.sink {
            None => {
                // flooded data copy
                let node = self.nodes.get_mut(&to).unwrap();
                if !node.dedup.insert(msg.item()) {
                    self.acc.on_copy_dropped(msg.item(), DropCause::Dedup, t);
                    return;
                }
                if node.role.relays() && msg.ttl > 1 {
                    let relayed = Message {
                        ttl: msg.ttl - 1,
                        hop_count: msg.hop_count + 1,
                        ..msg
                    };
                    self.broadcast(t, to, relayed, true);
                } else {
                    // non-relaying receiver or TTL floor: copy ends here
                    self.acc.on_copy_dropped(msg.item(), DropCause::Ttl, t);
                }
            }
            Some(sink) if sink == to => self.try_handoff(t, to, msg),
            Some(sink) => {
                if t.saturating_sub(msg.created_at) > self.cfg.freshness_limit {
                    self.acc.on_copy_dropped(msg.item(), DropCause::Stale, t);
                    return;
                }
                if msg.ttl <= 1 {
                    self.acc.on_copy_dropped(msg.item(), DropCause::Ttl, t);
                    return;
                }
                let node = self.nodes.get_mut(&to).unwrap();
                // friend batches its LPNs' data while a flush timer runs
                if node.role == NodeRole::Friend
                    && node.lpn_clients.contains(&from)
                    && node.flush_timers.contains_key(&sink)
                {
                    node.flush_buf.push(msg);
                    return;
                }
                match node.routes.entry(sink).copied() {
                    Some(route) => self.unicast(t, to, route.next_hop, msg),
                    None => self.hold(t, to, msg),
                }
            }
        }
    }

    fn on_flush(&mut self, t: SimTime, friend: EntityId, sink: EntityId, expires: SimTime) {
        let node = self.nodes.get_mut(&friend).unwrap();
        if node.flush_timers.get(&sink) != Some(&expires) {
            return; // re-armed since; a later event will handle it
        }
        node.flush_timers.remove(&sink);
        let batch: Vec<Message> = {
            let node = self.nodes.get_mut(&friend).unwrap();
            let (flush, keep): (Vec<Message>, Vec<Message>) = node
                .flush_buf
                .drain(..)
                .partition(|m| m.sink == Some(sink));
            node.flush_buf = keep;
            flush
        };
        for item in batch {
            if t.saturating_sub(item.created_at) > self.cfg.freshness_limit {
                self.acc.on_copy_dropped(item.item(), DropCause::Stale, t);
                continue;
            }
            let route = self.nodes[&friend].routes.entry(sink).copied();
            match route {
                Some(r) => self.unicast(t, friend, r.next_hop, item),
                None => self.hold(t, friend, item),
            }
        }
    }

    fn on_lpn_wake(&mut self, t: SimTime, id: EntityId) {
        let duty = self.nodes[&id].duty.expect("wake event on non-LPN");
        self.schedule(t + duty.wake_interval, Ev::LpnWake { node: id });
        let Some(friend) = self.nodes[&id].friend else { return };
        // poll: the friend releases everything stored for this LPN
        let stored: Vec<Message> = self
            .nodes
            .get_mut(&friend)
            .unwrap()
            .friend_store
            .entry(id)
            .or_default()
            .drain();
        for msg in stored {
            self.on_deliver(t, id, friend, msg);
        }
    }

    fn on_sample(&mut self, t: SimTime, id: EntityId) {
        let next = t + self.cfg.sample_period;
        if next <= self.cfg.end_time {
            self.schedule(next, Ev::Sample { node: id });
        }
        let (seq, item) = {
            let node = self.nodes.get_mut(&id).unwrap();
            let seq = node.next_seq;
            node.next_seq += 1;
            (
                seq,
                Message {
                    kind: MessageKind::SensorData,
                    origin: id,
                    seq,
                    ttl: self.cfg.ttl,
                    hop_count: 0,
                    sink: None,
                    hub: None,
                    created_at: t,
                    payload_bytes: self.cfg.payload_bytes,
                },
            )
        };
        let _ = seq;
        self.acc.on_generated(item.item(), item.payload_bytes, t);
        self.hold(t, id, item);
    }
}

/// Convenience entry point used by the CLI and the sweep runner.
pub fn run_ground(cfg: &Scenario, keep_trace: bool) -> Result<GroundOutput, MetricsError> {
    GroundWorld::new(cfg, keep_trace).run()
}
