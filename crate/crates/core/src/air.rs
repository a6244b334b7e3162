//! Air-side simulation: a fleet of UAVs ferries sensor data from points of
//! interest to a fixed ground station.
//!
//! The decentralized coordination scheme gives every agent the same code
//! and no direct links: each computes the same tour over the POI set,
//! splits it into per-agent segments, patrols its own segment, and waits
//! at the shared boundary POIs. At a rendezvous, buffered data moves to
//! the station-side agent, alive-rosters are gossiped (newest stamp wins),
//! and a roster change makes both agents recompute the partition
//! identically. Repeated missed rendezvous mark the neighbor dead.
//!
//! The ferry baseline flies one closed 2-opt loop through all POIs and
//! the station, with agents phase-shifted along it and no coordination.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::des::{Engine, EntityId, SimTime};
use crate::mesh::ItemId;
use crate::metrics::{Accountant, DropCause, MetricsError, RunMetrics};
use crate::radio::Position;
use crate::rng::named_rng;
use crate::scenario::{Scenario, Strategy};
use crate::tour::{nearest_neighbor, partition_tour, tour_length, two_opt, OpsCounter, Poi, PoiId, Tour};

pub const GS_ID: EntityId = EntityId(500);
pub const UAV_BASE: u32 = 600;

#[derive(Debug, Clone, Copy)]
enum Ev {
    Tick,
    Sample { poi: usize },
    Failure,
    Reinforce,
}

#[derive(Debug, Clone, Copy)]
struct AirItem {
    id: ItemId,
    bytes: u32,
}

struct PoiState {
    pos: Position,
    buffer: VecDeque<AirItem>,
    next_seq: u32,
}

/// Piecewise-linear flight path; arc-length parameterized.
struct Polyline {
    pts: Vec<Position>,
    cum: Vec<f64>,
    total: f64,
    closed: bool,
}

impl Polyline {
    fn new(pts: Vec<Position>, closed: bool) -> Self {
        let mut cum = vec![0.0];
        for w in pts.windows(2) {
            let d = w[0].distance(&w[1]);
            cum.push(cum.last().unwrap() + d);
        }
        let mut total = *cum.last().unwrap();
        if closed && pts.len() > 1 {
            total += pts.last().unwrap().distance(&pts[0]);
        }
        Polyline { pts, cum, total, closed }
    }

    fn pos_at(&self, arc: f64) -> Position {
        let arc = if self.closed {
            arc.rem_euclid(self.total.max(f64::EPSILON))
        } else {
            arc.clamp(0.0, self.total)
        };
        // find the leg containing `arc`
        match self.cum.iter().rposition(|&c| c <= arc + 1e-9) {
            Some(i) if i + 1 < self.pts.len() => {
                let a = self.pts[i];
                let b = self.pts[i + 1];
                let leg = self.cum[i + 1] - self.cum[i];
                let f = if leg > 0.0 { (arc - self.cum[i]) / leg } else { 0.0 };
                Position::new(a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f)
            }
            _ => {
                if self.closed && !self.pts.is_empty() {
                    // return leg back to the start vertex
                    let a = *self.pts.last().unwrap();
                    let b = self.pts[0];
                    let start = *self.cum.last().unwrap();
                    let leg = self.total - start;
                    let f = if leg > 0.0 { (arc - start) / leg } else { 0.0 };
                    Position::new(a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f)
                } else {
                    *self.pts.last().unwrap()
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct RosterEntry {
    alive: bool,
    stamp: SimTime,
}

struct Uav {
    alive: bool,
    arc: f64,
    dir: f64,
    seg_lo: f64,
    seg_hi: f64,
    roster: BTreeMap<EntityId, RosterEntry>,
    buffer: VecDeque<AirItem>,
    waiting: Option<(bool, SimTime)>, // (at upper boundary, since)
    joining: bool,
    missed_lo: u32,
    missed_hi: u32,
    in_range_pois: BTreeSet<usize>,
}

impl Uav {
    fn alive_ids(&self) -> Vec<EntityId> {
        self.roster
            .iter()
            .filter(|(_, e)| e.alive)
            .map(|(id, _)| *id)
            .collect()
    }
}

pub struct AirWorld {
    cfg: Scenario,
    pois: Vec<PoiState>,
    tour_pois: Vec<Poi>,
    path: Polyline,
    /// arc position of each POI vertex along `path`, by tour visit order
    poi_arc: Vec<f64>,
    tour: Tour,
    uavs: BTreeMap<EntityId, Uav>,
    next_uav_id: u32,
    engine: Engine<Ev>,
    acc: Accountant,
    ferry: bool,
}

pub struct AirOutput {
    pub metrics: RunMetrics,
    pub trace: Option<Vec<String>>,
    pub visits: BTreeMap<u32, Vec<SimTime>>,
}

/// POI placement: uniform in the field, with `poi_gs_bias` skewing the
/// long-axis coordinate toward the ground-station side (exponent warp).
pub fn place_pois(cfg: &Scenario) -> Vec<Position> {
    let mut rng = named_rng(cfg.seed, "poi-placement");
    let f = cfg.field;
    (0..cfg.poi_count)
        .map(|_| {
            let ux: f64 = rand::Rng::gen(&mut rng);
            let uy: f64 = rand::Rng::gen(&mut rng);
            let ux = ux.powf(1.0 + cfg.poi_gs_bias);
            Position::new(f.x + f.w * ux, f.y + f.h * uy)
        })
        .collect()
}

fn tour_for_strategy(
    cfg: &Scenario,
    pois: &[Poi],
    start: usize,
    ops: &mut OpsCounter,
) -> Tour {
    match cfg.strategy {
        Strategy::DadcaNaive => nearest_neighbor(pois, start, ops).unwrap(),
        Strategy::Dadca2opt | Strategy::Dadca2optCut => {
            let nn = nearest_neighbor(pois, start, ops).unwrap();
            two_opt(pois, &nn, ops)
        }
        Strategy::DadcaParted => {
            // nearest-neighbor solved per vertical strip, strips chained
            // left to right from the station side
            let k = cfg.uav_count.max(1);
            let mut idx: Vec<usize> = (0..pois.len()).collect();
            idx.sort_by(|&a, &b| {
                pois[a]
                    .pos
                    .x
                    .partial_cmp(&pois[b].pos.x)
                    .unwrap()
                    .then(pois[a].id.cmp(&pois[b].id))
            });
            let chunk = pois.len().div_ceil(k);
            let mut order = Vec::with_capacity(pois.len());
            let mut anchor = start;
            for cell in idx.chunks(chunk) {
                // start the cell at its member nearest the previous anchor
                let mut best = cell[0];
                let mut best_d = f64::INFINITY;
                for &c in cell {
                    let d = ops.dist(pois, anchor, c);
                    if d < best_d {
                        best_d = d;
                        best = c;
                    }
                }
                let sub: Vec<Poi> = cell.iter().map(|&c| pois[c]).collect();
                let local_start = cell.iter().position(|&c| c == best).unwrap();
                let nn = nearest_neighbor(&sub, local_start, ops).unwrap();
                for p in &nn.order {
                    order.push(cell[*p]);
                }
                anchor = *order.last().unwrap();
            }
            Tour { order, closed: false }
        }
        Strategy::TspFerry => {
            let nn = nearest_neighbor(pois, start, ops).unwrap();
            let mut loop_tour = nn;
            loop_tour.closed = true;
            two_opt(pois, &loop_tour, ops)
        }
    }
}

impl AirWorld {
    pub fn new(cfg: &Scenario, keep_trace: bool) -> Self {
        let positions = place_pois(cfg);
        let pois: Vec<PoiState> = positions
            .iter()
            .map(|&pos| PoiState { pos, buffer: VecDeque::new(), next_seq: 0 })
            .collect();
        let ferry = cfg.strategy == Strategy::TspFerry;

        // tour over the POIs (ferry additionally visits the station as a
        // plain vertex; patrol paths prepend it so arc 0 is the station)
        let mut tour_pois: Vec<Poi> = positions
            .iter()
            .enumerate()
            .map(|(i, &pos)| Poi { id: PoiId(i as u32), pos })
            .collect();
        let start = if ferry {
            tour_pois.push(Poi { id: PoiId(u32::MAX), pos: cfg.gs });
            tour_pois.len() - 1
        } else {
            // start at the POI nearest the station, ties to the lower id
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (i, p) in tour_pois.iter().enumerate() {
                let d = p.pos.distance(&cfg.gs);
                if d < best_d {
                    best_d = d;
                    best = i;
                }
            }
            best
        };

        let mut acc = Accountant::new(keep_trace);
        let mut plan_ops = OpsCounter::default();
        let tour = tour_for_strategy(cfg, &tour_pois, start, &mut plan_ops);

        // flight path: station -> tour for patrols, closed loop for ferry
        let mut pts: Vec<Position> = Vec::new();
        let mut poi_vertex: Vec<usize> = Vec::new(); // vertex index per visit position
        if !ferry {
            pts.push(cfg.gs);
        }
        for &p in &tour.order {
            poi_vertex.push(pts.len());
            pts.push(tour_pois[p].pos);
        }
        let path = Polyline::new(pts, ferry);
        let poi_arc: Vec<f64> = poi_vertex.iter().map(|&v| path.cum[v]).collect();

        let k = cfg.uav_count;
        let mut uavs = BTreeMap::new();
        if ferry {
            // initial centralized solve, charged once to the station
            acc.on_planning(GS_ID, plan_ops.0, false, SimTime(0));
            for i in 0..k {
                let id = EntityId(UAV_BASE + i as u32);
                uavs.insert(
                    id,
                    Uav {
                        alive: true,
                        arc: path.total * i as f64 / k as f64,
                        dir: 1.0,
                        seg_lo: 0.0,
                        seg_hi: path.total,
                        roster: BTreeMap::new(),
                        buffer: VecDeque::new(),
                        waiting: None,
                        joining: false,
                        missed_lo: 0,
                        missed_hi: 0,
                        in_range_pois: BTreeSet::new(),
                    },
                );
            }
        } else {
            let roster: BTreeMap<EntityId, RosterEntry> = (0..k)
                .map(|i| {
                    (
                        EntityId(UAV_BASE + i as u32),
                        RosterEntry { alive: true, stamp: SimTime(0) },
                    )
                })
                .collect();
            for i in 0..k {
                let id = EntityId(UAV_BASE + i as u32);
                uavs.insert(
                    id,
                    Uav {
                        alive: true,
                        arc: 0.0,
                        dir: if i % 2 == 0 { 1.0 } else { -1.0 },
                        seg_lo: 0.0,
                        seg_hi: path.total,
                        roster: roster.clone(),
                        buffer: VecDeque::new(),
                        waiting: None,
                        joining: false,
                        missed_lo: 0,
                        missed_hi: 0,
                        in_range_pois: BTreeSet::new(),
                    },
                );
            }
        }

        let mut world = AirWorld {
            cfg: cfg.clone(),
            pois,
            tour_pois,
            path,
            poi_arc,
            tour,
            uavs,
            next_uav_id: UAV_BASE + k as u32,
            engine: Engine::new(),
            acc,
            ferry,
        };
        if !ferry {
            // every agent computes the tour and the split on its own
            let ids: Vec<EntityId> = world.uavs.keys().copied().collect();
            for id in ids {
                world.acc.on_planning(id, plan_ops.0, false, SimTime(0));
                world.apply_roster(id, SimTime(0), false);
                let u = world.uavs.get_mut(&id).unwrap();
                u.arc = (u.seg_lo + u.seg_hi) / 2.0;
            }
        }
        world
    }

    pub fn patrol_length(&self) -> f64 {
        self.path.total
    }

    pub fn tour_len(&self) -> f64 {
        tour_length(&self.tour_pois, &self.tour)
    }

    /// Segment arc bounds for `uav` as seen in its own roster.
    fn apply_roster(&mut self, id: EntityId, t: SimTime, replan: bool) {
        let alive = self.uavs[&id].alive_ids();
        let k = alive.len().max(1);
        let idx = alive.iter().position(|&a| a == id).unwrap_or(0);
        let mut ops = OpsCounter::default();
        let k = k.min(self.tour.order.len());
        let segs = if self.cfg.strategy == Strategy::Dadca2optCut {
            // the cut variant splits by POI count, not by arc length
            let n = self.tour.order.len();
            (0..k)
                .map(|i| crate::tour::Segment {
                    start: i * (n - 1) / k,
                    end: (i + 1) * (n - 1) / k,
                })
                .collect()
        } else {
            partition_tour(&self.tour_pois, &self.tour, k, &mut ops)
                .expect("partitioning a nonempty tour")
        };
        self.acc.on_planning(id, ops.0, replan, t);
        let seg = segs[idx.min(segs.len() - 1)];
        let u = self.uavs.get_mut(&id).unwrap();
        u.seg_lo = if idx == 0 { 0.0 } else { self.poi_arc[seg.start] };
        u.seg_hi = self.poi_arc[seg.end];
        u.arc = u.arc.clamp(u.seg_lo, u.seg_hi);
    }

    fn uav_pos(&self, id: EntityId) -> Position {
        self.path.pos_at(self.uavs[&id].arc)
    }

    pub fn run(mut self) -> Result<AirOutput, MetricsError> {
        self.engine.schedule(self.cfg.step_dt, Ev::Tick).unwrap();
        for poi in 0..self.pois.len() {
            self.engine
                .schedule(self.cfg.sample_period, Ev::Sample { poi })
                .unwrap();
        }
        if let Some(at) = self.cfg.failure_at {
            self.engine.schedule(at, Ev::Failure).unwrap();
        }
        if let Some(at) = self.cfg.reinforce_at {
            self.engine.schedule(at, Ev::Reinforce).unwrap();
        }
        let end = self.cfg.end_time;
        while let Some((t, ev)) = self.engine.pop_until(end) {
            match ev {
                Ev::Tick => self.on_tick(t),
                Ev::Sample { poi } => self.on_sample(t, poi),
                Ev::Failure => self.on_failure(t),
                Ev::Reinforce => self.on_reinforce(t),
            }
        }
        self.engine.finish_at(end);
        let visits = self.acc.visits().clone();
        let (metrics, trace) = self
            .acc
            .summarize(self.engine.events_processed(), self.engine.clock())?;
        Ok(AirOutput { metrics, trace, visits })
    }

    fn on_sample(&mut self, t: SimTime, poi: usize) {
        let next = t + self.cfg.sample_period;
        if next <= self.cfg.end_time {
            self.engine.schedule(next, Ev::Sample { poi }).unwrap();
        }
        let p = &mut self.pois[poi];
        let item = AirItem {
            id: ItemId { origin: EntityId(poi as u32), seq: p.next_seq },
            bytes: self.cfg.payload_bytes,
        };
        p.next_seq += 1;
        self.acc.on_generated(item.id, item.bytes, t);
        if p.buffer.len() >= self.cfg.node_buffer_cap {
            let oldest = p.buffer.pop_front().unwrap();
            self.acc.on_copy_dropped(oldest.id, DropCause::Overflow, t);
        }
        p.buffer.push_back(item);
    }

    fn on_failure(&mut self, t: SimTime) {
        let id = EntityId(UAV_BASE + self.cfg.failure_uav);
        if let Some(u) = self.uavs.get_mut(&id) {
            u.alive = false;
            let lost: Vec<AirItem> = u.buffer.drain(..).collect();
            for item in lost {
                self.acc.on_copy_dropped(item.id, DropCause::Loss, t);
            }
        }
        if self.ferry {
            // centralized re-solve on fleet change
            self.replan_ferry(t);
        }
    }

    fn on_reinforce(&mut self, t: SimTime) {
        let id = EntityId(self.next_uav_id);
        self.next_uav_id += 1;
        if self.ferry {
            self.uavs.insert(
                id,
                Uav {
                    alive: true,
                    arc: 0.0,
                    dir: 1.0,
                    seg_lo: 0.0,
                    seg_hi: self.path.total,
                    roster: BTreeMap::new(),
                    buffer: VecDeque::new(),
                    waiting: None,
                    joining: false,
                    missed_lo: 0,
                    missed_hi: 0,
                    in_range_pois: BTreeSet::new(),
                },
            );
            self.replan_ferry(t);
            return;
        }
        // the joiner launches at the station end with the launch roster
        // plus itself; it holds at arc 0 until its first rendezvous
        let mut roster: BTreeMap<EntityId, RosterEntry> = (0..self.cfg.uav_count)
            .map(|i| {
                (
                    EntityId(UAV_BASE + i as u32),
                    RosterEntry { alive: true, stamp: SimTime(0) },
                )
            })
            .collect();
        roster.insert(id, RosterEntry { alive: true, stamp: t });
        self.uavs.insert(
            id,
            Uav {
                alive: true,
                arc: 0.0,
                dir: 1.0,
                seg_lo: 0.0,
                seg_hi: self.path.total,
                roster,
                buffer: VecDeque::new(),
                waiting: Some((true, t)),
                joining: true,
                missed_lo: 0,
                missed_hi: 0,
                in_range_pois: BTreeSet::new(),
            },
        );
    }

    fn replan_ferry(&mut self, t: SimTime) {
        let mut ops = OpsCounter::default();
        let start = self.tour_pois.len() - 1; // the station vertex
        let nn = nearest_neighbor(&self.tour_pois, start, &mut ops).unwrap();
        let mut loop_tour = nn;
        loop_tour.closed = true;
        let _ = two_opt(&self.tour_pois, &loop_tour, &mut ops);
        self.acc.on_planning(GS_ID, ops.0, true, t);
    }

    fn on_tick(&mut self, t: SimTime) {
        let next = t + self.cfg.step_dt;
        if next <= self.cfg.end_time {
            self.engine.schedule(next, Ev::Tick).unwrap();
        }
        let dt = self.cfg.step_dt.as_secs_f64();
        let ids: Vec<EntityId> = self.uavs.keys().copied().collect();
        for &id in &ids {
            if !self.uavs[&id].alive {
                continue;
            }
            if self.ferry {
                let u = self.uavs.get_mut(&id).unwrap();
                u.arc = (u.arc + self.cfg.uav_speed_mps * dt).rem_euclid(self.path.total);
            } else {
                self.step_patrol(t, id, dt);
            }
            self.collect_and_deliver(t, id);
        }
        if !self.ferry {
            self.check_meetings(t, &ids);
        }
    }

    fn step_patrol(&mut self, t: SimTime, id: EntityId, dt: f64) {
        let u = self.uavs.get_mut(&id).unwrap();
        if let Some((at_hi, since)) = u.waiting {
            if u.joining {
                return; // holds at the station end until first contact
            }
            if t.saturating_sub(since) < self.cfg.meet_wait {
                return;
            }
            // rendezvous window expired: count the miss, maybe declare
            // the neighbor dead, and patrol back
            u.waiting = None;
            u.dir = if at_hi { -1.0 } else { 1.0 };
            let missed = if at_hi {
                u.missed_hi += 1;
                u.missed_hi
            } else {
                u.missed_lo += 1;
                u.missed_lo
            };
            if missed >= self.cfg.miss_threshold {
                let alive = u.alive_ids();
                let idx = alive.iter().position(|&a| a == id).unwrap_or(0);
                let neighbor = if at_hi {
                    alive.get(idx + 1).copied()
                } else {
                    idx.checked_sub(1).map(|i| alive[i])
                };
                if let Some(n) = neighbor {
                    u.roster.insert(n, RosterEntry { alive: false, stamp: t });
                    if at_hi {
                        u.missed_hi = 0;
                    } else {
                        u.missed_lo = 0;
                    }
                    self.apply_roster(id, t, true);
                }
            }
            return;
        }
        u.arc += u.dir * self.cfg.uav_speed_mps * dt;
        if u.arc <= u.seg_lo {
            u.arc = u.seg_lo;
            if u.seg_lo <= 1e-9 {
                u.dir = 1.0; // station end: turn around after delivery
            } else {
                u.waiting = Some((false, t));
            }
        } else if u.arc >= u.seg_hi {
            u.arc = u.seg_hi;
            if (u.seg_hi - self.path.total).abs() <= 1e-9 {
                u.dir = -1.0; // far end of the whole tour
            } else {
                u.waiting = Some((true, t));
            }
        }
    }

    fn collect_and_deliver(&mut self, t: SimTime, id: EntityId) {
        let pos = self.uav_pos(id);
        let range = self.cfg.uav_range_m;
        // pick up everything buffered at POIs in range; log first contact
        for poi in 0..self.pois.len() {
            let within = self.pois[poi].pos.distance(&pos) <= range;
            let u = self.uavs.get_mut(&id).unwrap();
            if within {
                if u.in_range_pois.insert(poi) {
                    self.acc.on_visit(poi as u32, id, t);
                }
                let items: Vec<AirItem> = self.pois[poi].buffer.drain(..).collect();
                let u = self.uavs.get_mut(&id).unwrap();
                for item in items {
                    if u.buffer.len() >= self.cfg.uav_buffer_cap {
                        let oldest = u.buffer.pop_front().unwrap();
                        self.acc.on_copy_dropped(oldest.id, DropCause::Overflow, t);
                    }
                    u.buffer.push_back(item);
                }
            } else {
                u.in_range_pois.remove(&poi);
            }
        }
        if pos.distance(&self.cfg.gs) <= range {
            let items: Vec<AirItem> = self.uavs.get_mut(&id).unwrap().buffer.drain(..).collect();
            for item in items {
                self.acc.on_delivered(item.id, GS_ID, t);
            }
        }
    }

    fn check_meetings(&mut self, t: SimTime, ids: &[EntityId]) {
        let range = self.cfg.uav_range_m;
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                let (ua, ub) = (&self.uavs[&a], &self.uavs[&b]);
                if !ua.alive || !ub.alive {
                    continue;
                }
                if ua.waiting.is_none() && ub.waiting.is_none() {
                    continue;
                }
                // rendezvous distance is measured along the flight path,
                // not through space: a folded tour can bring arc-distant
                // agents spatially close, and those must not hand off
                if (ua.arc - ub.arc).abs() > range {
                    continue;
                }
                self.meet(t, a, b);
            }
        }
    }

    fn meet(&mut self, t: SimTime, a: EntityId, b: EntityId) {
        self.acc.on_meet(a, b, t);
        // gossip: newest stamp per id wins; a stamp tie keeps the
        // pessimistic (dead) entry so failures don't resurrect
        let merged: BTreeMap<EntityId, RosterEntry> = {
            let ra = &self.uavs[&a].roster;
            let rb = &self.uavs[&b].roster;
            let keys: BTreeSet<EntityId> = ra.keys().chain(rb.keys()).copied().collect();
            keys.into_iter()
                .map(|k| {
                    let e = match (ra.get(&k), rb.get(&k)) {
                        (Some(&x), Some(&y)) => {
                            if x.stamp != y.stamp {
                                if x.stamp > y.stamp { x } else { y }
                            } else if !x.alive {
                                x
                            } else {
                                y
                            }
                        }
                        (Some(&x), None) => x,
                        (None, Some(&y)) => y,
                        (None, None) => unreachable!(),
                    };
                    (k, e)
                })
                .collect()
        };
        for id in [a, b] {
            let u = self.uavs.get_mut(&id).unwrap();
            let mut r = merged.clone();
            // an agent always knows itself to be alive
            let me = r.entry(id).or_insert(RosterEntry { alive: true, stamp: t });
            if !me.alive {
                *me = RosterEntry { alive: true, stamp: t };
            }
            let changed = r != u.roster;
            u.roster = r;
            if changed {
                self.apply_roster(id, t, true);
            }
        }
        // data flows to the station-side agent
        let (lo, hi) = {
            let (sa, sb) = (self.uavs[&a].seg_lo, self.uavs[&b].seg_lo);
            if sa < sb || (sa == sb && a < b) { (a, b) } else { (b, a) }
        };
        let moved: Vec<AirItem> = self.uavs.get_mut(&hi).unwrap().buffer.drain(..).collect();
        let u = self.uavs.get_mut(&lo).unwrap();
        for item in moved {
            if u.buffer.len() >= self.cfg.uav_buffer_cap {
                let oldest = u.buffer.pop_front().unwrap();
                self.acc.on_copy_dropped(oldest.id, DropCause::Overflow, t);
            }
            u.buffer.push_back(item);
        }
        // part ways: station-side heads home, the other back out
        {
            let u = self.uavs.get_mut(&lo).unwrap();
            u.dir = -1.0;
            u.waiting = None;
            u.joining = false;
            u.missed_hi = 0;
        }
        {
            let u = self.uavs.get_mut(&hi).unwrap();
            u.dir = 1.0;
            u.waiting = None;
            u.joining = false;
            u.missed_lo = 0;
        }
    }
}

pub fn run_air(cfg: &Scenario, keep_trace: bool) -> Result<AirOutput, MetricsError> {
    AirWorld::new(cfg, keep_trace).run()
}
