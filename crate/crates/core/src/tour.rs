//! Tour construction over points of interest: greedy nearest-neighbor,
//! first-improvement 2-opt, and deterministic arc-length partitioning into
//! per-UAV segments. Distance evaluations are counted as the processing
//! proxy reported per planner invocation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::radio::Position;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PoiId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Poi {
    pub id: PoiId,
    pub pos: Position,
}

/// Ordered visit sequence over POIs. `closed` adds the return leg to the
/// start when measuring length (ferry loops); patrol tours are open paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    pub order: Vec<usize>,
    pub closed: bool,
}

#[derive(Debug, Error, PartialEq)]
pub enum TourError {
    #[error("empty POI list")]
    Empty,
    #[error("segment count {k} exceeds POI count {n}")]
    TooManySegments { k: usize, n: usize },
}

/// Counts elementary planning operations (Euclidean distance evaluations).
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpsCounter(pub u64);

impl OpsCounter {
    pub fn dist(&mut self, pois: &[Poi], a: usize, b: usize) -> f64 {
        self.0 += 1;
        pois[a].pos.distance(&pois[b].pos)
    }
}

pub fn tour_length(pois: &[Poi], tour: &Tour) -> f64 {
    let mut len = 0.0;
    for w in tour.order.windows(2) {
        len += pois[w[0]].pos.distance(&pois[w[1]].pos);
    }
    if tour.closed && tour.order.len() > 1 {
        len += pois[*tour.order.last().unwrap()].pos.distance(&pois[tour.order[0]].pos);
    }
    len
}

/// Greedy nearest-unvisited order from `start` (an index into `pois`).
/// Distance ties go to the lower POI id, so the result is deterministic
/// for permuted-but-equal inputs once POIs are sorted by id.
pub fn nearest_neighbor(
    pois: &[Poi],
    start: usize,
    ops: &mut OpsCounter,
) -> Result<Tour, TourError> {
    if pois.is_empty() {
        return Err(TourError::Empty);
    }
    let n = pois.len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut current = start;
    visited[current] = true;
    order.push(current);
    for _ in 1..n {
        let mut best: Option<(f64, usize)> = None;
        for cand in 0..n {
            if visited[cand] {
                continue;
            }
            let d = ops.dist(pois, current, cand);
            let better = match best {
                None => true,
                Some((bd, bi)) => {
                    d < bd || (d == bd && pois[cand].id < pois[bi].id)
                }
            };
            if better {
                best = Some((d, cand));
            }
        }
        let (_, next) = best.unwrap();
        visited[next] = true;
        order.push(next);
        current = next;
    }
    Ok(Tour { order, closed: false })
}

/// First-improvement 2-opt: repeatedly reverse the first segment whose
/// reversal shortens the tour (scan i ascending, then j) until no move
/// improves. Never lengthens the tour; terminates because accepted moves
/// strictly decrease length over a finite move set.
pub fn two_opt(pois: &[Poi], tour: &Tour, ops: &mut OpsCounter) -> Tour {
    let mut order = tour.order.clone();
    let n = order.len();
    if n < 3 {
        return Tour { order, closed: tour.closed };
    }
    loop {
        let mut improved = false;
        // closed tours anchor position 0 (reversing a segment that spans
        // the wrap point is the complement of one that doesn't)
        let i_lo = usize::from(tour.closed);
        'scan: for i in i_lo..n - 1 {
            for j in (i + 1)..=(n - 1) {
                // move: reverse order[i..=j]
                // affected edges: (i-1, i) and (j, j+1); for open tours an
                // edge at the boundary of the path simply does not exist.
                let before = edge_len(pois, &order, i.wrapping_sub(1), i, tour.closed, ops)
                    + edge_len(pois, &order, j, j + 1, tour.closed, ops);
                let after = edge_len(pois, &order, i.wrapping_sub(1), j, tour.closed, ops)
                    + edge_len_rev(pois, &order, i, j + 1, tour.closed, ops);
                if after + 1e-9 < before {
                    order[i..=j].reverse();
                    improved = true;
                    break 'scan;
                }
            }
        }
        if !improved {
            break;
        }
    }
    Tour { order, closed: tour.closed }
}

// length of the edge (a_idx, b_idx) in visit positions; out-of-range
// positions are the missing path ends (open) or wrap (closed).
fn edge_len(
    pois: &[Poi],
    order: &[usize],
    a_idx: usize,
    b_idx: usize,
    closed: bool,
    ops: &mut OpsCounter,
) -> f64 {
    let n = order.len();
    let a = resolve(a_idx, n, closed);
    let b = resolve(b_idx, n, closed);
    match (a, b) {
        (Some(ai), Some(bi)) => ops.dist(pois, order[ai], order[bi]),
        _ => 0.0,
    }
}

// edge from position a_idx to the node that lands at position a_idx+? after
// reversal: identical helper, separated for readability at call site.
fn edge_len_rev(
    pois: &[Poi],
    order: &[usize],
    i: usize,
    after_j: usize,
    closed: bool,
    ops: &mut OpsCounter,
) -> f64 {
    let n = order.len();
    let a = Some(i);
    let b = resolve(after_j, n, closed);
    match (a, b) {
        (Some(ai), Some(bi)) => ops.dist(pois, order[ai], order[bi]),
        _ => 0.0,
    }
}

fn resolve(idx: usize, n: usize, closed: bool) -> Option<usize> {
    if idx < n {
        Some(idx)
    } else if !closed {
        None // off either end of an open path
    } else if idx == usize::MAX {
        Some(n - 1) // wrapping_sub(1) from position 0
    } else {
        Some(idx % n)
    }
}

/// A contiguous sub-range of a tour assigned to one UAV, in visit
/// positions. Adjacent segments share exactly one boundary POI:
/// segment i covers positions [bounds[i], bounds[i+1]].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
}

/// Split a tour into k segments of equalized arc length (each boundary is
/// the first POI at or past the ideal cumulative length, so segments stay
/// within one leg of total/k). Identical inputs give identical output on
/// every agent; this is the coordination substrate.
pub fn partition_tour(
    pois: &[Poi],
    tour: &Tour,
    k: usize,
    ops: &mut OpsCounter,
) -> Result<Vec<Segment>, TourError> {
    let n = tour.order.len();
    if n == 0 {
        return Err(TourError::Empty);
    }
    if k > n || k == 0 {
        return Err(TourError::TooManySegments { k, n });
    }
    // cumulative arc length at each visit position
    let mut cum = Vec::with_capacity(n);
    cum.push(0.0);
    for w in 0..n - 1 {
        let d = ops.dist(pois, tour.order[w], tour.order[w + 1]);
        cum.push(cum[w] + d);
    }
    let total = *cum.last().unwrap();
    let mut bounds = vec![0usize];
    for i in 1..k {
        let target = total * i as f64 / k as f64;
        let mut b = match cum.iter().position(|&c| c >= target) {
            Some(p) => p,
            None => n - 1,
        };
        let min_b = bounds.last().unwrap() + 1;
        if b < min_b {
            b = min_b;
        }
        let max_b = n - (k - i); // leave room for remaining segments
        if b > max_b {
            b = max_b;
        }
        bounds.push(b);
    }
    bounds.push(n - 1);
    Ok(bounds
        .windows(2)
        .map(|w| Segment { start: w[0], end: w[1] })
        .collect())
}
