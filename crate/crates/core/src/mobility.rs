//! Position-over-time for hubs and placement generators for ground nodes.
//! All functions are pure in (trajectory, t) or (spec, seed).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::des::SimTime;
use crate::radio::Position;
use crate::rng::named_rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Trajectory {
    Static(Position),
    Circular {
        center: Position,
        radius_m: f64,
        speed_mps: f64,
        phase_rad: f64,
    },
    SegmentPatrol {
        a: Position,
        b: Position,
        speed_mps: f64,
    },
}

pub fn position_at(traj: &Trajectory, t: SimTime) -> Position {
    let secs = t.as_secs_f64();
    match traj {
        Trajectory::Static(p) => *p,
        Trajectory::Circular {
            center,
            radius_m,
            speed_mps,
            phase_rad,
        } => {
            let theta = phase_rad + speed_mps * secs / radius_m;
            Position::new(
                center.x + radius_m * theta.cos(),
                center.y + radius_m * theta.sin(),
            )
        }
        Trajectory::SegmentPatrol { a, b, speed_mps } => {
            let leg = a.distance(b);
            if leg == 0.0 {
                return *a;
            }
            // reflected sawtooth over [0, 2*leg)
            let s = (speed_mps * secs) % (2.0 * leg);
            let along = if s <= leg { s } else { 2.0 * leg - s };
            let f = along / leg;
            Position::new(a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f)
        }
    }
}

/// Density classes for node placement. The class-to-count mapping
/// (15/30/50 per reference area) is an artifact decision; the source
/// experiments never define the classes numerically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DensityClass {
    Sparse,
    Dense,
    Full,
}

impl DensityClass {
    pub fn count(self) -> usize {
        match self {
            DensityClass::Sparse => 15,
            DensityClass::Dense => 30,
            DensityClass::Full => 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacementSpec {
    pub area: Rect,
    pub count: usize,
}

/// Uniform-random placement, deterministic for (spec, seed).
pub fn generate_placement(spec: &PlacementSpec, seed: u64) -> Vec<Position> {
    let mut rng = named_rng(seed, "placement");
    (0..spec.count)
        .map(|_| {
            let x = spec.area.x + rng.gen::<f64>() * spec.area.w;
            let y = spec.area.y + rng.gen::<f64>() * spec.area.h;
            Position::new(x, y)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const HUB_R: f64 = 400.0;
    const HUB_V: f64 = 14.0;

    fn circ() -> Trajectory {
        Trajectory::Circular {
            center: Position::new(0.0, 0.0),
            radius_m: HUB_R,
            speed_mps: HUB_V,
            phase_rad: 0.0,
        }
    }

    #[test]
    fn circular_phase_zero_starts_east() {
        let p = position_at(&circ(), SimTime(0));
        assert!((p.x - HUB_R).abs() < 1e-9 && p.y.abs() < 1e-9);
    }

    #[test]
    fn circular_returns_to_start_after_one_period() {
        // closed-form period 2*pi*r/v = 179_519.58 ms
        let period_ms = (2.0 * std::f64::consts::PI * HUB_R / HUB_V * 1000.0).round() as u64;
        assert_eq!(period_ms, 179_520);
        let start = position_at(&circ(), SimTime(0));
        let back = position_at(&circ(), SimTime(period_ms));
        assert!(start.distance(&back) < 1.0, "drift {}", start.distance(&back));
    }

    #[test]
    fn circular_chord_speed_close_to_configured() {
        let dt = SimTime(100);
        for k in 0..50u64 {
            let t = SimTime(k * 977);
            let a = position_at(&circ(), t);
            let b = position_at(&circ(), t + dt);
            let v = a.distance(&b) / dt.as_secs_f64();
            assert!((v - HUB_V).abs() / HUB_V < 0.005, "chord speed {v}");
        }
    }

    #[test]
    fn segment_patrol_bounces() {
        let traj = Trajectory::SegmentPatrol {
            a: Position::new(0.0, 0.0),
            b: Position::new(100.0, 0.0),
            speed_mps: 10.0,
        };
        // 15s at 10 m/s: 150 m traveled, on the return leg at 50 m.
        let p = position_at(&traj, SimTime(15_000));
        assert!((p.x - 50.0).abs() < 1e-9 && p.y.abs() < 1e-9);
    }

    #[test]
    fn placement_deterministic_and_in_area() {
        let spec = PlacementSpec {
            area: Rect { x: 250.0, y: -500.0, w: 170.0, h: 1000.0 },
            count: 50,
        };
        let a = generate_placement(&spec, 9);
        let b = generate_placement(&spec, 9);
        assert_eq!(a.len(), 50);
        for (pa, pb) in a.iter().zip(&b) {
            assert_eq!((pa.x, pa.y), (pb.x, pb.y));
        }
        for p in &a {
            assert!(p.x >= 250.0 && p.x <= 420.0 && p.y >= -500.0 && p.y <= 500.0);
        }
    }

    #[test]
    fn band_overlaps_hub_trajectory() {
        // at least one node within 100 m of some point on the hub circle
        let spec = PlacementSpec {
            area: Rect { x: 250.0, y: -500.0, w: 170.0, h: 1000.0 },
            count: 50,
        };
        let nodes = generate_placement(&spec, 1);
        let hit = nodes.iter().any(|n| {
            (0..360).any(|deg| {
                let th = (deg as f64).to_radians();
                n.distance(&Position::new(HUB_R * th.cos(), HUB_R * th.sin())) <= 100.0
            })
        });
        assert!(hit);
    }

    #[test]
    fn density_counts_increase() {
        assert!(DensityClass::Sparse.count() < DensityClass::Dense.count());
        assert!(DensityClass::Dense.count() < DensityClass::Full.count());
    }
}
