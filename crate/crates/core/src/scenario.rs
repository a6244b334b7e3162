//! Scenario files: flat `key = value` text, `#` comments, unknown keys
//! rejected with the offending key and line. CLI flags reuse the same
//! setter, so every flag mirrors a scenario key (flags win).

use serde::Serialize;
use thiserror::Error;

use crate::des::SimTime;
use crate::mobility::{DensityClass, Rect};
use crate::radio::{Position, RadioParams};
use crate::routing::RelayPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScenarioKind {
    Ground,
    Air,
}

/// UAV fleet strategies. The optimized-tour variants use 2-opt; "cut"
/// builds the tour then truncates per-segment sub-tours, "parted" plans
/// nearest-neighbor within each partition cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Strategy {
    DadcaNaive,
    DadcaParted,
    Dadca2opt,
    Dadca2optCut,
    TspFerry,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::DadcaNaive => "dadca-naive",
            Strategy::DadcaParted => "dadca-parted",
            Strategy::Dadca2opt => "dadca-2opt",
            Strategy::Dadca2optCut => "dadca-2opt-cut",
            Strategy::TspFerry => "tsp-ferry",
        }
    }

    pub fn is_dadca(&self) -> bool {
        !matches!(self, Strategy::TspFerry)
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { key: String, line: usize },
    #[error("line {line}: bad value for `{key}`: {msg}")]
    BadValue { key: String, line: usize, msg: String },
    #[error("line {line}: expected `key = value`")]
    BadSyntax { line: usize },
    #[error("validation: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct Scenario {
    pub name: String,
    pub kind: ScenarioKind,
    pub seed: u64,
    pub end_time: SimTime,

    // radio (shared by ground nodes, hub, UAV-to-ground links)
    pub radio_range_m: f64,
    pub per_hop_latency: SimTime,
    pub loss_prob: f64,
    pub ttl: u8,
    pub dedup_capacity: usize,

    // sensor data generation
    pub sample_period: SimTime,
    pub payload_bytes: u32,
    pub node_buffer_cap: usize,
    pub freshness_limit: SimTime,

    // ground mesh
    pub policy: RelayPolicy,
    pub relay_count: usize,
    pub friend_count: usize,
    pub lpn_count: usize,
    pub sensor_count: usize,
    pub density: Option<DensityClass>,
    pub area: Rect,
    pub wake_interval: SimTime,
    pub wake_duration: SimTime,
    pub aligned_phases: bool,
    pub flush_timeout: SimTime,
    pub hub_center: Position,
    pub hub_radius_m: f64,
    pub hub_speed_mps: f64,
    pub hub_range_m: f64,
    pub discovery_period: SimTime,

    // air fleet
    pub strategy: Strategy,
    pub poi_count: usize,
    pub field: Rect,
    pub gs: Position,
    pub poi_gs_bias: f64,
    pub uav_count: usize,
    pub uav_speed_mps: f64,
    pub uav_range_m: f64,
    pub uav_buffer_cap: usize,
    pub meet_wait: SimTime,
    pub miss_threshold: u32,
    pub step_dt: SimTime,
    pub failure_at: Option<SimTime>,
    pub failure_uav: u32,
    pub reinforce_at: Option<SimTime>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            name: "default".into(),
            kind: ScenarioKind::Ground,
            seed: 1,
            end_time: SimTime(540_000),
            radio_range_m: 100.0,
            per_hop_latency: SimTime(10),
            loss_prob: 0.0,
            ttl: 16,
            dedup_capacity: 512,
            sample_period: SimTime(5_000),
            payload_bytes: 20,
            node_buffer_cap: 100,
            freshness_limit: SimTime(600_000),
            policy: RelayPolicy::Flooding,
            relay_count: 18,
            friend_count: 12,
            lpn_count: 18,
            sensor_count: 2,
            density: None,
            area: Rect { x: 250.0, y: -500.0, w: 170.0, h: 1000.0 },
            wake_interval: SimTime(1_000),
            wake_duration: SimTime(100),
            aligned_phases: false,
            flush_timeout: SimTime(1_200),
            hub_center: Position::new(0.0, 0.0),
            hub_radius_m: 400.0,
            hub_speed_mps: 14.0,
            hub_range_m: 100.0,
            discovery_period: SimTime(1_000),
            strategy: Strategy::Dadca2opt,
            poi_count: 30,
            field: Rect { x: 0.0, y: 0.0, w: 1200.0, h: 800.0 },
            gs: Position::new(0.0, 400.0),
            poi_gs_bias: 0.0,
            uav_count: 8,
            uav_speed_mps: 10.0,
            uav_range_m: 60.0,
            uav_buffer_cap: 1_000_000,
            meet_wait: SimTime(30_000),
            miss_threshold: 2,
            step_dt: SimTime(100),
            failure_at: None,
            failure_uav: 0,
            reinforce_at: None,
        }
    }
}

// mam1 delta is stored separately while parsing because `policy` and
// `delta_ms` may arrive in either order.
#[derive(Debug, Clone)]
pub struct ScenarioBuilder {
    pub scenario: Scenario,
    policy_name: String,
    delta_ms: u64,
}

impl Default for ScenarioBuilder {
    fn default() -> Self {
        ScenarioBuilder {
            scenario: Scenario::default(),
            policy_name: "flooding".into(),
            delta_ms: 500,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T, ScenarioError> {
    value.parse::<T>().map_err(|_| ScenarioError::BadValue {
        key: key.into(),
        line,
        msg: format!("cannot parse `{value}`"),
    })
}

impl ScenarioBuilder {
    pub fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), ScenarioError> {
        let s = &mut self.scenario;
        let bad = |msg: &str| ScenarioError::BadValue {
            key: key.into(),
            line,
            msg: msg.into(),
        };
        match key {
            "name" => s.name = value.to_string(),
            "kind" => {
                s.kind = match value {
                    "ground" => ScenarioKind::Ground,
                    "air" => ScenarioKind::Air,
                    _ => return Err(bad("expected ground|air")),
                }
            }
            "seed" => s.seed = parse_num(key, value, line)?,
            "end_time_ms" => s.end_time = SimTime(parse_num(key, value, line)?),
            "radio_range_m" => s.radio_range_m = parse_num(key, value, line)?,
            "per_hop_latency_ms" => s.per_hop_latency = SimTime(parse_num(key, value, line)?),
            "loss_prob" => s.loss_prob = parse_num(key, value, line)?,
            "ttl" => s.ttl = parse_num(key, value, line)?,
            "dedup_capacity" => s.dedup_capacity = parse_num(key, value, line)?,
            "sample_period_ms" => s.sample_period = SimTime(parse_num(key, value, line)?),
            "payload_bytes" => s.payload_bytes = parse_num(key, value, line)?,
            "node_buffer_cap" => s.node_buffer_cap = parse_num(key, value, line)?,
            "freshness_limit_ms" => s.freshness_limit = SimTime(parse_num(key, value, line)?),
            "policy" => {
                if !matches!(value, "flooding" | "mam0" | "mam1") {
                    return Err(bad("expected flooding|mam0|mam1"));
                }
                self.policy_name = value.to_string();
            }
            "delta_ms" => self.delta_ms = parse_num(key, value, line)?,
            "relay_count" => s.relay_count = parse_num(key, value, line)?,
            "friend_count" => s.friend_count = parse_num(key, value, line)?,
            "lpn_count" => s.lpn_count = parse_num(key, value, line)?,
            "sensor_count" => s.sensor_count = parse_num(key, value, line)?,
            "density" => {
                s.density = Some(match value {
                    "sparse" => DensityClass::Sparse,
                    "dense" => DensityClass::Dense,
                    "full" => DensityClass::Full,
                    _ => return Err(bad("expected sparse|dense|full")),
                })
            }
            "area_x" => s.area.x = parse_num(key, value, line)?,
            "area_y" => s.area.y = parse_num(key, value, line)?,
            "area_w" => s.area.w = parse_num(key, value, line)?,
            "area_h" => s.area.h = parse_num(key, value, line)?,
            "wake_interval_ms" => s.wake_interval = SimTime(parse_num(key, value, line)?),
            "wake_duration_ms" => s.wake_duration = SimTime(parse_num(key, value, line)?),
            "aligned_phases" => s.aligned_phases = parse_bool(key, value, line)?,
            "flush_timeout_ms" => s.flush_timeout = SimTime(parse_num(key, value, line)?),
            "hub_center_x" => s.hub_center.x = parse_num(key, value, line)?,
            "hub_center_y" => s.hub_center.y = parse_num(key, value, line)?,
            "hub_radius_m" => s.hub_radius_m = parse_num(key, value, line)?,
            "hub_speed_mps" => s.hub_speed_mps = parse_num(key, value, line)?,
            "hub_range_m" => s.hub_range_m = parse_num(key, value, line)?,
            "discovery_period_ms" => s.discovery_period = SimTime(parse_num(key, value, line)?),
            "strategy" => {
                s.strategy = match value {
                    "dadca-naive" => Strategy::DadcaNaive,
                    "dadca-parted" => Strategy::DadcaParted,
                    "dadca-2opt" => Strategy::Dadca2opt,
                    "dadca-2opt-cut" => Strategy::Dadca2optCut,
                    "tsp-ferry" => Strategy::TspFerry,
                    _ => {
                        return Err(bad(
                            "expected dadca-naive|dadca-parted|dadca-2opt|dadca-2opt-cut|tsp-ferry",
                        ))
                    }
                }
            }
            "poi_count" => s.poi_count = parse_num(key, value, line)?,
            "field_x" => s.field.x = parse_num(key, value, line)?,
            "field_y" => s.field.y = parse_num(key, value, line)?,
            "field_w" => s.field.w = parse_num(key, value, line)?,
            "field_h" => s.field.h = parse_num(key, value, line)?,
            "gs_x" => s.gs.x = parse_num(key, value, line)?,
            "gs_y" => s.gs.y = parse_num(key, value, line)?,
            "poi_gs_bias" => s.poi_gs_bias = parse_num(key, value, line)?,
            "uav_count" => s.uav_count = parse_num(key, value, line)?,
            "uav_speed_mps" => s.uav_speed_mps = parse_num(key, value, line)?,
            "uav_range_m" => s.uav_range_m = parse_num(key, value, line)?,
            "uav_buffer_cap" => s.uav_buffer_cap = parse_num(key, value, line)?,
            "meet_wait_ms" => s.meet_wait = SimTime(parse_num(key, value, line)?),
            "miss_threshold" => s.miss_threshold = parse_num(key, value, line)?,
            "step_dt_ms" => s.step_dt = SimTime(parse_num(key, value, line)?),
            "failure_at_ms" => s.failure_at = Some(SimTime(parse_num(key, value, line)?)),
            "failure_uav" => s.failure_uav = parse_num(key, value, line)?,
            "reinforce_at_ms" => s.reinforce_at = Some(SimTime(parse_num(key, value, line)?)),
            _ => {
                return Err(ScenarioError::UnknownKey { key: key.into(), line });
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<ScenarioBuilder, ScenarioError> {
        let mut b = ScenarioBuilder::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ScenarioError::BadSyntax { line: line_no });
            };
            b.set(key.trim(), value.trim(), line_no)?;
        }
        Ok(b)
    }

    pub fn build(mut self) -> Result<Scenario, ScenarioError> {
        self.scenario.policy = match self.policy_name.as_str() {
            "flooding" => RelayPolicy::Flooding,
            "mam0" => RelayPolicy::Mam0,
            "mam1" => RelayPolicy::Mam1 { delta: SimTime(self.delta_ms) },
            _ => unreachable!("policy validated at set time"),
        };
        // density scales the ground roster, keeping the role mix ratio
        if let Some(d) = self.scenario.density {
            let s = &mut self.scenario;
            let base = (s.relay_count + s.friend_count + s.lpn_count + s.sensor_count) as f64;
            let f = d.count() as f64 / base;
            s.relay_count = ((s.relay_count as f64 * f).round() as usize).max(1);
            s.friend_count = (s.friend_count as f64 * f).round() as usize;
            s.lpn_count = (s.lpn_count as f64 * f).round() as usize;
            s.sensor_count = d
                .count()
                .saturating_sub(s.relay_count + s.friend_count + s.lpn_count);
            // air scenarios reuse the class as POI count
            s.poi_count = d.count();
        }
        self.scenario.validate()?;
        Ok(self.scenario)
    }
}

fn parse_bool(key: &str, value: &str, line: usize) -> Result<bool, ScenarioError> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(ScenarioError::BadValue {
            key: key.into(),
            line,
            msg: "expected true|false".into(),
        }),
    }
}

impl Scenario {
    pub fn radio_params(&self) -> RadioParams {
        RadioParams {
            range_m: self.radio_range_m,
            per_hop_latency: self.per_hop_latency,
            loss_prob: self.loss_prob,
        }
    }

    pub fn ground_node_count(&self) -> usize {
        self.relay_count + self.friend_count + self.lpn_count + self.sensor_count
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let fail = |msg: String| Err(ScenarioError::Invalid(msg));
        if self.end_time.0 == 0 {
            return fail("end_time_ms must be > 0".into());
        }
        if !(self.radio_range_m > 0.0) {
            return fail("radio_range_m must be > 0".into());
        }
        if !(0.0..=1.0).contains(&self.loss_prob) {
            return fail(format!("loss_prob {} not in [0,1]", self.loss_prob));
        }
        if self.ttl == 0 {
            return fail("ttl must be >= 1".into());
        }
        if self.wake_duration.0 == 0 || self.wake_duration > self.wake_interval {
            return fail("need 0 < wake_duration_ms <= wake_interval_ms".into());
        }
        if let RelayPolicy::Mam1 { delta } = self.policy {
            if delta.0 == 0 {
                return fail("mam1 requires delta_ms > 0".into());
            }
        }
        match self.kind {
            ScenarioKind::Ground => {
                if self.ground_node_count() == 0 {
                    return fail("ground scenario has zero nodes".into());
                }
                if !(self.hub_radius_m > 0.0) || !(self.hub_speed_mps > 0.0) {
                    return fail("hub radius and speed must be > 0".into());
                }
            }
            ScenarioKind::Air => {
                if self.poi_count == 0 {
                    return fail("air scenario has zero POIs".into());
                }
                if self.uav_count == 0 {
                    return fail("air scenario has zero UAVs".into());
                }
                if self.uav_count > self.poi_count {
                    return fail(format!(
                        "uav_count {} exceeds poi_count {}",
                        self.uav_count, self.poi_count
                    ));
                }
                if self.step_dt.0 == 0 {
                    return fail("step_dt_ms must be > 0".into());
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_ground_scenario() {
        let text = "\
# ground run
kind = ground
seed = 7
policy = mam1
delta_ms = 500
end_time_ms = 540000
";
        let s = ScenarioBuilder::parse(text).unwrap().build().unwrap();
        assert_eq!(s.seed, 7);
        assert_eq!(s.policy, RelayPolicy::Mam1 { delta: SimTime(500) });
        assert_eq!(s.end_time, SimTime(540_000));
    }

    #[test]
    fn unknown_key_is_named() {
        let err = ScenarioBuilder::parse("speeed = 10\n").unwrap_err();
        match err {
            ScenarioError::UnknownKey { key, line } => {
                assert_eq!(key, "speeed");
                assert_eq!(line, 1);
            }
            other => panic!("wrong error {other}"),
        }
    }

    #[test]
    fn delta_and_policy_order_independent() {
        let a = ScenarioBuilder::parse("delta_ms = 100\npolicy = mam1\n")
            .unwrap()
            .build()
            .unwrap();
        let b = ScenarioBuilder::parse("policy = mam1\ndelta_ms = 100\n")
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(a.policy, b.policy);
    }

    #[test]
    fn rejects_invalid_duty_cycle() {
        let b = ScenarioBuilder::parse("wake_duration_ms = 2000\nwake_interval_ms = 1000\n").unwrap();
        assert!(b.build().is_err());
    }

    #[test]
    fn density_scales_roster() {
        let s = ScenarioBuilder::parse("density = sparse\n").unwrap().build().unwrap();
        assert_eq!(s.ground_node_count(), 15);
        let s = ScenarioBuilder::parse("density = full\n").unwrap().build().unwrap();
        assert_eq!(s.ground_node_count(), 50);
    }

    #[test]
    fn bad_syntax_reports_line() {
        let err = ScenarioBuilder::parse("kind = ground\nnot a kv line\n").unwrap_err();
        match err {
            ScenarioError::BadSyntax { line } => assert_eq!(line, 2),
            other => panic!("wrong error {other}"),
        }
    }
}
