//! Run configuration. Field names double as the dotted keys of the config
//! file (`energy.initial_j`, `rl.epsilon`, ...). Defaults follow the Table II
//! parameter set wherever it gives a value.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::discovery::HelloSchedule;
use crate::energetics::EnergyParams;
use crate::error::ConfigError;
use crate::link::CollisionParams;
use crate::mobility::{Bounds, Domain, Kinematics, MobilityParams};
use crate::radio::{db_to_linear, ChannelParams};
use crate::routing::{BetaMode, Constraints, RewardWeights};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Baseline {
    #[default]
    Iqmr,
    /// One-step Q-learning with fixed β and γ. It picks the best-valued
    /// candidate without the energy, coverage and collision gates; only the
    /// loop guard remains.
    PlainQ,
}

impl Baseline {
    pub const PLAIN_BETA: f64 = 0.5;
    pub const PLAIN_GAMMA: f64 = 0.9;
    pub const PLAIN_CONSTRAINTS: bool = false;
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SimSection {
    pub num_uavs: u32,
    pub episodes: u64,
    pub seed: u64,
    pub tick_ms: f64,
    pub baseline: Baseline,
    /// Consecutive failed attempts before a packet is dropped.
    pub l2_retry_limit: u32,
    /// Ticks an episode may spend before the packet is abandoned.
    pub tick_budget: u64,
}

impl Default for SimSection {
    fn default() -> Self {
        SimSection { num_uavs: 50, episodes: 8000, seed: 1, tick_ms: 100.0, baseline: Baseline::Iqmr, l2_retry_limit: 3, tick_budget: 600 }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct DomainSection {
    pub radius_m: f64,
    pub height_range_m: [f64; 2],
}

impl Default for DomainSection {
    fn default() -> Self {
        DomainSection { radius_m: 1000.0, height_range_m: [100.0, 300.0] }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct MobilitySection {
    pub alpha: f64,
    pub mean_speed: f64,
    pub speed_range: [f64; 2],
    /// Range of the heading perturbation, radians.
    pub direction_range: [f64; 2],
    pub pitch_range: [f64; 2],
    pub mean_pitch: f64,
    pub pause_time_s: f64,
    /// Flight time between pauses; kinematics are redrawn at this cadence.
    pub update_interval_s: f64,
}

impl Default for MobilitySection {
    fn default() -> Self {
        MobilitySection {
            alpha: 0.75,
            mean_speed: 15.0,
            speed_range: [10.0, 20.0],
            direction_range: [-FRAC_PI_2, FRAC_PI_2],
            pitch_range: [-FRAC_PI_4, FRAC_PI_4],
            mean_pitch: 0.0,
            pause_time_s: 1.0,
            update_interval_s: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ChannelSection {
    pub zeta: f64,
    pub rician_k: f64,
    pub sir_threshold_db: f64,
    pub coverage_samples: u32,
    pub noise_floor: f64,
    pub fading: bool,
    /// Minimum coverage probability for a feasible next hop.
    pub coverage_threshold: f64,
}

/// Received power of a 250 m link at ζ = 2.7, less 20 dB.
pub const DEFAULT_NOISE_FLOOR: f64 = 3.353_991_646_300_662e-9;

impl Default for ChannelSection {
    fn default() -> Self {
        ChannelSection {
            zeta: 2.7,
            rician_k: 1.0,
            sir_threshold_db: 0.0,
            coverage_samples: 200,
            noise_floor: DEFAULT_NOISE_FLOOR,
            fading: true,
            coverage_threshold: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct EnergySection {
    pub initial_j: f64,
    pub threshold_j: f64,
    pub eps_elec: f64,
    pub eps_amp_fs: f64,
    pub eps_amp_mp: f64,
    pub r0_m: f64,
    pub payload_kw_per_kg: f64,
    pub mass_kg: f64,
    pub charge_rate_j_per_s: f64,
}

impl Default for EnergySection {
    fn default() -> Self {
        EnergySection {
            initial_j: 207_792.0,
            threshold_j: 100.0,
            eps_elec: 50e-9,
            eps_amp_fs: 41e-6,
            eps_amp_mp: 100e-12,
            r0_m: 100.0,
            payload_kw_per_kg: 0.217,
            mass_kg: 2.0,
            charge_rate_j_per_s: 2000.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct CollisionSection {
    pub xi_x_m: f64,
    pub xi_y_m: f64,
    pub r_min_m: f64,
    pub p_coll_threshold: f64,
    pub r_scale: f64,
}

impl Default for CollisionSection {
    fn default() -> Self {
        CollisionSection { xi_x_m: 3.0, xi_y_m: 3.0, r_min_m: 1.0, p_coll_threshold: 1.0, r_scale: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct DiscoverySection {
    pub base_hello_interval_ms: f64,
    pub max_hello_interval_ms: f64,
    pub expiry_ms: f64,
    pub sector_half_angle_rad: f64,
}

impl Default for DiscoverySection {
    fn default() -> Self {
        DiscoverySection {
            base_hello_interval_ms: 100.0,
            max_hello_interval_ms: 5000.0,
            expiry_ms: 300.0,
            sector_half_angle_rad: FRAC_PI_4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct RlSection {
    pub weights: [f64; 5],
    pub lambda: f64,
    pub epsilon: f64,
    pub beta_mode: BetaMode,
    pub beta_min: f64,
    pub beta_max: f64,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub max_hops: u32,
}

impl Default for RlSection {
    fn default() -> Self {
        RlSection {
            weights: RewardWeights::DEFAULT.as_array(),
            lambda: 0.9,
            epsilon: 0.1,
            beta_mode: BetaMode::ExpDecay,
            beta_min: 0.01,
            beta_max: 1.0,
            gamma_min: 0.1,
            gamma_max: 0.9,
            max_hops: 25,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct TrafficSection {
    pub packet_bytes: u32,
    /// Link rate used to time one hop attempt.
    pub cbr_rate_bps: f64,
}

impl Default for TrafficSection {
    fn default() -> Self {
        TrafficSection { packet_bytes: 150, cbr_rate_bps: 2e6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum EventKind {
    DepleteEnergy,
    Fragment,
    SweepParam,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Selector {
    #[default]
    RandomFraction,
    TopQHalf,
    BottomQHalf,
    ExplicitIds,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Rejoin {
    #[default]
    AllAtOnce,
    /// A quarter of the cohort returns every 2.5 ms after the outage.
    StaggeredQuarters,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ScenarioEvent {
    pub episode: u64,
    pub kind: EventKind,
    #[cfg_attr(feature = "serde", serde(default))]
    pub selector: Selector,
    #[cfg_attr(feature = "serde", serde(default = "default_fraction"))]
    pub fraction: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub duration_ms: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub rejoin: Rejoin,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Vec::is_empty"))]
    pub ids: Vec<u32>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub param: Option<String>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub value: Option<f64>,
}

#[cfg(feature = "serde")]
fn default_fraction() -> f64 {
    0.2
}

impl ScenarioEvent {
    pub fn new(episode: u64, kind: EventKind) -> Self {
        ScenarioEvent {
            episode,
            kind,
            selector: Selector::RandomFraction,
            fraction: 0.2,
            duration_ms: 0.0,
            rejoin: Rejoin::AllAtOnce,
            ids: Vec::new(),
            param: None,
            value: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ScenarioSection {
    pub event: Vec<ScenarioEvent>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SimConfig {
    pub radio_range_m: f64,
    pub sim: SimSection,
    pub domain: DomainSection,
    pub mobility: MobilitySection,
    pub channel: ChannelSection,
    pub energy: EnergySection,
    pub collision: CollisionSection,
    pub discovery: DiscoverySection,
    pub rl: RlSection,
    pub traffic: TrafficSection,
    pub scenario: ScenarioSection,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            radio_range_m: 250.0,
            sim: SimSection::default(),
            domain: DomainSection::default(),
            mobility: MobilitySection::default(),
            channel: ChannelSection::default(),
            energy: EnergySection::default(),
            collision: CollisionSection::default(),
            discovery: DiscoverySection::default(),
            rl: RlSection::default(),
            traffic: TrafficSection::default(),
            scenario: ScenarioSection::default(),
        }
    }
}

fn check(ok: bool, key: &str, reason: &str) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::range(key, reason))
    }
}

fn ordered(r: [f64; 2], key: &str) -> Result<(), ConfigError> {
    check(r[0].is_finite() && r[1].is_finite() && r[0] <= r[1], key, "must be a finite [min, max] pair with min <= max")
}

fn positive(x: f64, key: &str) -> Result<(), ConfigError> {
    check(x.is_finite() && x > 0.0, key, "must be positive")
}

fn unit(x: f64, key: &str) -> Result<(), ConfigError> {
    check((0.0..=1.0).contains(&x), key, "must lie in [0, 1]")
}

/// Keys a mid-run sweep-param event may not touch.
const STRUCTURAL_KEYS: [&str; 4] = ["sim.num_uavs", "sim.seed", "sim.tick_ms", "sim.episodes"];

fn integral(key: &str, v: f64, min: f64) -> Result<u64, ConfigError> {
    if libm::trunc(v) != v || v < min || v > 1.8e19 {
        return Err(ConfigError::range(key, format!("must be an integer >= {min}")));
    }
    Ok(v as u64)
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.sim;
        check(s.num_uavs >= 1, "sim.num_uavs", "must be at least 1")?;
        positive(s.tick_ms, "sim.tick_ms")?;
        check(libm::trunc(s.tick_ms * 1000.0) == s.tick_ms * 1000.0, "sim.tick_ms", "must be a whole number of microseconds")?;
        check(s.l2_retry_limit >= 1, "sim.l2_retry_limit", "must be at least 1")?;
        check(s.tick_budget >= 1, "sim.tick_budget", "must be at least 1")?;

        positive(self.domain.radius_m, "domain.radius_m")?;
        let [lo, hi] = self.domain.height_range_m;
        check(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi, "domain.height_range_m", "must satisfy 0 < min < max")?;

        let m = &self.mobility;
        check((0.0..=1.0).contains(&m.alpha), "mobility.alpha", "must lie in [0, 1]")?;
        ordered(m.speed_range, "mobility.speed_range")?;
        check(m.speed_range[0] >= 0.0, "mobility.speed_range", "speeds must be non-negative")?;
        check(
            m.mean_speed >= m.speed_range[0] && m.mean_speed <= m.speed_range[1],
            "mobility.mean_speed",
            "must lie inside mobility.speed_range",
        )?;
        ordered(m.direction_range, "mobility.direction_range")?;
        ordered(m.pitch_range, "mobility.pitch_range")?;
        check(
            m.pitch_range[0] >= -FRAC_PI_2 && m.pitch_range[1] <= FRAC_PI_2,
            "mobility.pitch_range",
            "must stay within [-pi/2, pi/2]",
        )?;
        check(
            m.mean_pitch >= m.pitch_range[0] && m.mean_pitch <= m.pitch_range[1],
            "mobility.mean_pitch",
            "must lie inside mobility.pitch_range",
        )?;
        check(m.pause_time_s.is_finite() && m.pause_time_s >= 0.0, "mobility.pause_time_s", "must be non-negative")?;
        positive(m.update_interval_s, "mobility.update_interval_s")?;

        let c = &self.channel;
        positive(c.zeta, "channel.zeta")?;
        check(c.rician_k.is_finite() && c.rician_k >= 0.0, "channel.rician_k", "must be non-negative")?;
        check(c.sir_threshold_db.is_finite(), "channel.sir_threshold_db", "must be finite")?;
        check(c.coverage_samples >= 1, "channel.coverage_samples", "must be at least 1")?;
        positive(c.noise_floor, "channel.noise_floor")?;
        unit(c.coverage_threshold, "channel.coverage_threshold")?;

        let e = &self.energy;
        positive(e.initial_j, "energy.initial_j")?;
        positive(e.threshold_j, "energy.threshold_j")?;
        check(e.threshold_j < e.initial_j, "energy.threshold_j", "must be below energy.initial_j")?;
        for (x, key) in [
            (e.eps_elec, "energy.eps_elec"),
            (e.eps_amp_fs, "energy.eps_amp_fs"),
            (e.eps_amp_mp, "energy.eps_amp_mp"),
            (e.payload_kw_per_kg, "energy.payload_kw_per_kg"),
            (e.mass_kg, "energy.mass_kg"),
        ] {
            check(x.is_finite() && x >= 0.0, key, "must be non-negative")?;
        }
        positive(e.r0_m, "energy.r0_m")?;
        positive(e.charge_rate_j_per_s, "energy.charge_rate_j_per_s")?;

        let k = &self.collision;
        positive(k.xi_x_m, "collision.xi_x_m")?;
        positive(k.xi_y_m, "collision.xi_y_m")?;
        positive(k.r_min_m, "collision.r_min_m")?;
        unit(k.p_coll_threshold, "collision.p_coll_threshold")?;
        positive(k.r_scale, "collision.r_scale")?;

        let d = &self.discovery;
        positive(d.base_hello_interval_ms, "discovery.base_hello_interval_ms")?;
        check(
            d.max_hello_interval_ms >= d.base_hello_interval_ms,
            "discovery.max_hello_interval_ms",
            "must be at least discovery.base_hello_interval_ms",
        )?;
        positive(d.expiry_ms, "discovery.expiry_ms")?;
        check(
            d.sector_half_angle_rad > 0.0 && d.sector_half_angle_rad <= FRAC_PI_2,
            "discovery.sector_half_angle_rad",
            "must lie in (0, pi/2]",
        )?;
        positive(self.radio_range_m, "radio_range_m")?;

        let r = &self.rl;
        RewardWeights::new(r.weights).map_err(|err| ConfigError::range("rl.weights", format!("{err}")))?;
        unit(r.lambda, "rl.lambda")?;
        unit(r.epsilon, "rl.epsilon")?;
        check(r.beta_min > 0.0 && r.beta_min <= 1.0, "rl.beta_min", "must lie in (0, 1]")?;
        check(r.beta_max >= r.beta_min && r.beta_max <= 1.0, "rl.beta_max", "must lie in [rl.beta_min, 1]")?;
        check((0.0..1.0).contains(&r.gamma_min), "rl.gamma_min", "must lie in [0, 1)")?;
        check(r.gamma_max >= r.gamma_min && r.gamma_max < 1.0, "rl.gamma_max", "must lie in [rl.gamma_min, 1)")?;
        check(r.max_hops >= 1, "rl.max_hops", "must be at least 1")?;

        check(self.traffic.packet_bytes >= 1, "traffic.packet_bytes", "must be at least 1")?;
        positive(self.traffic.cbr_rate_bps, "traffic.cbr_rate_bps")?;

        for (i, ev) in self.scenario.event.iter().enumerate() {
            self.validate_event(i, ev)?;
        }
        Ok(())
    }

    fn validate_event(&self, i: usize, ev: &ScenarioEvent) -> Result<(), ConfigError> {
        let key = |field: &str| format!("scenario.event[{i}].{field}");
        if ev.kind != EventKind::SweepParam && ev.selector == Selector::RandomFraction {
            check(ev.fraction > 0.0 && ev.fraction <= 1.0, &key("fraction"), "must lie in (0, 1]")?;
        }
        if ev.kind == EventKind::Fragment {
            check(ev.duration_ms.is_finite() && ev.duration_ms > 0.0, &key("duration_ms"), "must be positive")?;
        }
        if ev.selector == Selector::ExplicitIds && ev.kind != EventKind::SweepParam {
            check(!ev.ids.is_empty(), &key("ids"), "explicit-ids needs at least one id")?;
            check(ev.ids.iter().all(|&id| id < self.sim.num_uavs), &key("ids"), "ids must be below sim.num_uavs")?;
        }
        if ev.kind == EventKind::SweepParam {
            let (Some(param), Some(value)) = (&ev.param, ev.value) else {
                return Err(ConfigError::range(&key("param"), "sweep-param needs both `param` and `value`"));
            };
            check(
                !STRUCTURAL_KEYS.contains(&param.as_str()),
                &key("param"),
                "cannot change the fleet size, seed, tick or run length mid-run",
            )?;
            let mut probe = self.clone();
            probe.scenario.event.clear();
            probe.set_numeric(param, value)?;
            probe.validate()?;
        }
        Ok(())
    }

    /// Overrides one numeric key by its dotted name.
    pub fn set_numeric(&mut self, key: &str, v: f64) -> Result<(), ConfigError> {
        match key {
            "radio_range_m" => self.radio_range_m = v,
            "sim.num_uavs" => self.sim.num_uavs = integral(key, v, 1.0)? as u32,
            "sim.episodes" => self.sim.episodes = integral(key, v, 0.0)?,
            "sim.seed" => self.sim.seed = integral(key, v, 0.0)?,
            "sim.tick_ms" => self.sim.tick_ms = v,
            "sim.l2_retry_limit" => self.sim.l2_retry_limit = integral(key, v, 1.0)? as u32,
            "sim.tick_budget" => self.sim.tick_budget = integral(key, v, 1.0)?,
            "domain.radius_m" => self.domain.radius_m = v,
            "mobility.alpha" => self.mobility.alpha = v,
            "mobility.mean_speed" => self.mobility.mean_speed = v,
            "mobility.mean_pitch" => self.mobility.mean_pitch = v,
            "mobility.pause_time_s" => self.mobility.pause_time_s = v,
            "mobility.update_interval_s" => self.mobility.update_interval_s = v,
            "channel.zeta" => self.channel.zeta = v,
            "channel.rician_k" => self.channel.rician_k = v,
            "channel.sir_threshold_db" => self.channel.sir_threshold_db = v,
            "channel.coverage_samples" => self.channel.coverage_samples = integral(key, v, 1.0)? as u32,
            "channel.noise_floor" => self.channel.noise_floor = v,
            "channel.coverage_threshold" => self.channel.coverage_threshold = v,
            "energy.initial_j" => self.energy.initial_j = v,
            "energy.threshold_j" => self.energy.threshold_j = v,
            "energy.eps_elec" => self.energy.eps_elec = v,
            "energy.eps_amp_fs" => self.energy.eps_amp_fs = v,
            "energy.eps_amp_mp" => self.energy.eps_amp_mp = v,
            "energy.r0_m" => self.energy.r0_m = v,
            "energy.payload_kw_per_kg" => self.energy.payload_kw_per_kg = v,
            "energy.mass_kg" => self.energy.mass_kg = v,
            "energy.charge_rate_j_per_s" => self.energy.charge_rate_j_per_s = v,
            "collision.xi_x_m" => self.collision.xi_x_m = v,
            "collision.xi_y_m" => self.collision.xi_y_m = v,
            "collision.r_min_m" => self.collision.r_min_m = v,
            "collision.p_coll_threshold" => self.collision.p_coll_threshold = v,
            "collision.r_scale" => self.collision.r_scale = v,
            "discovery.base_hello_interval_ms" => self.discovery.base_hello_interval_ms = v,
            "discovery.max_hello_interval_ms" => self.discovery.max_hello_interval_ms = v,
            "discovery.expiry_ms" => self.discovery.expiry_ms = v,
            "discovery.sector_half_angle_rad" => self.discovery.sector_half_angle_rad = v,
            "rl.lambda" => self.rl.lambda = v,
            "rl.epsilon" => self.rl.epsilon = v,
            "rl.beta_min" => self.rl.beta_min = v,
            "rl.beta_max" => self.rl.beta_max = v,
            "rl.gamma_min" => self.rl.gamma_min = v,
            "rl.gamma_max" => self.rl.gamma_max = v,
            "rl.max_hops" => self.rl.max_hops = integral(key, v, 1.0)? as u32,
            "traffic.packet_bytes" => self.traffic.packet_bytes = integral(key, v, 1.0)? as u32,
            "traffic.cbr_rate_bps" => self.traffic.cbr_rate_bps = v,
            _ => return Err(ConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }

    /// Reads back a numeric key, `None` when the key is unknown.
    pub fn get_numeric(&self, key: &str) -> Option<f64> {
        Some(match key {
            "radio_range_m" => self.radio_range_m,
            "sim.num_uavs" => self.sim.num_uavs as f64,
            "sim.episodes" => self.sim.episodes as f64,
            "sim.seed" => self.sim.seed as f64,
            "sim.tick_ms" => self.sim.tick_ms,
            "sim.l2_retry_limit" => self.sim.l2_retry_limit as f64,
            "sim.tick_budget" => self.sim.tick_budget as f64,
            "domain.radius_m" => self.domain.radius_m,
            "mobility.alpha" => self.mobility.alpha,
            "mobility.mean_speed" => self.mobility.mean_speed,
            "mobility.mean_pitch" => self.mobility.mean_pitch,
            "mobility.pause_time_s" => self.mobility.pause_time_s,
            "mobility.update_interval_s" => self.mobility.update_interval_s,
            "channel.zeta" => self.channel.zeta,
            "channel.rician_k" => self.channel.rician_k,
            "channel.sir_threshold_db" => self.channel.sir_threshold_db,
            "channel.coverage_samples" => self.channel.coverage_samples as f64,
            "channel.noise_floor" => self.channel.noise_floor,
            "channel.coverage_threshold" => self.channel.coverage_threshold,
            "energy.initial_j" => self.energy.initial_j,
            "energy.threshold_j" => self.energy.threshold_j,
            "energy.eps_elec" => self.energy.eps_elec,
            "energy.eps_amp_fs" => self.energy.eps_amp_fs,
            "energy.eps_amp_mp" => self.energy.eps_amp_mp,
            "energy.r0_m" => self.energy.r0_m,
            "energy.payload_kw_per_kg" => self.energy.payload_kw_per_kg,
            "energy.mass_kg" => self.energy.mass_kg,
            "energy.charge_rate_j_per_s" => self.energy.charge_rate_j_per_s,
            "collision.xi_x_m" => self.collision.xi_x_m,
            "collision.xi_y_m" => self.collision.xi_y_m,
            "collision.r_min_m" => self.collision.r_min_m,
            "collision.p_coll_threshold" => self.collision.p_coll_threshold,
            "collision.r_scale" => self.collision.r_scale,
            "discovery.base_hello_interval_ms" => self.discovery.base_hello_interval_ms,
            "discovery.max_hello_interval_ms" => self.discovery.max_hello_interval_ms,
            "discovery.expiry_ms" => self.discovery.expiry_ms,
            "discovery.sector_half_angle_rad" => self.discovery.sector_half_angle_rad,
            "rl.lambda" => self.rl.lambda,
            "rl.epsilon" => self.rl.epsilon,
            "rl.beta_min" => self.rl.beta_min,
            "rl.beta_max" => self.rl.beta_max,
            "rl.gamma_min" => self.rl.gamma_min,
            "rl.gamma_max" => self.rl.gamma_max,
            "rl.max_hops" => self.rl.max_hops as f64,
            "traffic.packet_bytes" => self.traffic.packet_bytes as f64,
            "traffic.cbr_rate_bps" => self.traffic.cbr_rate_bps,
            _ => return None,
        })
    }

    pub fn tick_us(&self) -> u64 {
        libm::round(self.sim.tick_ms * 1000.0) as u64
    }

    pub fn tick_seconds(&self) -> f64 {
        self.sim.tick_ms / 1000.0
    }

    pub fn packet_bits(&self) -> f64 {
        f64::from(self.traffic.packet_bytes) * 8.0
    }

    /// Air time of one hop attempt, at least 1 µs.
    pub fn hop_time_us(&self) -> u64 {
        (libm::round(self.packet_bits() / self.traffic.cbr_rate_bps * 1e6) as u64).max(1)
    }

    pub fn ms_to_ticks(&self, ms: f64) -> u64 {
        libm::floor(ms / self.sim.tick_ms + 1e-9) as u64
    }

    pub fn domain(&self) -> Domain {
        Domain { radius: self.domain.radius_m, h_min: self.domain.height_range_m[0], h_max: self.domain.height_range_m[1] }
    }

    pub fn mobility_params(&self) -> MobilityParams {
        let m = &self.mobility;
        MobilityParams {
            alpha: m.alpha,
            mean: Kinematics::new(m.mean_speed, 0.0, m.mean_pitch),
            speed: Bounds::new(m.speed_range[0], m.speed_range[1]),
            direction: Bounds::new(m.direction_range[0], m.direction_range[1]),
            pitch: Bounds::new(m.pitch_range[0], m.pitch_range[1]),
            pause_time: m.pause_time_s,
        }
    }

    pub fn channel_params(&self) -> ChannelParams {
        let c = &self.channel;
        ChannelParams {
            zeta: c.zeta,
            rician_k: c.rician_k,
            sir_threshold: db_to_linear(c.sir_threshold_db),
            coverage_samples: c.coverage_samples,
            noise_floor: c.noise_floor,
            fading: c.fading,
        }
    }

    pub fn energy_params(&self) -> EnergyParams {
        let e = &self.energy;
        EnergyParams {
            eps_elec: e.eps_elec,
            eps_amp_fs: e.eps_amp_fs,
            eps_amp_mp: e.eps_amp_mp,
            r0: e.r0_m,
            payload_w_per_kg: e.payload_kw_per_kg * 1000.0,
            mass_kg: e.mass_kg,
            initial: e.initial_j,
            threshold: e.threshold_j,
            charge_rate: e.charge_rate_j_per_s,
        }
    }

    pub fn collision_params(&self) -> CollisionParams {
        let k = &self.collision;
        CollisionParams { xi_x: k.xi_x_m, xi_y: k.xi_y_m, r_min: k.r_min_m, threshold: k.p_coll_threshold, r_scale: k.r_scale }
    }

    pub fn hello_schedule(&self) -> HelloSchedule {
        let d = &self.discovery;
        HelloSchedule {
            tick_seconds: self.tick_seconds(),
            base_ticks: self.ms_to_ticks(d.base_hello_interval_ms).max(1),
            max_ticks: self.ms_to_ticks(d.max_hello_interval_ms).max(1),
        }
    }

    pub fn expiry_ticks(&self) -> u64 {
        self.ms_to_ticks(self.discovery.expiry_ms)
    }

    pub fn constraints(&self) -> Constraints {
        Constraints {
            energy_threshold: self.energy.threshold_j,
            coverage_threshold: self.channel.coverage_threshold,
            collision_threshold: self.collision.p_coll_threshold,
            r_min: self.collision.r_min_m,
            enforce: true,
        }
    }

    /// Panics on invalid weights; call [`SimConfig::validate`] first.
    pub fn weights(&self) -> RewardWeights {
        RewardWeights::new(self.rl.weights).expect("validated reward weights")
    }
}
